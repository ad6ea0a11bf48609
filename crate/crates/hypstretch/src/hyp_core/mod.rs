//! Upper half-plane primitives: points, ideal points, isometries, geodesics
//! and horocycles, together with the metric operations built on them.

mod geodesic;
pub mod hyperboloid;
mod horocycle;
mod isometry;
mod point;

pub use geodesic::{
    common_perpendicular, dist_between_geodesics, foot_of_perpendicular, geodesic_through, geodesic_to_ideal, intersect_geodesics,
    perpendicular_at, perpendicular_bisector, point_at_signed_arc, Geodesic,
};
pub use horocycle::{horocycle_arc, Horocycle};
pub use isometry::{translation_length, Isometry};
pub use point::{dist, midpoint, IdealPoint, UhpPoint};

use num_complex::Complex64;
use thiserror::Error;

pub type Cx = Complex64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error("INVALID_POINT: imaginary part must be positive (got y = {0})")]
    InvalidPoint(f64),
    #[error("DEGENERATE_MATRIX: determinant {0} is not positive")]
    DegenerateMatrix(f64),
    #[error("DEGENERATE_GEODESIC: endpoints coincide")]
    DegenerateGeodesic,
    #[error("INTERSECTING_GEODESICS: no common perpendicular exists")]
    IntersectingGeodesics,
    #[error("NO_INTERSECTION: horocycle misses the geodesic")]
    NoIntersection,
    #[error("NOT_ON_GEODESIC: point is not on the geodesic (offset {0})")]
    NotOnGeodesic(f64),
}

pub type GeomResult<T> = Result<T, GeomError>;
