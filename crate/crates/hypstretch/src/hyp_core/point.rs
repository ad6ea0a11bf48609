use super::{Cx, GeomError, GeomResult};
use crate::tol::TOL;
use serde::{Deserialize, Serialize};
use std::fmt;

/// A point `x + iy` of the upper half-plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UhpPoint {
    pub x: f64,
    pub y: f64,
}

impl UhpPoint {
    pub fn new(x: f64, y: f64) -> GeomResult<Self> {
        if y > 0.0 && y.is_finite() && x.is_finite() {
            Ok(Self { x, y })
        } else {
            Err(GeomError::InvalidPoint(y))
        }
    }

    /// Construct without validation; callers guarantee `y > 0`.
    pub(crate) fn raw(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn i() -> Self {
        Self { x: 0.0, y: 1.0 }
    }

    pub fn to_cx(self) -> Cx {
        Cx::new(self.x, self.y)
    }

    pub fn from_cx(z: Cx) -> Self {
        Self { x: z.re, y: z.im }
    }

    /// Equality up to hyperbolic distance `tol`.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        dist(*self, *other) <= tol
    }
}

/// A point of the boundary at infinity: a real number or the symbol ∞.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum IdealPoint {
    Finite(f64),
    Infinity,
}

impl IdealPoint {
    pub fn is_infinite(&self) -> bool {
        matches!(self, IdealPoint::Infinity)
    }

    pub fn finite(&self) -> Option<f64> {
        match self {
            IdealPoint::Finite(v) => Some(*v),
            IdealPoint::Infinity => None,
        }
    }

    /// Comparison with absolute tolerance on finite values; ∞ only equals ∞.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        match (self, other) {
            (IdealPoint::Infinity, IdealPoint::Infinity) => true,
            (IdealPoint::Finite(a), IdealPoint::Finite(b)) => (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs())),
            _ => false,
        }
    }
}

impl fmt::Display for IdealPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IdealPoint::Finite(v) => write!(f, "{v}"),
            IdealPoint::Infinity => write!(f, "inf"),
        }
    }
}

/// Hyperbolic distance, `arccosh(1 + |p-q|^2 / (2 p.y q.y))` written in the
/// numerically stable `2 asinh` form.
pub fn dist(p: UhpPoint, q: UhpPoint) -> f64 {
    let dx = p.x - q.x;
    let dy = p.y - q.y;
    let chord = (dx * dx + dy * dy).sqrt();
    2.0 * (chord / (2.0 * (p.y * q.y).sqrt())).asinh()
}

/// Midpoint of the geodesic segment from `p` to `q`.
pub fn midpoint(p: UhpPoint, q: UhpPoint) -> UhpPoint {
    let d = dist(p, q);
    if d <= TOL * 1e-3 {
        return p;
    }
    let g = super::geodesic_through(p, q).expect("distinct points span a geodesic");
    super::point_at_signed_arc(&g, p, d / 2.0).expect("p lies on the geodesic through p and q")
}
