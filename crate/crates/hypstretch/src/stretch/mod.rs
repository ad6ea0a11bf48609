//! Generalized stretch lines: boundary block stretching, auxiliary cylinders,
//! the ε and ρ cocycles on the triangulated part and assembly of the
//! stretched surface.

mod cocycle;
mod cylinder;
mod report;

pub use crate::pieces::displacement;
pub use cocycle::{epsilon_cocycle, stretch_cocycle, triangulated_part, StretchCocycle, TrackModel, TriangulatedPart, XaEdge};
pub use cylinder::{
    build_cylinder, horocyclic_shift, stretch_difference_check, stretched_cylinder_shears, CylEdge, CylTriangle, CylinderModel, EdgeRole, SideTag,
    SpikeFan, SpikeResidual,
};
pub use report::{verify, Check, VerifyOptions, VerifyReport};

use crate::pieces::{EdgeKind, Piece};
use crate::surface::{classify, validate, BlockDecomposition, SurfaceError, Surface};
use crate::traintrack::TrackError;
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StretchError {
    #[error("INVALID_SURFACE: {}", .0.join("; "))]
    InvalidSurface(Vec<String>),
    #[error("NOT_A_CROWN: {0}")]
    NotACrown(String),
    #[error("NON_TRIANGLE_PIECE: `{0}`")]
    NonTrianglePiece(String),
    #[error("SWITCH_VIOLATION: spike {spike} has residual {residual:e}")]
    SwitchViolation { spike: String, residual: f64 },
    #[error("GEOMETRY: {0}")]
    Geometry(String),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error(transparent)]
    Track(#[from] TrackError),
}

pub type StretchResult<T> = Result<T, StretchError>;

fn is_triangle(s: &Surface, p: usize) -> bool {
    matches!(s.pieces[p], Piece::Triangle)
}

/// Whether gluing `k` joins a quad to a triangle along a crown edge.
pub(crate) fn is_crown_gluing(s: &Surface, k: usize) -> bool {
    let g = &s.gluings[k];
    is_triangle(s, g.from.0) != is_triangle(s, g.to.0)
}

fn scaled_shear(s: &Surface, k: usize, factor: f64) -> Option<f64> {
    let g = &s.gluings[k];
    let bi = s.realization(g.from.0).edge(g.from.1).is_some_and(|e| e.kind == EdgeKind::BiInfinite);
    match g.shear {
        Some(x) if bi => Some(factor * x),
        other => other,
    }
}

/// `B^t`: stretched piece parameters and every bi-infinite shear times `e^t`
/// except the crown-edge shears, which are left as they are.
pub fn boundary_block_stretch(s: &Surface, t: f64) -> StretchResult<Surface> {
    let k = t.exp();
    let pieces = s.pieces.iter().map(|p| p.stretch_params(t)).collect();
    let shears = (0..s.gluings.len()).map(|i| if is_crown_gluing(s, i) { s.gluings[i].shear } else { scaled_shear(s, i, k) }).collect();
    Ok(s.with_parameters(pieces, shears)?)
}

pub fn cylinders(s: &Surface, dec: &BlockDecomposition) -> StretchResult<Vec<CylinderModel>> {
    dec.crowns.par_iter().map(|c| build_cylinder(s, c)).collect()
}

/// A finite-length leaf or a closed leaf, the support of a transverse measure.
pub fn measurable_sublamination(s: &Surface) -> StretchResult<bool> {
    let (top, _) = s.analyze()?;
    Ok(!top.finite_leaves.is_empty() || !top.closed_leaves.is_empty())
}

fn require_valid(s: &Surface) -> StretchResult<()> {
    let r = validate(s);
    if r.valid {
        Ok(())
    } else {
        Err(StretchError::InvalidSurface(r.violations))
    }
}

/// `X_λ^t`. Crown-edge shears are solved from `ρ^t(b) = e^t ρ⁰(b) + ε^t(b)`
/// and the realized offset of the stretched quad.
pub fn generalized_stretch(s: &Surface, t: f64) -> StretchResult<Surface> {
    require_valid(s)?;
    let dec = classify(s)?;
    let k = t.exp();
    let bt = boundary_block_stretch(s, t)?;
    let mut shears: Vec<Option<f64>> = bt.gluings.iter().map(|g| g.shear).collect();
    if !dec.crowns.is_empty() {
        let m0 = cylinders(s, &dec)?;
        let mt = cylinders(&bt, &classify(&bt)?)?;
        for (a, b) in m0.iter().zip(&mt) {
            for &q in &a.crown.quads {
                let (e0, et) = (a.crown_edge(q).expect("crown quad"), b.crown_edge(q).expect("crown quad"));
                let g = s.partner((q, crate::pieces::EdgeLabel::L2)).expect("crown edge is glued").gluing;
                let sigma = s.gluings[g].shear.unwrap_or(0.0);
                let rho_t = k * a.edges[e0].shear + cocycle::epsilon_crown(s, q, t);
                // the cylinder on B^t was measured with the old crown shear
                let offset_t = b.edges[et].shear - sigma;
                shears[g] = Some(rho_t - offset_t);
            }
        }
    }
    Ok(s.with_parameters(bt.pieces.clone(), shears)?)
}

/// Thurston's stretch of a surface made of ideal triangles.
pub fn thurston_stretch(s: &Surface, t: f64) -> StretchResult<Surface> {
    if let Some(p) = (0..s.pieces.len()).find(|&p| !is_triangle(s, p)) {
        return Err(StretchError::NonTrianglePiece(s.ids[p].clone()));
    }
    let k = t.exp();
    Ok(s.with_parameters(s.pieces.clone(), s.gluings.iter().map(|g| g.shear.map(|x| k * x)).collect())?)
}
