//! The four piece types, their canonical realizations, centers, special
//! points, horocyclic foliations and stretch maps.

mod foliation;
pub mod lipschitz;
mod realize;
mod special;
mod stretch_map;

pub use foliation::{foliation, foliation_image, Foliation, LeafCoord, Sector};
pub use realize::{centers, edge_lengths, realize, Edge, EdgeKind, EdgeLength, PieceRealization, Vertex};
pub use special::{special_points, SignedDistance, SpecialPoints};
pub use stretch_map::{averaged_stretch_eval, pentagon_deck, triangle_stretch, AveragedStretch, UNROLL_CAP};

use crate::hyp_core::GeomError;
use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PieceError {
    #[error("INVALID_SHEARS: {0}")]
    InvalidShears(String),
    #[error("NO_CENTER: {0} pieces have no bi-infinite edge center")]
    NoCenter(&'static str),
    #[error("OUT_OF_PIECE: point ({0}, {1}) is not in the piece")]
    OutOfPiece(f64, f64),
    #[error("HEXAGON_UNSUPPORTED: pointwise stretch maps are not evaluated on hexagons")]
    HexagonUnsupported,
    #[error("NOT_IN_SUPPORT: {0}")]
    NotInSupport(String),
    #[error("UNROLL_LIMIT: lift did not reach the fundamental domain after {0} deck steps")]
    UnrollLimit(usize),
    #[error(transparent)]
    Geom(#[from] GeomError),
}

pub type PieceResult<T> = Result<T, PieceError>;

/// Edge labels: `l*` are lamination leaves, `a*` boundary segments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EdgeLabel {
    #[serde(rename = "l1")]
    L1,
    #[serde(rename = "l2")]
    L2,
    #[serde(rename = "l3")]
    L3,
    #[serde(rename = "a1")]
    A1,
    #[serde(rename = "a2")]
    A2,
    #[serde(rename = "a3")]
    A3,
}

impl EdgeLabel {
    pub const ALL: [EdgeLabel; 6] = [EdgeLabel::L1, EdgeLabel::L2, EdgeLabel::L3, EdgeLabel::A1, EdgeLabel::A2, EdgeLabel::A3];

    pub fn as_str(&self) -> &'static str {
        match self {
            EdgeLabel::L1 => "l1",
            EdgeLabel::L2 => "l2",
            EdgeLabel::L3 => "l3",
            EdgeLabel::A1 => "a1",
            EdgeLabel::A2 => "a2",
            EdgeLabel::A3 => "a3",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        EdgeLabel::ALL.into_iter().find(|l| l.as_str() == s)
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, EdgeLabel::L1 | EdgeLabel::L2 | EdgeLabel::L3)
    }
}

impl fmt::Display for EdgeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A geometric piece with its shear parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Piece {
    Triangle,
    Quad { s: f64 },
    Pentagon { s1: f64, s2: f64 },
    Hexagon { s1: f64, s2: f64, s3: f64 },
}

impl Piece {
    pub fn quad(s: f64) -> PieceResult<Self> {
        Piece::Quad { s }.validated()
    }

    pub fn pentagon(s1: f64, s2: f64) -> PieceResult<Self> {
        Piece::Pentagon { s1, s2 }.validated()
    }

    pub fn hexagon(s1: f64, s2: f64, s3: f64) -> PieceResult<Self> {
        Piece::Hexagon { s1, s2, s3 }.validated()
    }

    /// Build from a kind name and shear list as used in surface files.
    pub fn from_kind(kind: &str, shears: &[f64]) -> PieceResult<Self> {
        let want = match kind {
            "triangle" => 0,
            "quad" => 1,
            "pentagon" => 2,
            "hexagon" => 3,
            other => return Err(PieceError::InvalidShears(format!("unknown piece kind `{other}`"))),
        };
        if shears.len() != want {
            return Err(PieceError::InvalidShears(format!("{kind} takes {want} shears, got {}", shears.len())));
        }
        match kind {
            "triangle" => Ok(Piece::Triangle),
            "quad" => Piece::quad(shears[0]),
            "pentagon" => Piece::pentagon(shears[0], shears[1]),
            _ => Piece::hexagon(shears[0], shears[1], shears[2]),
        }
    }

    pub fn validated(self) -> PieceResult<Self> {
        let sh = self.shears();
        if sh.iter().any(|v| !v.is_finite()) {
            return Err(PieceError::InvalidShears("shears must be finite".into()));
        }
        match self {
            Piece::Pentagon { s1, s2 } if s1 + s2 <= 0.0 => {
                Err(PieceError::InvalidShears(format!("pentagon needs s1 + s2 > 0 (got {})", s1 + s2)))
            }
            Piece::Hexagon { s1, s2, s3 } => {
                for (a, b) in [(s1, s2), (s2, s3), (s3, s1)] {
                    if a + b <= 0.0 {
                        return Err(PieceError::InvalidShears(format!("hexagon needs pairwise sums > 0 (got {a} + {b})")));
                    }
                }
                Ok(self)
            }
            _ => Ok(self),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Piece::Triangle => "triangle",
            Piece::Quad { .. } => "quad",
            Piece::Pentagon { .. } => "pentagon",
            Piece::Hexagon { .. } => "hexagon",
        }
    }

    pub fn shears(&self) -> Vec<f64> {
        match *self {
            Piece::Triangle => vec![],
            Piece::Quad { s } => vec![s],
            Piece::Pentagon { s1, s2 } => vec![s1, s2],
            Piece::Hexagon { s1, s2, s3 } => vec![s1, s2, s3],
        }
    }

    /// Edge labels present on this piece, in counterclockwise boundary order.
    pub fn labels(&self) -> &'static [EdgeLabel] {
        use EdgeLabel::*;
        match self {
            Piece::Triangle => &[L1, L2, L3],
            Piece::Quad { .. } => &[A1, L1, L2, L3],
            Piece::Pentagon { .. } => &[L1, A2, L2, L3, A1],
            Piece::Hexagon { .. } => &[L3, A2, L1, A3, L2, A1],
        }
    }

    /// Every shear multiplied by `e^t`.
    pub fn stretch_params(&self, t: f64) -> Piece {
        let k = t.exp();
        match *self {
            Piece::Triangle => Piece::Triangle,
            Piece::Quad { s } => Piece::Quad { s: k * s },
            Piece::Pentagon { s1, s2 } => Piece::Pentagon { s1: k * s1, s2: k * s2 },
            Piece::Hexagon { s1, s2, s3 } => Piece::Hexagon { s1: k * s1, s2: k * s2, s3: k * s3 },
        }
    }

    /// The piece with the normalization `s2 >= s1` (pentagon) or `s2, s3 > 0`
    /// (hexagon, by cyclic relabeling). Returns the new piece and the label map
    /// from old labels to new labels.
    pub fn normalized(&self) -> (Piece, Vec<(EdgeLabel, EdgeLabel)>) {
        use EdgeLabel::*;
        let ident: Vec<_> = self.labels().iter().map(|&l| (l, l)).collect();
        match *self {
            Piece::Hexagon { s1, s2, s3 } if !(s2 > 0.0 && s3 > 0.0) => {
                // rotate (s1,s2,s3) -> (s2,s3,s1): l_i -> l_{i-1}, a_i -> a_{i-1}
                let (p, map) = if s3 > 0.0 && s1 > 0.0 {
                    (Piece::Hexagon { s1: s2, s2: s3, s3: s1 }, [(L1, L3), (L2, L1), (L3, L2), (A1, A3), (A2, A1), (A3, A2)])
                } else {
                    (Piece::Hexagon { s1: s3, s2: s1, s3: s2 }, [(L1, L2), (L2, L3), (L3, L1), (A1, A2), (A2, A3), (A3, A1)])
                };
                (p, map.to_vec())
            }
            _ => (*self, ident),
        }
    }
}

impl fmt::Display for Piece {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Piece::Triangle => write!(f, "Triangle"),
            Piece::Quad { s } => write!(f, "Quad({s})"),
            Piece::Pentagon { s1, s2 } => write!(f, "Pentagon({s1}, {s2})"),
            Piece::Hexagon { s1, s2, s3 } => write!(f, "Hexagon({s1}, {s2}, {s3})"),
        }
    }
}

/// `½ ln(1 + e^{-s})`, the gap between the quad center and the center of the
/// adjacent doubled triangle on the bi-infinite edge.
pub fn displacement(s: f64) -> f64 {
    // ln(1 + e^{-s}) computed without overflow for large |s|
    if s > 0.0 {
        0.5 * (-s).exp().ln_1p()
    } else {
        0.5 * (s.exp().ln_1p() - s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(Piece::pentagon(1.0, -1.0).is_err());
        assert!(Piece::pentagon(-0.3, 1.0).is_ok());
        assert!(Piece::hexagon(1.0, 1.0, -1.0).is_err());
        assert!(Piece::hexagon(-0.3, 1.0, 1.0).is_ok());
        assert!(Piece::from_kind("quad", &[1.0, 2.0]).is_err());
        assert!(Piece::from_kind("heptagon", &[]).is_err());
    }

    #[test]
    fn stretch_params_examples() {
        assert_eq!(Piece::Quad { s: -1.0 }.stretch_params(1.0), Piece::Quad { s: -std::f64::consts::E });
        assert_eq!(Piece::Triangle.stretch_params(3.0), Piece::Triangle);
        let h = Piece::Hexagon { s1: 1.0, s2: 1.0, s3: 1.0 }.stretch_params(2f64.ln());
        if let Piece::Hexagon { s1, s2, s3 } = h {
            for v in [s1, s2, s3] {
                assert!((v - 2.0).abs() < 1e-15);
            }
        }
        assert_eq!(Piece::Quad { s: 0.7 }.stretch_params(0.0), Piece::Quad { s: 0.7 });
    }

    #[test]
    fn hexagon_normalization_keeps_sums() {
        let h = Piece::Hexagon { s1: 1.0, s2: -0.5, s3: 2.0 };
        let (n, map) = h.normalized();
        if let Piece::Hexagon { s2, s3, .. } = n {
            assert!(s2 > 0.0 && s3 > 0.0);
        }
        assert_eq!(map.len(), 6);
    }

    #[test]
    fn displacement_closed_form() {
        assert!((displacement(0.0) - 0.5 * 2f64.ln()).abs() < 1e-15);
        for s in [-3.0, -1.0, 0.5, 2.0, 40.0] {
            assert!((displacement(-s) - displacement(s) - s / 2.0).abs() < 1e-12);
        }
        assert!(displacement(800.0) >= 0.0 && (displacement(-800.0) - 400.0).abs() < 1e-9);
    }
}
