//! Surfaces glued from pieces: file format, gluing isometries, developing
//! maps, lengths of curves and arcs, topology checks, the block
//! decomposition and candidate enumeration.

mod blocks;
mod candidates;
mod topology;

pub use blocks::{classify, BlockDecomposition, Crown, Spike};
pub use candidates::{arc_distance_estimate, enumerate_candidates, evaluate, Candidate, CandidateKind, Estimate, Scope};
pub use topology::{validate, Corner, Topology, ValidationReport, VertexClass};

use crate::hyp_core::{dist_between_geodesics, translation_length, GeomError, Geodesic, Isometry};
use crate::pieces::{realize, EdgeKind, EdgeLabel, Piece, PieceError, PieceRealization};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SurfaceError {
    #[error("PARSE: {0}")]
    Parse(String),
    #[error("UNKNOWN_PIECE: `{0}`")]
    UnknownPiece(String),
    #[error("UNKNOWN_EDGE: piece `{0}` has no edge {1}")]
    UnknownEdge(String, String),
    #[error("PATH_BROKEN: {0}")]
    PathBroken(String),
    #[error("PARABOLIC_OR_TRIVIAL: |trace| = {0} <= 2")]
    ParabolicOrTrivial(f64),
    #[error("GEODESICS_INTERSECT: no orthogeodesic in this class")]
    GeodesicsIntersect,
    #[error("NON_ESSENTIAL: the arc is homotopic into the boundary")]
    NonEssential,
    #[error("INCOMPATIBLE: {0}")]
    Incompatible(String),
    #[error(transparent)]
    Piece(#[from] PieceError),
}

pub type SurfaceResult<T> = Result<T, SurfaceError>;

/// An edge slot: piece index and edge label.
pub type Slot = (usize, EdgeLabel);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Genus {
    pub g: u32,
    pub b: u32,
    pub p: u32,
}

impl Genus {
    pub fn euler(&self) -> i64 {
        2 - 2 * self.g as i64 - self.b as i64 - self.p as i64
    }

    pub fn piece_count(&self) -> i64 {
        -2 * self.euler()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gluing {
    pub from: Slot,
    pub to: Slot,
    pub shear: Option<f64>,
}

/// One side of a gluing as seen from a slot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Partner {
    pub slot: Slot,
    pub shear: f64,
    pub gluing: usize,
}

#[derive(Debug, Clone)]
pub struct Surface {
    pub topology: Genus,
    pub ids: Vec<String>,
    pub pieces: Vec<Piece>,
    pub gluings: Vec<Gluing>,
    pub metadata: Option<serde_json::Value>,
    real: Vec<PieceRealization>,
    partner: HashMap<Slot, Partner>,
}

// ---- file format ----

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
enum IdRepr {
    Int(i64),
    Str(String),
}

impl IdRepr {
    fn text(&self) -> String {
        match self {
            IdRepr::Int(i) => i.to_string(),
            IdRepr::Str(s) => s.clone(),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct PieceFile {
    id: IdRepr,
    kind: String,
    #[serde(default)]
    shears: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct GluingFile {
    from: (IdRepr, String),
    to: (IdRepr, String),
    #[serde(default, skip_serializing_if = "Option::is_none")]
    shear: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct SurfaceFile {
    topology: Genus,
    pieces: Vec<PieceFile>,
    gluings: Vec<GluingFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    metadata: Option<serde_json::Value>,
}

impl Surface {
    pub fn new(topology: Genus, ids: Vec<String>, pieces: Vec<Piece>, gluings: Vec<Gluing>) -> SurfaceResult<Self> {
        let real = pieces.iter().map(realize).collect::<Result<Vec<_>, _>>()?;
        let mut partner = HashMap::new();
        for (k, gl) in gluings.iter().enumerate() {
            for (a, b) in [(gl.from, gl.to), (gl.to, gl.from)] {
                for (p, l) in [a, b] {
                    if p >= pieces.len() {
                        return Err(SurfaceError::UnknownPiece(p.to_string()));
                    }
                    if !pieces[p].labels().contains(&l) {
                        return Err(SurfaceError::UnknownEdge(ids[p].clone(), l.to_string()));
                    }
                }
                partner.entry(a).or_insert(Partner { slot: b, shear: gl.shear.unwrap_or(0.0), gluing: k });
            }
        }
        Ok(Self { topology, ids, pieces, gluings, metadata: None, real, partner })
    }

    pub fn from_json(text: &str) -> SurfaceResult<Self> {
        let f: SurfaceFile = serde_json::from_str(text).map_err(|e| SurfaceError::Parse(e.to_string()))?;
        let ids: Vec<String> = f.pieces.iter().map(|p| p.id.text()).collect();
        let index: HashMap<&str, usize> = ids.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
        if index.len() != ids.len() {
            return Err(SurfaceError::Parse("duplicate piece id".into()));
        }
        let pieces = f.pieces.iter().map(|p| Piece::from_kind(&p.kind, &p.shears)).collect::<Result<Vec<_>, _>>()?;
        let slot = |(id, e): &(IdRepr, String)| -> SurfaceResult<Slot> {
            let id = id.text();
            let p = *index.get(id.as_str()).ok_or_else(|| SurfaceError::UnknownPiece(id.clone()))?;
            let l = EdgeLabel::parse(e).ok_or_else(|| SurfaceError::UnknownEdge(id.clone(), e.clone()))?;
            Ok((p, l))
        };
        let gluings = f.gluings.iter().map(|g| Ok(Gluing { from: slot(&g.from)?, to: slot(&g.to)?, shear: g.shear })).collect::<SurfaceResult<Vec<_>>>()?;
        let mut s = Surface::new(f.topology, ids, pieces, gluings)?;
        s.metadata = f.metadata;
        Ok(s)
    }

    pub fn to_json(&self) -> String {
        let f = SurfaceFile {
            topology: self.topology,
            pieces: self.ids.iter().zip(&self.pieces).map(|(id, p)| PieceFile { id: IdRepr::Str(id.clone()), kind: p.kind_name().into(), shears: p.shears() }).collect(),
            gluings: self
                .gluings
                .iter()
                .map(|g| GluingFile {
                    from: (IdRepr::Str(self.ids[g.from.0].clone()), g.from.1.to_string()),
                    to: (IdRepr::Str(self.ids[g.to.0].clone()), g.to.1.to_string()),
                    shear: g.shear,
                })
                .collect(),
            metadata: self.metadata.clone(),
        };
        serde_json::to_string_pretty(&f).expect("plain data serializes")
    }

    pub fn realization(&self, piece: usize) -> &PieceRealization {
        &self.real[piece]
    }

    pub fn partner(&self, slot: Slot) -> Option<Partner> {
        self.partner.get(&slot).copied()
    }

    pub fn piece_index(&self, id: &str) -> Option<usize> {
        self.ids.iter().position(|s| s == id)
    }

    /// Same pieces kinds and gluing pairs (parameters may differ).
    pub fn same_combinatorics(&self, other: &Surface) -> bool {
        self.pieces.len() == other.pieces.len()
            && self.pieces.iter().zip(&other.pieces).all(|(a, b)| a.kind_name() == b.kind_name())
            && self.gluings.len() == other.gluings.len()
            && self.gluings.iter().zip(&other.gluings).all(|(a, b)| a.from == b.from && a.to == b.to)
    }

    /// Copy with new piece parameters and gluing shears (same order).
    pub fn with_parameters(&self, pieces: Vec<Piece>, shears: Vec<Option<f64>>) -> SurfaceResult<Surface> {
        let gluings = self.gluings.iter().zip(shears).map(|(g, s)| Gluing { shear: s, ..g.clone() }).collect();
        Surface::new(self.topology, self.ids.clone(), pieces, gluings)
    }

    /// Isometry carrying the partner piece's canonical realization across the
    /// edge `slot` of its own realization: `F_e ∘ T_σ ∘ R ∘ F_{e'}⁻¹`.
    pub fn gluing_map(&self, slot: Slot) -> SurfaceResult<Isometry> {
        let pt = self.partner(slot).ok_or_else(|| SurfaceError::PathBroken(format!("{} of {} is not glued", slot.1, self.ids[slot.0])))?;
        let e = self.real[slot.0].edge(slot.1).expect("slot labels are checked at load");
        let f = self.real[pt.slot.0].edge(pt.slot.1).expect("slot labels are checked at load");
        let shear = if e.kind == EdgeKind::BiInfinite { pt.shear } else { 0.0 };
        Ok(e.frame().compose(&Isometry::axis_translation(shear)).compose(&Isometry::half_turn()).compose(&f.frame().inverse()))
    }

    /// Compose the gluing maps along the path. For a closed path the result is
    /// the holonomy, including the step back to the first piece.
    pub fn develop(&self, path: &DualPath) -> SurfaceResult<Isometry> {
        let mut m = Isometry::identity();
        let n = path.steps.len();
        let hops = if path.closed { n } else { n.saturating_sub(1) };
        if let Some(k) = path.steps.iter().position(|s| s.entry == s.exit) {
            return Err(SurfaceError::PathBroken(format!("step {k} enters and exits through {}", path.steps[k].entry)));
        }
        for k in 0..hops {
            let s = path.steps[k];
            let t = path.steps[(k + 1) % n];
            let p = self.partner((s.piece, s.exit)).ok_or_else(|| SurfaceError::PathBroken(format!("step {k}: {} is not glued", s.exit)))?;
            if p.slot != (t.piece, t.entry) {
                return Err(SurfaceError::PathBroken(format!("step {k}: {} of {} is not glued to {} of {}", s.exit, self.ids[s.piece], t.entry, self.ids[t.piece])));
            }
            m = m.compose(&self.gluing_map((s.piece, s.exit))?);
        }
        Ok(m)
    }

    pub fn curve_length(&self, word: &DualPath) -> SurfaceResult<f64> {
        let h = self.develop(&DualPath { closed: true, ..word.clone() })?;
        let tr = h.trace().abs();
        if tr <= 2.0 + 1e-14 {
            return Err(SurfaceError::ParabolicOrTrivial(tr));
        }
        Ok(translation_length(&h))
    }

    /// Start geodesic and developed end geodesic of an open path between a-edges.
    pub fn arc_geodesics(&self, word: &DualPath) -> SurfaceResult<(Geodesic, Geodesic)> {
        let (first, last) = match (word.steps.first(), word.steps.last()) {
            (Some(f), Some(l)) if !word.closed && !f.entry.is_leaf() && !l.exit.is_leaf() => (*f, *l),
            _ => return Err(SurfaceError::PathBroken("an arc starts and ends on a-edges".into())),
        };
        let m = self.develop(word)?;
        let g0 = self.real[first.piece].edge(first.entry).expect("checked").geodesic;
        let g1 = self.real[last.piece].edge(last.exit).expect("checked").geodesic.apply(&m);
        if g0.approx_eq(&g1, 1e-9) || g0.approx_eq(&g1.reversed(), 1e-9) {
            return Err(SurfaceError::NonEssential);
        }
        Ok((g0, g1))
    }

    pub fn arc_length(&self, word: &DualPath) -> SurfaceResult<f64> {
        let (g0, g1) = self.arc_geodesics(word)?;
        dist_between_geodesics(&g0, &g1).map_err(|e| match e {
            GeomError::IntersectingGeodesics => SurfaceError::GeodesicsIntersect,
            other => SurfaceError::Piece(other.into()),
        })
    }

    /// Translation length of the product of the reflections in the two end
    /// geodesics: the length of the doubled arc.
    pub fn doubled_arc_length(&self, word: &DualPath) -> SurfaceResult<f64> {
        let (g0, g1) = self.arc_geodesics(word)?;
        Ok(translation_length(&g1.reflection().compose(&g0.reflection())))
    }

    /// Length of a finite l-edge (a compact leaf).
    pub fn finite_leaf_length(&self, slot: Slot) -> Option<f64> {
        let e = self.real[slot.0].edge(slot.1)?;
        match (e.kind, self.real[slot.0].vertices[e.start].finite(), self.real[slot.0].vertices[e.end].finite()) {
            (EdgeKind::Finite, Some(p), Some(q)) => Some(crate::hyp_core::dist(p, q)),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Step {
    pub piece: usize,
    pub entry: EdgeLabel,
    pub exit: EdgeLabel,
}

impl Step {
    pub fn new(piece: usize, entry: EdgeLabel, exit: EdgeLabel) -> Self {
        Self { piece, entry, exit }
    }

    fn inverse(&self) -> Self {
        Self { piece: self.piece, entry: self.exit, exit: self.entry }
    }
}

/// A combinatorial path in the dual graph. Closed paths are cyclic words;
/// open arcs start and end on a-edges.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DualPath {
    pub steps: Vec<Step>,
    pub closed: bool,
}

impl DualPath {
    pub fn closed(steps: Vec<Step>) -> Self {
        Self { steps, closed: true }
    }

    pub fn open(steps: Vec<Step>) -> Self {
        Self { steps, closed: false }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn inverse(&self) -> Self {
        Self { steps: self.steps.iter().rev().map(Step::inverse).collect(), closed: self.closed }
    }

    pub fn rotated(&self, k: usize) -> Self {
        let n = self.steps.len().max(1);
        let mut steps = self.steps.clone();
        steps.rotate_left(k % n);
        Self { steps, closed: self.closed }
    }

    pub fn power(&self, k: usize) -> Self {
        Self { steps: self.steps.repeat(k), closed: self.closed }
    }

    /// Representative invariant under rotation (closed) and inversion.
    pub fn canonical(&self) -> Vec<Step> {
        let inv = self.inverse();
        if !self.closed {
            return self.steps.clone().min(inv.steps);
        }
        (0..self.steps.len()).flat_map(|k| [self.rotated(k).steps, inv.rotated(k).steps]).min().unwrap_or_default()
    }

    /// Whether the cyclic word is a proper power.
    pub fn is_proper_power(&self) -> bool {
        let n = self.steps.len();
        (1..n).any(|d| n.is_multiple_of(d) && (0..n).all(|i| self.steps[i] == self.steps[i % d]))
    }

    pub fn display(&self, s: &Surface) -> String {
        let body: Vec<String> = self.steps.iter().map(|t| format!("{}:{}>{}", s.ids[t.piece], t.entry, t.exit)).collect();
        format!("{}[{}]", if self.closed { "c" } else { "a" }, body.join(" "))
    }
}

impl fmt::Display for DualPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body: Vec<String> = self.steps.iter().map(|t| format!("{}:{}>{}", t.piece, t.entry, t.exit)).collect();
        write!(f, "{}[{}]", if self.closed { "c" } else { "a" }, body.join(" "))
    }
}

#[cfg(test)]
pub(crate) mod tests;
