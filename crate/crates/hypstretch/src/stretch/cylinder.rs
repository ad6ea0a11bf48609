use super::{StretchError, StretchResult};
use crate::hyp_core::{Geodesic, IdealPoint, Isometry};
use crate::pieces::{displacement, EdgeLabel, Piece};
use crate::surface::{Corner, Crown, Slot, Surface};
use std::collections::{BTreeMap, HashMap};

const QUAD_C: usize = 2;
const QUAD_D: usize = 3;
const PENT_D: usize = 3;

/// How a side of a tailored triangle sits in the cylinder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SideTag {
    /// Lies on the full geodesic through an l-edge of the owning piece.
    Leaf(EdgeLabel),
    /// The diagonal of the owning piece's tailored polygon.
    Diagonal,
    /// A side on the far boundary of the cylinder.
    Free,
}

/// An ideal triangle of a tailored polygon, in the owning piece's frame.
#[derive(Debug, Clone, PartialEq)]
pub struct CylTriangle {
    pub piece: usize,
    /// Counterclockwise; side `j` joins vertex `j` to vertex `j + 1`.
    pub vertices: [IdealPoint; 3],
    /// The piece vertex a triangle vertex coincides with, if any.
    pub origin: [Option<usize>; 3],
    pub sides: [SideTag; 3],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeRole {
    /// A crown edge `b`, shared with a triangle of the surface.
    Crown,
    /// An extended l-edge between the polygons of two pieces.
    Special,
    Diagonal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CylEdge {
    pub role: EdgeRole,
    /// (triangle, side)
    pub first: (usize, usize),
    /// The other cylinder side, absent for crown edges.
    pub second: Option<(usize, usize)>,
    /// The surface triangle across a crown edge.
    pub outer: Option<Slot>,
    /// Shear measured from `first`'s side (symmetric).
    pub shear: f64,
}

/// The cylinder edges meeting one spike, from `b_i` to `b_{i+1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpikeFan {
    pub from_quad: usize,
    pub to_quad: usize,
    pub first: usize,
    pub last: usize,
    pub interior: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CylinderModel {
    pub crown: Crown,
    pub triangles: Vec<CylTriangle>,
    pub edges: Vec<CylEdge>,
    /// Free sides (triangle, side).
    pub boundary: Vec<(usize, usize)>,
    pub spikes: Vec<SpikeFan>,
}

impl CylinderModel {
    /// The crown edge belonging to quad `q`.
    pub fn crown_edge(&self, q: usize) -> Option<usize> {
        self.edges.iter().position(|e| e.role == EdgeRole::Crown && self.triangles[e.first.0].piece == q)
    }

    pub fn shears(&self) -> Vec<f64> {
        self.edges.iter().map(|e| e.shear).collect()
    }
}

fn endpoints(s: &Surface, p: usize, l: EdgeLabel) -> Geodesic {
    s.realization(p).edge(l).expect("label of the piece").geodesic
}

fn ideal(s: &Surface, p: usize, v: usize) -> IdealPoint {
    s.realization(p).vertices[v].ideal().expect("ideal corner")
}

fn tri(piece: usize, vertices: [IdealPoint; 3], origin: [Option<usize>; 3], sides: [SideTag; 3]) -> CylTriangle {
    CylTriangle { piece, vertices, origin, sides }
}

/// Tailored triangles of piece `p` given which of its ideal corners lie on
/// the crown's spikes.
fn tailored(s: &Surface, p: usize, corners: &[Corner]) -> StretchResult<Vec<CylTriangle>> {
    use EdgeLabel::*;
    use SideTag::*;
    let has = |v: usize| corners.contains(&(p, v));
    match s.pieces[p] {
        Piece::Quad { .. } => {
            let a = endpoints(s, p, L3).q;
            let b = endpoints(s, p, L1).p;
            let (c, d) = (ideal(s, p, QUAD_C), ideal(s, p, QUAD_D));
            let (oc, od) = (Some(QUAD_C), Some(QUAD_D));
            if s.faces_triangle(p) {
                if !(has(QUAD_C) && has(QUAD_D)) {
                    return Err(StretchError::NotACrown(format!("crown quad {} is missing a spike", s.ids[p])));
                }
                Ok(vec![tri(p, [b, c, d], [None, oc, od], [Leaf(L1), Leaf(L2), Diagonal]), tri(p, [a, b, d], [None, None, od], [Free, Diagonal, Leaf(L3)])])
            } else if has(QUAD_C) {
                Ok(vec![tri(p, [a, b, c], [None, None, oc], [Free, Leaf(L1), Diagonal]), tri(p, [a, c, d], [None, oc, od], [Diagonal, Leaf(L2), Leaf(L3)])])
            } else {
                Ok(vec![tri(p, [a, c, d], [None, oc, od], [Free, Leaf(L2), Leaf(L3)])])
            }
        }
        Piece::Pentagon { .. } => {
            let e = endpoints(s, p, L3).q;
            let c = endpoints(s, p, L2).p;
            let b = endpoints(s, p, L1).q;
            let d = ideal(s, p, PENT_D);
            Ok(vec![tri(p, [e, b, d], [None, None, Some(PENT_D)], [Free, Diagonal, Leaf(L3)]), tri(p, [b, c, d], [None, None, Some(PENT_D)], [Free, Leaf(L2), Diagonal])])
        }
        _ => Err(StretchError::NotACrown(format!("piece {} cannot lie on a spike", s.ids[p]))),
    }
}

fn side_geodesic(t: &CylTriangle, j: usize) -> Geodesic {
    Geodesic { p: t.vertices[j], q: t.vertices[(j + 1) % 3] }
}

/// `ln |x|` of the foot of the perpendicular from the ideal point onto the
/// frame axis, i.e. its signed position along `g`.
fn foot_position(g: &Geodesic, v: IdealPoint) -> StretchResult<f64> {
    match g.frame().inverse().apply_ideal(v) {
        IdealPoint::Finite(x) if x != 0.0 => Ok(x.abs().ln()),
        _ => Err(StretchError::Geometry("opposite vertex lies on the shared edge".into())),
    }
}

/// Signed distance from our center to the neighbour's center along side `j`
/// of `own`, oriented with `own` on the left. `other` is the neighbour's
/// side geodesic and opposite vertex, already in `own`'s frame.
pub(crate) fn measure_shear(own: &CylTriangle, j: usize, other_side: Geodesic, other_opposite: IdealPoint) -> StretchResult<f64> {
    let g = side_geodesic(own, j);
    if !(ideal_close(g.p, other_side.q) && ideal_close(g.q, other_side.p)) {
        return Err(StretchError::Geometry(format!("glued sides do not coincide: {:?} vs {:?}", g, other_side)));
    }
    Ok(foot_position(&g, other_opposite)? - foot_position(&g, own.vertices[(j + 2) % 3])?)
}

/// Closeness on the boundary circle, where a huge finite value is near ∞.
fn ideal_close(a: IdealPoint, b: IdealPoint) -> bool {
    let angle = |v: IdealPoint| v.finite().map_or(std::f64::consts::PI, |x| 2.0 * x.atan());
    let d = (angle(a) - angle(b)).abs();
    d.min(2.0 * std::f64::consts::PI - d) < 1e-7
}

fn map_triangle(m: &Isometry, t: &CylTriangle) -> CylTriangle {
    CylTriangle { vertices: t.vertices.map(|v| m.apply_ideal(v)), ..t.clone() }
}

/// The lines meeting a spike corner, in corner-walk order.
fn corner_lines(s: &Surface, c: Corner) -> StretchResult<Vec<SideTag>> {
    use EdgeLabel::*;
    use SideTag::*;
    let facing = s.faces_triangle(c.0);
    Ok(match (s.pieces[c.0], c.1) {
        (Piece::Quad { .. }, QUAD_D) if facing => vec![Leaf(L2), Diagonal, Leaf(L3)],
        (Piece::Quad { .. }, QUAD_D) => vec![Leaf(L2), Leaf(L3)],
        (Piece::Quad { .. }, QUAD_C) if facing => vec![Leaf(L1), Leaf(L2)],
        (Piece::Quad { .. }, QUAD_C) => vec![Leaf(L1), Diagonal, Leaf(L2)],
        (Piece::Pentagon { .. }, PENT_D) => vec![Leaf(L2), Diagonal, Leaf(L3)],
        _ => return Err(StretchError::NotACrown(format!("corner {} of {} is not a spike corner", c.1, s.ids[c.0]))),
    })
}

/// The auxiliary cylinder of a crown: tailored polygons at every spike
/// corner, triangulated, with shears measured on the realized surface.
pub fn build_cylinder(s: &Surface, crown: &Crown) -> StretchResult<CylinderModel> {
    if crown.quads.is_empty() || crown.quads.len() != crown.spikes.len() || !crown.quads.iter().all(|&q| s.faces_triangle(q)) {
        return Err(StretchError::NotACrown("crown quads must face triangles, one spike each".into()));
    }
    let corners: Vec<Corner> = crown.spikes.iter().flat_map(|sp| sp.corners.iter().copied()).collect();
    let mut owners: Vec<usize> = Vec::new();
    for &(p, _) in &corners {
        if !owners.contains(&p) {
            owners.push(p);
        }
    }
    let mut triangles = Vec::new();
    for &p in &owners {
        triangles.extend(tailored(s, p, &corners)?);
    }

    // group sides lying on the same line
    #[derive(PartialEq, Eq, Hash, PartialOrd, Ord, Clone, Copy)]
    enum Key {
        Leaf(usize),
        Diag(usize),
    }
    let mut groups: BTreeMap<Key, Vec<(usize, usize)>> = BTreeMap::new();
    let mut boundary = Vec::new();
    for (k, t) in triangles.iter().enumerate() {
        for j in 0..3 {
            match t.sides[j] {
                SideTag::Free => boundary.push((k, j)),
                SideTag::Diagonal => groups.entry(Key::Diag(t.piece)).or_default().push((k, j)),
                SideTag::Leaf(l) => match s.partner((t.piece, l)) {
                    Some(pt) => groups.entry(Key::Leaf(pt.gluing)).or_default().push((k, j)),
                    None => boundary.push((k, j)),
                },
            }
        }
    }
    let mut edges = Vec::new();
    let mut edge_of: HashMap<(usize, SideTag), usize> = HashMap::new();
    for (key, sides) in groups {
        let (k, j) = sides[0];
        let t = &triangles[k];
        let edge = match (key, sides.len()) {
            (Key::Diag(_), 2) => {
                let (k2, j2) = sides[1];
                let o = &triangles[k2];
                let shear = measure_shear(t, j, side_geodesic(o, j2), o.vertices[(j2 + 2) % 3])?;
                CylEdge { role: EdgeRole::Diagonal, first: (k, j), second: Some((k2, j2)), outer: None, shear }
            }
            (Key::Leaf(_), 2) => {
                let (k2, j2) = sides[1];
                let SideTag::Leaf(l) = t.sides[j] else { unreachable!("leaf key") };
                let m = s.gluing_map((t.piece, l))?;
                let o = map_triangle(&m, &triangles[k2]);
                let shear = measure_shear(t, j, side_geodesic(&o, j2), o.vertices[(j2 + 2) % 3])?;
                CylEdge { role: EdgeRole::Special, first: (k, j), second: Some((k2, j2)), outer: None, shear }
            }
            (Key::Leaf(_), 1) => {
                let SideTag::Leaf(l) = t.sides[j] else { unreachable!("leaf key") };
                let pt = s.partner((t.piece, l)).expect("grouped by partner");
                if !matches!(s.pieces[pt.slot.0], Piece::Triangle) {
                    boundary.push((k, j));
                    continue;
                }
                let m = s.gluing_map((t.piece, l))?;
                let real = s.realization(pt.slot.0);
                let idx = real.edges.iter().position(|e| e.label == pt.slot.1).expect("triangle label");
                let verts: Vec<IdealPoint> = real.vertices.iter().map(|v| m.apply_ideal(v.ideal().expect("ideal triangle"))).collect();
                let side = Geodesic { p: verts[idx], q: verts[(idx + 1) % 3] };
                let shear = measure_shear(t, j, side, verts[(idx + 2) % 3])?;
                CylEdge { role: EdgeRole::Crown, first: (k, j), second: None, outer: Some(pt.slot), shear }
            }
            _ => return Err(StretchError::NotACrown("a cylinder line is shared by more than two triangles".into())),
        };
        let id = edges.len();
        for &(k, j) in &sides {
            edge_of.insert((triangles[k].piece, triangles[k].sides[j]), id);
        }
        edges.push(edge);
    }
    boundary.sort();

    let mut spikes = Vec::new();
    for sp in &crown.spikes {
        let mut ids: Vec<usize> = Vec::new();
        for &c in &sp.corners {
            for tag in corner_lines(s, c)? {
                let id = *edge_of.get(&(c.0, tag)).ok_or_else(|| StretchError::NotACrown(format!("spike line {:?} of {} is missing", tag, s.ids[c.0])))?;
                if ids.last() != Some(&id) {
                    ids.push(id);
                }
            }
        }
        let (first, last) = (ids[0], *ids.last().expect("nonempty"));
        if edges[first].role != EdgeRole::Crown || edges[last].role != EdgeRole::Crown || ids.len() < 3 {
            return Err(StretchError::NotACrown("spike fan does not run between crown edges".into()));
        }
        spikes.push(SpikeFan { from_quad: sp.from_quad, to_quad: sp.to_quad, first, last, interior: ids[1..ids.len() - 1].to_vec() });
    }
    Ok(CylinderModel { crown: crown.clone(), triangles, edges, boundary, spikes })
}

/// Quad parameter of a crown quad.
pub(crate) fn quad_param(s: &Surface, q: usize) -> f64 {
    match s.pieces[q] {
        Piece::Quad { s } => s,
        _ => unreachable!("crown edges belong to quads"),
    }
}

/// Per-edge shears of the cylinder rebuilt on the stretched boundary block.
pub fn stretched_cylinder_shears(s: &Surface, model: &CylinderModel, t: f64) -> StretchResult<Vec<f64>> {
    let bt = super::boundary_block_stretch(s, t)?;
    let mt = build_cylinder(&bt, &model.crown)?;
    if mt.edges.len() != model.edges.len() {
        return Err(StretchError::Geometry("stretched cylinder changed its combinatorics".into()));
    }
    Ok(mt.shears())
}

/// One spike's stretch difference: the measured change of the fan's shear
/// sum against the displacement prediction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpikeResidual {
    pub from_quad: usize,
    pub to_quad: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
}

pub fn stretch_difference_check(s: &Surface, model: &CylinderModel, t: f64) -> StretchResult<Vec<SpikeResidual>> {
    let st = stretched_cylinder_shears(s, model, t)?;
    let k = t.exp();
    let eps = |q: usize| {
        let p = quad_param(s, q);
        displacement(k * p) - k * displacement(p)
    };
    Ok(model
        .spikes
        .iter()
        .map(|f| {
            let lhs: f64 = f.interior.iter().map(|&e| st[e] - k * model.edges[e].shear).sum();
            let rhs = -eps(f.from_quad) - eps(f.to_quad);
            SpikeResidual { from_quad: f.from_quad, to_quad: f.to_quad, lhs, rhs, residual: (lhs - rhs).abs() }
        })
        .collect())
}

/// `η^t(O_{Q_i}) − O_{Q_{i+1}}` for every spike of the crown: the signed gap
/// along `b_{i+1}` between the horocyclic image of the first quad's center
/// and the second quad's center, developed around the spike.
pub fn horocyclic_shift(s: &Surface, crown: &Crown) -> StretchResult<Vec<f64>> {
    let mut out = Vec::new();
    for sp in &crown.spikes {
        let mut m = Isometry::identity();
        for &c in &sp.corners[..sp.corners.len() - 1] {
            m = m.compose(&s.gluing_map((c.0, s.out_edge(c)))?);
        }
        let start = s.realization(sp.from_quad).edge(EdgeLabel::L2).expect("quad l2").reference;
        let end = m.apply(s.realization(sp.to_quad).edge(EdgeLabel::L2).expect("quad l2").reference);
        out.push(start.y.ln() - end.y.ln());
    }
    Ok(out)
}
