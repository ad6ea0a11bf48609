use super::{EdgeLabel, Piece, PieceError, PieceResult};
use crate::hyp_core::{
    common_perpendicular, dist, geodesic_through, geodesic_to_ideal, intersect_geodesics, Geodesic, IdealPoint,
    Isometry, UhpPoint,
};
use std::collections::BTreeMap;

/// A polygon vertex: ideal or interior.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Vertex {
    Ideal(IdealPoint),
    Finite(UhpPoint),
}

impl Vertex {
    pub fn finite(&self) -> Option<UhpPoint> {
        match self {
            Vertex::Finite(p) => Some(*p),
            Vertex::Ideal(_) => None,
        }
    }

    pub fn ideal(&self) -> Option<IdealPoint> {
        match self {
            Vertex::Ideal(p) => Some(*p),
            Vertex::Finite(_) => None,
        }
    }

    pub fn apply(&self, m: &Isometry) -> Vertex {
        match self {
            Vertex::Ideal(p) => Vertex::Ideal(m.apply_ideal(*p)),
            Vertex::Finite(p) => Vertex::Finite(m.apply(*p)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeKind {
    Finite,
    HalfInfinite,
    BiInfinite,
}

/// One boundary edge, oriented counterclockwise (piece on the left).
#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub label: EdgeLabel,
    pub start: usize,
    pub end: usize,
    pub kind: EdgeKind,
    pub geodesic: Geodesic,
    /// Midpoint (finite), finite endpoint (half-infinite) or center (bi-infinite).
    pub reference: UhpPoint,
}

impl Edge {
    /// Isometry taking the imaginary axis (oriented upwards) onto this edge, `i` onto
    /// the reference point and the left half-plane into the piece.
    pub fn frame(&self) -> Isometry {
        self.geodesic.frame_at(self.reference).expect("reference point lies on its edge")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PieceRealization {
    pub piece: Piece,
    pub vertex_names: Vec<&'static str>,
    pub vertices: Vec<Vertex>,
    pub edges: Vec<Edge>,
}

impl PieceRealization {
    pub fn edge(&self, label: EdgeLabel) -> Option<&Edge> {
        self.edges.iter().find(|e| e.label == label)
    }

    pub fn vertex(&self, name: &str) -> Option<Vertex> {
        self.vertex_names.iter().position(|n| *n == name).map(|i| self.vertices[i])
    }

    pub(crate) fn fv(&self, name: &str) -> UhpPoint {
        self.vertex(name).and_then(|v| v.finite()).expect("finite vertex")
    }

    /// Closed membership test: left of (or within `tol` of) every edge geodesic.
    pub fn contains(&self, p: UhpPoint, tol: f64) -> bool {
        self.edges.iter().all(|e| e.geodesic.side(p, tol) <= 0)
    }

    /// Largest finite vertex height, useful to size sampling boxes.
    pub fn finite_extent(&self) -> (f64, f64, f64) {
        let pts: Vec<UhpPoint> = self.vertices.iter().filter_map(|v| v.finite()).collect();
        let xs = self
            .vertices
            .iter()
            .filter_map(|v| match v {
                Vertex::Finite(p) => Some(p.x),
                Vertex::Ideal(IdealPoint::Finite(x)) => Some(*x),
                _ => None,
            })
            .collect::<Vec<_>>();
        let xmin = xs.iter().cloned().fold(f64::INFINITY, f64::min);
        let xmax = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let ymax = pts.iter().map(|p| p.y).fold(0.0, f64::max);
        (xmin, xmax, ymax)
    }
}

/// Upper intersection point of two geodesic semicircles centred on the real
/// axis at `c1`, `c2`, given through their powers at the origin `p_i = r_i^2 - c_i^2`
/// (which keeps the formula free of cancellation).
pub(crate) fn circle_meet(c1: f64, p1: f64, c2: f64, p2: f64) -> UhpPoint {
    let x = (p1 - p2) / (2.0 * (c2 - c1));
    let y = (p1 + x * (2.0 * c1 - x)).max(0.0).sqrt();
    UhpPoint::raw(x, y)
}

fn edge_between(label: EdgeLabel, vs: &[Vertex], start: usize, end: usize, center: Option<UhpPoint>) -> PieceResult<Edge> {
    let (a, b) = (vs[start], vs[end]);
    let (kind, geodesic, reference) = match (a, b) {
        (Vertex::Finite(p), Vertex::Finite(q)) => (EdgeKind::Finite, geodesic_through(p, q)?, crate::hyp_core::midpoint(p, q)),
        (Vertex::Finite(p), Vertex::Ideal(v)) => (EdgeKind::HalfInfinite, geodesic_to_ideal(p, v)?, p),
        (Vertex::Ideal(v), Vertex::Finite(p)) => (EdgeKind::HalfInfinite, geodesic_to_ideal(p, v)?.reversed(), p),
        (Vertex::Ideal(u), Vertex::Ideal(v)) => {
            let g = Geodesic::new(u, v)?;
            (EdgeKind::BiInfinite, g, center.ok_or_else(|| PieceError::InvalidShears("missing center".into()))?)
        }
    };
    Ok(Edge { label, start, end, kind, geodesic, reference })
}

fn assemble(piece: Piece, names: Vec<&'static str>, vs: Vec<Vertex>, centers: &BTreeMap<EdgeLabel, UhpPoint>) -> PieceResult<PieceRealization> {
    let n = vs.len();
    let labels = piece.labels();
    let mut edges = Vec::with_capacity(n);
    for (i, &label) in labels.iter().enumerate() {
        edges.push(edge_between(label, &vs, i, (i + 1) % n, centers.get(&label).copied())?);
    }
    Ok(PieceRealization { piece, vertex_names: names, vertices: vs, edges })
}

/// Vertices of the ideal quadrilateral double and the quad corners A, B.
pub(crate) struct QuadFrame {
    pub es: f64,
    pub mirror_radius: f64,
    pub a: UhpPoint,
    pub b: UhpPoint,
    pub center: UhpPoint,
}

pub(crate) fn quad_frame(s: f64) -> QuadFrame {
    let es = s.exp();
    let r = (1.0 + es).sqrt();
    let a = UhpPoint::raw(-1.0, r);
    let b = circle_meet(-1.0, es, es / 2.0, 0.0);
    let center = UhpPoint::raw(es, (es * (1.0 + es)).sqrt());
    QuadFrame { es, mirror_radius: r, a, b, center }
}

/// Pentagon data in the cover normalization (`Z = 0`, `D = ∞`, spike lift at -1).
pub(crate) struct PentagonFrame {
    pub e1: f64,
    pub w: f64,
    pub r: f64,
    pub a: UhpPoint,
    pub b: UhpPoint,
    pub c: UhpPoint,
    pub e: UhpPoint,
}

pub(crate) fn pentagon_frame(s1: f64, s2: f64) -> PentagonFrame {
    let e1 = s1.exp();
    let w = ((s1 + s2).exp() - 1.0) / (s2.exp() + 1.0);
    let r = (1.0 + w).sqrt();
    let rho = (e1 * (e1 - w)).sqrt();
    let a = circle_meet(-1.0, w, w / 2.0, 0.0);
    let b = circle_meet(e1, -e1 * w, w / 2.0, 0.0);
    PentagonFrame { e1, w, r, a, b, c: UhpPoint::raw(e1, rho), e: UhpPoint::raw(-1.0, r) }
}

/// Lengths of the three alternate sides BC, DE, FA of the right-angled hexagon
/// with alternate sides AB, CD, EF.
pub(crate) fn hexagon_sides(s1: f64, s2: f64, s3: f64) -> [f64; 6] {
    let ab = (s1 + s2) / 2.0;
    let cd = (s2 + s3) / 2.0;
    let ef = (s3 + s1) / 2.0;
    let opp = |x: f64, y: f64, z: f64| ((y.cosh() * z.cosh() + x.cosh()) / (y.sinh() * z.sinh())).acosh();
    let bc = opp(ef, ab, cd);
    let de = opp(ab, cd, ef);
    let fa = opp(cd, ef, ab);
    [ab, bc, cd, de, ef, fa]
}

fn hexagon_vertices(s1: f64, s2: f64, s3: f64) -> Vec<UhpPoint> {
    let sides = hexagon_sides(s1, s2, s3);
    let mut g = Isometry::identity();
    let mut out = Vec::with_capacity(6);
    for len in sides {
        out.push(g.apply(UhpPoint::i()));
        g = g.compose(&Isometry::axis_translation(len)).compose(&Isometry::rotation_about_i(std::f64::consts::FRAC_PI_2));
    }
    out
}

/// Canonical upper half-plane realization.
pub fn realize(p: &Piece) -> PieceResult<PieceRealization> {
    let piece = p.validated()?;
    let fin = IdealPoint::Finite;
    let mut centers = BTreeMap::new();
    match piece {
        Piece::Triangle => {
            centers.insert(EdgeLabel::L1, UhpPoint::raw(0.5, 0.5));
            centers.insert(EdgeLabel::L2, UhpPoint::raw(1.0, 1.0));
            centers.insert(EdgeLabel::L3, UhpPoint::raw(0.0, 1.0));
            let vs = vec![Vertex::Ideal(fin(0.0)), Vertex::Ideal(fin(1.0)), Vertex::Ideal(IdealPoint::Infinity)];
            assemble(piece, vec!["A", "B", "C"], vs, &centers)
        }
        Piece::Quad { s } => {
            let q = quad_frame(s);
            centers.insert(EdgeLabel::L2, q.center);
            let vs = vec![Vertex::Finite(q.a), Vertex::Finite(q.b), Vertex::Ideal(fin(q.es)), Vertex::Ideal(IdealPoint::Infinity)];
            assemble(piece, vec!["A", "B", "C", "D"], vs, &centers)
        }
        Piece::Pentagon { s1, s2 } => {
            let f = pentagon_frame(s1, s2);
            let vs = vec![Vertex::Finite(f.a), Vertex::Finite(f.b), Vertex::Finite(f.c), Vertex::Ideal(IdealPoint::Infinity), Vertex::Finite(f.e)];
            assemble(piece, vec!["A", "B", "C", "D", "E"], vs, &centers)
        }
        Piece::Hexagon { s1, s2, s3 } => {
            let vs = hexagon_vertices(s1, s2, s3).into_iter().map(Vertex::Finite).collect();
            assemble(piece, vec!["A", "B", "C", "D", "E", "F"], vs, &centers)
        }
    }
}

/// Centers of bi-infinite edges: `O_T^1..3` for triangles, `O_Q` for quads.
/// Computed geometrically as feet of perpendiculars.
pub fn centers(p: &Piece) -> PieceResult<Vec<(EdgeLabel, UhpPoint)>> {
    let real = realize(p)?;
    match p {
        Piece::Triangle => {
            let mut out = Vec::new();
            for (i, e) in real.edges.iter().enumerate() {
                let opposite = real.vertices[(i + 2) % 3].ideal().expect("ideal triangle");
                let foot = match opposite {
                    IdealPoint::Infinity => {
                        // vertical projection onto a semicircle hits its top
                        let (a, b) = (e.geodesic.p.finite().unwrap(), e.geodesic.q.finite().unwrap());
                        UhpPoint::raw((a + b) / 2.0, (b - a).abs() / 2.0)
                    }
                    v => intersect_geodesics(&e.geodesic, &perpendicular_through_ideal(&e.geodesic, v)?)?,
                };
                out.push((e.label, foot));
            }
            Ok(out)
        }
        Piece::Quad { .. } => {
            let cd = &real.edge(EdgeLabel::L2).unwrap().geodesic;
            let ab = &real.edge(EdgeLabel::A1).unwrap().geodesic;
            let perp = common_perpendicular(cd, ab)?;
            Ok(vec![(EdgeLabel::L2, intersect_geodesics(cd, &perp)?)])
        }
        Piece::Pentagon { .. } => Err(PieceError::NoCenter("pentagon")),
        Piece::Hexagon { .. } => Err(PieceError::NoCenter("hexagon")),
    }
}

/// The geodesic from the ideal point `v` meeting `g` at a right angle.
fn perpendicular_through_ideal(g: &Geodesic, v: IdealPoint) -> PieceResult<Geodesic> {
    // in the frame of g the perpendiculars are the semicircles centred at 0
    let f = g.frame();
    let w = f.inverse().apply_ideal(v).finite().ok_or(PieceError::InvalidShears("vertex on the edge".into()))?;
    Ok(Geodesic::new(IdealPoint::Finite(w), IdealPoint::Finite(-w))?.apply(&f))
}

/// Length of an edge, or `Infinite` for edges with an ideal endpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EdgeLength {
    Finite(f64),
    Infinite,
}

impl EdgeLength {
    pub fn value(&self) -> Option<f64> {
        match self {
            EdgeLength::Finite(v) => Some(*v),
            EdgeLength::Infinite => None,
        }
    }
}

pub fn edge_lengths(p: &Piece) -> PieceResult<Vec<(EdgeLabel, EdgeLength)>> {
    let real = realize(p)?;
    Ok(real
        .edges
        .iter()
        .map(|e| {
            let len = match (real.vertices[e.start], real.vertices[e.end]) {
                (Vertex::Finite(a), Vertex::Finite(b)) => EdgeLength::Finite(dist(a, b)),
                _ => EdgeLength::Infinite,
            };
            (e.label, len)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyp_core::dist_between_geodesics;

    fn corner_angle(real: &PieceRealization, i: usize) -> Option<f64> {
        // angle between incoming and outgoing edges at finite vertex i
        let n = real.edges.len();
        let v = real.vertices[i].finite()?;
        let e_in = &real.edges[(i + n - 1) % n];
        let e_out = &real.edges[i];
        let f_in = e_in.geodesic.frame_at(v).ok()?;
        let f_out = e_out.geodesic.frame_at(v).ok()?;
        let rel = f_in.inverse().compose(&f_out);
        // rel fixes i; its rotation angle is the turning angle
        let d = rel.apply_cx(crate::hyp_core::Cx::new(0.0, 1.0 + 1e-6)) - crate::hyp_core::Cx::new(0.0, 1.0);
        Some((d.arg() - std::f64::consts::FRAC_PI_2).rem_euclid(std::f64::consts::TAU))
    }

    #[test]
    fn right_angles_everywhere() {
        for p in [Piece::Quad { s: -1.3 }, Piece::Quad { s: 0.0 }, Piece::Quad { s: 2.0 }, Piece::Pentagon { s1: -0.3, s2: 1.0 }, Piece::Pentagon { s1: 2.0, s2: 0.5 }, Piece::Hexagon { s1: 1.0, s2: 1.0, s3: 1.0 }, Piece::Hexagon { s1: -0.3, s2: 2.0, s3: 0.5 }] {
            let real = realize(&p).unwrap();
            for i in 0..real.vertices.len() {
                if let Some(turn) = corner_angle(&real, i) {
                    assert!((turn - std::f64::consts::FRAC_PI_2).abs() < 1e-6, "{p}: corner {} turns {turn}", real.vertex_names[i]);
                }
            }
        }
    }

    #[test]
    fn quad_zero_double_vertices() {
        let q = quad_frame(0.0);
        assert_eq!(q.es, 1.0);
        let sigma = Isometry::reflection_circle(-1.0, q.mirror_radius).unwrap();
        assert_eq!(sigma.apply_ideal(IdealPoint::Finite(1.0)).finite().map(|v| v.abs() < 1e-15), Some(true));
        assert_eq!(sigma.apply_ideal(IdealPoint::Infinity), IdealPoint::Finite(-1.0));
    }

    #[test]
    fn triangle_centers() {
        let c = centers(&Piece::Triangle).unwrap();
        let on_axis = c.iter().find(|(l, _)| *l == EdgeLabel::L3).unwrap().1;
        assert!(on_axis.x.abs() < 1e-12 && (on_axis.y - 1.0).abs() < 1e-12);
        let real = realize(&Piece::Triangle).unwrap();
        for (l, p) in c {
            assert!(dist(real.edge(l).unwrap().reference, p) < 1e-12);
        }
    }

    #[test]
    fn quad_center_matches_closed_form() {
        for s in [-2.0, -0.3, 0.0, 1.0, 2.0] {
            let c = centers(&Piece::Quad { s }).unwrap()[0].1;
            let es: f64 = f64::exp(s);
            assert!((c.x - es).abs() < 1e-9 && (c.y - (es * (1.0 + es)).sqrt()).abs() < 1e-9);
        }
        let c = centers(&Piece::Quad { s: 0.0 }).unwrap()[0].1;
        assert!((c.x - 1.0).abs() < 1e-12 && (c.y - 2f64.sqrt()).abs() < 1e-12);
        assert!(centers(&Piece::Pentagon { s1: 1.0, s2: 1.0 }).is_err());
    }

    #[test]
    fn hexagon_closes_and_has_leaf_lengths() {
        let (s1, s2, s3) = (0.4, 1.7, 0.9);
        let real = realize(&Piece::Hexagon { s1, s2, s3 }).unwrap();
        let lens: BTreeMap<_, _> = edge_lengths(&real.piece).unwrap().into_iter().collect();
        assert!((lens[&EdgeLabel::L1].value().unwrap() - (s2 + s3) / 2.0).abs() < 1e-9);
        assert!((lens[&EdgeLabel::L2].value().unwrap() - (s3 + s1) / 2.0).abs() < 1e-9);
        assert!((lens[&EdgeLabel::L3].value().unwrap() - (s1 + s2) / 2.0).abs() < 1e-9);
        // trig oracle for the a-edges
        let sides = hexagon_sides(s1, s2, s3);
        assert!((lens[&EdgeLabel::A2].value().unwrap() - sides[1]).abs() < 1e-9);
        let h = realize(&Piece::Hexagon { s1: 1.0, s2: 1.0, s3: 1.0 }).unwrap();
        let a: Vec<f64> = edge_lengths(&h.piece).unwrap().into_iter().filter(|(l, _)| !l.is_leaf()).map(|(_, v)| v.value().unwrap()).collect();
        assert!((a[0] - a[1]).abs() < 1e-9 && (a[1] - a[2]).abs() < 1e-9);
    }

    #[test]
    fn pentagon_leaf_length() {
        for (s1, s2) in [(-0.3, 1.0), (0.0, 0.3), (2.0, 2.0), (1.0, -0.3)] {
            let lens: BTreeMap<_, _> = edge_lengths(&Piece::Pentagon { s1, s2 }).unwrap().into_iter().collect();
            assert!((lens[&EdgeLabel::L1].value().unwrap() - (s1 + s2) / 2.0).abs() < 1e-9);
            assert_eq!(lens[&EdgeLabel::L2], EdgeLength::Infinite);
        }
    }

    #[test]
    fn quad_a_edge_is_common_perpendicular() {
        for s in [-1.0, 0.5, 2.0] {
            let es: f64 = f64::exp(s);
            let oracle = dist_between_geodesics(
                &Geodesic::new(IdealPoint::Finite(0.0), IdealPoint::Finite(es)).unwrap(),
                &Geodesic::new(IdealPoint::Finite(-1.0), IdealPoint::Infinity).unwrap(),
            )
            .unwrap();
            let lens: BTreeMap<_, _> = edge_lengths(&Piece::Quad { s }).unwrap().into_iter().collect();
            assert!((lens[&EdgeLabel::A1].value().unwrap() - oracle).abs() < 1e-9);
        }
    }

    #[test]
    fn realization_is_deterministic_and_convex() {
        let p = Piece::Pentagon { s1: 0.3, s2: 1.0 };
        assert_eq!(realize(&p).unwrap(), realize(&p).unwrap());
        let real = realize(&p).unwrap();
        let inner = crate::hyp_core::midpoint(real.fv("A"), real.fv("C"));
        assert!(real.contains(inner, 0.0));
        assert!(!real.contains(UhpPoint::raw(-3.0, 1.0), 1e-9));
    }
}
