//! Pointwise stretch maps: Thurston's map on the ideal triangle and the
//! midpoint-averaged maps on quadrilaterals and pentagons.

use super::realize::{pentagon_frame, quad_frame};
use super::{realize, EdgeLabel, Piece, PieceError, PieceRealization, PieceResult};
use crate::hyp_core::{midpoint, point_at_signed_arc, Geodesic, Isometry, UhpPoint};

/// Deck steps allowed when pulling a point of the pentagon cover back into
/// the fundamental domain.
pub const UNROLL_CAP: usize = 64;

/// Points this close to the lifted `l1` are mapped by the affine rule on the axis.
const NEAR_AXIS: f64 = 1e-9;

/// `z -> 1/(1-z)`, cyclically permuting `0 -> 1 -> ∞ -> 0`.
fn rho() -> Isometry {
    Isometry::new(0.0, 1.0, -1.0, 1.0, false).unwrap()
}

fn stretch_cusp(p: UhpPoint, k: f64) -> UhpPoint {
    if p.y >= 1.0 {
        UhpPoint::raw(p.x, (k * p.y.ln()).exp())
    } else {
        p
    }
}

/// Thurston's map on the triangle `0, 1, ∞`, without a membership check.
fn triangle_stretch_raw(p: UhpPoint, k: f64) -> UhpPoint {
    if p.y >= 1.0 {
        return stretch_cusp(p, k);
    }
    let r2 = p.x * p.x + p.y * p.y;
    if r2 <= p.y {
        let r = rho();
        return r.apply(stretch_cusp(r.inverse().apply(p), k));
    }
    let u = 1.0 - p.x;
    if u * u + p.y * p.y <= p.y {
        let r = rho();
        return r.inverse().apply(stretch_cusp(r.apply(p), k));
    }
    p
}

/// Thurston's stretch map of the canonical ideal triangle `0, 1, ∞`: leaf `d`
/// of each cusp sector goes to leaf `e^t d`, affinely; the central region is fixed.
pub fn triangle_stretch(p: UhpPoint, t: f64) -> PieceResult<UhpPoint> {
    let tol = 1e-9;
    let inside = p.x >= -tol && p.x <= 1.0 + tol && (p.x - 0.5).powi(2) + p.y * p.y >= 0.25 - tol;
    if !inside || t < 0.0 {
        return Err(PieceError::OutOfPiece(p.x, p.y));
    }
    Ok(triangle_stretch_raw(p, t.exp()))
}

/// Stretch of the ideal quadrilateral `-1, 0, e^s, ∞` onto `-1, 0, e^{s'}, ∞`,
/// triangle by triangle across the diagonal `0 ∞`.
fn quad_double_stretch(es: f64, es_t: f64, k: f64, p: UhpPoint) -> UhpPoint {
    if p.x >= 0.0 {
        let q = triangle_stretch_raw(UhpPoint::raw(p.x / es, p.y / es), k);
        UhpPoint::raw(q.x * es_t, q.y * es_t)
    } else {
        let q = triangle_stretch_raw(UhpPoint::raw(p.x + 1.0, p.y), k);
        UhpPoint::raw(q.x - 1.0, q.y)
    }
}

/// Hyperbolic deck transformation of the pentagon double: fixes `0` and `W`,
/// translates by `s1 + s2` and sends `-1` to `e^{s1}`.
pub fn pentagon_deck(s1: f64, s2: f64) -> Isometry {
    let w = pentagon_frame(s1, s2).w;
    let k = (s1 + s2).exp();
    Isometry::new(-w * k, 0.0, 1.0 - k, -w, false).expect("deck transformation is hyperbolic")
}

#[derive(Debug, Clone)]
enum Kind {
    Quad { es: f64, es_t: f64 },
    Pentagon { e1: f64, e1_t: f64, deck: Isometry, deck_inv: Isometry, deck_t: Isometry, deck_t_inv: Isometry, axis: Geodesic, axis_t: Geodesic },
}

/// The averaged stretch map of a quadrilateral or pentagon onto its stretched copy.
#[derive(Debug, Clone)]
pub struct AveragedStretch {
    pub source: PieceRealization,
    pub target: PieceRealization,
    pub t: f64,
    mirror: Isometry,
    mirror_t: Isometry,
    kind: Kind,
}

impl AveragedStretch {
    pub fn new(p: &Piece, t: f64) -> PieceResult<Self> {
        if !(t >= 0.0) {
            return Err(PieceError::InvalidShears(format!("stretch time {t} must be nonnegative")));
        }
        let stretched = p.stretch_params(t);
        let (source, target) = match p {
            Piece::Hexagon { .. } => return Err(PieceError::HexagonUnsupported),
            Piece::Triangle => return Err(PieceError::InvalidShears("triangles use triangle_stretch".into())),
            _ => (realize(p)?, realize(&stretched)?),
        };
        let (mirror, mirror_t, kind) = match (*p, stretched) {
            (Piece::Quad { s }, Piece::Quad { s: st }) => {
                let (q, qt) = (quad_frame(s), quad_frame(st));
                (Isometry::reflection_circle(-1.0, q.mirror_radius)?, Isometry::reflection_circle(-1.0, qt.mirror_radius)?, Kind::Quad { es: q.es, es_t: qt.es })
            }
            (Piece::Pentagon { s1, s2 }, Piece::Pentagon { s1: t1, s2: t2 }) => {
                let (f, ft) = (pentagon_frame(s1, s2), pentagon_frame(t1, t2));
                let deck = pentagon_deck(s1, s2);
                let deck_t = pentagon_deck(t1, t2);
                let kind = Kind::Pentagon {
                    e1: f.e1,
                    e1_t: ft.e1,
                    deck_inv: deck.inverse(),
                    deck,
                    deck_t_inv: deck_t.inverse(),
                    deck_t,
                    axis: source.edge(EdgeLabel::L1).unwrap().geodesic,
                    axis_t: target.edge(EdgeLabel::L1).unwrap().geodesic,
                };
                (Isometry::reflection_circle(-1.0, f.r)?, Isometry::reflection_circle(-1.0, ft.r)?, kind)
            }
            _ => unreachable!("stretching preserves the piece type"),
        };
        Ok(Self { source, target, t, mirror, mirror_t, kind })
    }

    /// The unaveraged map on the universal cover of the double.
    pub fn lifted(&self, p: UhpPoint) -> PieceResult<UhpPoint> {
        let k = self.t.exp();
        match &self.kind {
            Kind::Quad { es, es_t } => Ok(quad_double_stretch(*es, *es_t, k, p)),
            Kind::Pentagon { e1, e1_t, deck, deck_inv, deck_t, deck_t_inv, .. } => {
                let mut q = p;
                let mut n: i64 = 0;
                let mut steps = 0;
                loop {
                    if (q.x - e1 / 2.0).powi(2) + q.y * q.y < (e1 / 2.0).powi(2) {
                        q = deck_inv.apply(q);
                        n += 1;
                    } else if (q.x + 0.5).powi(2) + q.y * q.y < 0.25 {
                        q = deck.apply(q);
                        n -= 1;
                    } else {
                        break;
                    }
                    steps += 1;
                    if steps > UNROLL_CAP {
                        return Err(PieceError::UnrollLimit(UNROLL_CAP));
                    }
                }
                let mut out = quad_double_stretch(*e1, *e1_t, k, q);
                let step = if n > 0 { deck_t } else { deck_t_inv };
                for _ in 0..n.unsigned_abs() {
                    out = step.apply(out);
                }
                Ok(out)
            }
        }
    }

    pub fn eval(&self, p: UhpPoint) -> PieceResult<UhpPoint> {
        if !self.source.contains(p, 1e-9) {
            return Err(PieceError::OutOfPiece(p.x, p.y));
        }
        if let Kind::Pentagon { axis, axis_t, .. } = &self.kind {
            if axis.distance_to(p) < NEAR_AXIS {
                let (a, a_t) = (self.source.fv("A"), self.target.fv("A"));
                let d = axis.signed_position(a, crate::hyp_core::foot_of_perpendicular(p, axis))?;
                return Ok(point_at_signed_arc(axis_t, a_t, self.t.exp() * d)?);
            }
        }
        let direct = self.lifted(p)?;
        let mirrored = self.mirror_t.apply(self.lifted(self.mirror.apply(p))?);
        Ok(midpoint(direct, mirrored))
    }
}

/// One-shot evaluation of the averaged stretch map.
pub fn averaged_stretch_eval(p: &Piece, t: f64, point: UhpPoint) -> PieceResult<UhpPoint> {
    AveragedStretch::new(p, t)?.eval(point)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyp_core::dist;
    use crate::pieces::lipschitz::{sample_points, sampled_lipschitz};
    use crate::pieces::{centers, foliation, special_points};

    const TS: [f64; 3] = [0.25, 0.5, 1.0];

    #[test]
    fn triangle_fixes_centers_and_scales_edges() {
        for t in TS {
            for (_, o) in centers(&Piece::Triangle).unwrap() {
                assert!(triangle_stretch(o, t).unwrap().approx_eq(&o, 1e-12));
            }
            let k = t.exp();
            for d in [-3.0, -0.5, 0.2, 2.0] {
                let e = realize(&Piece::Triangle).unwrap();
                for edge in &e.edges {
                    let p = point_at_signed_arc(&edge.geodesic, edge.reference, d).unwrap();
                    let q = triangle_stretch(p, t).unwrap();
                    assert!((edge.geodesic.signed_position(edge.reference, q).unwrap() - k * d).abs() < 1e-9, "{:?} {d}", edge.label);
                }
            }
        }
    }

    #[test]
    fn triangle_rejects_outside_points() {
        assert!(matches!(triangle_stretch(UhpPoint::new(0.5, 0.2).unwrap(), 1.0), Err(PieceError::OutOfPiece(..))));
        assert!(matches!(triangle_stretch(UhpPoint::new(2.0, 3.0).unwrap(), 1.0), Err(PieceError::OutOfPiece(..))));
    }

    #[test]
    fn triangle_identity_at_zero() {
        let real = realize(&Piece::Triangle).unwrap();
        for p in sample_points(&real, 1000, 50.0) {
            assert!(triangle_stretch(p, 0.0).unwrap().approx_eq(&p, 1e-12));
        }
    }

    #[test]
    fn deck_sends_spike_lift() {
        for (s1, s2) in [(0.3, 1.0), (1.0, 1.0), (-0.3, 2.0)] {
            let h = pentagon_deck(s1, s2);
            let q = h.apply(UhpPoint::new(-1.0, 1e-300).unwrap());
            assert!((q.x - f64::exp(s1)).abs() < 1e-9);
            assert!((crate::hyp_core::translation_length(&h) - (s1 + s2)).abs() < 1e-9);
        }
    }

    #[test]
    fn quad_center_and_special_points_are_carried() {
        for s in [-1.0, 0.0, 0.5, 2.0] {
            for t in TS {
                let m = AveragedStretch::new(&Piece::Quad { s }, t).unwrap();
                let o = centers(&Piece::Quad { s }).unwrap()[0].1;
                let o_t = centers(&m.target.piece).unwrap()[0].1;
                assert!(dist(m.eval(o).unwrap(), o_t) < 1e-9, "s={s} t={t}");
                if s >= 0.0 {
                    let sp = special_points(&Piece::Quad { s }).unwrap();
                    let sp_t = special_points(&m.target.piece).unwrap();
                    for name in ["P_AD", "P_BC"] {
                        let img = m.eval(sp.point(name).unwrap()).unwrap();
                        assert!(dist(img, sp_t.point(name).unwrap()) < 1e-6, "{name} s={s} t={t}");
                    }
                }
            }
        }
    }

    fn check_leaf_lengths(p: Piece, t: f64) {
        let m = AveragedStretch::new(&p, t).unwrap();
        for edge in m.source.edges.iter().filter(|e| e.label.is_leaf()) {
            let target = m.target.edge(edge.label).unwrap();
            let o = edge.reference;
            let o_img = m.eval(o).unwrap();
            let base = target.geodesic.signed_position(target.reference, o_img).unwrap();
            for d in [0.1, 0.4, 1.0, 2.5] {
                let q = point_at_signed_arc(&edge.geodesic, o, d).unwrap();
                if !m.source.contains(q, 1e-9) {
                    continue;
                }
                let img = m.eval(q).unwrap();
                assert!(target.geodesic.distance_to(img) < 1e-9, "{p} {:?} off edge", edge.label);
                let got = target.geodesic.signed_position(target.reference, img).unwrap() - base;
                assert!((got - t.exp() * d).abs() < 1e-9, "{p} t={t} {:?}: {got} vs {}", edge.label, t.exp() * d);
            }
        }
    }

    #[test]
    fn leaf_arc_lengths_scale() {
        for t in TS {
            for s in [-1.0, 0.5, 2.0] {
                check_leaf_lengths(Piece::Quad { s }, t);
            }
            for (s1, s2) in [(0.3, 1.0), (1.0, 1.0), (-0.3, 2.0), (1.0, 0.3)] {
                check_leaf_lengths(Piece::Pentagon { s1, s2 }, t);
            }
        }
    }

    #[test]
    fn a_edges_map_to_a_edges() {
        for p in [Piece::Quad { s: 0.7 }, Piece::Pentagon { s1: 0.5, s2: 1.0 }] {
            let m = AveragedStretch::new(&p, 0.5).unwrap();
            for edge in m.source.edges.iter().filter(|e| !e.label.is_leaf()) {
                let target = m.target.edge(edge.label).unwrap();
                for u in [0.0, 0.2, 0.5, 0.8, 1.0] {
                    let (a, b) = (m.source.fv(m.source.vertex_names[edge.start]), m.source.fv(m.source.vertex_names[edge.end]));
                    let q = point_at_signed_arc(&edge.geodesic, a, u * dist(a, b)).unwrap();
                    assert!(target.geodesic.distance_to(m.eval(q).unwrap()) < 1e-6);
                }
            }
        }
    }

    /// Largest `|d' - e^t d|` over sampled points of foliation leaves, where `d'` is
    /// the leaf parameter of the image in the stretched piece.
    fn leaf_drift(p: Piece, t: f64, interior: bool) -> (f64, f64) {
        let f = foliation(&p).unwrap();
        let m = AveragedStretch::new(&p, t).unwrap();
        let f_t = foliation(&m.target.piece).unwrap();
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for (i, sector) in f.sectors.iter().enumerate() {
            for extra in [0.0, 0.3, 1.5] {
                let leaf = super::super::LeafCoord { sector: i, d: sector.bound + extra };
                let pts = f.leaf_samples(&m.source, leaf, 9).unwrap();
                let pick: Vec<_> = if interior { pts } else { vec![pts[0], pts[8]] };
                for q in pick {
                    let diff = f_t.sectors[i].leaf_parameter(m.eval(q).unwrap()).unwrap() - t.exp() * leaf.d;
                    lo = lo.min(diff);
                    hi = hi.max(diff);
                }
            }
        }
        (lo, hi)
    }

    #[test]
    fn leaf_ends_scale_exactly() {
        for p in [Piece::Quad { s: -1.0 }, Piece::Quad { s: 0.5 }, Piece::Quad { s: 2.0 }, Piece::Pentagon { s1: 0.5, s2: 1.0 }, Piece::Pentagon { s1: 1.0, s2: 0.3 }] {
            for t in TS {
                let (lo, hi) = leaf_drift(p, t, false);
                assert!(lo.abs().max(hi.abs()) < 1e-9, "{p} t={t}: {lo} {hi}");
            }
        }
    }

    #[test]
    fn leaf_interiors_bend_into_the_horoball() {
        // the two averaged maps carry a leaf onto concentric horocycles e^t d -/+ c;
        // the geodesic midpoint of their images sits slightly deeper than e^t d
        for p in [Piece::Quad { s: -1.0 }, Piece::Quad { s: 0.5 }, Piece::Quad { s: 2.0 }, Piece::Pentagon { s1: 0.5, s2: 1.0 }] {
            for t in TS {
                let (lo, hi) = leaf_drift(p, t, true);
                assert!(lo > -1e-9, "{p} t={t}: {lo}");
                assert!(hi < 1e-2, "{p} t={t}: {hi}");
            }
        }
        let (_, hi) = leaf_drift(Piece::Quad { s: -1.0 }, 0.25, true);
        assert!(hi > 1e-6);
    }

    #[test]
    fn sampled_lipschitz_bound() {
        for p in [Piece::Triangle, Piece::Quad { s: -1.0 }, Piece::Quad { s: 1.5 }, Piece::Pentagon { s1: 0.5, s2: 1.0 }, Piece::Pentagon { s1: -0.3, s2: 2.0 }] {
            let real = realize(&p).unwrap();
            let pts = sample_points(&real, 300, 20.0);
            for t in TS {
                let lip = if p == Piece::Triangle {
                    sampled_lipschitz(&pts, |q| triangle_stretch(q, t)).unwrap()
                } else {
                    let m = AveragedStretch::new(&p, t).unwrap();
                    sampled_lipschitz(&pts, |q| m.eval(q)).unwrap()
                };
                assert!(lip <= t.exp() * (1.0 + 1e-6), "{p} t={t}: {lip}");
            }
        }
    }

    #[test]
    fn identity_at_zero_and_images_in_target() {
        for p in [Piece::Quad { s: 0.3 }, Piece::Pentagon { s1: 0.2, s2: 0.9 }] {
            let m0 = AveragedStretch::new(&p, 0.0).unwrap();
            let m1 = AveragedStretch::new(&p, 1.0).unwrap();
            for q in sample_points(&m0.source, 500, 20.0) {
                assert!(dist(m0.eval(q).unwrap(), q) < 1e-9);
                assert!(m1.target.contains(m1.eval(q).unwrap(), 1e-7));
            }
        }
    }

    #[test]
    fn hexagon_is_unsupported() {
        let r = averaged_stretch_eval(&Piece::Hexagon { s1: 1.0, s2: 1.0, s3: 1.0 }, 0.5, UhpPoint::i());
        assert_eq!(r, Err(PieceError::HexagonUnsupported));
    }
}
