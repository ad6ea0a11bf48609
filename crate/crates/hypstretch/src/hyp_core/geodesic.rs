use super::{dist, GeomError, GeomResult, IdealPoint, Isometry, UhpPoint};
use crate::tol::TOL;

/// An oriented complete geodesic from `p` to `q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geodesic {
    pub p: IdealPoint,
    pub q: IdealPoint,
}

impl Geodesic {
    pub fn new(p: IdealPoint, q: IdealPoint) -> GeomResult<Self> {
        if p.approx_eq(&q, 1e-15) {
            return Err(GeomError::DegenerateGeodesic);
        }
        Ok(Self { p, q })
    }

    pub fn reversed(&self) -> Self {
        Self { p: self.q, q: self.p }
    }

    /// An orientation-preserving isometry sending `0 -> p` and `∞ -> q`.
    pub fn frame(&self) -> Isometry {
        match (self.p, self.q) {
            (IdealPoint::Finite(p), IdealPoint::Infinity) => Isometry::shift(p),
            (IdealPoint::Infinity, IdealPoint::Finite(q)) => Isometry { a: q, b: -1.0, c: 1.0, d: 0.0, reflect: false },
            (IdealPoint::Finite(p), IdealPoint::Finite(q)) => {
                if q > p {
                    Isometry::new(q, p, 1.0, 1.0, false).expect("q > p")
                } else {
                    Isometry::new(q, -p, 1.0, -1.0, false).expect("p > q")
                }
            }
            (IdealPoint::Infinity, IdealPoint::Infinity) => unreachable!("validated geodesic"),
        }
    }

    /// Like [`Geodesic::frame`] but additionally sending `i` to `origin`.
    pub fn frame_at(&self, origin: UhpPoint) -> GeomResult<Isometry> {
        let f = self.frame();
        let w = f.inverse().apply(origin);
        let off = (w.x / w.y).asinh().abs();
        if off > TOL.max(1e-7) {
            return Err(GeomError::NotOnGeodesic(off));
        }
        Ok(f.compose(&Isometry::axis_translation(w.y.ln())))
    }

    /// Hyperbolic distance from `pt` to the geodesic.
    pub fn distance_to(&self, pt: UhpPoint) -> f64 {
        let w = self.frame().inverse().apply(pt);
        (w.x / w.y).asinh().abs()
    }

    pub fn contains(&self, pt: UhpPoint, tol: f64) -> bool {
        self.distance_to(pt) <= tol
    }

    /// `-1`, `0` or `1` for `pt` left of, on, or right of the oriented geodesic.
    pub fn side(&self, pt: UhpPoint, tol: f64) -> i8 {
        let w = self.frame().inverse().apply(pt);
        let s = (w.x / w.y).asinh();
        if s.abs() <= tol {
            0
        } else if s < 0.0 {
            -1
        } else {
            1
        }
    }

    /// Signed arc length from `origin` to the foot of `pt`, positive towards `q`.
    pub fn signed_position(&self, origin: UhpPoint, pt: UhpPoint) -> GeomResult<f64> {
        let f = self.frame_at(origin)?;
        Ok(f.inverse().apply(pt).to_cx().norm().ln())
    }

    /// The reflection fixing this geodesic pointwise.
    pub fn reflection(&self) -> Isometry {
        let f = self.frame();
        f.compose(&Isometry::reflection_vertical(0.0)).compose(&f.inverse())
    }

    pub fn apply(&self, m: &Isometry) -> Geodesic {
        Geodesic { p: m.apply_ideal(self.p), q: m.apply_ideal(self.q) }
    }

    pub fn approx_eq(&self, other: &Geodesic, tol: f64) -> bool {
        self.p.approx_eq(&other.p, tol) && self.q.approx_eq(&other.q, tol)
    }
}

/// The geodesic through `p` and `q`, oriented from `p` towards `q`.
pub fn geodesic_through(p: UhpPoint, q: UhpPoint) -> GeomResult<Geodesic> {
    if dist(p, q) == 0.0 {
        return Err(GeomError::DegenerateGeodesic);
    }
    // work in the chart where p = i, then map the endpoints back
    let n = Isometry { a: 1.0, b: p.x, c: 0.0, d: 1.0, reflect: false }.compose(&Isometry::new(p.y, 0.0, 0.0, 1.0, false)?);
    let w = n.inverse().apply(q);
    let g = if w.x.abs() <= 1e-15 * (1.0 + w.y) {
        if w.y > 1.0 {
            Geodesic::new(IdealPoint::Finite(0.0), IdealPoint::Infinity)?
        } else {
            Geodesic::new(IdealPoint::Infinity, IdealPoint::Finite(0.0))?
        }
    } else {
        // circle through i and w centred on the real axis
        let c = (w.x * w.x + w.y * w.y - 1.0) / (2.0 * w.x);
        let r = (c * c + 1.0).sqrt();
        let (lo, hi) = if c >= 0.0 { (-1.0 / (c + r), c + r) } else { (c - r, 1.0 / (r - c)) };
        let (lo, hi) = (IdealPoint::Finite(lo), IdealPoint::Finite(hi));
        if w.x > 0.0 {
            Geodesic::new(lo, hi)?
        } else {
            Geodesic::new(hi, lo)?
        }
    };
    Ok(g.apply(&n))
}

/// The geodesic from the finite point `p` to the ideal point `v`.
pub fn geodesic_to_ideal(p: UhpPoint, v: IdealPoint) -> GeomResult<Geodesic> {
    match v {
        IdealPoint::Infinity => Geodesic::new(IdealPoint::Finite(p.x), IdealPoint::Infinity),
        IdealPoint::Finite(v) => {
            if (p.x - v).abs() <= 1e-15 * (1.0 + v.abs()) {
                return Geodesic::new(IdealPoint::Infinity, IdealPoint::Finite(v));
            }
            let c = (p.x * p.x + p.y * p.y - v * v) / (2.0 * (p.x - v));
            Geodesic::new(IdealPoint::Finite(2.0 * c - v), IdealPoint::Finite(v))
        }
    }
}

/// Intersection point of two geodesics that cross transversally.
pub fn intersect_geodesics(g1: &Geodesic, g2: &Geodesic) -> GeomResult<UhpPoint> {
    let f = g1.frame();
    let finv = f.inverse();
    match (finv.apply_ideal(g2.p).finite(), finv.apply_ideal(g2.q).finite()) {
        (Some(a), Some(b)) if a * b < 0.0 => Ok(f.apply(UhpPoint::raw(0.0, (-a * b).sqrt()))),
        _ => Err(GeomError::NoIntersection),
    }
}

/// The geodesic through `m` perpendicular to `g` (which must contain `m`),
/// oriented from the right side of `g` to its left.
pub fn perpendicular_at(g: &Geodesic, m: UhpPoint) -> GeomResult<Geodesic> {
    let f = g.frame_at(m)?;
    Ok(Geodesic { p: IdealPoint::Finite(1.0), q: IdealPoint::Finite(-1.0) }.apply(&f))
}

/// Perpendicular bisector of the segment from `p` to `q`.
pub fn perpendicular_bisector(p: UhpPoint, q: UhpPoint) -> GeomResult<Geodesic> {
    let g = geodesic_through(p, q)?;
    perpendicular_at(&g, super::midpoint(p, q))
}

/// Point at signed arc length `s` from `origin` along `g` (positive towards `g.q`).
pub fn point_at_signed_arc(g: &Geodesic, origin: UhpPoint, s: f64) -> GeomResult<UhpPoint> {
    let f = g.frame_at(origin)?;
    Ok(f.apply(UhpPoint::raw(0.0, s.exp())))
}

/// Orthogonal projection of `p` onto `g`.
pub fn foot_of_perpendicular(p: UhpPoint, g: &Geodesic) -> UhpPoint {
    let f = g.frame();
    let w = f.inverse().apply(p);
    f.apply(UhpPoint::raw(0.0, w.to_cx().norm()))
}

/// Frame of `g1` (possibly composed with the reflection in the imaginary axis)
/// in which `g2` has endpoints `0 < a < b`.
fn normalized_pair(g1: &Geodesic, g2: &Geodesic) -> GeomResult<(Isometry, f64, f64)> {
    let f = g1.frame();
    let finv = f.inverse();
    match (finv.apply_ideal(g2.p).finite(), finv.apply_ideal(g2.q).finite()) {
        (Some(a), Some(b)) if a * b > 0.0 => {
            let flip = if a < 0.0 { Isometry::reflection_vertical(0.0) } else { Isometry::identity() };
            Ok((f.compose(&flip), a.abs().min(b.abs()), a.abs().max(b.abs())))
        }
        _ => Err(GeomError::IntersectingGeodesics),
    }
}

/// Length of the common perpendicular of two ultraparallel geodesics.
pub fn dist_between_geodesics(g1: &Geodesic, g2: &Geodesic) -> GeomResult<f64> {
    let (_, a, b) = normalized_pair(g1, g2)?;
    Ok(((b + a) / (b - a)).acosh())
}

/// The common perpendicular, oriented from `g1` towards `g2`.
pub fn common_perpendicular(g1: &Geodesic, g2: &Geodesic) -> GeomResult<Geodesic> {
    let (f, a, b) = normalized_pair(g1, g2)?;
    let r = (a * b).sqrt();
    let g = Geodesic::new(IdealPoint::Finite(-r), IdealPoint::Finite(r))?;
    Ok(g.apply(&f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fin(x: f64) -> IdealPoint {
        IdealPoint::Finite(x)
    }

    #[test]
    fn concentric_semicircles() {
        let g1 = Geodesic::new(fin(-1.0), fin(1.0)).unwrap();
        let g2 = Geodesic::new(fin(-4.0), fin(4.0)).unwrap();
        assert!((dist_between_geodesics(&g1, &g2).unwrap() - 4f64.ln()).abs() < 1e-12);
        let cp = common_perpendicular(&g1, &g2).unwrap();
        assert!(cp.contains(UhpPoint::new(0.0, 1.0).unwrap(), 1e-12));
        assert!(cp.contains(UhpPoint::new(0.0, 4.0).unwrap(), 1e-12));
        assert!(cp.q.is_infinite());
    }

    #[test]
    fn intersecting_and_asymptotic_are_rejected() {
        let g1 = Geodesic::new(fin(0.0), IdealPoint::Infinity).unwrap();
        let g2 = Geodesic::new(fin(-1.0), fin(1.0)).unwrap();
        assert_eq!(dist_between_geodesics(&g1, &g2), Err(GeomError::IntersectingGeodesics));
        let g3 = Geodesic::new(fin(0.0), fin(1.0)).unwrap();
        assert!(dist_between_geodesics(&g1, &g3).is_err());
        assert!(Geodesic::new(fin(2.0), fin(2.0)).is_err());
    }

    #[test]
    fn foot_and_arc() {
        let g = Geodesic::new(fin(0.0), IdealPoint::Infinity).unwrap();
        let f = foot_of_perpendicular(UhpPoint::new(3.0, 4.0).unwrap(), &g);
        assert!(f.x.abs() < 1e-12 && (f.y - 5.0).abs() < 1e-12);
        let p = point_at_signed_arc(&g, UhpPoint::i(), 2.0).unwrap();
        assert!((p.y - 2f64.exp()).abs() < 1e-12);
        let back = point_at_signed_arc(&g.reversed(), UhpPoint::i(), 2.0).unwrap();
        assert!((back.y - (-2f64).exp()).abs() < 1e-12);
        assert!(point_at_signed_arc(&g, UhpPoint::new(1.0, 1.0).unwrap(), 1.0).is_err());
    }

    #[test]
    fn crossing_and_bisectors() {
        let g1 = Geodesic::new(fin(0.0), IdealPoint::Infinity).unwrap();
        let g2 = Geodesic::new(fin(-2.0), fin(2.0)).unwrap();
        let x = intersect_geodesics(&g1, &g2).unwrap();
        assert!(x.x.abs() < 1e-12 && (x.y - 2.0).abs() < 1e-12);
        assert!(intersect_geodesics(&g1, &Geodesic::new(fin(1.0), fin(2.0)).unwrap()).is_err());
        let b = perpendicular_bisector(UhpPoint::new(-1.0, 1.0).unwrap(), UhpPoint::new(1.0, 1.0).unwrap()).unwrap();
        assert!(b.contains(UhpPoint::new(0.0, 5.0).unwrap(), 1e-12));
        let h = geodesic_to_ideal(UhpPoint::new(1.0, 1.0).unwrap(), fin(0.0)).unwrap();
        assert!(h.contains(UhpPoint::new(1.0, 1.0).unwrap(), 1e-12) && h.q == fin(0.0));
    }

    #[test]
    fn sides() {
        let g = Geodesic::new(fin(0.0), IdealPoint::Infinity).unwrap();
        assert_eq!(g.side(UhpPoint::new(-1.0, 1.0).unwrap(), 1e-12), -1);
        assert_eq!(g.side(UhpPoint::new(1.0, 1.0).unwrap(), 1e-12), 1);
        let h = Geodesic::new(fin(1.0), fin(-1.0)).unwrap();
        assert_eq!(h.side(UhpPoint::new(0.0, 0.5).unwrap(), 1e-12), -1);
    }

    #[test]
    fn reflection_fixes_geodesic() {
        let g = Geodesic::new(fin(-1.0), fin(3.0)).unwrap();
        let r = g.reflection();
        let on = UhpPoint::new(1.0, 2.0).unwrap();
        assert!(dist(r.apply(on), on) < 1e-12);
        let off = UhpPoint::new(1.0, 1.0).unwrap();
        assert_eq!(g.side(r.apply(off), 1e-12), -g.side(off, 1e-12));
    }

    fn arb_point() -> impl Strategy<Value = UhpPoint> {
        (-4.0..4.0f64, 0.1..5.0f64).prop_map(|(x, y)| UhpPoint::new(x, y).unwrap())
    }

    proptest! {
        #[test]
        fn geodesic_through_contains_both(p in arb_point(), q in arb_point()) {
            prop_assume!(dist(p, q) > 1e-6);
            let g = geodesic_through(p, q).unwrap();
            prop_assert!(g.contains(p, 1e-7) && g.contains(q, 1e-7));
            prop_assert!(g.signed_position(p, q).unwrap() > 0.0);
        }

        #[test]
        fn midpoint_is_equidistant(p in arb_point(), q in arb_point()) {
            let m = super::super::midpoint(p, q);
            let (a, b) = (dist(p, m), dist(m, q));
            prop_assert!((a - b).abs() <= 1e-7 * (1.0 + a));
            prop_assert!((a + b - dist(p, q)).abs() <= 1e-7 * (1.0 + a));
        }

        #[test]
        fn foot_minimizes_distance(p in arb_point(), q in arb_point(), r in arb_point(), s in -2.0..2.0f64) {
            prop_assume!(dist(q, r) > 1e-3);
            let g = geodesic_through(q, r).unwrap();
            let f = foot_of_perpendicular(p, &g);
            let other = point_at_signed_arc(&g, f, s).unwrap();
            prop_assert!(dist(p, f) <= dist(p, other) + 1e-9);
            prop_assert!((dist(p, f) - g.distance_to(p)).abs() < 1e-7);
        }

        #[test]
        fn perpendicular_realizes_distance(c1 in -3.0..3.0f64, r1 in 0.2..1.0f64, gap in 0.1..3.0f64, r2 in 0.2..2.0f64, flip in any::<bool>()) {
            let c2 = c1 + r1 + gap + r2;
            let mut g1 = Geodesic::new(fin(c1 - r1), fin(c1 + r1)).unwrap();
            if flip { g1 = g1.reversed(); }
            let g2 = Geodesic::new(fin(c2 - r2), fin(c2 + r2)).unwrap();
            let cp = common_perpendicular(&g1, &g2).unwrap();
            let d = dist_between_geodesics(&g1, &g2).unwrap();
            // feet of a perpendicular pair: project the apex of cp onto each geodesic
            let apex = foot_of_perpendicular(UhpPoint::new(c1, r1).unwrap(), &cp);
            let on1 = foot_of_perpendicular(apex, &g1);
            let on2 = foot_of_perpendicular(foot_of_perpendicular(UhpPoint::new(c2, r2).unwrap(), &cp), &g2);
            prop_assert!(cp.contains(on1, 1e-7) && cp.contains(on2, 1e-7));
            prop_assert!((dist(on1, on2) - d).abs() <= 1e-7 * (1.0 + d));
            prop_assert!(cp.signed_position(on1, on2).unwrap() > 0.0);
        }
    }
}
