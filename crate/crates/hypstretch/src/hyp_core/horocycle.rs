use super::{Geodesic, GeomError, GeomResult, IdealPoint, Isometry, UhpPoint};

/// The horocycle centred at `center` passing through `anchor`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Horocycle {
    pub center: IdealPoint,
    pub anchor: UhpPoint,
}

impl Horocycle {
    pub fn new(center: IdealPoint, anchor: UhpPoint) -> Self {
        Self { center, anchor }
    }

    /// Isometry sending the centre to ∞, so the horocycle becomes a horizontal line.
    pub fn normalizer(&self) -> Isometry {
        match self.center {
            IdealPoint::Infinity => Isometry::identity(),
            IdealPoint::Finite(c) => Geodesic { p: IdealPoint::Finite(c + 1.0), q: IdealPoint::Finite(c) }.frame().inverse(),
        }
    }

    /// Height of the horocycle in normalized coordinates.
    fn height(&self) -> f64 {
        self.normalizer().apply(self.anchor).y
    }

    pub fn contains(&self, p: UhpPoint, tol: f64) -> bool {
        let h = self.height();
        let y = self.normalizer().apply(p).y;
        (y / h).ln().abs() <= tol
    }

    /// Signed length along the horocycle from the anchor to `p`, both assumed on it.
    pub fn signed_length_to(&self, p: UhpPoint) -> f64 {
        let n = self.normalizer();
        let a = n.apply(self.anchor);
        let b = n.apply(p);
        (b.x - a.x) / a.y
    }

    pub fn apply(&self, m: &Isometry) -> Horocycle {
        Horocycle { center: m.apply_ideal(self.center), anchor: m.apply(self.anchor) }
    }
}

/// Intersection of the horocycle centred at `center` through `from` with `to`.
/// When there are two intersections the one nearer to `from` is returned.
pub fn horocycle_arc(center: IdealPoint, from: UhpPoint, to: &Geodesic) -> GeomResult<UhpPoint> {
    let h = Horocycle::new(center, from);
    let n = h.normalizer();
    let start = n.apply(from);
    let g = to.apply(&n);
    let y = start.y;
    let hit = match (g.p, g.q) {
        (IdealPoint::Infinity, IdealPoint::Finite(x)) | (IdealPoint::Finite(x), IdealPoint::Infinity) => UhpPoint::raw(x, y),
        (IdealPoint::Finite(a), IdealPoint::Finite(b)) => {
            let m = (a + b) / 2.0;
            let r = (b - a).abs() / 2.0;
            if y >= r {
                return Err(GeomError::NoIntersection);
            }
            let w = (r * r - y * y).sqrt();
            let x = if ((m + w) - start.x).abs() <= ((m - w) - start.x).abs() { m + w } else { m - w };
            UhpPoint::raw(x, y)
        }
        _ => return Err(GeomError::DegenerateGeodesic),
    };
    Ok(n.inverse().apply(hit))
}
