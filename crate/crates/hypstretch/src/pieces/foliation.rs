use super::realize::PieceRealization;
use super::{displacement, realize, EdgeLabel, Piece, PieceError, PieceResult};
use crate::hyp_core::{horocycle_arc, point_at_signed_arc, Geodesic, Horocycle, IdealPoint, UhpPoint};
use crate::tol::FOLIATION_SLACK;

/// One partial foliation by horocycles centred at an ideal vertex. Leaves are
/// indexed by the signed arc length `d` from `origin` to the leaf, measured on
/// `axis` (an edge ending at the centre, oriented towards it).
#[derive(Debug, Clone, PartialEq)]
pub struct Sector {
    pub center_name: &'static str,
    pub center: IdealPoint,
    pub axis: Geodesic,
    pub origin: UhpPoint,
    /// Leaves exist for `d >= bound`.
    pub bound: f64,
}

impl Sector {
    pub fn leaf_parameter(&self, p: UhpPoint) -> PieceResult<f64> {
        let x = horocycle_arc(self.center, p, &self.axis)?;
        Ok(self.axis.signed_position(self.origin, x)?)
    }

    /// Where the leaf with parameter `d` crosses the axis.
    pub fn leaf_anchor(&self, d: f64) -> PieceResult<UhpPoint> {
        Ok(point_at_signed_arc(&self.axis, self.origin, d)?)
    }

    pub fn leaf(&self, d: f64) -> PieceResult<Horocycle> {
        Ok(Horocycle::new(self.center, self.leaf_anchor(d)?))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeafCoord {
    pub sector: usize,
    pub d: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Foliation {
    pub piece: Piece,
    pub sectors: Vec<Sector>,
}

impl Foliation {
    /// Leaf through `p`, or `NOT_IN_SUPPORT` if `p` lies in the unfoliated part.
    pub fn locate(&self, real: &PieceRealization, p: UhpPoint) -> PieceResult<LeafCoord> {
        if !real.contains(p, 1e-9) {
            return Err(PieceError::OutOfPiece(p.x, p.y));
        }
        for (i, s) in self.sectors.iter().enumerate() {
            let d = s.leaf_parameter(p)?;
            if d >= s.bound - FOLIATION_SLACK {
                return Ok(LeafCoord { sector: i, d });
            }
        }
        Err(PieceError::NotInSupport(format!("({}, {}) lies in the unfoliated region", p.x, p.y)))
    }

    /// Sample `n` points of a leaf inside the piece (for rendering and tests).
    pub fn leaf_samples(&self, real: &PieceRealization, leaf: LeafCoord, n: usize) -> PieceResult<Vec<UhpPoint>> {
        let sector = &self.sectors[leaf.sector];
        let h = sector.leaf(leaf.d)?;
        let norm = h.normalizer();
        let inv = norm.inverse();
        let base = norm.apply(h.anchor);
        // find the x-range of the leaf inside the piece by bisection from the anchor
        let inside = |x: f64| real.contains(inv.apply(UhpPoint::raw(x, base.y)), 1e-12);
        let reach = |dir: f64| {
            let mut step = base.y.max(1e-6);
            let mut far = 0.0;
            while inside(base.x + dir * (far + step)) && step < 1e12 {
                far += step;
                step *= 2.0;
            }
            let (mut lo, mut hi) = (far, far + step);
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if inside(base.x + dir * mid) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            lo
        };
        let (left, right) = (reach(-1.0), reach(1.0));
        Ok((0..n)
            .map(|k| {
                let u = if n == 1 { 0.5 } else { k as f64 / (n - 1) as f64 };
                inv.apply(UhpPoint::raw(base.x - left + u * (left + right), base.y))
            })
            .collect())
    }
}

fn toward(g: &Geodesic, v: IdealPoint) -> Geodesic {
    if g.q == v {
        *g
    } else {
        g.reversed()
    }
}

/// The horocyclic partial foliation of a piece.
pub fn foliation(p: &Piece) -> PieceResult<Foliation> {
    let real = realize(p)?;
    let ideal = |n: &str| real.vertex(n).unwrap().ideal().unwrap();
    let edge = |l: EdgeLabel| real.edge(l).unwrap();
    let sectors = match *p {
        Piece::Triangle => {
            // the sector at each vertex is measured on the edge that ends there
            [(EdgeLabel::L1, "B"), (EdgeLabel::L2, "C"), (EdgeLabel::L3, "A")]
                .into_iter()
                .map(|(l, v)| Sector { center_name: v, center: ideal(v), axis: edge(l).geodesic, origin: edge(l).reference, bound: 0.0 })
                .collect()
        }
        Piece::Quad { s } => {
            let cd = edge(EdgeLabel::L2);
            ["C", "D"]
                .into_iter()
                .map(|v| Sector { center_name: v, center: ideal(v), axis: toward(&cd.geodesic, ideal(v)), origin: cd.reference, bound: displacement(s) })
                .collect()
        }
        Piece::Pentagon { s1, .. } => {
            let de = edge(EdgeLabel::L3);
            let e = real.fv("E");
            // leaves start at the higher of the projections of the two ends of the
            // lifted l1 onto the vertical sides; height 1 + W = r^2 when s2 >= s1
            let floor = (e.y * e.y).max(s1.exp());
            vec![Sector { center_name: "D", center: ideal("D"), axis: toward(&de.geodesic, ideal("D")), origin: e, bound: (floor / e.y).ln() }]
        }
        Piece::Hexagon { .. } => vec![],
    };
    Ok(Foliation { piece: *p, sectors })
}

/// Image parameter `e^t d` of the leaf `d`, checked against both supports.
pub fn foliation_image(p: &Piece, t: f64, leaf: LeafCoord) -> PieceResult<f64> {
    let before = foliation(p)?;
    let sector = before.sectors.get(leaf.sector).ok_or_else(|| PieceError::NotInSupport("no such sector".into()))?;
    if leaf.d < sector.bound - FOLIATION_SLACK {
        return Err(PieceError::NotInSupport(format!("leaf {} below the support bound {}", leaf.d, sector.bound)));
    }
    let image = t.exp() * leaf.d;
    let after = foliation(&p.stretch_params(t))?;
    let bound = after.sectors[leaf.sector].bound;
    if image < bound - FOLIATION_SLACK {
        return Err(PieceError::NotInSupport(format!("image leaf {image} below the stretched bound {bound}")));
    }
    Ok(image)
}
