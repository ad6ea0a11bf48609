use super::realize::{PieceRealization, Vertex};
use super::{realize, EdgeLabel, Piece, PieceResult};
use crate::hyp_core::hyperboloid::{self, bisector_normal, from_hyperboloid, meet};
use crate::hyp_core::{geodesic_through, geodesic_to_ideal, horocycle_arc, Geodesic, UhpPoint};

/// Signed distance of a projection point from a vertex, positive when the
/// point lies on the ray from `vertex` through `toward`.
#[derive(Debug, Clone, PartialEq)]
pub struct SignedDistance {
    pub point: &'static str,
    pub vertex: &'static str,
    pub toward: &'static str,
    pub value: f64,
    pub closed_form: f64,
}

impl SignedDistance {
    pub fn residual(&self) -> f64 {
        (self.value - self.closed_form).abs()
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SpecialPoints {
    pub points: Vec<(&'static str, UhpPoint)>,
    pub distances: Vec<SignedDistance>,
}

impl SpecialPoints {
    pub fn point(&self, name: &str) -> Option<UhpPoint> {
        self.points.iter().find(|(n, _)| *n == name).map(|(_, p)| *p)
    }

    pub fn max_residual(&self) -> f64 {
        self.distances.iter().map(SignedDistance::residual).fold(0.0, f64::max)
    }
}

fn ray(real: &PieceRealization, from: &str, to: &str) -> PieceResult<Geodesic> {
    let v = real.fv(from);
    Ok(match real.vertex(to).expect("vertex name") {
        Vertex::Finite(w) => geodesic_through(v, w)?,
        Vertex::Ideal(w) => geodesic_to_ideal(v, w)?,
    })
}

fn signed(real: &PieceRealization, point: (&'static str, UhpPoint), vertex: &'static str, toward: &'static str, closed_form: f64) -> PieceResult<SignedDistance> {
    let g = ray(real, vertex, toward)?;
    let value = g.signed_position(real.fv(vertex), point.1)?;
    Ok(SignedDistance { point: point.0, vertex, toward, value, closed_form })
}

fn leaf(real: &PieceRealization, l: EdgeLabel) -> Geodesic {
    real.edge(l).expect("leaf edge").geodesic
}

/// Meet of the axes of two segments, as a projective point (it may be ideal
/// or hyperideal), together with its actual position when it lies in the plane.
fn axes_meet(real: &PieceRealization, s1: (&str, &str), s2: (&str, &str)) -> (hyperboloid::Vec3, Option<UhpPoint>) {
    let h = meet(bisector_normal(real.fv(s1.0), real.fv(s1.1)), bisector_normal(real.fv(s2.0), real.fv(s2.1)));
    (h, from_hyperboloid(h).ok())
}

fn project(h: hyperboloid::Vec3, g: &Geodesic) -> PieceResult<UhpPoint> {
    Ok(hyperboloid::project(h, hyperboloid::normal(g))?)
}

/// Special points computed by their geometric construction, each signed
/// distance paired with its closed form.
pub fn special_points(p: &Piece) -> PieceResult<SpecialPoints> {
    let real = realize(p)?;
    let mut out = SpecialPoints::default();
    match *p {
        Piece::Triangle => {}
        Piece::Quad { s } => {
            let center = real.edge(EdgeLabel::L2).unwrap().reference;
            let d = real.vertex("D").unwrap().ideal().unwrap();
            let c = real.vertex("C").unwrap().ideal().unwrap();
            let p_ad = horocycle_arc(d, center, &leaf(&real, EdgeLabel::L3))?;
            let p_bc = horocycle_arc(c, center, &leaf(&real, EdgeLabel::L1))?;
            out.points = vec![("O_Q", center), ("P_AD", p_ad), ("P_BC", p_bc)];
            out.distances.push(signed(&real, ("P_AD", p_ad), "A", "D", s / 2.0)?);
            out.distances.push(signed(&real, ("P_BC", p_bc), "B", "C", s / 2.0)?);
        }
        Piece::Pentagon { s1, s2 } => {
            let (h, inside) = axes_meet(&real, ("A", "E"), ("B", "C"));
            let h_ab = project(h, &leaf(&real, EdgeLabel::L1))?;
            let h_dc = project(h, &leaf(&real, EdgeLabel::L2))?;
            let h_de = project(h, &leaf(&real, EdgeLabel::L3))?;
            out.points = inside.map(|p| ("H", p)).into_iter().collect();
            out.points.extend([("H_AB", h_ab), ("H_DC", h_dc), ("H_DE", h_de)]);
            out.distances.push(signed(&real, ("H_DE", h_de), "E", "D", s1 / 2.0)?);
            out.distances.push(signed(&real, ("H_DC", h_dc), "C", "D", s2 / 2.0)?);
            out.distances.push(signed(&real, ("H_AB", h_ab), "A", "B", s1 / 2.0)?);
            out.distances.push(signed(&real, ("H_AB", h_ab), "B", "A", s2 / 2.0)?);
        }
        Piece::Hexagon { s1, s2, s3 } => {
            let (h, inside) = axes_meet(&real, ("B", "C"), ("D", "E"));
            let h_ab = project(h, &leaf(&real, EdgeLabel::L3))?;
            let h_dc = project(h, &leaf(&real, EdgeLabel::L1))?;
            let h_ef = project(h, &leaf(&real, EdgeLabel::L2))?;
            out.points = inside.map(|p| ("H", p)).into_iter().collect();
            out.points.extend([("H_AB", h_ab), ("H_DC", h_dc), ("H_EF", h_ef)]);
            out.distances.push(signed(&real, ("H_EF", h_ef), "F", "E", s1 / 2.0)?);
            out.distances.push(signed(&real, ("H_AB", h_ab), "A", "B", s1 / 2.0)?);
            out.distances.push(signed(&real, ("H_DC", h_dc), "C", "D", s2 / 2.0)?);
            out.distances.push(signed(&real, ("H_AB", h_ab), "B", "A", s2 / 2.0)?);
            out.distances.push(signed(&real, ("H_EF", h_ef), "E", "F", s3 / 2.0)?);
            out.distances.push(signed(&real, ("H_DC", h_dc), "D", "C", s3 / 2.0)?);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyp_core::{dist, perpendicular_bisector};

    const GRID: [f64; 7] = [-2.0, -1.0, -0.3, 0.0, 0.3, 1.0, 2.0];

    #[test]
    fn quad_examples() {
        let sp = special_points(&Piece::Quad { s: 0.0 }).unwrap();
        let real = realize(&Piece::Quad { s: 0.0 }).unwrap();
        assert!(dist(sp.point("P_AD").unwrap(), real.fv("A")) < 1e-12);
        assert!(dist(sp.point("P_BC").unwrap(), real.fv("B")) < 1e-12);
        let sp = special_points(&Piece::Quad { s: 2.0 }).unwrap();
        let bc = sp.distances.iter().find(|d| d.point == "P_BC").unwrap();
        assert!((bc.value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn grid_matches_closed_forms() {
        for s in GRID {
            assert!(special_points(&Piece::Quad { s }).unwrap().max_residual() < 1e-9, "quad {s}");
        }
        for s1 in GRID {
            for s2 in GRID {
                if s1 + s2 > 0.0 {
                    let sp = special_points(&Piece::Pentagon { s1, s2 }).unwrap_or_else(|e| panic!("pentagon {s1} {s2}: {e}"));
                    assert!(sp.max_residual() < 1e-9, "pentagon {s1} {s2}: {:?}", sp.distances);
                }
                for s3 in GRID {
                    if let Ok(p) = Piece::hexagon(s1, s2, s3) {
                        let sp = special_points(&p).unwrap_or_else(|e| panic!("{p}: {e}"));
                        assert!(sp.max_residual() < 1e-9, "hexagon {s1} {s2} {s3}: {:?}", sp.distances);
                    }
                }
            }
        }
    }

    #[test]
    fn pentagon_h_closed_form() {
        for (s1, s2) in [(-0.3, 1.0), (1.0, 2.0), (0.0, 0.3)] {
            let sp = special_points(&Piece::Pentagon { s1, s2 }).unwrap();
            let h = sp.point("H").unwrap();
            let (e1, e2, e12): (f64, f64, f64) = (f64::exp(s1), f64::exp(s2), f64::exp(s1 + s2));
            let y = 0.5 * ((e1 + 1.0) * (3.0 * e12 - e1 - e2 - 1.0) / (e2 + 1.0)).sqrt();
            assert!((h.x - (e1 - 1.0) / 2.0).abs() < 1e-9 && (h.y - y).abs() < 1e-9);
        }
        let w = crate::pieces::realize::pentagon_frame(2f64.ln(), 2f64.ln()).w;
        assert!((w - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hyperideal_meet_still_projects() {
        // the axes of AE and BC are ultraparallel here
        let sp = special_points(&Piece::Pentagon { s1: -1.0, s2: 2.0 }).unwrap();
        assert!(sp.point("H").is_none());
        assert!(sp.max_residual() < 1e-9);
    }

    #[test]
    fn hexagon_axes_are_concurrent() {
        let p = Piece::Hexagon { s1: -0.3, s2: 1.0, s3: 2.0 };
        let real = realize(&p).unwrap();
        let h = special_points(&p).unwrap().point("H").unwrap();
        let third = perpendicular_bisector(real.fv("F"), real.fv("A")).unwrap();
        assert!(third.contains(h, 1e-9));
    }
}
