use super::topology::Corner;
use super::{DualPath, Step, Surface, SurfaceError, SurfaceResult};
use crate::pieces::{EdgeLabel, Piece};

/// The corners between two consecutive crown edges `b_i` and `b_{i+1}`:
/// from the `D` corner of `Q_i` to the `C` corner of `Q_{i+1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spike {
    pub corners: Vec<Corner>,
    pub from_quad: usize,
    pub to_quad: usize,
}

/// A crown: the cyclically ordered quads whose bi-infinite edges face the
/// triangulated part, the spikes between them and the core curve.
#[derive(Debug, Clone, PartialEq)]
pub struct Crown {
    pub quads: Vec<usize>,
    pub spikes: Vec<Spike>,
    pub core: DualPath,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockDecomposition {
    /// Non-triangle pieces.
    pub b_pieces: Vec<usize>,
    /// Triangles, the pieces of the complement.
    pub triangles: Vec<usize>,
    pub crowns: Vec<Crown>,
}

impl BlockDecomposition {
    pub fn is_whole_surface(&self) -> bool {
        self.triangles.is_empty()
    }

    pub fn crown_edges(&self) -> impl Iterator<Item = usize> + '_ {
        self.crowns.iter().flat_map(|c| c.quads.iter().copied())
    }
}

const QUAD_C: usize = 2;
const QUAD_D: usize = 3;

impl Surface {
    /// Whether the bi-infinite edge of quad `q` faces a triangle.
    pub fn faces_triangle(&self, q: usize) -> bool {
        matches!(self.pieces[q], Piece::Quad { .. })
            && self.partner((q, EdgeLabel::L2)).is_some_and(|p| matches!(self.pieces[p.slot.0], Piece::Triangle))
    }

    fn spike_from(&self, q: usize) -> SurfaceResult<Spike> {
        let mut corners = vec![(q, QUAD_D)];
        let mut c = (q, QUAD_D);
        loop {
            c = self.next_corner(c)?;
            corners.push(c);
            if c.1 == QUAD_C && self.faces_triangle(c.0) {
                return Ok(Spike { corners, from_quad: q, to_quad: c.0 });
            }
            if matches!(self.pieces[c.0], Piece::Triangle) || corners.len() > 4 * self.pieces.len() + 4 {
                return Err(SurfaceError::PathBroken("spike chain left the boundary block".into()));
            }
        }
    }
}

/// Boundary block, crown cycles and core curves.
pub fn classify(s: &Surface) -> SurfaceResult<BlockDecomposition> {
    let b_pieces: Vec<usize> = (0..s.pieces.len()).filter(|&p| !matches!(s.pieces[p], Piece::Triangle)).collect();
    let triangles: Vec<usize> = (0..s.pieces.len()).filter(|&p| matches!(s.pieces[p], Piece::Triangle)).collect();
    let facing: Vec<usize> = b_pieces.iter().copied().filter(|&q| s.faces_triangle(q)).collect();
    let mut crowns = Vec::new();
    let mut done = vec![false; s.pieces.len()];
    for &q0 in &facing {
        if done[q0] {
            continue;
        }
        let (mut quads, mut spikes) = (Vec::new(), Vec::new());
        let mut q = q0;
        loop {
            if done[q] {
                return Err(SurfaceError::PathBroken("crown edges do not form disjoint cycles".into()));
            }
            done[q] = true;
            let sp = s.spike_from(q)?;
            quads.push(q);
            q = sp.to_quad;
            spikes.push(sp);
            if q == q0 {
                break;
            }
        }
        let mut steps = Vec::new();
        for (i, &qi) in quads.iter().enumerate() {
            steps.push(Step::new(qi, EdgeLabel::L1, EdgeLabel::L3));
            let cs = &spikes[i].corners;
            for &c in &cs[1..cs.len() - 1] {
                steps.push(Step::new(c.0, s.in_edge(c), s.out_edge(c)));
            }
        }
        crowns.push(Crown { quads, spikes, core: DualPath::closed(steps) });
    }
    Ok(BlockDecomposition { b_pieces, triangles, crowns })
}
