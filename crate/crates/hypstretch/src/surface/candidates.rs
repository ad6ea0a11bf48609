use super::{DualPath, Step, Surface, SurfaceError, SurfaceResult};
use rayon::prelude::*;
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum CandidateKind {
    Boundary,
    Curve,
    Arc,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub kind: CandidateKind,
    pub path: DualPath,
    /// A leaf of the lamination (closed leaf or compact leaf).
    pub leaf: bool,
    pub label: String,
}

/// Which candidates enter a distance estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scope {
    All,
    /// Closed curves and boundary curves only.
    CurvesOnly,
}

pub fn evaluate(s: &Surface, c: &Candidate) -> SurfaceResult<f64> {
    match c.kind {
        CandidateKind::Boundary | CandidateKind::Curve => s.curve_length(&c.path),
        CandidateKind::Arc => s.arc_length(&c.path),
    }
}

fn closed_words(s: &Surface, depth: usize) -> Vec<DualPath> {
    let mut out = Vec::new();
    let mut stack: Vec<Vec<Step>> = Vec::new();
    for p in 0..s.pieces.len() {
        for &l in s.pieces[p].labels().iter().filter(|l| l.is_leaf()) {
            if s.partner((p, l)).is_some() {
                stack.push(vec![Step::new(p, l, l)]);
            }
        }
    }
    // a partial word's last step still has an undecided exit
    while let Some(w) = stack.pop() {
        let last = *w.last().unwrap();
        for &x in s.pieces[last.piece].labels().iter().filter(|l| l.is_leaf() && **l != last.entry) {
            let Some(pt) = s.partner((last.piece, x)) else { continue };
            let mut done = w.clone();
            done.last_mut().unwrap().exit = x;
            if pt.slot == (done[0].piece, done[0].entry) {
                out.push(DualPath::closed(done.clone()));
            }
            if done.len() < depth {
                done.push(Step::new(pt.slot.0, pt.slot.1, pt.slot.1));
                stack.push(done);
            }
        }
    }
    out
}

fn arcs(s: &Surface, depth: usize) -> Vec<DualPath> {
    let mut out = Vec::new();
    let mut stack: Vec<Vec<Step>> = Vec::new();
    for p in 0..s.pieces.len() {
        for &a in s.pieces[p].labels().iter().filter(|l| !l.is_leaf()) {
            stack.push(vec![Step::new(p, a, a)]);
        }
    }
    while let Some(w) = stack.pop() {
        let last = *w.last().unwrap();
        for &x in s.pieces[last.piece].labels().iter().filter(|l| **l != last.entry) {
            let mut done = w.clone();
            done.last_mut().unwrap().exit = x;
            if !x.is_leaf() {
                out.push(DualPath::open(done));
            } else if done.len() < depth {
                if let Some(pt) = s.partner((last.piece, x)) {
                    done.push(Step::new(pt.slot.0, pt.slot.1, pt.slot.1));
                    stack.push(done);
                }
            }
        }
    }
    out
}

/// The gluing index of the compact leaf separating the two a-edges of a
/// one-step arc.
fn compact_leaf_of(s: &Surface, step: Step) -> Option<usize> {
    let labels = s.pieces[step.piece].labels();
    let n = labels.len();
    let (i, j) = (labels.iter().position(|l| *l == step.entry)?, labels.iter().position(|l| *l == step.exit)?);
    let between = if (i + 2) % n == j {
        labels[(i + 1) % n]
    } else if (j + 2) % n == i {
        labels[(j + 1) % n]
    } else {
        return None;
    };
    s.partner((step.piece, between)).map(|p| p.gluing)
}

/// Boundary curves, reduced closed words and arcs between a-edges of length
/// at most `depth`, deduplicated up to rotation and inversion. Arcs inside a
/// single piece are identified with the compact leaf they cross.
pub fn enumerate_candidates(s: &Surface, depth: usize) -> SurfaceResult<Vec<Candidate>> {
    let (top, _) = s.analyze()?;
    let mut out: Vec<Candidate> = top
        .boundary
        .iter()
        .enumerate()
        .map(|(k, w)| Candidate { kind: CandidateKind::Boundary, path: w.clone(), leaf: false, label: format!("boundary {k}") })
        .collect();
    if depth == 0 {
        return Ok(out);
    }
    let leaf_words: Vec<Vec<Step>> = top
        .closed_leaves
        .iter()
        .flat_map(|&(i, j)| [i, j])
        .map(|i| top.vertex_classes[i].word.canonical())
        .collect();
    let mut curves: BTreeMap<Vec<Step>, DualPath> = BTreeMap::new();
    for w in closed_words(s, depth) {
        if !w.is_proper_power() {
            curves.entry(w.canonical()).or_insert(w);
        }
    }
    for (key, w) in curves {
        let leaf = leaf_words.contains(&key);
        let label = if leaf { format!("closed leaf {}", w.display(s)) } else { w.display(s) };
        out.push(Candidate { kind: CandidateKind::Curve, path: w, leaf, label });
    }
    let mut seen_leaves = BTreeMap::new();
    let mut open: BTreeMap<Vec<Step>, DualPath> = BTreeMap::new();
    for w in arcs(s, depth) {
        if w.len() == 1 {
            if let Some(g) = compact_leaf_of(s, w.steps[0]) {
                seen_leaves.entry(g).or_insert(w);
                continue;
            }
        }
        open.entry(w.canonical()).or_insert(w);
    }
    for (g, w) in seen_leaves {
        let gl = &s.gluings[g];
        out.push(Candidate { kind: CandidateKind::Arc, path: w, leaf: true, label: format!("leaf {}.{}", s.ids[gl.from.0], gl.from.1) });
    }
    for (_, w) in open {
        let label = w.display(s);
        out.push(Candidate { kind: CandidateKind::Arc, path: w, leaf: false, label });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Estimate {
    /// `max log(ℓ_Y/ℓ_X)` over the evaluated candidates: a lower bound.
    pub value: f64,
    pub witness: Option<Candidate>,
    pub witness_ratio: f64,
    pub x_length: f64,
    pub y_length: f64,
    pub depth: usize,
    /// Candidates with a defined length on both surfaces.
    pub evaluated: usize,
}

/// Lower bound for the arc distance from `x` to `y` over the depth-bounded
/// candidate set. Among candidates within 1e-9 of the maximum a leaf is
/// preferred as witness.
pub fn arc_distance_estimate(x: &Surface, y: &Surface, depth: usize, scope: Scope) -> SurfaceResult<Estimate> {
    if !x.same_combinatorics(y) {
        return Err(SurfaceError::Incompatible("surfaces do not share the gluing graph".into()));
    }
    let cands: Vec<Candidate> = enumerate_candidates(x, depth)?
        .into_iter()
        .filter(|c| scope == Scope::All || c.kind != CandidateKind::Arc)
        .collect();
    let rows: Vec<(usize, f64, f64)> = cands
        .par_iter()
        .enumerate()
        .filter_map(|(i, c)| match (evaluate(x, c), evaluate(y, c)) {
            (Ok(a), Ok(b)) if a > 1e-9 && b > 1e-9 => Some((i, a, b)),
            _ => None,
        })
        .collect();
    let value = rows.iter().map(|&(_, a, b)| (b / a).ln()).fold(f64::NEG_INFINITY, f64::max);
    let best = rows
        .iter()
        .filter(|&&(_, a, b)| (b / a).ln() >= value - 1e-9)
        .max_by(|p, q| cands[p.0].leaf.cmp(&cands[q.0].leaf).then((p.2 / p.1).total_cmp(&(q.2 / q.1))));
    Ok(match best {
        Some(&(i, a, b)) => Estimate { value, witness: Some(cands[i].clone()), witness_ratio: (b / a).ln(), x_length: a, y_length: b, depth, evaluated: rows.len() },
        None => Estimate { value: 0.0, witness: None, witness_ratio: 0.0, x_length: 0.0, y_length: 0.0, depth, evaluated: 0 },
    })
}
