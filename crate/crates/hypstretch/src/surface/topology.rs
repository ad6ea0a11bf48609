use super::{DualPath, Slot, Step, Surface, SurfaceError, SurfaceResult};
use crate::hyp_core::IdealPoint;
use crate::pieces::{EdgeKind, EdgeLabel};
use std::collections::{BTreeSet, HashSet};

/// Translation lengths below this count as parabolic (a cusp).
pub const CUSP_TOL: f64 = 1e-9;

/// A corner of a piece at an ideal vertex: (piece, vertex index).
pub type Corner = (usize, usize);

/// The corners glued around one ideal vertex, in walk order (each corner is
/// left through the edge that starts at it).
#[derive(Debug, Clone, PartialEq)]
pub struct VertexClass {
    pub corners: Vec<Corner>,
    pub word: DualPath,
    /// `ln λ` for the holonomy written as `z ↦ λz + c` with the vertex at ∞.
    pub log_multiplier: f64,
}

impl VertexClass {
    pub fn length(&self) -> f64 {
        self.log_multiplier.abs()
    }

    pub fn is_cusp(&self) -> bool {
        self.length() < CUSP_TOL
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    pub vertex_classes: Vec<VertexClass>,
    /// Boundary components as dual words, one step per a-edge.
    pub boundary: Vec<DualPath>,
    /// Pairs of spiraling vertex classes on the two sides of a closed leaf.
    pub closed_leaves: Vec<(usize, usize)>,
    /// Gluings along finite l-edges (compact leaves).
    pub finite_leaves: Vec<usize>,
    pub euler: i64,
}

impl Topology {
    pub fn cusps(&self) -> impl Iterator<Item = &VertexClass> {
        self.vertex_classes.iter().filter(|c| c.is_cusp())
    }

    pub fn class_of(&self, corner: Corner) -> Option<usize> {
        self.vertex_classes.iter().position(|c| c.corners.contains(&corner))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub valid: bool,
    pub violations: Vec<String>,
    pub topology: Option<Topology>,
}

fn edge_index(s: &Surface, slot: Slot) -> usize {
    s.realization(slot.0).edges.iter().position(|e| e.label == slot.1).expect("labels checked at load")
}

impl Surface {
    pub(crate) fn nverts(&self, p: usize) -> usize {
        self.realization(p).vertices.len()
    }

    pub(crate) fn is_ideal(&self, c: Corner) -> bool {
        self.realization(c.0).vertices[c.1].ideal().is_some()
    }

    /// Label of the edge ending at vertex `v`.
    pub(crate) fn in_edge(&self, c: Corner) -> EdgeLabel {
        let n = self.nverts(c.0);
        self.realization(c.0).edges[(c.1 + n - 1) % n].label
    }

    /// Label of the edge starting at vertex `v`.
    pub(crate) fn out_edge(&self, c: Corner) -> EdgeLabel {
        self.realization(c.0).edges[c.1].label
    }

    /// The corner reached by crossing the out-edge of `c`.
    pub(crate) fn next_corner(&self, c: Corner) -> SurfaceResult<Corner> {
        let pt = self.partner((c.0, self.out_edge(c))).ok_or_else(|| SurfaceError::PathBroken("unglued edge at an ideal corner".into()))?;
        let i = edge_index(self, pt.slot);
        let next = (pt.slot.0, self.realization(pt.slot.0).edges[i].end);
        if !self.is_ideal(next) {
            return Err(SurfaceError::PathBroken("ideal corner glued to a finite corner".into()));
        }
        Ok(next)
    }

    pub fn vertex_classes(&self) -> SurfaceResult<Vec<VertexClass>> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for p in 0..self.pieces.len() {
            for v in 0..self.nverts(p) {
                if !self.is_ideal((p, v)) || seen.contains(&(p, v)) {
                    continue;
                }
                let mut corners = vec![(p, v)];
                seen.insert((p, v));
                let mut c = self.next_corner((p, v))?;
                while c != (p, v) {
                    if !seen.insert(c) {
                        return Err(SurfaceError::PathBroken("corner walk re-entered another class".into()));
                    }
                    corners.push(c);
                    c = self.next_corner(c)?;
                }
                let word = DualPath::closed(corners.iter().map(|&c| Step::new(c.0, self.in_edge(c), self.out_edge(c))).collect());
                let h = self.develop(&word)?;
                let log_multiplier = match self.realization(p).vertices[v].ideal().expect("ideal corner") {
                    IdealPoint::Infinity => (h.a / h.d).abs().ln(),
                    IdealPoint::Finite(x) => 2.0 * (h.c * x + h.d).abs().ln(),
                };
                out.push(VertexClass { corners, word, log_multiplier });
            }
        }
        Ok(out)
    }

    /// Boundary components, each as the cyclic word of its a-edges.
    pub fn boundary_words(&self) -> SurfaceResult<Vec<DualPath>> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for p in 0..self.pieces.len() {
            for &a in self.pieces[p].labels().iter().filter(|l| !l.is_leaf()) {
                if seen.contains(&(p, a)) {
                    continue;
                }
                let mut steps = Vec::new();
                let mut cur = (p, a);
                loop {
                    seen.insert(cur);
                    let real = self.realization(cur.0);
                    let n = real.edges.len();
                    let i = edge_index(self, cur);
                    let (prev, next) = (real.edges[(i + n - 1) % n].label, real.edges[(i + 1) % n].label);
                    steps.push(Step::new(cur.0, prev, next));
                    let pt = self.partner((cur.0, next)).ok_or_else(|| SurfaceError::PathBroken("unglued leaf next to the boundary".into()))?;
                    let j = edge_index(self, pt.slot);
                    let other = self.realization(pt.slot.0);
                    let na = other.edges[(j + 1) % other.edges.len()].label;
                    if na.is_leaf() {
                        return Err(SurfaceError::PathBroken("boundary walk met a leaf after a leaf".into()));
                    }
                    cur = (pt.slot.0, na);
                    if cur == (p, a) {
                        break;
                    }
                    if seen.contains(&cur) {
                        return Err(SurfaceError::PathBroken("boundary walk re-entered another component".into()));
                    }
                }
                out.push(DualPath::closed(steps));
            }
        }
        Ok(out)
    }

    /// Full topological analysis; fails if a corner or boundary walk breaks.
    pub fn analyze(&self) -> SurfaceResult<(Topology, Vec<String>)> {
        let mut notes = Vec::new();
        let vertex_classes = self.vertex_classes()?;
        let boundary = self.boundary_words()?;
        let mut spiral: Vec<usize> = (0..vertex_classes.len()).filter(|&i| !vertex_classes[i].is_cusp()).collect();
        spiral.sort_by(|&i, &j| vertex_classes[i].length().total_cmp(&vertex_classes[j].length()));
        let mut closed_leaves = Vec::new();
        if spiral.len() % 2 == 1 {
            notes.push(format!("{} spiraling vertex classes cannot pair into closed leaves", spiral.len()));
        }
        for pair in spiral.chunks(2) {
            if let [i, j] = *pair {
                let (a, b) = (vertex_classes[i].length(), vertex_classes[j].length());
                if (a - b).abs() > 1e-9 * a.max(1.0) {
                    notes.push(format!("spiraling vertex classes of lengths {a} and {b} do not bound a common closed leaf"));
                }
                closed_leaves.push((i, j));
            }
        }
        let finite_leaves = (0..self.gluings.len())
            .filter(|&k| self.realization(self.gluings[k].from.0).edge(self.gluings[k].from.1).map(|e| e.kind) == Some(EdgeKind::Finite))
            .collect();
        Ok((Topology { vertex_classes, boundary, closed_leaves, finite_leaves, euler: self.combinatorial_euler() }, notes))
    }

    /// `V − E + F` with finite vertices identified through the gluings.
    pub fn combinatorial_euler(&self) -> i64 {
        let mut ids = Vec::new();
        let mut offset = Vec::new();
        for p in 0..self.pieces.len() {
            offset.push(ids.len());
            ids.extend(0..self.nverts(p));
        }
        let mut parent: Vec<usize> = (0..ids.len()).collect();
        fn find(parent: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while parent[r] != r {
                r = parent[r];
            }
            parent[x] = r;
            r
        }
        let mut a_edges = 0;
        for p in 0..self.pieces.len() {
            a_edges += self.pieces[p].labels().iter().filter(|l| !l.is_leaf()).count();
        }
        for g in &self.gluings {
            let (e, f) = (&self.realization(g.from.0).edges[edge_index(self, g.from)], &self.realization(g.to.0).edges[edge_index(self, g.to)]);
            for (u, w) in [(e.start, f.end), (e.end, f.start)] {
                let (cu, cw) = ((g.from.0, u), (g.to.0, w));
                if !self.is_ideal(cu) && !self.is_ideal(cw) {
                    let (x, y) = (find(&mut parent, offset[cu.0] + u), find(&mut parent, offset[cw.0] + w));
                    parent[x] = y;
                }
            }
        }
        let mut roots = BTreeSet::new();
        for p in 0..self.pieces.len() {
            for v in 0..self.nverts(p) {
                if !self.is_ideal((p, v)) {
                    roots.insert(find(&mut parent, offset[p] + v));
                }
            }
        }
        roots.len() as i64 - (self.gluings.len() + a_edges) as i64 + self.pieces.len() as i64
    }
}

fn polarity(s: &Surface, slot: Slot) -> Option<bool> {
    let e = s.realization(slot.0).edge(slot.1)?;
    (e.kind == EdgeKind::HalfInfinite).then(|| s.realization(slot.0).vertices[e.start].finite().is_some())
}

/// Check every surface invariant; violations are collected, never thrown.
pub fn validate(s: &Surface) -> ValidationReport {
    let mut v = Vec::new();
    let mut used: HashSet<Slot> = HashSet::new();
    for (k, g) in s.gluings.iter().enumerate() {
        let name = |sl: Slot| format!("{}.{}", s.ids[sl.0], sl.1);
        for sl in [g.from, g.to] {
            if !sl.1.is_leaf() {
                v.push(format!("gluing {k}: boundary edge {} is glued", name(sl)));
            }
            if !used.insert(sl) {
                v.push(format!("gluing {k}: edge {} is glued more than once", name(sl)));
            }
        }
        if g.from == g.to {
            v.push(format!("gluing {k}: edge {} is glued to itself", name(g.from)));
            continue;
        }
        let (e, f) = (s.realization(g.from.0).edge(g.from.1).unwrap(), s.realization(g.to.0).edge(g.to.1).unwrap());
        if e.kind != f.kind {
            v.push(format!("gluing {k}: {} ({:?}) and {} ({:?}) have different types", name(g.from), e.kind, name(g.to), f.kind));
            continue;
        }
        match e.kind {
            EdgeKind::Finite => {
                let (a, b) = (s.finite_leaf_length(g.from).unwrap(), s.finite_leaf_length(g.to).unwrap());
                if (a - b).abs() > 1e-9 {
                    v.push(format!("gluing {k}: finite edges {} and {} have lengths {a} and {b}", name(g.from), name(g.to)));
                }
            }
            EdgeKind::HalfInfinite => {
                if polarity(s, g.from) == polarity(s, g.to) {
                    v.push(format!("gluing {k}: half-infinite edges {} and {} point the same way (orientation-reversing)", name(g.from), name(g.to)));
                }
            }
            EdgeKind::BiInfinite => {
                if !g.shear.is_some_and(f64::is_finite) {
                    v.push(format!("gluing {k}: bi-infinite gluing {} ~ {} needs a shear", name(g.from), name(g.to)));
                }
            }
        }
        if e.kind != EdgeKind::BiInfinite && g.shear.is_some_and(|x| x != 0.0) {
            v.push(format!("gluing {k}: only bi-infinite gluings carry a shear"));
        }
    }
    for p in 0..s.pieces.len() {
        for &l in s.pieces[p].labels().iter().filter(|l| l.is_leaf()) {
            if !used.contains(&(p, l)) {
                v.push(format!("leaf {}.{} is not glued (dangling leaf)", s.ids[p], l));
            }
        }
    }
    // connectivity of the gluing graph
    let mut comp: Vec<usize> = (0..s.pieces.len()).collect();
    for _ in 0..s.pieces.len() {
        for g in &s.gluings {
            let m = comp[g.from.0].min(comp[g.to.0]);
            comp[g.from.0] = m;
            comp[g.to.0] = m;
        }
    }
    if comp.iter().any(|&c| c != 0) {
        v.push("the gluing graph is not connected".into());
    }
    let t = s.topology;
    if s.pieces.len() as i64 != t.piece_count() {
        v.push(format!("{} pieces, but (g,b,p) = ({},{},{}) needs 4g-4+2p+2b = {}", s.pieces.len(), t.g, t.b, t.p, t.piece_count()));
    }
    let mut topology = None;
    if v.is_empty() {
        match s.analyze() {
            Ok((top, notes)) => {
                v.extend(notes);
                if top.euler != t.euler() {
                    v.push(format!("Euler characteristic of the glued complex is {}, declared topology gives {}", top.euler, t.euler()));
                }
                if top.boundary.len() != t.b as usize {
                    v.push(format!("{} boundary components found, {} declared", top.boundary.len(), t.b));
                }
                let cusps = top.cusps().count();
                if cusps != t.p as usize {
                    v.push(format!("{cusps} cusps found, {} declared", t.p));
                }
                topology = Some(top);
            }
            Err(e) => v.push(e.to_string()),
        }
    }
    ValidationReport { valid: v.is_empty(), violations: v, topology }
}
