use super::cylinder::{quad_param, stretched_cylinder_shears, CylinderModel, EdgeRole};
use super::{cylinders, StretchError, StretchResult};
use crate::pieces::{displacement, EdgeLabel, Piece};
use crate::surface::{classify, BlockDecomposition, Corner, Genus, Gluing, Slot, Surface};
use crate::traintrack::{Switch, TrainTrack, Weights};
use std::collections::HashMap;

const LABELS: [EdgeLabel; 3] = [EdgeLabel::L1, EdgeLabel::L2, EdgeLabel::L3];

/// `ε^t` on a crown edge of quad `q`: `δ(e^t s) − e^t δ(s)`.
pub(crate) fn epsilon_crown(s: &Surface, q: usize, t: f64) -> f64 {
    let (p, k) = (quad_param(s, q), t.exp());
    displacement(k * p) - k * displacement(p)
}

/// What a gluing of the triangulated part comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum XaEdge {
    /// A gluing of two triangles of the surface (its index).
    Interior(usize),
    Crown { model: usize, edge: usize, quad: usize },
    Cylinder { model: usize, edge: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TriOrigin {
    Surface(usize),
    Cylinder { model: usize, tri: usize },
}

/// `X_A`: the triangles of the surface together with the auxiliary
/// cylinders, as a surface of ideal triangles with free sides.
#[derive(Debug, Clone)]
pub struct TriangulatedPart {
    pub surface: Surface,
    pub edges: Vec<XaEdge>,
    pub origin: Vec<TriOrigin>,
    pub free: Vec<Slot>,
    pub models: Vec<CylinderModel>,
}

pub fn triangulated_part(s: &Surface, dec: &BlockDecomposition) -> StretchResult<TriangulatedPart> {
    let models = cylinders(s, dec)?;
    let mut origin: Vec<TriOrigin> = dec.triangles.iter().map(|&p| TriOrigin::Surface(p)).collect();
    let x_index: HashMap<usize, usize> = dec.triangles.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let mut cyl_index = HashMap::new();
    for (m, model) in models.iter().enumerate() {
        for k in 0..model.triangles.len() {
            cyl_index.insert((m, k), origin.len());
            origin.push(TriOrigin::Cylinder { model: m, tri: k });
        }
    }
    let mut gluings = Vec::new();
    let mut edges = Vec::new();
    for (k, g) in s.gluings.iter().enumerate() {
        if let (Some(&a), Some(&b)) = (x_index.get(&g.from.0), x_index.get(&g.to.0)) {
            gluings.push(Gluing { from: (a, g.from.1), to: (b, g.to.1), shear: g.shear });
            edges.push(XaEdge::Interior(k));
        }
    }
    let mut free = Vec::new();
    for (m, model) in models.iter().enumerate() {
        for (e, edge) in model.edges.iter().enumerate() {
            let (t, j) = edge.first;
            let from = (cyl_index[&(m, t)], LABELS[j]);
            let to = match (edge.role, edge.second, edge.outer) {
                (EdgeRole::Crown, _, Some((p, l))) => (x_index[&p], l),
                (_, Some((t2, j2)), _) => (cyl_index[&(m, t2)], LABELS[j2]),
                _ => unreachable!("cylinder edges have two sides"),
            };
            gluings.push(Gluing { from, to, shear: Some(edge.shear) });
            edges.push(match edge.role {
                EdgeRole::Crown => XaEdge::Crown { model: m, edge: e, quad: model.triangles[t].piece },
                _ => XaEdge::Cylinder { model: m, edge: e },
            });
        }
        free.extend(model.boundary.iter().map(|&(t, j)| (cyl_index[&(m, t)], LABELS[j])));
    }
    let ids = origin
        .iter()
        .map(|o| match *o {
            TriOrigin::Surface(p) => s.ids[p].clone(),
            TriOrigin::Cylinder { model, tri } => format!("cyl{model}.{tri}"),
        })
        .collect();
    let surface = Surface::new(Genus { g: 0, b: 0, p: 0 }, ids, vec![Piece::Triangle; origin.len()], gluings)?;
    Ok(TriangulatedPart { surface, edges, origin, free, models })
}

fn mirror_label(l: EdgeLabel) -> EdgeLabel {
    match l {
        EdgeLabel::L1 => EdgeLabel::L3,
        EdgeLabel::L3 => EdgeLabel::L1,
        other => other,
    }
}

fn mirror_vertex(v: usize) -> usize {
    (3 - v) % 3
}

/// The double along the free sides. Mirror triangles follow the originals;
/// mirror gluings follow the originals with negated shears; the free sides
/// are glued to their mirrors last.
pub fn double(part: &TriangulatedPart) -> StretchResult<Surface> {
    let n = part.origin.len();
    let src = &part.surface;
    let mut gluings = src.gluings.clone();
    for g in &src.gluings {
        gluings.push(Gluing { from: (g.from.0 + n, mirror_label(g.from.1)), to: (g.to.0 + n, mirror_label(g.to.1)), shear: g.shear.map(|x| -x) });
    }
    for &(t, l) in &part.free {
        gluings.push(Gluing { from: (t, l), to: (t + n, mirror_label(l)), shear: Some(0.0) });
    }
    let ids = src.ids.iter().cloned().chain(src.ids.iter().map(|i| format!("{i}'"))).collect();
    Ok(Surface::new(Genus { g: 0, b: 0, p: 0 }, ids, vec![Piece::Triangle; 2 * n], gluings)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Item {
    Edge(usize),
    Spike(usize),
}

#[derive(Debug, Clone, PartialEq)]
struct Loop {
    /// Each merge: item, whether it points along the loop.
    merges: Vec<(Item, bool)>,
}

/// The train track carrying the doubled triangulated part: one branch per
/// edge, a spike branch for every run of cylinder edges at a spike, a loop
/// for every closed leaf and the cusp ends.
#[derive(Debug, Clone, PartialEq)]
pub struct TrackModel {
    pub track: TrainTrack,
    /// Gluings of the double.
    pub edge_count: usize,
    /// Name and run of gluing indices per spike branch.
    pub spikes: Vec<(String, Vec<usize>)>,
    loops: Vec<Loop>,
    /// Loops carrying the surface's closed leaves.
    pub leaf_loops: Vec<usize>,
}

fn edge_name(g: usize) -> String {
    format!("e{g}")
}

fn loop_name(l: usize, k: usize) -> String {
    format!("g{l}.{k}")
}

impl TrackModel {
    /// Weights from edge values. Spike branches get `spike(run)`, loops the
    /// partial sums of their merges starting from `base(loop)`.
    pub fn weights(&self, edges: &[f64], spike: impl Fn(&[usize]) -> f64, base: impl Fn(usize) -> f64) -> Weights {
        let mut w: Weights = edges.iter().enumerate().map(|(g, &v)| (edge_name(g), v)).collect();
        let spike_w: Vec<f64> = self.spikes.iter().map(|(_, run)| spike(run)).collect();
        for ((name, _), v) in self.spikes.iter().zip(&spike_w) {
            w.insert(name.clone(), *v);
        }
        for (l, lp) in self.loops.iter().enumerate() {
            let m = lp.merges.len();
            let mut prev = base(l);
            w.insert(loop_name(l, m - 1), prev);
            for (k, &(it, fwd)) in lp.merges[..m - 1].iter().enumerate() {
                let v = match it {
                    Item::Edge(g) => edges[g],
                    Item::Spike(j) => spike_w[j],
                };
                prev += if fwd { v } else { -v };
                w.insert(loop_name(l, k), prev);
            }
        }
        w
    }

    /// Counting measure of the `i`-th closed leaf.
    pub fn leaf_measure(&self, i: usize) -> Weights {
        let l = self.leaf_loops[i];
        self.weights(&vec![0.0; self.edge_count], |_| 0.0, |k| if k == l { 1.0 } else { 0.0 })
    }
}

fn corner_class(classes: &[Vec<Corner>]) -> HashMap<Corner, usize> {
    classes.iter().enumerate().flat_map(|(i, c)| c.iter().map(move |&x| (x, i))).collect()
}

/// Track of the double `d` of `part`, spiral directions read from the shears
/// of `d`; closed leaves of `s` are matched to their classes in the double.
pub fn build_track(s: &Surface, part: &TriangulatedPart, d: &Surface) -> StretchResult<TrackModel> {
    let n = part.origin.len();
    let is_cyl = |t: usize| matches!(part.origin[t % n], TriOrigin::Cylinder { .. });
    let classes = d.vertex_classes()?;
    let class_of = corner_class(&classes.iter().map(|c| c.corners.clone()).collect::<Vec<_>>());
    let mut spikes: Vec<(String, Vec<usize>)> = Vec::new();
    let mut items_of: Vec<Vec<Item>> = Vec::new();
    for (ci, cls) in classes.iter().enumerate() {
        let m = cls.corners.len();
        let fan: Vec<usize> = cls.corners.iter().map(|&c| d.partner((c.0, LABELS[c.1])).expect("closed double").gluing).collect();
        let cyl: Vec<bool> = cls.corners.iter().map(|c| is_cyl(c.0)).collect();
        let mut items = Vec::new();
        match cyl.iter().position(|&c| !c) {
            Some(s0) if cyl.iter().any(|&c| c) => {
                let mut run: Vec<usize> = Vec::new();
                for k in s0..s0 + m {
                    let (i, next) = (k % m, (k + 1) % m);
                    if !cyl[i] && !cyl[next] {
                        items.push(Item::Edge(fan[i]));
                    } else if !cyl[i] {
                        run = vec![fan[i]];
                    } else {
                        run.push(fan[i]);
                        if !cyl[next] {
                            items.push(Item::Spike(spikes.len()));
                            spikes.push((format!("a{ci}.{}", spikes.len()), std::mem::take(&mut run)));
                        }
                    }
                }
            }
            _ => items.extend(fan.iter().map(|&g| Item::Edge(g))),
        }
        items_of.push(items);
    }

    // closed leaves of the surface, located through corners shared with X_A
    let (top, _) = s.analyze()?;
    let mut to_d: HashMap<Corner, Corner> = HashMap::new();
    for (t, o) in part.origin.iter().enumerate() {
        match *o {
            TriOrigin::Surface(p) => {
                for v in 0..3 {
                    to_d.insert((p, v), (t, v));
                }
            }
            TriOrigin::Cylinder { model, tri } => {
                let ct = &part.models[model].triangles[tri];
                for (k, ov) in ct.origin.iter().enumerate() {
                    if let Some(v) = ov {
                        to_d.entry((ct.piece, *v)).or_insert((t, k));
                    }
                }
            }
        }
    }
    let locate = |xc: usize| top.vertex_classes[xc].corners.iter().find_map(|c| to_d.get(c)).copied();
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for &(v, w) in &top.closed_leaves {
        match (locate(v), locate(w)) {
            (Some(a), Some(b)) => {
                let ordered = |x: usize, y: usize| (x.min(y), x.max(y));
                pairs.push(ordered(class_of[&a], class_of[&b]));
                let mir = |c: Corner| (c.0 + n, mirror_vertex(c.1));
                pairs.push(ordered(class_of[&mir(a)], class_of[&mir(b)]));
            }
            (None, None) => {}
            _ => return Err(StretchError::Geometry("a closed leaf has only one side in the triangulated part".into())),
        }
    }
    let leaf_loops: Vec<usize> = (0..pairs.len()).collect();
    let paired: Vec<usize> = pairs.iter().flat_map(|&(a, b)| [a, b]).collect();

    let mut branches: Vec<String> = (0..d.gluings.len()).map(edge_name).collect();
    branches.extend(spikes.iter().map(|(n, _)| n.clone()));
    let mut switches = Vec::new();
    let mut punctures = Vec::new();
    let names = |items: &[Item], spikes: &[(String, Vec<usize>)]| -> Vec<String> {
        items
            .iter()
            .map(|&it| match it {
                Item::Edge(g) => edge_name(g),
                Item::Spike(k) => spikes[k].0.clone(),
            })
            .collect()
    };
    for (name, run) in &spikes {
        switches.push(Switch::new([name.clone()], run.iter().map(|&g| edge_name(g))));
    }
    for (ci, cls) in classes.iter().enumerate() {
        if cls.is_cusp() {
            punctures.push(names(&items_of[ci], &spikes));
        } else if !paired.contains(&ci) {
            return Err(StretchError::Geometry(format!("spiraling class {ci} of the double has no closed leaf")));
        }
    }
    let mut loops = Vec::new();
    for (l, &(v, w)) in pairs.iter().enumerate() {
        let (sv, sw) = (-classes[v].log_multiplier, -classes[w].log_multiplier);
        let fw = (sv > 0.0) != (sw > 0.0);
        let mut merges: Vec<(Item, bool, bool)> = items_of[v].iter().map(|&it| (it, true, sv > 0.0)).collect();
        merges.extend(items_of[w].iter().map(|&it| (it, fw, sw > 0.0)));
        let m = merges.len();
        for (k, &(it, fwd, right)) in merges.iter().enumerate() {
            let (here, before) = (loop_name(l, k), loop_name(l, (k + m - 1) % m));
            let item = names(&[it], &spikes).remove(0);
            let (inc, up) = if fwd { (here, before) } else { (before, here) };
            let out = if right { vec![item, up] } else { vec![up, item] };
            switches.push(Switch::new([inc], out));
        }
        branches.extend((0..m).map(|k| loop_name(l, k)));
        loops.push(Loop { merges: merges.into_iter().map(|(it, f, _)| (it, f)).collect() });
    }
    let track = TrainTrack::new(branches, switches, punctures)?;
    let model = TrackModel { track, edge_count: d.gluings.len(), spikes, loops, leaf_loops };
    Ok(model)
}

/// The stretch cocycles on the track of the doubled triangulated part.
#[derive(Debug, Clone, PartialEq)]
pub struct StretchCocycle {
    pub t: f64,
    pub model: TrackModel,
    pub epsilon: Weights,
    pub rho0: Weights,
    /// `e^t ρ⁰ + ε^t`
    pub rho_t: Weights,
    /// Counting measures of the closed leaves (both copies in the double).
    pub measures: Vec<Weights>,
    /// `|Σ ε^t|` over each spike run.
    pub spike_residuals: Vec<(String, f64)>,
    /// Gluing count of `X_A` (the first block of edges of the double).
    pub part_edges: usize,
}

/// Per-gluing values on `X_A` extended to the double.
fn doubled_values(part: &TriangulatedPart, vals: &[f64]) -> Vec<f64> {
    vals.iter().copied().chain(vals.iter().map(|v| -v)).chain(part.free.iter().map(|_| 0.0)).collect()
}

pub fn stretch_cocycle(s: &Surface, t: f64) -> StretchResult<StretchCocycle> {
    let dec = classify(s)?;
    let part = triangulated_part(s, &dec)?;
    let d = double(&part)?;
    let model = build_track(s, &part, &d)?;
    let k = t.exp();
    let st: Vec<Vec<f64>> = part.models.iter().map(|m| stretched_cylinder_shears(s, m, t)).collect::<StretchResult<_>>()?;
    let eps_part: Vec<f64> = part
        .edges
        .iter()
        .map(|e| match *e {
            XaEdge::Interior(_) => 0.0,
            XaEdge::Crown { quad, .. } => epsilon_crown(s, quad, t),
            XaEdge::Cylinder { model, edge } => st[model][edge] - k * part.models[model].edges[edge].shear,
        })
        .collect();
    let shear_part: Vec<f64> = part.surface.gluings.iter().map(|g| g.shear.unwrap_or(0.0)).collect();
    let eps = doubled_values(&part, &eps_part);
    let rho = doubled_values(&part, &shear_part);
    let sum_run = |vals: &[f64]| {
        let v = vals.to_vec();
        move |run: &[usize]| run.iter().map(|&g| v[g]).sum::<f64>()
    };
    let epsilon = model.weights(&eps, |_| 0.0, |_| 0.0);
    let rho0 = model.weights(&rho, sum_run(&rho), |_| 0.0);
    let rho_t = rho0.iter().map(|(b, v)| (b.clone(), k * v + epsilon[b])).collect();
    let measures = (0..model.leaf_loops.len()).map(|i| model.leaf_measure(i)).collect();
    let spike_residuals = model.spikes.iter().map(|(name, run)| (name.clone(), sum_run(&eps)(run).abs())).collect();
    Ok(StretchCocycle { t, model, epsilon, rho0, rho_t, measures, spike_residuals, part_edges: part.edges.len() })
}

/// `ε^t` with its spike switch relations enforced.
pub fn epsilon_cocycle(s: &Surface, dec: &BlockDecomposition, t: f64) -> StretchResult<StretchCocycle> {
    if classify(s)? != *dec {
        return Err(StretchError::NotACrown("decomposition does not belong to the surface".into()));
    }
    let c = stretch_cocycle(s, t)?;
    if let Some((spike, r)) = c.spike_residuals.iter().find(|(_, r)| *r > crate::tol::base_tol()) {
        return Err(StretchError::SwitchViolation { spike: spike.clone(), residual: *r });
    }
    Ok(c)
}
