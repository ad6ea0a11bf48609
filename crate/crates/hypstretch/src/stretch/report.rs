//! Machine-readable invariant report over a grid of stretch times.

use super::{
    boundary_block_stretch, build_cylinder, generalized_stretch, horocyclic_shift, measurable_sublamination, stretch_cocycle, stretch_difference_check,
    StretchResult,
};
use crate::pieces::lipschitz::{sample_points, sampled_lipschitz};
use crate::pieces::{realize, special_points, triangle_stretch, AveragedStretch, Piece};
use crate::surface::{arc_distance_estimate, classify, validate, Scope, Surface};
use crate::tol::base_tol;
use crate::traintrack::{omega, positivity_test, split_to_generic, TrainTrack, Weights};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub t: Option<f64>,
    /// Measured residual; absent when the check could not run.
    pub value: Option<f64>,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub t_grid: Vec<f64>,
    pub depth: usize,
    pub checks: Vec<Check>,
    pub pass: bool,
}

impl VerifyReport {
    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn check(&self, name: &str, t: Option<f64>) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name && c.t == t)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    pub t_grid: Vec<f64>,
    /// Candidate depth for the distance checks.
    pub depth: usize,
    /// Sample points per piece for the Lipschitz check.
    pub samples: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { t_grid: vec![0.25, 0.5, 1.0], depth: 4, samples: 80 }
    }
}

pub const OMEGA_TOL: f64 = 1e-8;
pub const FORM_TOL: f64 = 1e-12;
pub const LIPSCHITZ_SLACK: f64 = 1e-6;

/// Families evaluated once per stretch time.
const PER_T: [&str; 14] = [
    "stretch_difference",
    "horocyclic_shift",
    "epsilon_switch",
    "epsilon_cusp",
    "rho_switch",
    "omega_epsilon",
    "omega_form",
    "positivity",
    "rho_realized",
    "stretched_valid",
    "leaf_stretch",
    "semigroup",
    "piece_lipschitz",
    "distance_bound",
];

fn below(name: &str, t: Option<f64>, value: f64, tolerance: f64) -> Check {
    Check { name: name.into(), t, value: Some(value), tolerance, pass: value.abs() <= tolerance, detail: None }
}

fn failed(name: &str, t: Option<f64>, tolerance: f64, why: String) -> Check {
    Check { name: name.into(), t, value: None, tolerance, pass: false, detail: Some(why) }
}

fn noted(mut c: Check, note: &str) -> Check {
    c.detail = Some(note.into());
    c
}

fn tolerance_of(name: &str) -> f64 {
    match name {
        "omega_epsilon" => OMEGA_TOL,
        "omega_form" => FORM_TOL,
        "positivity" | "stretched_valid" => 0.0,
        "piece_lipschitz" | "distance_bound" => LIPSCHITZ_SLACK,
        _ => base_tol(),
    }
}

/// Runs every invariant family on `s` for each `t` in the grid.
pub fn verify(s: &Surface, opts: &VerifyOptions) -> VerifyReport {
    let mut checks = Vec::new();
    let v = validate(s);
    checks.push(Check {
        name: "validate".into(),
        t: None,
        value: Some(v.violations.len() as f64),
        tolerance: 0.0,
        pass: v.valid,
        detail: (!v.valid).then(|| v.violations.join("; ")),
    });
    checks.push(match special_residual(s) {
        Ok(r) => below("special_points", None, r, base_tol()),
        Err(e) => failed("special_points", None, base_tol(), e),
    });
    if !v.valid {
        checks.push(failed("epsilon_zero", None, base_tol(), "surface is invalid".into()));
        for &t in &opts.t_grid {
            checks.extend(PER_T.iter().map(|n| failed(n, Some(t), tolerance_of(n), "surface is invalid".into())));
        }
    } else {
        checks.push(match stretch_cocycle(s, 0.0) {
            Ok(c) => below("epsilon_zero", None, c.epsilon.values().fold(0.0, |m, x| m.max(x.abs())), base_tol()),
            Err(e) => failed("epsilon_zero", None, base_tol(), e.to_string()),
        });
        for &t in &opts.t_grid {
            match per_t(s, t, opts) {
                Ok(cs) => checks.extend(cs),
                Err(e) => checks.extend(PER_T.iter().map(|n| failed(n, Some(t), tolerance_of(n), e.to_string()))),
            }
        }
    }
    let pass = checks.iter().all(|c| c.pass);
    VerifyReport { t_grid: opts.t_grid.clone(), depth: opts.depth, checks, pass }
}

fn special_residual(s: &Surface) -> Result<f64, String> {
    let mut worst: f64 = 0.0;
    for p in &s.pieces {
        worst = worst.max(special_points(p).map_err(|e| e.to_string())?.max_residual());
    }
    Ok(worst)
}

fn max_abs(it: impl IntoIterator<Item = f64>) -> f64 {
    it.into_iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn shear_gap(a: &Surface, b: &Surface) -> f64 {
    let g = max_abs(a.gluings.iter().zip(&b.gluings).map(|(x, y)| x.shear.unwrap_or(0.0) - y.shear.unwrap_or(0.0)));
    let p = max_abs(a.pieces.iter().zip(&b.pieces).flat_map(|(x, y)| x.shears().into_iter().zip(y.shears()).map(|(u, w)| u - w)));
    g.max(p)
}

pub(crate) fn leaf_lengths(s: &Surface) -> StretchResult<Vec<f64>> {
    let (top, _) = s.analyze()?;
    let closed = top.closed_leaves.iter().map(|&(v, _)| top.vertex_classes[v].length());
    let finite = top.finite_leaves.iter().filter_map(|&g| s.finite_leaf_length(s.gluings[g].from));
    Ok(closed.chain(finite).collect())
}

fn puncture_sum(track: &TrainTrack, w: &Weights) -> f64 {
    max_abs(track.punctures.iter().map(|p| p.iter().map(|b| w.get(b).copied().unwrap_or(0.0)).sum::<f64>()))
}

fn piece_lipschitz(p: &Piece, t: f64, n: usize) -> Result<Option<f64>, String> {
    let real = realize(p).map_err(|e| e.to_string())?;
    let pts = sample_points(&real, n, 4.0);
    let ratio = match p {
        Piece::Hexagon { .. } => return Ok(None),
        Piece::Triangle => sampled_lipschitz(&pts, |q| triangle_stretch(q, t)),
        _ => {
            let m = AveragedStretch::new(p, t).map_err(|e| e.to_string())?;
            sampled_lipschitz(&pts, |q| m.eval(q))
        }
    }
    .map_err(|e| e.to_string())?;
    Ok(Some(ratio / t.exp() - 1.0))
}

fn per_t(s: &Surface, t: f64, opts: &VerifyOptions) -> StretchResult<Vec<Check>> {
    let tt = Some(t);
    let tol = base_tol();
    let k = t.exp();
    let mut out = Vec::new();
    let dec = classify(s)?;
    let bt = boundary_block_stretch(s, t)?;
    let (mut diff, mut shift) = (0.0f64, 0.0f64);
    for c in &dec.crowns {
        let m = build_cylinder(s, c)?;
        diff = diff.max(max_abs(stretch_difference_check(s, &m, t)?.iter().map(|r| r.residual)));
        let (h0, ht) = (horocyclic_shift(s, c)?, horocyclic_shift(&bt, c)?);
        shift = shift.max(max_abs(h0.iter().zip(&ht).map(|(a, b)| b - k * a)));
    }
    let crownless = dec.crowns.is_empty();
    for (name, v) in [("stretch_difference", diff), ("horocyclic_shift", shift)] {
        let c = below(name, tt, v, tol);
        out.push(if crownless { noted(c, "no crowns") } else { c });
    }

    let c = stretch_cocycle(s, t)?;
    let track = &c.model.track;
    out.push(below("epsilon_switch", tt, track.switch_residual(&c.epsilon)?, tol));
    out.push(below("epsilon_cusp", tt, puncture_sum(track, &c.epsilon), tol));
    out.push(below("rho_switch", tt, track.switch_residual(&c.rho_t)?, tol));
    let (g, eps) = split_to_generic(track, &c.epsilon)?;
    let (_, rho) = split_to_generic(track, &c.rho_t)?;
    let mut ms = Vec::new();
    for m in &c.measures {
        ms.push(split_to_generic(track, m)?.1);
    }
    let mut om = 0.0f64;
    let mut form = 0.0f64;
    let mut least = f64::INFINITY;
    for m in &ms {
        om = om.max(omega(&g, &eps, m)?.abs());
        let sum: Weights = eps.iter().map(|(b, x)| (b.clone(), x + rho[b])).collect();
        form = form.max((omega(&g, &rho, m)? + omega(&g, m, &rho)?).abs());
        form = form.max((omega(&g, &sum, m)? - omega(&g, &eps, m)? - omega(&g, &rho, m)?).abs());
        least = least.min(omega(&g, &rho, m)?);
    }
    form = form.max((omega(&g, &eps, &rho)? + omega(&g, &rho, &eps)?).abs());
    out.push(below("omega_epsilon", tt, om, OMEGA_TOL));
    out.push(below("omega_form", tt, form, FORM_TOL));
    let positive = positivity_test(&g, &rho, &ms)?;
    out.push(Check {
        name: "positivity".into(),
        t: tt,
        value: Some(if ms.is_empty() { 0.0 } else { least }),
        tolerance: 0.0,
        pass: positive,
        detail: ms.is_empty().then(|| "no leaf measures".into()),
    });

    let y = generalized_stretch(s, t)?;
    let realized = stretch_cocycle(&y, 0.0)?;
    let gap = max_abs(c.rho_t.iter().map(|(b, x)| realized.rho0.get(b).copied().unwrap_or(f64::INFINITY) - x));
    out.push(below("rho_realized", tt, gap, tol));
    let yv = validate(&y);
    out.push(Check {
        name: "stretched_valid".into(),
        t: tt,
        value: Some(yv.violations.len() as f64),
        tolerance: 0.0,
        pass: yv.valid,
        detail: (!yv.valid).then(|| yv.violations.join("; ")),
    });
    let (l0, lt) = (leaf_lengths(s)?, leaf_lengths(&y)?);
    out.push(below("leaf_stretch", tt, max_abs(l0.iter().zip(&lt).map(|(a, b)| b - k * a)), tol));
    let twice = generalized_stretch(&y, t)?;
    out.push(below("semigroup", tt, shear_gap(&twice, &generalized_stretch(s, 2.0 * t)?), tol));

    let mut lip = f64::NEG_INFINITY;
    for p in &s.pieces {
        match piece_lipschitz(p, t, opts.samples) {
            Ok(Some(v)) => lip = lip.max(v),
            Ok(None) => {}
            Err(e) => return Err(super::StretchError::Geometry(e)),
        }
    }
    let lip = if lip.is_finite() { lip } else { 0.0 };
    out.push(Check { name: "piece_lipschitz".into(), t: tt, value: Some(lip), tolerance: LIPSCHITZ_SLACK, pass: lip <= LIPSCHITZ_SLACK, detail: None });

    let est = arc_distance_estimate(s, &y, opts.depth, Scope::All)?;
    let over = est.value - t;
    out.push(Check {
        name: "distance_bound".into(),
        t: tt,
        value: Some(over),
        tolerance: LIPSCHITZ_SLACK,
        pass: over <= LIPSCHITZ_SLACK,
        detail: est.witness.as_ref().map(|w| w.label.clone()),
    });
    if measurable_sublamination(s)? {
        let leaf = est.witness.as_ref().is_some_and(|w| w.leaf);
        out.push(Check {
            name: "geodesy".into(),
            t: tt,
            value: Some(over),
            tolerance: LIPSCHITZ_SLACK,
            pass: leaf && over >= -tol && over <= LIPSCHITZ_SLACK,
            detail: Some(if leaf { "leaf witness".into() } else { "witness is not a leaf".into() }),
        });
    }
    Ok(out)
}
