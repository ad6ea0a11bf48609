//! Weighted train tracks: switch relations, the cusp condition, splitting to a
//! generic track, the Thurston form and the positivity test.

use nalgebra::DMatrix;
use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use thiserror::Error;

pub const SWITCH_TOL: f64 = 1e-9;
pub const OMEGA_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TrackError {
    #[error("MISSING_BRANCH_WEIGHT: no weight for branch `{0}`")]
    MissingBranchWeight(String),
    #[error("NOT_GENERIC: switch {0} is not trivalent with one incoming branch")]
    NotGeneric(usize),
    #[error("UNSPLITTABLE: switch {0} has several branches on both sides")]
    Unsplittable(usize),
    #[error("NEGATIVE_MEASURE: measure {0} is negative on branch `{1}`")]
    NegativeMeasure(usize, String),
    #[error("MALFORMED_TRACK: {0}")]
    Malformed(String),
    #[error("WEIGHT_PARSE: line {0}: {1}")]
    Parse(usize, String),
}

pub type TrackResult<T> = Result<T, TrackError>;

/// A switch. Outgoing branches are listed from right to left; for a generic
/// switch `outgoing[0]` is the right branch and `outgoing[1]` the left one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Switch {
    pub incoming: Vec<String>,
    pub outgoing: Vec<String>,
}

impl Switch {
    pub fn new<S: Into<String>>(incoming: impl IntoIterator<Item = S>, outgoing: impl IntoIterator<Item = S>) -> Self {
        Self { incoming: incoming.into_iter().map(Into::into).collect(), outgoing: outgoing.into_iter().map(Into::into).collect() }
    }

    pub fn is_trivalent(&self) -> bool {
        self.incoming.len() == 1 && self.outgoing.len() == 2
    }

    pub fn right(&self) -> Option<&str> {
        self.is_trivalent().then(|| self.outgoing[0].as_str())
    }

    pub fn left(&self) -> Option<&str> {
        self.is_trivalent().then(|| self.outgoing[1].as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrainTrack {
    pub branches: Vec<String>,
    pub switches: Vec<Switch>,
    /// Branch sets going into a puncture; each membership uses one branch end.
    pub punctures: Vec<Vec<String>>,
}

pub type Weights = BTreeMap<String, f64>;

fn weight(w: &Weights, b: &str) -> TrackResult<f64> {
    w.get(b).copied().ok_or_else(|| TrackError::MissingBranchWeight(b.to_string()))
}

impl TrainTrack {
    pub fn new(branches: Vec<String>, switches: Vec<Switch>, punctures: Vec<Vec<String>>) -> TrackResult<Self> {
        let t = Self { branches, switches, punctures };
        t.validate()?;
        Ok(t)
    }

    /// Every branch must use exactly two slots among switch sides and punctures.
    pub fn validate(&self) -> TrackResult<()> {
        let mut slots: HashMap<&str, usize> = self.branches.iter().map(|b| (b.as_str(), 0)).collect();
        if slots.len() != self.branches.len() {
            return Err(TrackError::Malformed("duplicate branch name".into()));
        }
        let ends = self.switches.iter().flat_map(|s| s.incoming.iter().chain(&s.outgoing)).chain(self.punctures.iter().flatten());
        for b in ends {
            *slots.get_mut(b.as_str()).ok_or_else(|| TrackError::Malformed(format!("unknown branch `{b}`")))? += 1;
        }
        match slots.iter().find(|(_, &n)| n != 2) {
            Some((b, n)) => Err(TrackError::Malformed(format!("branch `{b}` meets {n} switch slots"))),
            None => Ok(()),
        }
    }

    pub fn is_generic(&self) -> bool {
        self.switches.iter().all(Switch::is_trivalent)
    }

    /// Largest switch residual `|Σ in − Σ out|`.
    pub fn switch_residual(&self, w: &Weights) -> TrackResult<f64> {
        let mut worst: f64 = 0.0;
        for s in &self.switches {
            let sum = |bs: &[String]| bs.iter().map(|b| weight(w, b)).sum::<TrackResult<f64>>();
            worst = worst.max((sum(&s.incoming)? - sum(&s.outgoing)?).abs());
        }
        Ok(worst)
    }

    /// Rows are switches (and punctures when `with_cusps`), columns branches.
    pub fn relation_matrix(&self, with_cusps: bool) -> DMatrix<f64> {
        let col: HashMap<&str, usize> = self.branches.iter().enumerate().map(|(i, b)| (b.as_str(), i)).collect();
        let rows = self.switches.len() + if with_cusps { self.punctures.len() } else { 0 };
        let mut m = DMatrix::zeros(rows, self.branches.len());
        for (r, s) in self.switches.iter().enumerate() {
            for b in &s.incoming {
                m[(r, col[b.as_str()])] += 1.0;
            }
            for b in &s.outgoing {
                m[(r, col[b.as_str()])] -= 1.0;
            }
        }
        if with_cusps {
            for (k, p) in self.punctures.iter().enumerate() {
                for b in p {
                    m[(self.switches.len() + k, col[b.as_str()])] += 1.0;
                }
            }
        }
        m
    }

    /// Dimension of the space of weight systems satisfying the switch relations.
    pub fn cocycle_dimension(&self, with_cusps: bool) -> usize {
        self.branches.len() - self.relation_matrix(with_cusps).rank(1e-9)
    }

    /// An orthonormal basis of that space, one weight table per vector.
    pub fn cocycle_basis(&self, with_cusps: bool) -> Vec<Weights> {
        let n = self.branches.len();
        let a = self.relation_matrix(with_cusps);
        // pad to a square matrix so the SVD returns the full right singular basis
        let mut sq = DMatrix::zeros(a.nrows().max(n), n);
        sq.view_mut((0, 0), (a.nrows(), n)).copy_from(&a);
        let svd = sq.svd(false, true);
        let vt = svd.v_t.expect("requested V^T");
        let scale = svd.singular_values.max().max(1.0);
        (0..vt.nrows())
            .filter(|&i| svd.singular_values[i] <= 1e-9 * scale)
            .map(|i| self.branches.iter().cloned().zip(vt.row(i).iter().copied()).collect())
            .collect()
    }
}

/// Switch relations hold to `SWITCH_TOL`; returns the verdict and the max residual.
pub fn check_switch_relations(t: &TrainTrack, w: &Weights) -> TrackResult<(bool, f64)> {
    let r = t.switch_residual(w)?;
    Ok((r < SWITCH_TOL, r))
}

pub fn check_cusp_condition(t: &TrainTrack, w: &Weights) -> bool {
    t.punctures.iter().all(|p| p.iter().map(|b| w.get(b).copied().unwrap_or(f64::NAN)).sum::<f64>().abs() < SWITCH_TOL)
}

/// `Σ_v a(e_r) b(e_l) − a(e_l) b(e_r)` over the switches of a generic track.
pub fn omega(t: &TrainTrack, a: &Weights, b: &Weights) -> TrackResult<f64> {
    let mut sum = 0.0;
    for (i, s) in t.switches.iter().enumerate() {
        if !s.is_trivalent() {
            return Err(TrackError::NotGeneric(i));
        }
        let (r, l) = (&s.outgoing[0], &s.outgoing[1]);
        sum += weight(a, r)? * weight(b, l)? - weight(a, l)? * weight(b, r)?;
    }
    Ok(sum)
}

/// Where the first trivalent switch of a fan is carved off.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitOrder {
    FromRight,
    FromLeft,
}

pub fn split_to_generic(t: &TrainTrack, w: &Weights) -> TrackResult<(TrainTrack, Weights)> {
    split_to_generic_with(t, w, SplitOrder::FromRight)
}

/// Replace every fan switch by a chain of trivalent switches. A switch with a
/// single outgoing and several incoming branches is read from the other side.
/// New branches carry the weights forced by the switch relations.
pub fn split_to_generic_with(t: &TrainTrack, w: &Weights, order: SplitOrder) -> TrackResult<(TrainTrack, Weights)> {
    let mut branches = t.branches.clone();
    let mut weights = w.clone();
    let mut switches = Vec::new();
    for (i, s) in t.switches.iter().enumerate() {
        let s = match (s.incoming.len(), s.outgoing.len()) {
            (1, n) if n >= 2 => s.clone(),
            (n, 1) if n >= 2 => Switch { incoming: s.outgoing.clone(), outgoing: s.incoming.clone() },
            _ => return Err(TrackError::Unsplittable(i)),
        };
        if s.outgoing.len() == 2 {
            switches.push(s);
            continue;
        }
        let out = &s.outgoing;
        let m = out.len();
        let mut carry = s.incoming[0].clone();
        let mut carry_w = weight(w, &carry)?;
        for k in 0..m - 2 {
            let name = format!("{}~{}.{}", s.incoming[0], i, k + 1);
            // peel one branch off the chosen end; the new branch keeps the rest
            let peel = match order {
                SplitOrder::FromRight => out[k].clone(),
                SplitOrder::FromLeft => out[m - 1 - k].clone(),
            };
            let next_w = carry_w - weight(w, &peel)?;
            let pair = match order {
                SplitOrder::FromRight => vec![peel, name.clone()],
                SplitOrder::FromLeft => vec![name.clone(), peel],
            };
            switches.push(Switch { incoming: vec![carry], outgoing: pair });
            branches.push(name.clone());
            weights.insert(name.clone(), next_w);
            carry = name;
            carry_w = next_w;
        }
        let last = match order {
            SplitOrder::FromRight => vec![out[m - 2].clone(), out[m - 1].clone()],
            SplitOrder::FromLeft => vec![out[0].clone(), out[1].clone()],
        };
        switches.push(Switch { incoming: vec![carry], outgoing: last });
    }
    Ok((TrainTrack { branches, switches, punctures: t.punctures.clone() }, weights))
}

/// `ω(rho, μ) > 1e-12` for every supplied measure.
pub fn positivity_test(t: &TrainTrack, rho: &Weights, measures: &[Weights]) -> TrackResult<bool> {
    for (k, mu) in measures.iter().enumerate() {
        if let Some((b, _)) = mu.iter().find(|(_, v)| **v < 0.0) {
            return Err(TrackError::NegativeMeasure(k, b.clone()));
        }
    }
    for mu in measures {
        if omega(t, rho, mu)? <= OMEGA_TOL {
            return Ok(false);
        }
    }
    Ok(true)
}

/// One `branch value` line per branch, values in shortest round-trip form.
pub fn write_weights(w: &Weights) -> String {
    let mut out = String::new();
    for (b, v) in w {
        let _ = writeln!(out, "{b} {v:?}");
    }
    out
}

pub fn read_weights(text: &str) -> TrackResult<Weights> {
    let mut w = Weights::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut it = line.split_whitespace();
        let (Some(b), Some(v), None) = (it.next(), it.next(), it.next()) else {
            return Err(TrackError::Parse(n + 1, format!("expected `branch value`, got `{line}`")));
        };
        let v: f64 = v.parse().map_err(|_| TrackError::Parse(n + 1, format!("bad number `{v}`")))?;
        w.insert(b.to_string(), v);
    }
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    fn wts(v: &[(&str, f64)]) -> Weights {
        v.iter().map(|(b, x)| (b.to_string(), *x)).collect()
    }

    /// A trivalent switch whose three ends pair off with a second switch.
    fn theta() -> TrainTrack {
        TrainTrack::new(names(&["a", "b", "c"]), vec![Switch::new(["a"], ["b", "c"]), Switch::new(["b", "c"], ["a"])], vec![]).unwrap()
    }

    /// The once-punctured torus track: two switches, three branches, plus a fan.
    fn fan_track() -> TrainTrack {
        let br = names(&["a", "b0", "e1", "e2", "b1"]);
        let sw = vec![Switch::new(["a"], ["b0", "e1", "e2", "b1"])];
        TrainTrack::new(br, sw, vec![names(&["a", "b0", "e1", "e2", "b1"])]).unwrap()
    }

    #[test]
    fn switch_relation_examples() {
        let t = theta();
        let zero = wts(&[("a", 0.0), ("b", 0.0), ("c", 0.0)]);
        assert_eq!(check_switch_relations(&t, &zero).unwrap(), (true, 0.0));
        assert!(check_switch_relations(&t, &wts(&[("a", 2.0), ("b", 1.0), ("c", 1.0)])).unwrap().0);
        let (ok, r) = check_switch_relations(&t, &wts(&[("a", 2.0), ("b", 1.0), ("c", 1.5)])).unwrap();
        assert!(!ok && (r - 0.5).abs() < 1e-15);
        assert_eq!(check_switch_relations(&t, &wts(&[("a", 1.0)])), Err(TrackError::MissingBranchWeight("b".into())));
    }

    #[test]
    fn cusp_examples() {
        assert!(check_cusp_condition(&theta(), &Weights::new()));
        let t = TrainTrack { branches: names(&["x", "y"]), switches: vec![], punctures: vec![names(&["x", "y"])] };
        assert!(check_cusp_condition(&t, &wts(&[("x", 1.0), ("y", -1.0)])));
        assert!(!check_cusp_condition(&t, &wts(&[("x", 1.0), ("y", 0.0)])));
    }

    #[test]
    fn malformed_tracks_are_rejected() {
        assert!(TrainTrack::new(names(&["a"]), vec![Switch::new(["a"], ["a", "a"])], vec![]).is_err());
        assert!(TrainTrack::new(names(&["a"]), vec![Switch::new(["a"], ["z"])], vec![]).is_err());
    }

    #[test]
    fn omega_requires_generic() {
        let w = wts(&[("a", 1.0), ("b0", 0.0), ("e1", 0.0), ("e2", 0.0), ("b1", 1.0)]);
        assert_eq!(omega(&fan_track(), &w, &w), Err(TrackError::NotGeneric(0)));
    }

    #[test]
    fn generic_track_is_unchanged_by_splitting() {
        let t = TrainTrack::new(names(&["a", "b", "c"]), vec![Switch::new(["a"], ["b", "c"]), Switch::new(["b"], ["a", "c"])], vec![]).unwrap();
        assert!(t.is_generic());
        let w = wts(&[("a", 1.0), ("b", 1.0), ("c", 0.0)]);
        assert_eq!(split_to_generic(&t, &w).unwrap(), (t, w));
    }

    #[test]
    fn fan_split_carries_partial_sums() {
        let t = fan_track();
        let w = wts(&[("a", 3.0), ("b0", 0.5), ("e1", 1.0), ("e2", 0.25), ("b1", 1.25)]);
        let (g, gw) = split_to_generic(&t, &w).unwrap();
        assert!(g.is_generic() && g.validate().is_ok());
        assert_eq!(g.switches.len(), 3);
        assert_eq!(g.switches[0].outgoing[0], "b0");
        let f1 = &g.switches[0].outgoing[1];
        assert_eq!(gw[f1], 3.0 - 0.5);
        assert!(check_switch_relations(&g, &gw).unwrap().0);
        let zero: Weights = w.keys().map(|k| (k.clone(), 0.0)).collect();
        let (_, zw) = split_to_generic(&t, &zero).unwrap();
        assert!(zw.values().all(|v| *v == 0.0));
    }

    #[test]
    fn three_way_fan_splits_into_two_switches() {
        let t = TrainTrack::new(names(&["a", "b0", "e", "b1"]), vec![Switch::new(["a"], ["b0", "e", "b1"])], vec![names(&["a", "b0", "e", "b1"])]).unwrap();
        let w = wts(&[("a", 2.0), ("b0", 0.5), ("e", 1.0), ("b1", 0.5)]);
        let (g, gw) = split_to_generic(&t, &w).unwrap();
        assert_eq!(g.switches.len(), 2);
        assert_eq!(gw[&g.switches[0].outgoing[1]], 1.5);
    }

    #[test]
    fn unsplittable_switch() {
        let t = TrainTrack::new(names(&["a", "b", "c", "d"]), vec![Switch::new(["a", "b"], ["c", "d"]), Switch::new(["c", "d"], ["a", "b"])], vec![]).unwrap();
        let w = wts(&[("a", 1.0), ("b", 1.0), ("c", 1.0), ("d", 1.0)]);
        assert_eq!(split_to_generic(&t, &w), Err(TrackError::Unsplittable(0)));
    }

    #[test]
    fn positivity_examples() {
        let t = theta();
        let rho = wts(&[("a", 0.0), ("b", 1.0), ("c", -1.0)]);
        let mu = wts(&[("a", 2.0), ("b", 1.0), ("c", 1.0)]);
        // both switches read as a -> (b right, c left): 2 * (1·1 − (−1)·1)
        let (g, grho) = split_to_generic(&t, &rho).unwrap();
        let (_, gmu) = split_to_generic(&t, &mu).unwrap();
        assert_eq!(omega(&g, &grho, &gmu).unwrap(), 4.0);
        assert!(positivity_test(&g, &grho, std::slice::from_ref(&gmu)).unwrap());
        let zero: Weights = grho.keys().map(|k| (k.clone(), 0.0)).collect();
        assert!(!positivity_test(&g, &zero, std::slice::from_ref(&gmu)).unwrap());
        let neg: Weights = grho.iter().map(|(k, x)| (k.clone(), -x)).collect();
        assert!(!positivity_test(&g, &neg, std::slice::from_ref(&gmu)).unwrap());
        let bad = wts(&[("a", -1.0), ("b", 0.0), ("c", 0.0)]);
        assert_eq!(positivity_test(&g, &grho, &[bad]), Err(TrackError::NegativeMeasure(0, "a".into())));
        assert!(positivity_test(&g, &grho, &[]).unwrap());
    }

    #[test]
    fn rank_matches_hand_count() {
        // theta graph: 3 branches, 2 identical relations -> 2 free parameters
        assert_eq!(theta().cocycle_dimension(false), 2);
        assert_eq!(theta().cocycle_basis(false).len(), 2);
        // fan with its cusp: 5 branches, 2 independent relations
        assert_eq!(fan_track().cocycle_dimension(true), 3);
        for w in fan_track().cocycle_basis(true) {
            assert!(check_switch_relations(&fan_track(), &w).unwrap().0);
            assert!(check_cusp_condition(&fan_track(), &w));
        }
    }

    #[test]
    fn weight_file_round_trip() {
        let w = wts(&[("a", 0.1 + 0.2), ("b~0.1", -1e-300), ("c", 3.0)]);
        let text = write_weights(&w);
        assert!(text.contains("a 0.30000000000000004"));
        assert_eq!(read_weights(&text).unwrap(), w);
        assert!(read_weights("a 1 2").is_err());
        assert!(read_weights("a x").is_err());
    }

    /// Two fan switches joined into a closed track with generic merges.
    fn random_track() -> TrainTrack {
        let br = names(&["a", "b0", "e1", "e2", "b1", "x", "y"]);
        let sw = vec![
            Switch::new(["a"], ["b0", "e1", "e2", "b1"]),
            Switch::new(["b0", "e1"], ["x"]),
            Switch::new(["e2", "b1"], ["y"]),
            Switch::new(["x", "y"], ["a"]),
        ];
        TrainTrack::new(br, sw, vec![]).unwrap()
    }

    fn combo(basis: &[Weights], c: &[f64]) -> Weights {
        let mut out: Weights = basis[0].keys().map(|k| (k.clone(), 0.0)).collect();
        for (w, k) in basis.iter().zip(c) {
            for (b, v) in w {
                *out.get_mut(b).unwrap() += k * v;
            }
        }
        out
    }

    proptest! {
        #[test]
        fn omega_is_antisymmetric_and_bilinear(c in prop::collection::vec(-3.0f64..3.0, 12), lam in -2.0f64..2.0) {
            let t = random_track();
            let basis = t.cocycle_basis(false);
            prop_assert_eq!(basis.len(), 4);
            let (a, b, d) = (combo(&basis, &c[0..4]), combo(&basis, &c[4..8]), combo(&basis, &c[8..12]));
            let (g, ga) = split_to_generic(&t, &a).unwrap();
            let (_, gb) = split_to_generic(&t, &b).unwrap();
            let (_, gd) = split_to_generic(&t, &d).unwrap();
            prop_assert!(check_switch_relations(&g, &ga).unwrap().1 < 1e-12);
            let w = |x: &Weights, y: &Weights| omega(&g, x, y).unwrap();
            prop_assert!(w(&ga, &ga).abs() < 1e-12);
            prop_assert!((w(&ga, &gb) + w(&gb, &ga)).abs() < 1e-12);
            let sum: Weights = ga.iter().map(|(k, v)| (k.clone(), lam * v + gd[k])).collect();
            prop_assert!((w(&sum, &gb) - lam * w(&ga, &gb) - w(&gd, &gb)).abs() < 1e-10);
            let (h, ha) = split_to_generic_with(&t, &a, SplitOrder::FromLeft).unwrap();
            let (_, hb) = split_to_generic_with(&t, &b, SplitOrder::FromLeft).unwrap();
            prop_assert!(check_switch_relations(&h, &ha).unwrap().1 < 1e-12);
            prop_assert!((omega(&h, &ha, &hb).unwrap() - w(&ga, &gb)).abs() < 1e-12);
        }
    }
}
