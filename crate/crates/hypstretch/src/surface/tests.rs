use super::*;
use crate::pieces::EdgeLabel::*;
use proptest::prelude::*;

pub(crate) fn load(name: &str) -> Surface {
    let path = format!("{}/data/{name}.json", env!("CARGO_MANIFEST_DIR"));
    Surface::from_json(&std::fs::read_to_string(path).unwrap()).unwrap()
}

const ALL: [&str; 5] = ["pants", "one_holed_torus", "punctured_torus", "crown_pentagons", "crown_quads"];

#[test]
fn example_surfaces_are_valid() {
    for n in ALL {
        let s = load(n);
        let r = validate(&s);
        assert!(r.valid, "{n}: {:?}", r.violations);
        assert_eq!(s.pieces.len() as i64, s.topology.piece_count());
    }
}

#[test]
fn dangling_leaf_is_reported() {
    let mut s = load("pants");
    s.gluings.pop();
    let s = Surface::new(s.topology, s.ids.clone(), s.pieces.clone(), s.gluings.clone()).unwrap();
    let r = validate(&s);
    assert!(!r.valid);
    assert!(r.violations.iter().any(|v| v.contains("dangling")));
}

#[test]
fn mismatched_finite_lengths_are_reported() {
    let s = load("pants");
    let big = Piece::hexagon(2.0, 2.0, 2.0).unwrap();
    let t = s.with_parameters(vec![s.pieces[0], big], s.gluings.iter().map(|g| g.shear).collect()).unwrap();
    let r = validate(&t);
    assert!(!r.valid && r.violations.iter().any(|v| v.contains("lengths")));
}

#[test]
fn wrong_declared_topology_is_reported() {
    let mut s = load("one_holed_torus");
    s.topology = Genus { g: 0, b: 2, p: 1 };
    let r = validate(&s);
    assert!(!r.valid);
    assert!(r.violations.iter().any(|v| v.contains("boundary components")));
}

#[test]
fn half_infinite_polarity_is_checked() {
    let s = load("one_holed_torus");
    let bad = vec![
        Gluing { from: (0, L1), to: (0, L1), shear: None },
        Gluing { from: (0, L3), to: (0, L3), shear: None },
        s.gluings[1].clone(),
        s.gluings[2].clone(),
    ];
    let t = Surface::new(s.topology, s.ids.clone(), s.pieces.clone(), bad).unwrap();
    assert!(!validate(&t).valid);
    let only_one = vec![Gluing { from: (0, L1), to: (0, L1), shear: None }];
    assert!(!validate(&Surface::new(s.topology, s.ids.clone(), s.pieces.clone(), only_one).unwrap()).valid);
}

#[test]
fn json_round_trip() {
    for n in ALL {
        let s = load(n);
        let t = Surface::from_json(&s.to_json()).unwrap();
        assert_eq!(t.pieces, s.pieces);
        assert_eq!(t.gluings, s.gluings);
        assert_eq!(t.ids, s.ids);
    }
    assert!(Surface::from_json("{").is_err());
    let bad = r#"{"topology":{"g":0,"b":3,"p":0},"pieces":[{"id":1,"kind":"quad","shears":[1]}],"gluings":[{"from":[1,"l9"],"to":[1,"l3"]}]}"#;
    assert!(matches!(Surface::from_json(bad), Err(SurfaceError::UnknownEdge(..))));
}

#[test]
fn classification_examples() {
    let pants = classify(&load("pants")).unwrap();
    assert_eq!(pants.b_pieces, vec![0, 1]);
    assert!(pants.crowns.is_empty() && pants.is_whole_surface());

    let torus = load("one_holed_torus");
    let b = classify(&torus).unwrap();
    assert_eq!(b.b_pieces, vec![0]);
    assert_eq!(b.crowns.len(), 1);
    assert_eq!(b.crowns[0].quads, vec![0]);
    assert_eq!(b.crowns[0].spikes[0].corners, vec![(0, 3), (0, 2)]);
    assert_eq!(b.crowns[0].core, DualPath::closed(vec![Step::new(0, L1, L3)]));

    assert!(classify(&load("punctured_torus")).unwrap().b_pieces.is_empty());

    let pent = classify(&load("crown_pentagons")).unwrap();
    assert_eq!(pent.crowns.len(), 2);
    assert_eq!(pent.crowns[0].spikes[0].corners, vec![(0, 3), (1, 3), (0, 2)]);

    let quads = classify(&load("crown_quads")).unwrap();
    assert_eq!(quads.crowns.len(), 1);
    assert_eq!(quads.crowns[0].spikes[0].corners, vec![(2, 3), (0, 2), (1, 3), (2, 2)]);
    assert_eq!(quads.crowns[0].core.len(), 3);
}

#[test]
fn core_curve_is_the_quad_boundary_on_the_torus() {
    let s = load("one_holed_torus");
    let core = &classify(&s).unwrap().crowns[0].core;
    let a1 = crate::pieces::edge_lengths(&s.pieces[0]).unwrap().into_iter().find(|(l, _)| *l == A1).unwrap().1.value().unwrap();
    assert!((s.curve_length(core).unwrap() - a1).abs() < 1e-9);
}

#[test]
fn develop_basics() {
    let s = load("pants");
    assert!(s.develop(&DualPath::open(vec![])).unwrap().approx_eq(&Isometry::identity(), 0.0));
    for g in &s.gluings {
        let there = s.gluing_map(g.from).unwrap();
        let back = s.gluing_map(g.to).unwrap();
        assert!(there.compose(&back).approx_eq(&Isometry::identity(), 1e-12));
    }
    let broken = DualPath::open(vec![Step::new(0, A1, L1), Step::new(0, L2, A3)]);
    assert!(matches!(s.develop(&broken), Err(SurfaceError::PathBroken(_))));
    let bounce = DualPath::open(vec![Step::new(0, L1, L1)]);
    assert!(s.develop(&DualPath::closed(bounce.steps)).is_err());
}

/// Right-angled hexagon with alternate sides `x, y, z`: the side opposite `x`.
fn opposite_side(x: f64, y: f64, z: f64) -> f64 {
    ((x.cosh() + y.cosh() * z.cosh()) / (y.sinh() * z.sinh())).acosh()
}

#[test]
fn pants_boundary_matches_hexagon_trigonometry() {
    let s = load("pants");
    let top = s.analyze().unwrap().0;
    let a = opposite_side(1.0, 1.0, 1.0);
    assert_eq!(top.boundary.len(), 3);
    for w in &top.boundary {
        assert_eq!(w.len(), 2);
        assert!((s.curve_length(w).unwrap() - 2.0 * a).abs() < 1e-9);
    }
    // also against the piece module's edge lengths
    let lens = crate::pieces::edge_lengths(&s.pieces[0]).unwrap();
    assert!(lens.iter().filter(|(l, _)| !l.is_leaf()).all(|(_, v)| (v.value().unwrap() - a).abs() < 1e-9));
}

#[test]
fn asymmetric_pants_boundary() {
    let (s1, s2, s3) = (0.4, 1.3, 2.0);
    let h1 = Piece::hexagon(s1, s2, s3).unwrap();
    // the mirror image has l2 and l3 exchanged
    let h2 = Piece::hexagon(s1, s3, s2).unwrap();
    let s = load("pants").with_parameters(vec![h1, h2], vec![None; 3]).unwrap();
    assert!(validate(&s).valid, "{:?}", validate(&s).violations);
    let (l1, l2, l3) = ((s2 + s3) / 2.0, (s3 + s1) / 2.0, (s1 + s2) / 2.0);
    let mut want = vec![2.0 * opposite_side(l1, l2, l3), 2.0 * opposite_side(l2, l3, l1), 2.0 * opposite_side(l3, l1, l2)];
    let mut got: Vec<f64> = s.analyze().unwrap().0.boundary.iter().map(|w| s.curve_length(w).unwrap()).collect();
    want.sort_by(f64::total_cmp);
    got.sort_by(f64::total_cmp);
    for (a, b) in want.iter().zip(&got) {
        assert!((a - b).abs() < 1e-9, "{want:?} vs {got:?}");
    }
}

#[test]
fn hexagon_leaf_arcs() {
    let s = load("pants");
    let arc = DualPath::open(vec![Step::new(0, A2, A3)]);
    assert!((s.arc_length(&arc).unwrap() - 1.0).abs() < 1e-12);
    let h = Piece::hexagon(0.4, 1.3, 2.0).unwrap();
    let t = s.with_parameters(vec![h, Piece::hexagon(0.4, 2.0, 1.3).unwrap()], vec![None; 3]).unwrap();
    // a2 and a3 are separated by l1, of length (s2 + s3)/2
    assert!((t.arc_length(&arc).unwrap() - 1.65).abs() < 1e-12);
    assert!(matches!(s.arc_length(&DualPath::open(vec![Step::new(0, A2, A2)])), Err(SurfaceError::PathBroken(_))));
    // out through l1 and straight back onto the same boundary geodesic
    let trivial = DualPath::open(vec![Step::new(0, A2, L1), Step::new(1, L1, A3)]);
    assert_eq!(s.arc_length(&trivial), Err(SurfaceError::NonEssential));
}

#[test]
fn vertex_class_lengths_match_curve_lengths() {
    for n in ALL {
        let s = load(n);
        for c in s.vertex_classes().unwrap() {
            if c.is_cusp() {
                assert!(matches!(s.curve_length(&c.word), Err(SurfaceError::ParabolicOrTrivial(_))) || s.curve_length(&c.word).unwrap() < 1e-6);
            } else {
                assert!((s.curve_length(&c.word).unwrap() - c.length()).abs() < 1e-9, "{n}");
            }
        }
    }
    let torus = load("one_holed_torus").analyze().unwrap().0;
    assert_eq!(torus.closed_leaves.len(), 1);
    assert!((torus.vertex_classes[1].length() - 0.8).abs() < 1e-12);
}

#[test]
fn enumeration_counts() {
    let s = load("pants");
    let d0 = enumerate_candidates(&s, 0).unwrap();
    assert_eq!(d0.len(), 3);
    assert!(d0.iter().all(|c| c.kind == CandidateKind::Boundary));
    let d1 = enumerate_candidates(&s, 1).unwrap();
    assert_eq!(d1.iter().filter(|c| c.kind == CandidateKind::Boundary).count(), 3);
    let seams: Vec<_> = d1.iter().filter(|c| c.kind == CandidateKind::Arc).collect();
    assert_eq!(seams.len(), 3);
    assert!(seams.iter().all(|c| c.leaf));
    assert_eq!(d1.len(), 6);
    for n in ALL {
        let s = load(n);
        let counts: Vec<usize> = (0..5).map(|d| enumerate_candidates(&s, d).unwrap().len()).collect();
        assert!(counts.windows(2).all(|w| w[0] <= w[1]), "{n}: {counts:?}");
    }
}

#[test]
fn closed_leaves_are_candidates() {
    let s = load("one_holed_torus");
    let c = enumerate_candidates(&s, 1).unwrap();
    assert!(c.iter().any(|c| c.leaf && c.kind == CandidateKind::Curve));
}

#[test]
fn word_invariances_and_doubling() {
    for n in ALL {
        let s = load(n);
        for c in enumerate_candidates(&s, 3).unwrap() {
            match c.kind {
                CandidateKind::Arc => {
                    if let Ok(l) = s.arc_length(&c.path) {
                        assert!((2.0 * l - s.doubled_arc_length(&c.path).unwrap()).abs() < 1e-9);
                        assert!((s.arc_length(&c.path.inverse()).unwrap() - l).abs() < 1e-9);
                    }
                }
                _ => {
                    if let Ok(l) = s.curve_length(&c.path) {
                        for k in 0..c.path.len() {
                            assert!((s.curve_length(&c.path.rotated(k)).unwrap() - l).abs() < 1e-9 * l.max(1.0));
                        }
                        assert!((s.curve_length(&c.path.inverse()).unwrap() - l).abs() < 1e-9 * l.max(1.0));
                        assert!((s.curve_length(&c.path.power(2)).unwrap() - 2.0 * l).abs() < 1e-9 * l.max(1.0));
                    }
                }
            }
        }
    }
}

#[test]
fn estimate_identity_and_asymmetry() {
    let x = load("pants");
    let e = arc_distance_estimate(&x, &x, 3, Scope::All).unwrap();
    assert!(e.value.abs() < 1e-12 && e.depth == 3);
    let y = x.with_parameters(vec![Piece::hexagon(0.5, 1.2, 2.0).unwrap(), Piece::hexagon(0.5, 2.0, 1.2).unwrap()], vec![None; 3]).unwrap();
    let xy = arc_distance_estimate(&x, &y, 3, Scope::All).unwrap().value;
    let yx = arc_distance_estimate(&y, &x, 3, Scope::All).unwrap().value;
    assert!((xy - yx).abs() > 1e-3, "{xy} {yx}");
    let curves = arc_distance_estimate(&x, &y, 3, Scope::CurvesOnly).unwrap();
    assert!(curves.value <= xy + 1e-12);
    assert!(arc_distance_estimate(&x, &load("one_holed_torus"), 1, Scope::All).is_err());
}

#[test]
fn counts_are_consistent_with_euler_characteristic() {
    for n in ALL {
        let s = load(n);
        assert_eq!(s.combinatorial_euler(), s.topology.euler(), "{n}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn torus_lengths_vary_smoothly(s in -2.0f64..2.0, sigma in 0.1f64..2.0) {
        let base = load("one_holed_torus");
        let t = base.with_parameters(vec![Piece::quad(s).unwrap(), Piece::Triangle], vec![None, Some(-sigma), Some(sigma)]).unwrap();
        let r = validate(&t);
        prop_assert!(r.valid, "{:?}", r.violations);
        let top = r.topology.unwrap();
        let (i, j) = top.closed_leaves[0];
        prop_assert!((top.vertex_classes[i].length() - sigma).abs() < 1e-9);
        prop_assert!((top.vertex_classes[j].length() - sigma).abs() < 1e-9);
        for c in enumerate_candidates(&t, 2).unwrap() {
            if let Ok(l) = evaluate(&t, &c) {
                prop_assert!(l > 0.0 && l.is_finite());
            }
        }
    }
}
