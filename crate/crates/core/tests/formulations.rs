use mps_core::formulations::{
    build_facialwalk_model, build_leftright_model, build_model, for_each_relation, separate_bicoloring,
    solve_bicoloring, FacialWalkConfig, Formulation, FormulationConfig, LeftRightConfig, LeftRightModel, MpsModel,
    TremauxTree,
};
use mps_core::graph::{arc_edge, EdgeSelection, WeightedGraph};
use mps_core::heuristics::cactus_heuristic;
use mps_core::oracle::oracle_mps_weight;
use mps_core::pbsolver::{solve, BranchRule, Limits, SolveStatus};
use mps_core::planarity::is_planar;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;

fn random_connected(rng: &mut ChaCha8Rng, n: usize, p: f64, weighted: bool) -> WeightedGraph {
    loop {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen_bool(p) {
                    edges.push((u, v, if weighted { rng.gen_range(1..=5) } else { 1 }));
                }
            }
        }
        let g = WeightedGraph::new(n, &edges).unwrap();
        if g.is_connected() {
            return g;
        }
    }
}

/// Solves with the model's own branching; warm starts from the heuristic
/// when `warm` is set. Returns the objective after checking the decoded
/// selection.
fn solve_with(g: &WeightedGraph, f: Formulation, cfg: &FormulationConfig, warm: bool) -> i64 {
    let mut m = build_model(g, f, cfg).unwrap();
    if warm {
        let sel = cactus_heuristic(g, Some(1)).unwrap();
        m.warm_start(&sel);
    }
    let mut rule = m.branch_rule();
    let r = solve(m.pb_mut(), &mut rule, &Limits::time(60.0)).unwrap();
    assert_eq!(r.status, SolveStatus::Optimal, "{f} on {g}");
    let sel = m.decode(r.incumbent.as_ref().unwrap()).unwrap();
    assert!(is_planar(g, &sel));
    let weight: i64 = sel.selected().map(|e| g.weight(e)).sum();
    assert_eq!(Some(weight), r.objective);
    weight
}

#[test]
fn all_formulations_match_the_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let cfg = FormulationConfig::default();
    for round in 0..24 {
        let n = rng.gen_range(5..=7);
        let g = random_connected(&mut rng, n, 0.75, round % 2 == 1);
        let expected = oracle_mps_weight(&g).unwrap();
        for f in Formulation::ALL {
            assert_eq!(solve_with(&g, f, &cfg, round % 3 == 0), expected, "{f} on {g}");
        }
    }
}

#[test]
fn named_graphs() {
    let cfg = FormulationConfig::default();
    for (g, expected) in [
        (WeightedGraph::complete(5), 9),
        (WeightedGraph::complete_bipartite(3, 3), 8),
        (WeightedGraph::complete(6), 12),
    ] {
        for f in Formulation::ALL {
            assert_eq!(solve_with(&g, f, &cfg, true), expected, "{f} on {g}");
        }
    }
}

#[test]
fn symmetry_breaking_does_not_change_optima() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let cfg = FormulationConfig::default();
    let bare = cfg.without_symmetry_breaking();
    for _ in 0..10 {
        let n = rng.gen_range(5..=7);
        let g = random_connected(&mut rng, n, 0.8, true);
        for f in [Formulation::Schnyder, Formulation::LeftRight] {
            assert_eq!(solve_with(&g, f, &cfg, false), solve_with(&g, f, &bare, false), "{f} on {g}");
        }
    }
}

#[test]
fn degree_three_specialization_agrees() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..10 {
        let n = rng.gen_range(5..=7);
        let g = random_connected(&mut rng, n, 0.6, true);
        let mut plain = build_facialwalk_model(&g, &FacialWalkConfig::default()).unwrap();
        let mut special = build_facialwalk_model(&g, &FacialWalkConfig::ilp_export()).unwrap();
        let a = solve(plain.pb_mut(), &mut BranchRule::Default, &Limits::default()).unwrap();
        let b = solve(special.pb_mut(), &mut BranchRule::Default, &Limits::default()).unwrap();
        assert_eq!(a.objective, b.objective, "{g}");
        special.decode(b.incumbent.as_ref().unwrap()).unwrap();
    }
}

/// A connected spanning selection of `g` with roughly the given density.
fn random_selection(rng: &mut ChaCha8Rng, g: &WeightedGraph, p: f64) -> Option<EdgeSelection> {
    let sel = EdgeSelection::from_bits((0..g.m()).map(|_| rng.gen_bool(p)).collect());
    TremauxTree::dfs(g, &sel, 0).map(|_| sel)
}

#[test]
fn bicoloring_exists_exactly_for_planar_selections() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut seen = [0usize; 2];
    for _ in 0..600 {
        let n = rng.gen_range(5..=7);
        let g = random_connected(&mut rng, n, 0.85, false);
        let Some(sel) = random_selection(&mut rng, &g, 0.85) else { continue };
        let root = rng.gen_range(0..n);
        let tree = TremauxTree::dfs(&g, &sel, root).unwrap();
        let planar = is_planar(&g, &sel);
        seen[usize::from(planar)] += 1;
        assert_eq!(solve_bicoloring(&g, &tree, &sel).is_some(), planar, "{g} {sel:?}");
    }
    assert!(seen[0] > 50 && seen[1] > 50, "{seen:?}");
}

#[test]
fn nonplanar_selections_are_cut_under_every_coloring() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let cfg = LeftRightConfig::default();
    let mut checked = 0;
    while checked < 40 {
        let n = rng.gen_range(5..=7);
        let g = random_connected(&mut rng, n, 0.9, false);
        let Some(sel) = random_selection(&mut rng, &g, 0.9) else { continue };
        if is_planar(&g, &sel) {
            continue;
        }
        checked += 1;
        let m = build_leftright_model(&g, &cfg, 0).unwrap();
        let tree = TremauxTree::dfs(&g, &sel, 0).unwrap();
        let cotree: Vec<usize> = tree.cotree_arcs(&g, &sel).into_iter().map(arc_edge).collect();
        let colorings: Vec<u64> = if cotree.len() <= 10 {
            (0..1 << cotree.len()).collect()
        } else {
            (0..512).map(|_| rng.gen()).collect()
        };
        for mask in colorings {
            let red = EdgeSelection::from_edges(
                g.m(),
                cotree.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &e)| e),
            );
            let x = m.assignment(&sel, &tree, &red);
            let cuts = separate_bicoloring(&m, &x, usize::MAX).unwrap();
            assert!(!cuts.is_empty());
            assert!(cuts.iter().all(|c| !c.is_satisfied(&x)));
        }
    }
}

/// Forced pairs found by evaluating the pattern terms literally over all
/// cotree arcs and all witness nodes.
fn literal_pairs(m: &LeftRightModel, g: &WeightedGraph, x: &[bool]) -> BTreeSet<(usize, usize, bool)> {
    let n = g.n();
    let l = |a: usize, b: usize| i64::from(x[m.l_var(a, b)]);
    let c = |arc: usize| {
        let d = g.arc(arc);
        l(d.tail, d.head) + i64::from(x[arc_edge(arc)]) - i64::from(x[m.t_var(arc)]) - i64::from(x[m.t_var(arc ^ 1)]) - 2
    };
    // Arcs with a nonzero cotree term can never zero a pattern.
    let arcs: Vec<usize> = (0..2 * g.m()).filter(|&a| c(a) == 0).collect();
    let mut out = BTreeSet::new();
    let key = |a: usize, b: usize, alike| (arc_edge(a).min(arc_edge(b)), arc_edge(a).max(arc_edge(b)), alike);
    for &a in &arcs {
        for &b in &arcs {
            for &q in &arcs {
                let (da, db, dq) = (g.arc(a), g.arc(b), g.arc(q));
                let distinct = arc_edge(a) != arc_edge(b) && arc_edge(q) != arc_edge(a) && arc_edge(q) != arc_edge(b);
                if !distinct || dq.tail == da.tail {
                    continue;
                }
                for u in 0..n {
                    for v in (0..n).filter(|&v| v != u) {
                        let r = c(a) + c(b) + c(q) + l(dq.tail, da.tail) + l(u, v) - 2;
                        if db.tail != u {
                            let p1 = r + l(da.tail, db.tail) + l(db.tail, u) + l(u, dq.head) - l(v, dq.head)
                                + l(v, da.head)
                                + l(v, db.head)
                                - 5;
                            assert!(p1 <= 0);
                            if p1 == 0 {
                                out.insert(key(a, b, true));
                            }
                        }
                        if db.tail != u && da.tail != db.tail {
                            let p2 = r + l(da.tail, db.tail) + l(db.tail, u) + l(u, da.head) - l(v, da.head)
                                + l(v, db.head)
                                + l(v, dq.head)
                                - 5;
                            assert!(p2 <= 0);
                            if p2 == 0 {
                                out.insert(key(a, b, false));
                            }
                        }
                        if da.tail != db.tail || da.tail == u {
                            continue;
                        }
                        for &d in &arcs {
                            let dd = g.arc(d);
                            if dd.tail != dq.tail || [a, b, q].iter().any(|&o| arc_edge(o) == arc_edge(d)) {
                                continue;
                            }
                            for w in (0..n).filter(|&w| w != v) {
                                let p3 = r + c(d) + l(da.tail, u) + l(u, v) + l(u, w) + l(u, da.head) + l(u, db.head)
                                    + l(v, da.head)
                                    - l(v, db.head)
                                    + l(v, dq.head)
                                    - l(v, dd.head)
                                    - l(w, da.head)
                                    + l(w, db.head)
                                    - l(w, dq.head)
                                    + l(w, dd.head)
                                    - 9;
                                assert!(p3 <= 0);
                                if p3 == 0 {
                                    out.insert(key(a, b, false));
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

#[test]
fn relations_match_a_literal_reading_of_the_patterns() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let cfg = LeftRightConfig::default();
    let mut nontrivial = 0;
    for _ in 0..60 {
        let n = rng.gen_range(4..=6);
        let g = random_connected(&mut rng, n, 0.8, false);
        let Some(sel) = random_selection(&mut rng, &g, 0.9) else { continue };
        let m = build_leftright_model(&g, &cfg, 0).unwrap();
        let tree = TremauxTree::dfs(&g, &sel, 0).unwrap();
        let x = m.assignment(&sel, &tree, &EdgeSelection::none(g.m()));
        let mut fast = BTreeSet::new();
        for_each_relation(&g, &tree, &sel, |rel| {
            let (a, b) = (arc_edge(rel.alpha), arc_edge(rel.beta));
            fast.insert((a.min(b), a.max(b), rel.alike()));
            true
        });
        assert_eq!(fast, literal_pairs(&m, &g, &x), "{g} {sel:?}");
        nontrivial += usize::from(fast.iter().any(|p| p.2) && fast.iter().any(|p| !p.2));
    }
    assert!(nontrivial >= 5, "{nontrivial}");
}

#[test]
fn decoded_colorings_satisfy_every_relation() {
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    for _ in 0..8 {
        let g = random_connected(&mut rng, 7, 0.8, true);
        let mut m = build_leftright_model(&g, &LeftRightConfig::default(), 0).unwrap();
        let mut rule = m.branch_rule();
        let r = solve(m.pb_mut(), &mut rule, &Limits::default()).unwrap();
        let x = r.incumbent.unwrap();
        let sel = m.decode(&x).unwrap();
        let tree = m.tree(&x).unwrap();
        let red = m.red(&x);
        let pairs = literal_pairs(&m, &g, &x);
        assert!(pairs.iter().all(|&(a, b, alike)| (red.get(a) == red.get(b)) == alike));
        assert!(tree.is_tremaux_for(&g, &sel));
        assert_eq!(r.objective, Some(oracle_mps_weight(&g).unwrap()));
    }
}
