//! Acceptance run: prints one PASS/FAIL (or WARN) line per criterion and
//! exits non-zero if any criterion fails.

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::rc::Rc;
use std::time::{Duration, Instant};

use mps_core::bench::{gen_random_connected, run_suite_on, Instance, RunRecord, SuiteConfig};
use mps_core::formulations::{build_model, Formulation, FormulationConfig};
use mps_core::graph::{EdgeSelection, WeightedGraph};
use mps_core::heuristics::{cactus_heuristic, maximality_check};
use mps_core::oracle::{has_kuratowski_subdivision, oracle_skewness_with_limit};
use mps_core::pbsolver::{export_lp, export_opb, parse_lp, solve, LinearConstraint, Limits, SolveStatus};
use mps_core::planarity::{is_planar, test_planarity};
use mps_core::preprocess::reduce;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const ORACLE_EDGES: usize = 30;

#[derive(Clone, Copy, PartialEq)]
enum Verdict {
    Pass,
    Fail,
    Warn,
}

struct Report {
    failed: usize,
}

impl Report {
    fn line(&mut self, id: usize, verdict: Verdict, title: &str, detail: String) {
        let tag = match verdict {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Warn => "WARN",
        };
        if verdict == Verdict::Fail {
            self.failed += 1;
        }
        println!("criterion {id:>2} {tag} {title}: {detail}");
    }

    fn check(&mut self, id: usize, ok: bool, title: &str, detail: String) {
        self.line(id, if ok { Verdict::Pass } else { Verdict::Fail }, title, detail);
    }
}

const NAMED_SKEWNESS: [(&str, i64); 6] =
    [("k5", 1), ("k33", 1), ("k6", 3), ("k7", 6), ("k44", 4), ("petersen", 2)];

fn named(name: &str) -> WeightedGraph {
    match name {
        "k5" => WeightedGraph::complete(5),
        "k33" => WeightedGraph::complete_bipartite(3, 3),
        "k6" => WeightedGraph::complete(6),
        "k7" => WeightedGraph::complete(7),
        "k44" => WeightedGraph::complete_bipartite(4, 4),
        "petersen" => WeightedGraph::petersen(),
        _ => unreachable!(),
    }
}

/// 50 seeded random connected graphs with 6 to 10 nodes and `n + 2` to
/// `n + 6` edges, then the named graphs.
fn corpus() -> Vec<Instance> {
    let mut out = Vec::new();
    for i in 0..50u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + i);
        let n = rng.gen_range(6..=10);
        let m = rng.gen_range(n + 2..=n + 6);
        let g = gen_random_connected(n, m, i).expect("feasible size");
        out.push(Instance::new(format!("rand-{i:02}"), g));
    }
    for (name, _) in NAMED_SKEWNESS {
        out.push(Instance::new(name, named(name)));
    }
    out
}

fn graphs(corpus: &[Instance]) -> Vec<(&str, &WeightedGraph)> {
    corpus.iter().map(|i| (i.name.as_str(), i.graph.as_ref().expect("generated"))).collect()
}

/// Random positive weights on the same edges.
fn reweighted(g: &WeightedGraph, seed: u64) -> WeightedGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w: Vec<i64> = (0..g.m()).map(|_| rng.gen_range(1..=6)).collect();
    g.with_weights(&w).unwrap()
}

/// Kruskal on descending weights.
fn max_spanning_tree_weight(g: &WeightedGraph) -> i64 {
    let mut parent: Vec<usize> = (0..g.n()).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let next = p[y];
            p[y] = r;
            y = next;
        }
        r
    }
    let mut edges: Vec<_> = g.edges().to_vec();
    edges.sort_by_key(|e| std::cmp::Reverse(e.weight));
    let mut total = 0;
    for e in edges {
        let (a, b) = (find(&mut parent, e.u), find(&mut parent, e.v));
        if a != b {
            parent[a] = b;
            total += e.weight;
        }
    }
    total
}

fn errors(records: &[RunRecord]) -> Vec<String> {
    records
        .iter()
        .filter(|r| r.status == "error")
        .map(|r| format!("{}/{}: {}", r.instance_name, r.formulation, r.error))
        .collect()
}

fn criterion_1(report: &mut Report, records: &[RunRecord], elapsed: Duration) {
    let optimal = records.iter().filter(|r| r.is_optimal()).count();
    let wrong: Vec<String> = records
        .iter()
        .filter(|r| r.is_optimal() && (r.oracle_objective.is_none() || r.objective != r.oracle_objective))
        .map(|r| format!("{}/{}", r.instance_name, r.formulation))
        .collect();
    let unsolved: Vec<String> = records
        .iter()
        .filter(|r| !r.is_optimal())
        .map(|r| format!("{}/{} {}", r.instance_name, r.formulation, r.status))
        .collect();
    let share = optimal as f64 / records.len() as f64;
    report.check(
        1,
        wrong.is_empty() && share >= 0.95 && elapsed < Duration::from_secs(30 * 60),
        "oracle agreement",
        format!(
            "{optimal}/{} pairs optimal ({:.1}%), {} disagree with the oracle {wrong:?}, not optimal {unsolved:?}, \
             suite {:.1}s",
            records.len(),
            100.0 * share,
            wrong.len(),
            elapsed.as_secs_f64()
        ),
    );
}

fn criterion_2(report: &mut Report, records: &[RunRecord]) {
    let mut bad = Vec::new();
    let mut summary = Vec::new();
    for (name, k) in NAMED_SKEWNESS {
        let g = named(name);
        let oracle_k = oracle_skewness_with_limit(&g, ORACLE_EDGES).unwrap().0;
        let solved: Vec<i64> = records
            .iter()
            .filter(|r| r.instance_name == name && r.is_optimal())
            .map(|r| g.total_weight() - r.objective.unwrap())
            .collect();
        if oracle_k != k || solved.is_empty() || solved.iter().any(|&s| s != k) {
            bad.push(format!("{name}: oracle {oracle_k}, solvers {solved:?}, expected {k}"));
        }
        summary.push(format!("{name}={oracle_k} ({} solvers)", solved.len()));
    }
    report.check(2, bad.is_empty(), "named skewness", format!("{} {bad:?}", summary.join(" ")));
}

fn criterion_3(report: &mut Report, records: &[RunRecord]) {
    let mut by_instance: BTreeMap<&str, Vec<i64>> = BTreeMap::new();
    for r in records.iter().filter(|r| r.is_optimal()) {
        by_instance.entry(&r.instance_name).or_default().push(r.objective.unwrap());
    }
    let compared = by_instance.values().filter(|v| v.len() >= 2).count();
    let bad: Vec<&str> =
        by_instance.iter().filter(|(_, v)| v.iter().any(|&x| x != v[0])).map(|(k, _)| *k).collect();
    report.check(
        3,
        bad.is_empty(),
        "cross-formulation agreement",
        format!("{compared} instances solved by at least two formulations, disagreements {bad:?}"),
    );
}

fn criterion_4(report: &mut Report, records: &[RunRecord]) {
    let solved = |f: Formulation| records.iter().filter(|r| r.formulation == f && r.is_optimal()).count();
    let k = solved(Formulation::Kuratowski);
    let counts: Vec<String> = Formulation::ALL.iter().map(|&f| format!("{f}={}", solved(f))).collect();
    let dominated = Formulation::ALL.iter().all(|&f| solved(f) <= k);
    report.line(
        4,
        if dominated { Verdict::Pass } else { Verdict::Warn },
        "kuratowski dominance at 5s",
        format!("solved {}", counts.join(" ")),
    );
}

fn criterion_5(report: &mut Report, plain: &[RunRecord], ablated: &[RunRecord]) {
    let mut changed = Vec::new();
    let mut compared = 0;
    let mut skipped = Vec::new();
    let mut nodes: BTreeMap<Formulation, (u64, u64)> = BTreeMap::new();
    for (a, b) in plain.iter().zip(ablated) {
        assert_eq!((&a.instance_name, a.formulation), (&b.instance_name, b.formulation));
        if !(a.is_optimal() && b.is_optimal()) {
            skipped.push(format!("{}/{}", a.instance_name, a.formulation));
            continue;
        }
        compared += 1;
        if a.objective != b.objective || a.objective != a.oracle_objective {
            changed.push(format!("{}/{} {:?} vs {:?}", a.instance_name, a.formulation, a.objective, b.objective));
        }
        let e = nodes.entry(a.formulation).or_default();
        e.0 += a.bnb_nodes;
        e.1 += b.bnb_nodes;
    }
    let logged: Vec<String> =
        nodes.iter().map(|(f, (a, b))| format!("{f} bnb_nodes {a} with symmetry breaking, {b} without")).collect();
    report.check(
        5,
        changed.is_empty() && errors(plain).is_empty() && errors(ablated).is_empty(),
        "ablation keeps optima",
        format!(
            "{compared} pairs compared, changed {changed:?}, not comparable {skipped:?}; {}",
            logged.join("; ")
        ),
    );
}

fn criterion_6(report: &mut Report, corpus: &[Instance]) {
    let mut bad = Vec::new();
    let mut checked = 0;
    for (name, g) in graphs(corpus) {
        for (label, g) in [("unit".to_string(), g.clone())]
            .into_iter()
            .chain((1..=3).map(|s| (format!("weights{s}"), reweighted(g, s))))
        {
            checked += 1;
            let sel = match cactus_heuristic(&g, None) {
                Ok(s) => s,
                Err(e) => {
                    bad.push(format!("{name}/{label}: {e}"));
                    continue;
                }
            };
            let weight: i64 = sel.selected().map(|e| g.weight(e)).sum();
            let planar = is_planar(&g, &sel);
            let maximal = planar && maximality_check(&g, &sel) == Ok(true);
            let tree = max_spanning_tree_weight(&g);
            if !planar || !maximal || weight < tree {
                bad.push(format!("{name}/{label}: planar {planar} maximal {maximal} weight {weight} tree {tree}"));
            }
        }
    }
    report.check(6, bad.is_empty(), "heuristic floor", format!("{checked} instances, failures {bad:?}"));
}

fn criterion_7(report: &mut Report, corpus: &[Instance]) {
    let mut bad = Vec::new();
    let mut checked = 0;
    let mut cores = 0;
    for (name, g) in graphs(corpus) {
        for (label, g) in [("unit", g.clone()), ("weighted", reweighted(g, 7))] {
            let whole = oracle_skewness_with_limit(&g, ORACLE_EDGES).unwrap().0;
            let red = reduce(&g);
            cores += red.cores.len();
            let parts: i64 =
                red.cores.iter().map(|c| oracle_skewness_with_limit(&c.graph, ORACLE_EDGES).unwrap().0).sum();
            checked += 1;
            if whole != parts {
                bad.push(format!("{name}/{label}: {whole} vs {parts}"));
            }
        }
    }
    report.check(
        7,
        bad.is_empty(),
        "preprocessing soundness",
        format!("{checked} instances, {cores} cores, mismatches {bad:?}"),
    );
}

#[derive(Default)]
struct Audit {
    calls: u64,
    added: u64,
    not_violated: u64,
}

/// Solves every core of every instance with every formulation while
/// auditing the separator, and checks the writers on each model.
fn audit_pass(corpus: &[Instance], limit: Duration) -> (Audit, u64, Vec<String>, u64, Vec<String>) {
    let audit = Rc::new(RefCell::new(Audit::default()));
    let mut final_checked = 0;
    let mut final_bad = Vec::new();
    let mut exports = 0;
    let mut export_bad = Vec::new();
    let cfg = FormulationConfig::default();
    for (name, g) in graphs(corpus) {
        for (ci, core) in reduce(g).cores.iter().enumerate() {
            for f in Formulation::ALL {
                let tag = format!("{name}/core{ci}/{f}");
                let mut model = build_model(&core.graph, f, &cfg).unwrap();
                let twin = build_model(&core.graph, f, &cfg).unwrap();
                if export_opb(model.pb()) != export_opb(twin.pb()) {
                    export_bad.push(format!("{tag}: OPB differs between builds"));
                }
                model.warm_start(&cactus_heuristic(&core.graph, None).unwrap());
                if let Some(mut inner) = model.pb_mut().take_separator() {
                    let audit = Rc::clone(&audit);
                    model.pb_mut().set_separator(Box::new(move |x: &[bool]| {
                        let cuts: Vec<LinearConstraint> = inner.separate(x);
                        let mut a = audit.borrow_mut();
                        a.calls += 1;
                        a.added += cuts.len() as u64;
                        a.not_violated += cuts.iter().filter(|c| c.is_satisfied(x)).count() as u64;
                        cuts
                    }));
                }
                let mut rule = model.branch_rule();
                match solve(model.pb_mut(), &mut rule, &Limits { time: Some(limit), ..Default::default() }) {
                    Ok(r) => {
                        if let Some(x) = &r.incumbent {
                            for c in model.pb().lazy_constraints() {
                                final_checked += 1;
                                if !c.is_satisfied(x) {
                                    final_bad.push(tag.clone());
                                }
                            }
                        } else if r.status == SolveStatus::Optimal {
                            final_bad.push(format!("{tag}: optimal without incumbent"));
                        }
                    }
                    Err(e) => final_bad.push(format!("{tag}: {e}")),
                }
                for pb in [twin.pb(), model.pb()] {
                    exports += 1;
                    match parse_lp(&export_lp(pb)) {
                        Ok(back) if back.structure() == pb.structure() => {}
                        Ok(_) => export_bad.push(format!("{tag}: LP round trip changed the model")),
                        Err(e) => export_bad.push(format!("{tag}: {e}")),
                    }
                    if export_opb(pb) != export_opb(pb) {
                        export_bad.push(format!("{tag}: OPB not deterministic"));
                    }
                }
            }
        }
    }
    let a = Rc::try_unwrap(audit).ok().expect("separators dropped").into_inner();
    (a, final_checked, final_bad, exports, export_bad)
}

fn criterion_9(report: &mut Report) {
    let mut bad = Vec::new();
    let k6 = WeightedGraph::complete(6);
    let mut checked = 0;
    for mask in 0u64..1 << 15 {
        let sel = EdgeSelection::from_mask(15, mask);
        checked += 1;
        if test_planarity(&k6, &sel).is_planar() == has_kuratowski_subdivision(&k6, &sel) {
            bad.push(format!("K6 mask {mask:#x}"));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for i in 0..200 {
        let n = rng.gen_range(3..=8);
        let kn = WeightedGraph::complete(n);
        let p: f64 = rng.gen_range(0.3..0.9);
        let sel = EdgeSelection::from_bits((0..kn.m()).map(|_| rng.gen_bool(p)).collect());
        checked += 1;
        if test_planarity(&kn, &sel).is_planar() == has_kuratowski_subdivision(&kn, &sel) {
            bad.push(format!("random graph {i} on {n} nodes"));
        }
    }
    report.check(
        9,
        bad.is_empty(),
        "planarity engine",
        format!("{checked} graphs (all 32768 on 6 labelled nodes, 200 random), mismatches {bad:?}"),
    );
}

fn main() {
    let _ = env_logger::builder().is_test(true).try_init();
    let start = Instant::now();
    let corpus = corpus();
    let mut report = Report { failed: 0 };
    let base = SuiteConfig { oracle_max_edges: ORACLE_EDGES, ..Default::default() };

    let t = Instant::now();
    let main_run = run_suite_on(&corpus, &base);
    let main_elapsed = t.elapsed();

    let mut short = base.clone();
    short.solve.limits.time = Some(Duration::from_secs(5));
    let short_run = run_suite_on(&corpus, &short);

    let small: Vec<Instance> =
        corpus.iter().filter(|i| i.graph.as_ref().is_ok_and(|g| g.n() <= 8)).cloned().collect();
    let ablation = SuiteConfig { formulations: vec![Formulation::Schnyder, Formulation::LeftRight], ..base.clone() };
    let mut ablated = ablation.clone();
    ablated.solve.formulations = ablation.solve.formulations.without_symmetry_breaking();
    let plain_run = run_suite_on(&small, &ablation);
    let ablated_run = run_suite_on(&small, &ablated);

    criterion_1(&mut report, &main_run, main_elapsed);
    criterion_2(&mut report, &main_run);
    criterion_3(&mut report, &main_run);
    criterion_4(&mut report, &short_run);
    criterion_5(&mut report, &plain_run, &ablated_run);
    criterion_6(&mut report, &corpus);
    criterion_7(&mut report, &corpus);

    let (audit, final_checked, final_bad, exports, export_bad) = audit_pass(&corpus, Duration::from_secs(10));
    let all_runs: Vec<&RunRecord> = main_run.iter().chain(&short_run).chain(&plain_run).chain(&ablated_run).collect();
    let run_errors: Vec<String> = all_runs
        .iter()
        .filter(|r| r.status == "error")
        .map(|r| format!("{}/{}: {}", r.instance_name, r.formulation, r.error))
        .collect();
    let suite_lazy: u64 = all_runs.iter().map(|r| r.lazy_constraints).sum();
    report.check(
        8,
        run_errors.is_empty() && audit.not_violated == 0 && final_bad.is_empty() && audit.added > 0,
        "separator soundness",
        format!(
            "{} suite runs adding {suite_lazy} lazy constraints without solver errors {run_errors:?}; audit: \
             {} separator calls, {} constraints, {} not violated by their trigger, {final_checked} checked \
             against the final incumbent, failures {final_bad:?}",
            all_runs.len(),
            audit.calls,
            audit.added,
            audit.not_violated
        ),
    );

    criterion_9(&mut report);

    let built: Vec<&&RunRecord> = all_runs.iter().filter(|r| r.export_verified.is_some()).collect();
    let record_bad: Vec<String> = built
        .iter()
        .filter(|r| r.export_verified != Some(true))
        .map(|r| format!("{}/{}", r.instance_name, r.formulation))
        .collect();
    report.check(
        10,
        record_bad.is_empty() && export_bad.is_empty() && !built.is_empty(),
        "export fidelity",
        format!(
            "{} suite runs with models, failures {record_bad:?}; {exports} audited models, failures {export_bad:?}",
            built.len()
        ),
    );

    println!("acceptance finished in {:.1}s, {} failed", start.elapsed().as_secs_f64(), report.failed);
    if report.failed > 0 {
        std::process::exit(1);
    }
}
