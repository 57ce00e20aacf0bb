//! Runs every formulation on every instance of a corpus and verifies the
//! results against planarity, the oracle and the model writers.

use std::io::Write;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use super::config::SuiteConfig;
use super::ingest::{ingest, GraphFormat};
use crate::formulations::{Formulation, MpsModel};
use crate::graph::WeightedGraph;
use crate::oracle::oracle_skewness_with_limit;
use crate::pbsolver::{export_lp, export_opb, parse_lp};
use crate::pipeline::{solve_mps_with, SolveConfig};
use crate::planarity::is_planar;

/// A named graph, or the reason it could not be read.
#[derive(Debug, Clone)]
pub struct Instance {
    pub name: String,
    pub graph: Result<WeightedGraph, String>,
}

impl Instance {
    pub fn new(name: impl Into<String>, graph: WeightedGraph) -> Self {
        Instance { name: name.into(), graph: Ok(graph) }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub instance_name: String,
    pub formulation: Formulation,
    pub n: usize,
    pub m: usize,
    pub cores: usize,
    /// A solver status, or `error`.
    pub status: String,
    pub objective: Option<i64>,
    pub dual_bound: Option<i64>,
    /// Total weight minus the heuristic's weight.
    pub skewness_upper_bound: Option<i64>,
    pub wall_time_ms: Option<u64>,
    pub bnb_nodes: u64,
    pub lazy_constraints: u64,
    pub seed: Option<u64>,
    pub oracle_objective: Option<i64>,
    pub planar_verified: Option<bool>,
    /// `None` when no model was built.
    pub export_verified: Option<bool>,
    pub error: String,
}

impl RunRecord {
    fn blank(name: &str, f: Formulation, seed: Option<u64>) -> Self {
        RunRecord {
            instance_name: name.to_string(),
            formulation: f,
            n: 0,
            m: 0,
            cores: 0,
            status: "error".into(),
            objective: None,
            dual_bound: None,
            skewness_upper_bound: None,
            wall_time_ms: None,
            bnb_nodes: 0,
            lazy_constraints: 0,
            seed,
            oracle_objective: None,
            planar_verified: None,
            export_verified: None,
            error: String::new(),
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == "optimal"
    }

    /// Objective within the dual bound, a planar result, matching exports,
    /// and the oracle value wherever an optimal run has one to compare to.
    pub fn is_consistent(&self) -> bool {
        if self.status == "error" {
            return false;
        }
        let bounded = matches!((self.objective, self.dual_bound), (Some(o), Some(d)) if o <= d);
        let oracle_ok = !self.is_optimal() || self.oracle_objective.is_none_or(|o| Some(o) == self.objective);
        bounded && oracle_ok && self.planar_verified == Some(true) && self.export_verified != Some(false)
    }
}

pub const CSV_HEADER: [&str; 18] = [
    "instance_name",
    "formulation",
    "n",
    "m",
    "cores",
    "status",
    "objective",
    "dual_bound",
    "skewness_upper_bound",
    "wall_time_ms",
    "bnb_nodes",
    "lazy_constraints",
    "seed",
    "oracle_objective",
    "planar_verified",
    "export_verified",
    "error",
    "consistent",
];

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map_or_else(String::new, |x| x.to_string())
}

pub fn write_csv(records: &[RunRecord], out: impl Write) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.write_record([
            r.instance_name.clone(),
            r.formulation.as_str().to_string(),
            r.n.to_string(),
            r.m.to_string(),
            r.cores.to_string(),
            r.status.clone(),
            opt(&r.objective),
            opt(&r.dual_bound),
            opt(&r.skewness_upper_bound),
            opt(&r.wall_time_ms),
            r.bnb_nodes.to_string(),
            r.lazy_constraints.to_string(),
            opt(&r.seed),
            opt(&r.oracle_objective),
            opt(&r.planar_verified),
            opt(&r.export_verified),
            r.error.clone(),
            r.is_consistent().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Instances of a directory in file name order; files with unknown
/// extensions are skipped.
pub fn load_corpus(dir: &Path) -> std::io::Result<Vec<Instance>> {
    let mut paths: Vec<_> = std::fs::read_dir(dir)?
        .map(|e| e.map(|e| e.path()))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .filter_map(|p| GraphFormat::from_path(&p).map(|f| (p, f)))
        .collect();
    paths.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(paths
        .into_iter()
        .map(|(p, f)| {
            let name = p.file_name().map_or_else(String::new, |s| s.to_string_lossy().into_owned());
            Instance { name, graph: ingest(&p, f).map_err(|e| e.to_string()) }
        })
        .collect())
}

pub fn run_suite(dir: &Path, cfg: &SuiteConfig) -> std::io::Result<Vec<RunRecord>> {
    Ok(run_suite_on(&load_corpus(dir)?, cfg))
}

/// Records in instance order, then in the configured formulation order,
/// regardless of `jobs`.
pub fn run_suite_on(instances: &[Instance], cfg: &SuiteConfig) -> Vec<RunRecord> {
    let jobs = cfg.jobs.clamp(1, instances.len().max(1));
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<Vec<RunRecord>>>> = Mutex::new(vec![None; instances.len()]);
    std::thread::scope(|s| {
        for _ in 0..jobs {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(inst) = instances.get(i) else { break };
                let recs = run_instance(inst, cfg);
                slots.lock().expect("no worker panics while holding the lock")[i] = Some(recs);
            });
        }
    });
    slots.into_inner().expect("workers joined").into_iter().flatten().flatten().collect()
}

fn run_instance(inst: &Instance, cfg: &SuiteConfig) -> Vec<RunRecord> {
    let g = match &inst.graph {
        Ok(g) => g,
        Err(e) => {
            return cfg
                .formulations
                .iter()
                .map(|&f| RunRecord { error: e.clone(), ..RunRecord::blank(&inst.name, f, cfg.solve.seed) })
                .collect()
        }
    };
    let oracle = oracle_skewness_with_limit(g, cfg.oracle_max_edges).ok().map(|(k, _)| g.total_weight() - k);
    cfg.formulations
        .iter()
        .map(|&f| {
            let mut r = run_one(&inst.name, g, f, cfg);
            r.oracle_objective = oracle;
            log::info!("{} {}: {} {:?}", inst.name, f, r.status, r.objective);
            r
        })
        .collect()
}

fn run_one(name: &str, g: &WeightedGraph, f: Formulation, cfg: &SuiteConfig) -> RunRecord {
    let mut r = RunRecord { n: g.n(), m: g.m(), ..RunRecord::blank(name, f, cfg.solve.seed) };
    let solve_cfg = SolveConfig { formulation: f, ..cfg.solve.clone() };
    let mut export_ok: Option<bool> = None;
    let check = |_: usize, model: &dyn MpsModel| {
        if !cfg.check_exports {
            return;
        }
        let pb = model.pb();
        let ok = parse_lp(&export_lp(pb)).is_ok_and(|back| back.structure() == pb.structure())
            && export_opb(pb) == export_opb(pb);
        export_ok = Some(export_ok.unwrap_or(true) && ok);
    };
    match solve_mps_with(g, &solve_cfg, check) {
        Ok(sol) => {
            r.cores = sol.cores;
            r.status = sol.status.as_str().to_string();
            r.objective = Some(sol.objective);
            r.dual_bound = Some(sol.dual_bound);
            r.skewness_upper_bound = Some(g.total_weight() - sol.heuristic_weight);
            r.wall_time_ms = cfg.report_wall_time.then_some(sol.stats.wall_time.as_millis() as u64);
            r.bnb_nodes = sol.stats.bnb_nodes;
            r.lazy_constraints = sol.stats.lazy_constraints_added;
            r.planar_verified = Some(is_planar(g, &sol.selection));
            r.export_verified = export_ok;
        }
        Err(e) => {
            r.error = e.to_string();
            r.export_verified = export_ok;
        }
    }
    r
}

/// Per formulation: runs, optimal runs and their share, errors, and the
/// mean time of the optimal runs.
pub fn summary_table(records: &[RunRecord]) -> String {
    let mut out = format!(
        "{:<12} {:>6} {:>8} {:>8} {:>7} {:>12}\n",
        "formulation", "runs", "optimal", "solved%", "errors", "mean_ms"
    );
    for f in Formulation::ALL {
        let rs: Vec<&RunRecord> = records.iter().filter(|r| r.formulation == f).collect();
        if rs.is_empty() {
            continue;
        }
        let solved: Vec<&&RunRecord> = rs.iter().filter(|r| r.is_optimal()).collect();
        let errors = rs.iter().filter(|r| r.status == "error").count();
        let times: Vec<u64> = solved.iter().filter_map(|r| r.wall_time_ms).collect();
        let mean = if times.is_empty() {
            "-".to_string()
        } else {
            format!("{:.1}", times.iter().sum::<u64>() as f64 / times.len() as f64)
        };
        out += &format!(
            "{:<12} {:>6} {:>8} {:>8.1} {:>7} {:>12}\n",
            f.as_str(),
            rs.len(),
            solved.len(),
            100.0 * solved.len() as f64 / rs.len() as f64,
            errors,
            mean
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use std::time::Duration;

    use super::*;
    use crate::pbsolver::Limits;

    fn csv_of(records: &[RunRecord]) -> String {
        let mut buf = Vec::new();
        write_csv(records, &mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn named_corpus() {
        let corpus = vec![
            Instance::new("k5", WeightedGraph::complete(5)),
            Instance::new("k33", WeightedGraph::complete_bipartite(3, 3)),
            Instance::new("k6", WeightedGraph::complete(6)),
        ];
        let recs = run_suite_on(&corpus, &SuiteConfig { jobs: 2, ..Default::default() });
        assert_eq!(recs.len(), 12);
        for (r, want) in recs.iter().zip([9, 8, 12].iter().flat_map(|&w| [w; 4])) {
            assert!(r.is_optimal() && r.is_consistent(), "{r:?}");
            assert_eq!((r.objective, r.oracle_objective), (Some(want), Some(want)));
            assert_eq!(r.export_verified, Some(true));
        }
        let names: Vec<&str> = recs.iter().map(|r| r.instance_name.as_str()).collect();
        assert_eq!(&names[..5], ["k5", "k5", "k5", "k5", "k33"]);
        let table = summary_table(&recs);
        assert!(table.lines().nth(1).unwrap().starts_with("kuratowski"));
    }

    #[test]
    fn empty_corpus_writes_the_header() {
        let recs = run_suite_on(&[], &SuiteConfig::default());
        assert_eq!(csv_of(&recs), CSV_HEADER.join(",") + "\n");
    }

    #[test]
    fn csv_is_deterministic_without_wall_times() {
        let corpus = vec![Instance::new("petersen", WeightedGraph::petersen())];
        let cfg = SuiteConfig { report_wall_time: false, ..Default::default() };
        let a = csv_of(&run_suite_on(&corpus, &cfg));
        let b = csv_of(&run_suite_on(&corpus, &SuiteConfig { jobs: 3, ..cfg }));
        assert_eq!(a, b);
    }

    #[test]
    fn tiny_time_limit_keeps_the_heuristic() {
        let mut cfg = SuiteConfig::default();
        cfg.solve.limits = Limits { time: Some(Duration::from_millis(1)), ..cfg.solve.limits };
        let recs = run_suite_on(&[Instance::new("petersen", WeightedGraph::petersen())], &cfg);
        for r in &recs {
            assert!(r.status == "time_limit" || r.is_optimal(), "{r:?}");
            assert!(r.objective.unwrap() >= 15 - r.skewness_upper_bound.unwrap());
            assert!(r.is_consistent());
        }
    }

    #[test]
    fn unreadable_instances_are_recorded() {
        let corpus = vec![Instance { name: "bad.gml".into(), graph: Err("line 3: oops".into()) }];
        let recs = run_suite_on(&corpus, &SuiteConfig::default());
        assert_eq!(recs.len(), 4);
        assert!(recs.iter().all(|r| r.status == "error" && !r.is_consistent()));
    }
}
