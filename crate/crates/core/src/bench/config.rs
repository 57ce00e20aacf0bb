//! Flat `key = value` suite configuration.
//!
//! Blank lines and `#` comments are ignored; unknown keys are errors.
//! Formulation options use a `formulation.option` prefix, for example
//! `schnyder.transitivity = lazy`. Limits accept `none`.

use std::path::Path;
use std::time::Duration;

use thiserror::Error;

use crate::formulations::{Formulation, FormulationConfig, Transitivity};
use crate::pipeline::SolveConfig;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    /// Formulations run on every instance, in this order.
    pub formulations: Vec<Formulation>,
    /// Everything but the formulation, which comes from `formulations`.
    pub solve: SolveConfig,
    /// The oracle runs on instances with at most this many edges.
    pub oracle_max_edges: usize,
    pub jobs: usize,
    /// Without wall times the CSV is byte-identical across runs that finish
    /// within their limits.
    pub report_wall_time: bool,
    /// Round-trip every built model through the LP and OPB writers.
    pub check_exports: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            formulations: Formulation::ALL.to_vec(),
            solve: SolveConfig::default(),
            oracle_max_edges: 24,
            jobs: 1,
            report_wall_time: true,
            check_exports: true,
        }
    }
}

fn parse_bool(v: &str) -> Result<bool, String> {
    match v {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(format!("expected a boolean, got {v:?}")),
    }
}

fn parse_num<T: std::str::FromStr>(v: &str) -> Result<T, String> {
    v.parse().map_err(|_| format!("expected a number, got {v:?}"))
}

fn parse_opt<T>(v: &str, f: impl Fn(&str) -> Result<T, String>) -> Result<Option<T>, String> {
    if v == "none" {
        Ok(None)
    } else {
        f(v).map(Some)
    }
}

fn show_opt<T: ToString>(v: Option<T>) -> String {
    v.map_or_else(|| "none".to_string(), |x| x.to_string())
}

impl SuiteConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = SuiteConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| ConfigError::Parse { line: i + 1, message };
            let (key, value) = line.split_once('=').ok_or_else(|| err("expected key = value".into()))?;
            cfg.set(key.trim(), value.trim()).map_err(err)?;
        }
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, v: &str) -> Result<(), String> {
        let f: &mut FormulationConfig = &mut self.solve.formulations;
        match key {
            "formulations" => {
                let list = v
                    .split(',')
                    .map(|s| s.trim())
                    .filter(|s| !s.is_empty())
                    .map(|s| s.parse::<Formulation>().map_err(|e| e.to_string()))
                    .collect::<Result<Vec<_>, _>>()?;
                self.formulations = list;
            }
            "time_limit_s" => {
                self.solve.limits.time = parse_opt(v, |s| {
                    let secs: f64 = parse_num(s)?;
                    Duration::try_from_secs_f64(secs).map_err(|e| e.to_string())
                })?
            }
            "memory_mb" => self.solve.limits.memory_bytes = parse_opt(v, parse_num::<usize>)?.map(|mb| mb << 20),
            "node_limit" => self.solve.limits.nodes = parse_opt(v, parse_num)?,
            "seed" => self.solve.seed = parse_opt(v, parse_num)?,
            "warm_start" => self.solve.warm_start = parse_bool(v)?,
            "oracle_max_edges" => self.oracle_max_edges = parse_num(v)?,
            "jobs" => self.jobs = parse_num::<usize>(v)?.max(1),
            "report_wall_time" => self.report_wall_time = parse_bool(v)?,
            "check_exports" => self.check_exports = parse_bool(v)?,
            "kuratowski.max_constraints_per_round" => f.kuratowski.max_constraints_per_round = parse_num(v)?,
            "kuratowski.max_extractions_per_round" => f.kuratowski.max_extractions_per_round = parse_num(v)?,
            "kuratowski.keep_most_violated" => f.kuratowski.keep_most_violated = parse_bool(v)?,
            "kuratowski.rounding_thresholds" => {
                let t: Vec<f64> = v.split(',').map(|s| parse_num(s.trim())).collect::<Result<_, _>>()?;
                f.kuratowski.rounding_thresholds = t.try_into().map_err(|_| "expected two thresholds".to_string())?;
            }
            "facialwalks.force_first_three_faces" => f.facialwalks.force_first_three_faces = parse_bool(v)?,
            "facialwalks.symmetry_faces_descending" => f.facialwalks.symmetry_faces_descending = parse_bool(v)?,
            "facialwalks.order_faces_by_first_arc" => f.facialwalks.order_faces_by_first_arc = parse_bool(v)?,
            "facialwalks.degree3_specialization" => f.facialwalks.degree3_specialization = parse_bool(v)?,
            "schnyder.intersection_constraints" => f.schnyder.intersection_constraints = parse_bool(v)?,
            "schnyder.symmetry_breaking" => f.schnyder.symmetry_breaking = parse_bool(v)?,
            "schnyder.transitivity" => {
                f.schnyder.transitivity = match v {
                    "explicit" => Transitivity::Explicit,
                    "lazy" => Transitivity::Lazy,
                    _ => return Err(format!("expected explicit or lazy, got {v:?}")),
                }
            }
            "leftright.symmetry_blue" => f.leftright.symmetry_blue = parse_bool(v)?,
            "leftright.unique_tree" => f.leftright.unique_tree = parse_bool(v)?,
            "leftright.dfs_branching" => f.leftright.dfs_branching = parse_bool(v)?,
            "leftright.max_coloring_constraints_per_round" => {
                f.leftright.max_coloring_constraints_per_round = parse_num(v)?
            }
            _ => return Err(format!("unknown key {key:?}")),
        }
        Ok(())
    }

    /// Every key with its current value, in a form `parse` reads back.
    pub fn render(&self) -> String {
        let f = &self.solve.formulations;
        let l = &self.solve.limits;
        let names: Vec<&str> = self.formulations.iter().map(|x| x.as_str()).collect();
        let entries: Vec<(&str, String)> = vec![
            ("formulations", names.join(",")),
            ("time_limit_s", show_opt(l.time.map(|t| t.as_secs_f64()))),
            ("memory_mb", show_opt(l.memory_bytes.map(|b| b >> 20))),
            ("node_limit", show_opt(l.nodes)),
            ("seed", show_opt(self.solve.seed)),
            ("warm_start", self.solve.warm_start.to_string()),
            ("oracle_max_edges", self.oracle_max_edges.to_string()),
            ("jobs", self.jobs.to_string()),
            ("report_wall_time", self.report_wall_time.to_string()),
            ("check_exports", self.check_exports.to_string()),
            ("kuratowski.max_constraints_per_round", f.kuratowski.max_constraints_per_round.to_string()),
            ("kuratowski.max_extractions_per_round", f.kuratowski.max_extractions_per_round.to_string()),
            ("kuratowski.keep_most_violated", f.kuratowski.keep_most_violated.to_string()),
            (
                "kuratowski.rounding_thresholds",
                format!("{},{}", f.kuratowski.rounding_thresholds[0], f.kuratowski.rounding_thresholds[1]),
            ),
            ("facialwalks.force_first_three_faces", f.facialwalks.force_first_three_faces.to_string()),
            ("facialwalks.symmetry_faces_descending", f.facialwalks.symmetry_faces_descending.to_string()),
            ("facialwalks.order_faces_by_first_arc", f.facialwalks.order_faces_by_first_arc.to_string()),
            ("facialwalks.degree3_specialization", f.facialwalks.degree3_specialization.to_string()),
            ("schnyder.intersection_constraints", f.schnyder.intersection_constraints.to_string()),
            ("schnyder.symmetry_breaking", f.schnyder.symmetry_breaking.to_string()),
            (
                "schnyder.transitivity",
                match f.schnyder.transitivity {
                    Transitivity::Explicit => "explicit".into(),
                    Transitivity::Lazy => "lazy".into(),
                },
            ),
            ("leftright.symmetry_blue", f.leftright.symmetry_blue.to_string()),
            ("leftright.unique_tree", f.leftright.unique_tree.to_string()),
            ("leftright.dfs_branching", f.leftright.dfs_branching.to_string()),
            (
                "leftright.max_coloring_constraints_per_round",
                f.leftright.max_coloring_constraints_per_round.to_string(),
            ),
        ];
        entries.into_iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }
}
