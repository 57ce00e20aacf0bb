//! Command line front end.
//!
//! Exit codes: 0 success, 1 unreadable input (arguments, graph or config
//! files), 2 solver or verification failure.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand};

use mps_core::bench::{
    gen_random_connected, gen_random_regular, ingest, run_suite, summary_table, write_csv, GraphFormat, SuiteConfig,
};
use mps_core::formulations::Formulation;
use mps_core::graph::WeightedGraph;
use mps_core::oracle::oracle_skewness_with_limit;
use mps_core::pbsolver::{export_lp, export_opb};
use mps_core::pipeline::{solve_mps_with, SolveConfig};

#[derive(Parser)]
#[command(name = "mps", version, about = "Exact maximum planar subgraph solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance and print the deleted edges.
    Solve {
        file: PathBuf,
        #[arg(long, short, default_value = "kuratowski")]
        formulation: Formulation,
        /// Input format; guessed from the extension by default.
        #[arg(long)]
        format: Option<GraphFormat>,
        /// Settings file in the bench format; its formulation list is ignored.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        time_limit: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        /// Write each core's model, with the lazy constraints found, as OPB.
        /// With several cores the core index is appended to the name.
        #[arg(long)]
        export_opb: Option<PathBuf>,
        /// Same as `--export-opb` in LP format.
        #[arg(long)]
        export_lp: Option<PathBuf>,
    },
    /// Run a corpus directory and write one CSV row per run.
    Bench {
        dir: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        jobs: Option<usize>,
        /// CSV destination; standard output by default.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact skewness by exhaustive search.
    Oracle {
        file: PathBuf,
        #[arg(long)]
        format: Option<GraphFormat>,
        #[arg(long, default_value_t = mps_core::oracle::DEFAULT_MAX_EDGES)]
        max_edges: usize,
    },
    /// Print a random regular graph, or a random connected graph with
    /// `--m` edges, as an edge list.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long, required_unless_present = "m")]
        d: Option<usize>,
        #[arg(long, conflicts_with = "d")]
        m: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

enum Failure {
    Input(String),
    Internal(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 1,
            Failure::Internal(_) => 2,
        }
    }
}

fn input(e: impl std::fmt::Display) -> Failure {
    Failure::Input(e.to_string())
}

fn internal(e: impl std::fmt::Display) -> Failure {
    Failure::Internal(e.to_string())
}

fn read_graph(file: &Path, format: Option<GraphFormat>) -> Result<WeightedGraph, Failure> {
    let format = format
        .or_else(|| GraphFormat::from_path(file))
        .ok_or_else(|| input(format!("{}: unknown extension, pass --format", file.display())))?;
    ingest(file, format).map_err(|e| input(format!("{}: {e}", file.display())))
}

fn load_config(path: Option<&Path>) -> Result<SuiteConfig, Failure> {
    match path {
        Some(p) => SuiteConfig::load(p).map_err(|e| input(format!("{}: {e}", p.display()))),
        None => Ok(SuiteConfig::default()),
    }
}

fn export_path(base: &Path, core: usize, cores: usize) -> PathBuf {
    if cores <= 1 {
        base.to_path_buf()
    } else {
        let mut s = base.as_os_str().to_owned();
        s.push(format!(".{core}"));
        PathBuf::from(s)
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let mut out = io::stdout().lock();
    match cli.command {
        Command::Solve { file, formulation, format, config, time_limit, seed, export_opb: opb, export_lp: lp } => {
            let g = read_graph(&file, format)?;
            let mut cfg = SolveConfig { formulation, ..load_config(config.as_deref())?.solve };
            if let Some(t) = time_limit {
                cfg.limits.time = Some(Duration::try_from_secs_f64(t).map_err(input)?);
            }
            cfg.seed = seed.or(cfg.seed);
            let mut models = Vec::new();
            let sol = solve_mps_with(&g, &cfg, |_, m| {
                if opb.is_some() || lp.is_some() {
                    models.push((export_opb(m.pb()), export_lp(m.pb())));
                }
            })
            .map_err(internal)?;
            if models.is_empty() && (opb.is_some() || lp.is_some()) {
                log::warn!("input is planar after preprocessing, no model to export");
            }
            for (i, (o, l)) in models.iter().enumerate() {
                for (base, text) in [(&opb, o), (&lp, l)] {
                    if let Some(base) = base {
                        let p = export_path(base, i, models.len());
                        fs::write(&p, text).map_err(|e| internal(format!("{}: {e}", p.display())))?;
                    }
                }
            }
            let res = (|| {
                writeln!(out, "status {}", sol.status.as_str())?;
                writeln!(out, "objective {}", sol.objective)?;
                writeln!(out, "dual_bound {}", sol.dual_bound)?;
                writeln!(out, "skewness {}", sol.skewness(&g))?;
                writeln!(out, "cores {}", sol.cores)?;
                for e in (0..g.m()).filter(|&e| !sol.selection.get(e)) {
                    let edge = g.edge(e);
                    writeln!(out, "deleted {} {} {}", edge.u, edge.v, edge.weight)?;
                }
                Ok::<_, io::Error>(())
            })();
            res.map_err(internal)
        }
        Command::Bench { dir, config, jobs, out: csv_path } => {
            let mut cfg = load_config(config.as_deref())?;
            if let Some(j) = jobs {
                cfg.jobs = j.max(1);
            }
            let records = run_suite(&dir, &cfg).map_err(|e| input(format!("{}: {e}", dir.display())))?;
            match csv_path {
                Some(p) => {
                    let f = fs::File::create(&p).map_err(|e| internal(format!("{}: {e}", p.display())))?;
                    write_csv(&records, f).map_err(internal)?;
                }
                None => write_csv(&records, &mut out).map_err(internal)?,
            }
            eprint!("{}", summary_table(&records));
            let bad = records.iter().filter(|r| r.status != "error" && !r.is_consistent()).count();
            if bad > 0 {
                return Err(internal(format!("{bad} runs failed verification")));
            }
            Ok(())
        }
        Command::Oracle { file, format, max_edges } => {
            let g = read_graph(&file, format)?;
            let (k, _) = oracle_skewness_with_limit(&g, max_edges).map_err(internal)?;
            writeln!(out, "skewness {k}\nmps_weight {}", g.total_weight() - k).map_err(internal)
        }
        Command::Gen { n, d, m, seed } => {
            let g = match (d, m) {
                (Some(d), _) => gen_random_regular(n, d, seed),
                (None, Some(m)) => gen_random_connected(n, m, seed),
                (None, None) => unreachable!("clap requires one of --d and --m"),
            }
            .map_err(input)?;
            let res = (|| {
                writeln!(out, "# n={n} seed={seed}")?;
                for e in g.edges() {
                    writeln!(out, "{} {}", e.u, e.v)?;
                }
                Ok::<_, io::Error>(())
            })();
            res.map_err(internal)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let (Failure::Input(msg) | Failure::Internal(msg)) = &f;
            eprintln!("mps: {msg}");
            ExitCode::from(f.code())
        }
    }
}
