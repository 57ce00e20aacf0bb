//! Instance files, random instances and the benchmark suite.

mod config;
mod gen;
mod ingest;
mod suite;

pub use config::{ConfigError, SuiteConfig};
pub use gen::{gen_random_connected, gen_random_regular, GenError};
pub use ingest::{ingest, parse_dimacs, parse_edgelist, parse_gml, parse_graph, GraphFormat, IngestError};
pub use suite::{
    load_corpus, run_suite, run_suite_on, summary_table, write_csv, Instance, RunRecord, CSV_HEADER,
};
