//! Experiment harness: configuration, corpus loading and generation, the
//! per-version pipeline, and the table-producing experiment runners.

pub mod config;
pub mod corpus;
pub mod pipeline;
pub mod rq;
pub mod stats;

pub use config::{default_refs, CorpusSpec, ExperimentConfig, SyntheticSpec, DEFAULT_NSP1F};
pub use corpus::{load_corpus, oracle_text, write_corpus, CorpusEntry};
pub use pipeline::{evaluate_entry, policy_seed};
pub use rq::{run_rq1, run_rq2, run_rq3, run_rq4, RqReport};
pub use stats::{summarize, MetricSummary};
