//! Failure clustering for parallel debugging.
//!
//! When a test suite reports many failures at once, they rarely share a
//! single cause. This crate groups the failing tests by root cause so each
//! group can be handed to a different developer:
//!
//! 1. Each failing test is represented as a statement ranking produced by a
//!    risk evaluation formula over its own coverage spectrum, optionally
//!    against a sampled subset of the passing tests ([`represent`]).
//! 2. Rankings are compared with a rank-weighted disagreement distance
//!    ([`revised_kendall`]), giving a failure-by-failure distance matrix.
//! 3. The number of clusters is estimated by iterative peak removal on a
//!    density landscape over that matrix ([`estimate_clusters`]), and the
//!    failures are then partitioned around medoids ([`kmedoids`]).
//! 4. A clustering is scored against known fault labels with pairwise and
//!    per-fault agreement metrics ([`evaluate_version`]).
//!
//! The [`faultgen`] module grows seeded multi-fault test subjects (mutated
//! micro-programs and synthetic spectra) for experiments, and [`harness`]
//! runs whole corpora through the pipeline and writes result tables.

pub mod cluster;
pub mod coverage;
pub mod distance;
mod error;
pub mod eval;
pub mod faultgen;
pub mod harness;
pub mod refs;
pub(crate) mod rng;
pub mod srr;
#[cfg(test)]
pub(crate) mod testdata;

pub use cluster::{estimate_clusters, kmedoids, ClusterEstimate, Clustering, MountainParams};
pub use coverage::{compute_spectrum, CoverageRecord, Spectrum, SuiteSelection, Verdict};
pub use distance::{distance_matrix, revised_kendall, DistanceMatrix};
pub use error::{Error, Result};
pub use eval::{evaluate_version, Category, EvalReport, OracleLabels};
pub use refs::{
    group_of, parse_selector, rank, suspiciousness, RankingList, RefGroup, RefId,
    SuspiciousnessVector, GROUPS, TIE_TOLERANCE,
};
pub use srr::{represent, sample_passed, FailureProxy, Nsp1fPolicy};
