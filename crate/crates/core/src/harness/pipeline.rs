//! The per-version pipeline: represent every failure, measure pairwise
//! ranking distances, estimate the cluster count, and score the clustering
//! against the oracle when the estimate allows a fault-to-cluster matching.

use crate::cluster::{estimate_clusters, kmedoids, MountainParams};
use crate::distance::distance_matrix;
use crate::error::{Error, Result};
use crate::eval::{categorize, evaluate_version, EvalReport};
use crate::harness::corpus::CorpusEntry;
use crate::refs::RefId;
use crate::rng::mix3;
use crate::srr::{represent, Nsp1fPolicy};

/// Seed for one version's passed-test sampling. Salted so the stream never
/// coincides with the corpus generator's, which also mixes two indices into
/// the experiment seed.
pub fn policy_seed(experiment_seed: u64, version_index: usize, pct: u32) -> u64 {
    mix3(experiment_seed, 0x7361_6d70 ^ version_index as u64, pct as u64)
}

/// Runs one version through the pipeline with one formula at one sampling
/// percentage. Versions whose estimated cluster count misses the fault
/// count are categorized without metrics; the clustering step is skipped
/// for them because no fault-to-cluster bijection exists.
pub fn evaluate_entry(
    entry: &CorpusEntry,
    ref_id: RefId,
    pct: u32,
    seed: u64,
    mountain: &MountainParams,
) -> Result<EvalReport> {
    let failed = entry.coverage.failed_ids();
    let r = entry.oracle.r();
    if failed.is_empty() || r == 0 {
        return Err(Error::domain(format!(
            "version {} has no labelled failing tests",
            entry.id
        )));
    }
    let policy = Nsp1fPolicy::from_percent(pct, seed)?;
    let proxies = failed
        .into_iter()
        .map(|t| represent(&entry.coverage, t, &policy, ref_id))
        .collect::<Result<Vec<_>>>()?;
    let d = distance_matrix(&proxies)?;
    let estimate = estimate_clusters(&d, mountain)?;
    if estimate.k != r {
        return Ok(EvalReport {
            k: estimate.k,
            r,
            category: categorize(estimate.k, r),
            metrics: None,
        });
    }
    let clustering = kmedoids(&d, &estimate)?;
    evaluate_version(&clustering, &entry.oracle)
}
