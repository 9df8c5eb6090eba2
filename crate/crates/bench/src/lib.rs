//! Fixture builders shared by the criterion benchmarks.

use fclust::faultgen::sample_synthetic_spectrum;
use fclust::harness::CorpusEntry;
use fclust::{represent, FailureProxy, Nsp1fPolicy, RefId};

/// One synthetic version with `nof` planted faults.
pub fn synthetic_entry(
    nof: usize,
    failed_per_fault: usize,
    passed: usize,
    statements: usize,
    seed: u64,
) -> CorpusEntry {
    let (coverage, oracle) =
        sample_synthetic_spectrum(nof, failed_per_fault, passed, statements, 0.02, seed)
            .expect("benchmark fixture generates");
    CorpusEntry {
        id: format!("bench-nof{nof}"),
        coverage,
        oracle,
        fault_type: None,
        nof,
    }
}

/// Full-sampling ranking proxies for every failing test of `entry`.
pub fn proxies_of(entry: &CorpusEntry, ref_id: RefId) -> Vec<FailureProxy> {
    let policy = Nsp1fPolicy::from_percent(100, 1).expect("valid policy");
    entry
        .coverage
        .failed_ids()
        .into_iter()
        .map(|t| represent(&entry.coverage, t, &policy, ref_id).expect("proxy builds"))
        .collect()
}
