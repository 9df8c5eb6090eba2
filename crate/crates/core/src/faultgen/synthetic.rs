//! Sampling labelled coverage records without a program.
//!
//! Each fault owns a private statement plus a random half of the shared
//! statements, drawn once; its failing tests all execute exactly that path.
//! Passing tests execute random halves of the shared statements and never
//! touch a fault statement. Optional noise then flips every coverage bit
//! independently, blurring the otherwise zero-diameter failure blobs.

use rand::Rng;

use crate::coverage::{CoverageRecord, Verdict};
use crate::error::{Error, Result};
use crate::eval::OracleLabels;
use crate::rng::stream;

/// Draws one synthetic faulty version. The record lists the failing tests
/// first, grouped by fault, then the passing tests; the labels follow that
/// order. All randomness comes from `seed` through one generator with a
/// fixed draw order (fault paths, then passing rows, then noise flips), so
/// equal arguments give bit-equal records.
pub fn sample_synthetic_spectrum(
    n_faults: usize,
    n_failed_per_fault: usize,
    n_passed: usize,
    n_statements: usize,
    noise: f64,
    seed: u64,
) -> Result<(CoverageRecord, OracleLabels)> {
    if n_faults == 0 {
        return Err(Error::generation("need at least one fault"));
    }
    if n_failed_per_fault == 0 {
        return Err(Error::generation("need at least one failing test per fault"));
    }
    // The ranking representation pairs every failure with successful tests,
    // so a record without any is unusable downstream.
    if n_passed == 0 {
        return Err(Error::generation("need at least one passing test"));
    }
    if n_statements < n_faults {
        return Err(Error::generation(format!(
            "{n_statements} statements cannot host {n_faults} fault statements"
        )));
    }
    if !(0.0..1.0).contains(&noise) {
        return Err(Error::generation(format!(
            "noise must lie in [0, 1), got {noise}"
        )));
    }

    let n_failed = n_faults * n_failed_per_fault;
    let num_tests = n_failed + n_passed;
    let mut rng = stream(seed);

    let paths: Vec<Vec<bool>> = (0..n_faults)
        .map(|fault| {
            (0..n_statements)
                .map(|s| s == fault || (s >= n_faults && rng.gen_bool(0.5)))
                .collect()
        })
        .collect();

    let mut covers = vec![false; n_statements * num_tests];
    let set = |covers: &mut Vec<bool>, s: usize, t: usize, bit: bool| {
        covers[s * num_tests + t] = bit;
    };
    for (fault, path) in paths.iter().enumerate() {
        for copy in 0..n_failed_per_fault {
            let t = fault * n_failed_per_fault + copy;
            for (s, &bit) in path.iter().enumerate() {
                set(&mut covers, s, t, bit);
            }
        }
    }
    for p in 0..n_passed {
        let t = n_failed + p;
        for s in n_faults..n_statements {
            set(&mut covers, s, t, rng.gen_bool(0.5));
        }
    }
    if noise > 0.0 {
        for t in 0..num_tests {
            for s in 0..n_statements {
                if rng.gen_bool(noise) {
                    covers[s * num_tests + t] = !covers[s * num_tests + t];
                }
            }
        }
    }

    let verdicts: Vec<Verdict> = (0..num_tests)
        .map(|t| if t < n_failed { Verdict::Fail } else { Verdict::Pass })
        .collect();
    let labels: Vec<usize> = (0..n_failed).map(|t| t / n_failed_per_fault).collect();
    Ok((
        CoverageRecord::new(n_statements, num_tests, covers, verdicts)?,
        OracleLabels::from_labels(labels),
    ))
}
