//! Turning mutations into labelled faulty versions.
//!
//! A faulty version is the base program plus a set of single-statement
//! mutations. Its test verdicts are differential: a test fails when the
//! variant's outcome differs from the base outcome on the same input, where
//! an outcome is either the emitted value or a crash. Each failing test is
//! attributed to the one mutation that reproduces the failure alone; tests
//! that several mutations explain, or that only the combination explains,
//! have no single root cause and are dropped from the version's coverage
//! record so every remaining failure carries exactly one fault label.

use rand::Rng;

use crate::coverage::{CoverageRecord, Verdict};
use crate::error::{Error, Result};
use crate::eval::OracleLabels;
use crate::faultgen::mutate::{apply, apply_all, FaultType, Mutation};
use crate::faultgen::program::{run, Program};
use crate::rng::{mix2, stream};

/// A base program with injected faults, one mutation per faulty statement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaultyVersion {
    pub base: Program,
    pub mutated: Program,
    /// Fault `i` is `mutations[i]`; kept in ascending statement order by
    /// the synthesizer.
    pub mutations: Vec<Mutation>,
}

impl FaultyVersion {
    pub fn new(base: Program, mutations: Vec<Mutation>) -> Result<Self> {
        if mutations.is_empty() {
            return Err(Error::generation("a faulty version needs at least one mutation"));
        }
        let mutated = apply_all(&base, &mutations)?;
        Ok(FaultyVersion { base, mutated, mutations })
    }

    pub fn fault_type(&self) -> FaultType {
        FaultType::classify(&self.mutations).expect("versions carry at least one mutation")
    }
}

/// Coverage and fault labels of one faulty version over a test suite.
#[derive(Debug, Clone)]
pub struct LabeledVersion {
    pub coverage: CoverageRecord,
    /// Labels for the failed tests of `coverage`, in record order.
    pub oracle: OracleLabels,
    /// Failing tests dropped because two or more faults each explain them.
    pub dropped_multi_cause: usize,
    /// Failing tests dropped because no single fault explains them.
    pub dropped_interaction: usize,
}

impl LabeledVersion {
    /// A version is usable once at least one fault keeps a failing test.
    pub fn usable(&self) -> bool {
        self.oracle.r() >= 1
    }
}

/// Runs the version and its single-fault variants over `suite` and builds
/// the labelled coverage record described at the module level.
pub fn label_oracle(version: &FaultyVersion, suite: &[Vec<i64>]) -> Result<LabeledVersion> {
    if suite.is_empty() {
        return Err(Error::domain("test suite is empty"));
    }
    let singles = version
        .mutations
        .iter()
        .map(|m| apply(&version.base, m))
        .collect::<Result<Vec<Program>>>()?;

    let num_statements = version.base.num_statements();
    let mut kept_rows: Vec<Vec<bool>> = Vec::new();
    let mut verdicts: Vec<Verdict> = Vec::new();
    let mut labels: Vec<usize> = Vec::new();
    let mut dropped_multi_cause = 0;
    let mut dropped_interaction = 0;

    for input in suite {
        let base_run = run(&version.base, input);
        let full_run = run(&version.mutated, input);
        if full_run.output == base_run.output {
            kept_rows.push(full_run.covered);
            verdicts.push(Verdict::Pass);
            continue;
        }
        let culprits: Vec<usize> = singles
            .iter()
            .enumerate()
            .filter(|(_, single)| run(single, input).output != base_run.output)
            .map(|(i, _)| i)
            .collect();
        match culprits[..] {
            [fault] => {
                kept_rows.push(full_run.covered);
                verdicts.push(Verdict::Fail);
                labels.push(fault);
            }
            [] => dropped_interaction += 1,
            _ => dropped_multi_cause += 1,
        }
    }

    if kept_rows.is_empty() {
        return Err(Error::generation(
            "every test was dropped as multi-cause or interaction-only",
        ));
    }
    let num_tests = kept_rows.len();
    let mut covers = vec![false; num_statements * num_tests];
    for (t, row) in kept_rows.iter().enumerate() {
        for (s, &bit) in row.iter().enumerate() {
            covers[s * num_tests + t] = bit;
        }
    }
    Ok(LabeledVersion {
        coverage: CoverageRecord::new(num_statements, num_tests, covers, verdicts)?,
        oracle: OracleLabels::from_labels(labels),
        dropped_multi_cause,
        dropped_interaction,
    })
}

const SYNTHESIS_ATTEMPTS: usize = 500;

/// Draws an `r`-fault version whose every fault is observable: the labelled
/// oracle must come back with exactly `r` distinct single-cause faults.
/// Mutations land on `r` distinct statements, picked from `pool` by
/// rejection sampling; the returned mutations are sorted by statement, so
/// fault ids follow program order.
pub fn synthesize_version(
    base: &Program,
    pool: &[Mutation],
    r: usize,
    suite: &[Vec<i64>],
    seed: u64,
) -> Result<FaultyVersion> {
    if r == 0 {
        return Err(Error::generation("a faulty version needs at least one fault"));
    }
    let mut targets: Vec<usize> = pool.iter().map(|m| m.statement).collect();
    targets.sort_unstable();
    targets.dedup();
    if targets.len() < r {
        return Err(Error::generation(format!(
            "mutation pool spans {} statements, cannot place {} faults",
            targets.len(),
            r
        )));
    }

    let mut rng = stream(mix2(seed, r as u64));
    for _ in 0..SYNTHESIS_ATTEMPTS {
        let mut picked = targets.clone();
        for i in 0..r {
            let j = rng.gen_range(i..picked.len());
            picked.swap(i, j);
        }
        picked.truncate(r);
        picked.sort_unstable();
        let mutations: Vec<Mutation> = picked
            .iter()
            .map(|&statement| {
                let options: Vec<&Mutation> =
                    pool.iter().filter(|m| m.statement == statement).collect();
                options[rng.gen_range(0..options.len())].clone()
            })
            .collect();
        let Ok(candidate) = FaultyVersion::new(base.clone(), mutations) else {
            continue;
        };
        match label_oracle(&candidate, suite) {
            Ok(labeled) if labeled.oracle.r() == r => return Ok(candidate),
            _ => continue,
        }
    }
    Err(Error::generation(format!(
        "no viable {r}-fault version within {SYNTHESIS_ATTEMPTS} attempts"
    )))
}
