//! Ranking-list representation of individual failures.
//!
//! Each failed test is represented on its own: the test is paired with a
//! sampled subset of the successful tests, the resulting single-failure
//! spectrum is scored with one formula, and the scores are collapsed to a
//! ranking list. Distances between these per-failure rankings are what the
//! clustering stage works on.

use crate::coverage::{compute_spectrum, CoverageRecord, SuiteSelection, Verdict};
use crate::error::{Error, Result};
use crate::refs::{rank, suspiciousness, RankingList, RefId};
use crate::rng;
use rand::Rng;

/// How many successful tests each failure is paired with.
///
/// The fraction is kept as an exact rational (a percentage fits as `pct/100`)
/// so the sample size `ceil(fraction * |passed|)` never suffers float
/// round-off. The seed drives a per-failure stream: the draw for one failed
/// test is independent of every other.
#[derive(Debug, Clone, Copy)]
pub struct Nsp1fPolicy {
    num: u32,
    den: u32,
    seed: u64,
}

impl Nsp1fPolicy {
    pub fn new(num: u32, den: u32, seed: u64) -> Result<Self> {
        if den == 0 || num == 0 || num > den {
            return Err(Error::domain(format!(
                "sampling fraction {num}/{den} is outside (0, 1]"
            )));
        }
        Ok(Nsp1fPolicy { num, den, seed })
    }

    pub fn from_percent(pct: u32, seed: u64) -> Result<Self> {
        Nsp1fPolicy::new(pct, 100, seed)
    }

    pub fn fraction(&self) -> f64 {
        f64::from(self.num) / f64::from(self.den)
    }

    pub fn percent(&self) -> f64 {
        self.fraction() * 100.0
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn is_full(&self) -> bool {
        self.num == self.den
    }

    /// `ceil(fraction * len)` in exact integer arithmetic.
    pub fn sample_size(&self, len: usize) -> usize {
        let num = u64::from(self.num);
        let den = u64::from(self.den);
        (num * len as u64).div_ceil(den) as usize
    }
}

/// Draws the successful-test subset for one failed test.
///
/// Sampling is uniform without replacement; the chosen ids keep their input
/// order. A full fraction returns the input unchanged without touching the
/// random stream.
pub fn sample_passed(
    all_passed: &[usize],
    policy: &Nsp1fPolicy,
    failed_test_id: usize,
) -> Result<Vec<usize>> {
    if all_passed.is_empty() {
        return Err(Error::domain("cannot sample from an empty passed set"));
    }
    if policy.is_full() {
        return Ok(all_passed.to_vec());
    }
    let m = policy.sample_size(all_passed.len());
    let mut positions: Vec<usize> = (0..all_passed.len()).collect();
    let mut rng = rng::stream(rng::mix2(policy.seed, failed_test_id as u64));
    for i in 0..m {
        let j = rng.gen_range(i..positions.len());
        positions.swap(i, j);
    }
    let mut chosen = positions[..m].to_vec();
    chosen.sort_unstable();
    Ok(chosen.into_iter().map(|p| all_passed[p]).collect())
}

/// One failed test, represented as a ranking list.
#[derive(Debug, Clone)]
pub struct FailureProxy {
    pub failed_test_id: usize,
    pub ref_id: RefId,
    pub sampled_passed_ids: Vec<usize>,
    pub ranking: RankingList,
}

/// Builds the proxy for `failed_test_id`: pair it with a sampled subset of
/// the record's successful tests, score the single-failure spectrum with
/// `ref_id`, and rank.
pub fn represent(
    cov: &CoverageRecord,
    failed_test_id: usize,
    policy: &Nsp1fPolicy,
    ref_id: RefId,
) -> Result<FailureProxy> {
    if failed_test_id >= cov.num_tests() {
        return Err(Error::domain(format!(
            "test id {} out of range (suite has {} tests)",
            failed_test_id + 1,
            cov.num_tests()
        )));
    }
    if cov.verdict(failed_test_id) != Verdict::Fail {
        return Err(Error::domain(format!(
            "test {} did not fail and has no failure proxy",
            failed_test_id + 1
        )));
    }
    let sampled = sample_passed(&cov.passed_ids(), policy, failed_test_id)?;
    let sel = SuiteSelection::new(cov, vec![failed_test_id], sampled.clone())?;
    let spectrum = compute_spectrum(cov, &sel)?;
    let ranking = rank(&suspiciousness(ref_id, &spectrum));
    Ok(FailureProxy {
        failed_test_id,
        ref_id,
        sampled_passed_ids: sampled,
        ranking,
    })
}
