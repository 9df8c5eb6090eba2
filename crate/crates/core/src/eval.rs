//! Scoring a generated clustering against the fault oracle.
//!
//! Pair-counting metrics (Jaccard coefficient, Fowlkes-Mallows index) look
//! at test pairs and need no correspondence between generated clusters and
//! faults. Precision and recall do need one, so when the cluster count
//! matches the fault count every bijection between the two sides is tried
//! and each metric reports its best value. Versions whose estimated count
//! misses the fault count carry no metrics at all; they are categorized and
//! contribute to the deviation statistics instead.

use crate::cluster::Clustering;
use crate::error::{Error, Result};

/// Fault labels for the failed tests of one faulty version, in the same
/// order the clustering indexes them. Labels are compacted to `0..r`; if an
/// id below the maximum never occurs, the gap is squeezed out and counted in
/// `collapsed_faults`.
#[derive(Debug, Clone)]
pub struct OracleLabels {
    labels: Vec<usize>,
    r: usize,
    collapsed_faults: usize,
}

impl OracleLabels {
    pub fn from_labels(raw: Vec<usize>) -> Self {
        let mut distinct: Vec<usize> = raw.clone();
        distinct.sort_unstable();
        distinct.dedup();
        let collapsed = match distinct.last() {
            Some(&max) => max + 1 - distinct.len(),
            None => 0,
        };
        let labels = raw
            .iter()
            .map(|l| distinct.binary_search(l).expect("label seen above"))
            .collect();
        OracleLabels {
            labels,
            r: distinct.len(),
            collapsed_faults: collapsed,
        }
    }

    /// Parses oracle text (`<test_id> <fault_id>` per line, `#` comments)
    /// and aligns it with the failed tests of a coverage record, given as
    /// 0-based ids in record order. Every failed test must be labelled
    /// exactly once.
    pub fn parse(text: &str, failed_ids: &[usize]) -> Result<OracleLabels> {
        let mut by_test: Vec<Option<usize>> = vec![None; failed_ids.len()];
        for (line_no, line) in text.lines().enumerate() {
            let line_no = line_no + 1;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut fields = line.split_whitespace();
            let (Some(test), Some(fault), None) =
                (fields.next(), fields.next(), fields.next())
            else {
                return Err(Error::parse(line_no, "expected `<test_id> <fault_id>`"));
            };
            let test: usize = test
                .parse()
                .map_err(|_| Error::parse(line_no, format!("invalid test id {test:?}")))?;
            let fault: usize = fault
                .parse()
                .map_err(|_| Error::parse(line_no, format!("invalid fault id {fault:?}")))?;
            if test == 0 {
                return Err(Error::parse(line_no, "test ids are 1-based"));
            }
            let pos = failed_ids
                .iter()
                .position(|&f| f == test - 1)
                .ok_or_else(|| {
                    Error::domain(format!("test {test} is not a failed test of this record"))
                })?;
            if by_test[pos].is_some() {
                return Err(Error::domain(format!(
                    "test {test} is labelled more than once"
                )));
            }
            by_test[pos] = Some(fault);
        }
        let raw = by_test
            .into_iter()
            .enumerate()
            .map(|(pos, l)| {
                l.ok_or_else(|| {
                    Error::domain(format!(
                        "failed test {} has no oracle label",
                        failed_ids[pos] + 1
                    ))
                })
            })
            .collect::<Result<Vec<usize>>>()?;
        Ok(OracleLabels::from_labels(raw))
    }

    /// Number of labelled failed tests.
    pub fn n(&self) -> usize {
        self.labels.len()
    }

    /// Number of distinct faults.
    pub fn r(&self) -> usize {
        self.r
    }

    pub fn label(&self, test: usize) -> usize {
        self.labels[test]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// Fault ids that were declared but had no failed test and were
    /// squeezed out during compaction.
    pub fn collapsed_faults(&self) -> usize {
        self.collapsed_faults
    }
}

/// Test-pair agreement counts between a clustering and the oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairCounts {
    /// Same cluster, same fault.
    pub x_ss: u64,
    /// Same cluster, different faults.
    pub x_sd: u64,
    /// Different clusters, same fault.
    pub x_ds: u64,
    /// Different clusters, different faults.
    pub x_dd: u64,
}

fn choose2(x: u64) -> u64 {
    x * x.saturating_sub(1) / 2
}

/// Counts all `n(n-1)/2` test pairs by co-membership on both sides.
pub fn pair_counts(gen: &Clustering, oracle: &OracleLabels) -> Result<PairCounts> {
    let n = oracle.n();
    if gen.n() != n {
        return Err(Error::domain(format!(
            "clustering covers {} tests, oracle {}",
            gen.n(),
            n
        )));
    }
    let k = gen.k();
    let r = oracle.r();
    let mut cell = vec![0u64; k * r];
    let mut gen_size = vec![0u64; k];
    let mut fault_size = vec![0u64; r];
    for i in 0..n {
        let g = gen.assignment[i];
        let f = oracle.label(i);
        cell[g * r + f] += 1;
        gen_size[g] += 1;
        fault_size[f] += 1;
    }
    let x_ss: u64 = cell.iter().map(|&c| choose2(c)).sum();
    let same_gen: u64 = gen_size.iter().map(|&c| choose2(c)).sum();
    let same_fault: u64 = fault_size.iter().map(|&c| choose2(c)).sum();
    let x_sd = same_gen - x_ss;
    let x_ds = same_fault - x_ss;
    let x_dd = choose2(n as u64) - x_ss - x_sd - x_ds;
    Ok(PairCounts { x_ss, x_sd, x_ds, x_dd })
}

fn frac_or_one(num: u64, den: u64) -> f64 {
    if den == 0 {
        1.0
    } else {
        num as f64 / den as f64
    }
}

/// Jaccard coefficient over test pairs; an empty denominator counts as a
/// perfect (trivial) clustering.
pub fn jc(c: &PairCounts) -> f64 {
    frac_or_one(c.x_ss, c.x_ss + c.x_sd + c.x_ds)
}

/// Fowlkes-Mallows index: geometric mean of pair precision and pair recall.
pub fn fmi(c: &PairCounts) -> f64 {
    (frac_or_one(c.x_ss, c.x_ss + c.x_sd) * frac_or_one(c.x_ss, c.x_ss + c.x_ds)).sqrt()
}

/// One-vs-rest confusion counts for a single positive fault under a chosen
/// fault-to-cluster mapping.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CaseCounts {
    pub x_tp: u64,
    pub x_fp: u64,
    pub x_tn: u64,
    pub x_fn: u64,
}

/// `mapping[fault] = generated cluster` must be a bijection, which requires
/// the cluster count to equal the fault count.
pub fn case_counts(
    gen: &Clustering,
    oracle: &OracleLabels,
    mapping: &[usize],
    positive_fault: usize,
) -> Result<CaseCounts> {
    let n = oracle.n();
    if gen.n() != n {
        return Err(Error::domain("clustering and oracle cover different tests"));
    }
    let k = gen.k();
    let r = oracle.r();
    if k != r {
        return Err(Error::domain(format!(
            "case counts need k = r, got k={k} r={r}"
        )));
    }
    if mapping.len() != r {
        return Err(Error::domain("mapping must assign every fault"));
    }
    let mut hit = vec![false; k];
    for &g in mapping {
        if g >= k || hit[g] {
            return Err(Error::domain("mapping is not a bijection onto clusters"));
        }
        hit[g] = true;
    }
    if positive_fault >= r {
        return Err(Error::domain(format!("no fault {positive_fault}")));
    }

    let positive_cluster = mapping[positive_fault];
    let mut counts = CaseCounts { x_tp: 0, x_fp: 0, x_tn: 0, x_fn: 0 };
    for i in 0..n {
        let oracle_pos = oracle.label(i) == positive_fault;
        let gen_pos = gen.assignment[i] == positive_cluster;
        match (gen_pos, oracle_pos) {
            (true, true) => counts.x_tp += 1,
            (true, false) => counts.x_fp += 1,
            (false, false) => counts.x_tn += 1,
            (false, true) => counts.x_fn += 1,
        }
    }
    Ok(counts)
}

/// Precision; an empty denominator counts as perfect.
pub fn pr(c: &CaseCounts) -> f64 {
    frac_or_one(c.x_tp, c.x_tp + c.x_fp)
}

/// Recall; an empty denominator counts as perfect.
pub fn rr(c: &CaseCounts) -> f64 {
    frac_or_one(c.x_tp, c.x_tp + c.x_fn)
}

/// How the estimated cluster count relates to the true fault count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Category {
    Under,
    Equal,
    Over,
}

impl Category {
    pub fn as_str(self) -> &'static str {
        match self {
            Category::Under => "under",
            Category::Equal => "equal",
            Category::Over => "over",
        }
    }
}

pub fn categorize(k: usize, r: usize) -> Category {
    match k.cmp(&r) {
        std::cmp::Ordering::Less => Category::Under,
        std::cmp::Ordering::Equal => Category::Equal,
        std::cmp::Ordering::Greater => Category::Over,
    }
}

/// The four metrics a report can carry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Jc,
    Fmi,
    Pr,
    Rr,
}

impl Metric {
    pub const ALL: [Metric; 4] = [Metric::Jc, Metric::Fmi, Metric::Pr, Metric::Rr];

    pub fn as_str(self) -> &'static str {
        match self {
            Metric::Jc => "JC",
            Metric::Fmi => "FMI",
            Metric::Pr => "PR",
            Metric::Rr => "RR",
        }
    }
}

/// Best value of one metric and the fault-to-cluster bijection achieving it.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricBest {
    pub value: f64,
    pub mapping: Vec<usize>,
}

/// Metrics of a version whose cluster count matched the fault count.
#[derive(Debug, Clone, PartialEq)]
pub struct EqualMetrics {
    pub jc: MetricBest,
    pub fmi: MetricBest,
    pub pr: MetricBest,
    pub rr: MetricBest,
    /// Size of the largest coalition of metrics voting for one mapping.
    pub votes: u32,
}

impl EqualMetrics {
    pub fn value(&self, metric: Metric) -> f64 {
        match metric {
            Metric::Jc => self.jc.value,
            Metric::Fmi => self.fmi.value,
            Metric::Pr => self.pr.value,
            Metric::Rr => self.rr.value,
        }
    }
}

/// Evaluation outcome for one faulty version.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub k: usize,
    pub r: usize,
    pub category: Category,
    /// Present exactly when `category` is [`Category::Equal`].
    pub metrics: Option<EqualMetrics>,
}

fn next_permutation(p: &mut [usize]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let mut i = p.len() - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = p.len() - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Scores one version against its oracle.
///
/// With `k = r`, every fault-to-cluster bijection is evaluated in
/// lexicographic order. Precision and recall are micro-averaged over all
/// positive faults per bijection and maximized; the pair metrics do not
/// depend on the bijection, so their vote follows the bijection maximizing
/// precision + recall. Ties always go to the lexicographically first
/// bijection, which keeps reports deterministic.
pub fn evaluate_version(gen: &Clustering, oracle: &OracleLabels) -> Result<EvalReport> {
    let n = oracle.n();
    if gen.n() != n {
        return Err(Error::domain(format!(
            "clustering covers {} tests, oracle {}",
            gen.n(),
            n
        )));
    }
    let k = gen.k();
    let r = oracle.r();
    let category = categorize(k, r);
    if category != Category::Equal {
        return Ok(EvalReport { k, r, category, metrics: None });
    }

    let counts = pair_counts(gen, oracle)?;
    let jc_value = jc(&counts);
    let fmi_value = fmi(&counts);

    let mut perm: Vec<usize> = (0..r).collect();
    let mut best_pr: Option<(f64, Vec<usize>)> = None;
    let mut best_rr: Option<(f64, Vec<usize>)> = None;
    let mut best_sum: Option<(f64, Vec<usize>)> = None;
    loop {
        let mut agg = CaseCounts { x_tp: 0, x_fp: 0, x_tn: 0, x_fn: 0 };
        for positive in 0..r {
            let c = case_counts(gen, oracle, &perm, positive)?;
            agg.x_tp += c.x_tp;
            agg.x_fp += c.x_fp;
            agg.x_tn += c.x_tn;
            agg.x_fn += c.x_fn;
        }
        let pr_value = pr(&agg);
        let rr_value = rr(&agg);
        for (best, value) in [
            (&mut best_pr, pr_value),
            (&mut best_rr, rr_value),
            (&mut best_sum, pr_value + rr_value),
        ] {
            if best.as_ref().is_none_or(|(b, _)| value > *b) {
                *best = Some((value, perm.clone()));
            }
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }

    let (best_pr, best_rr, best_sum) =
        (best_pr.unwrap(), best_rr.unwrap(), best_sum.unwrap());
    // The pair metrics vote with the precision+recall winner; count the
    // largest coalition on a single mapping.
    let mut tallies: Vec<(&[usize], u32)> = Vec::new();
    for mapping in [&best_sum.1, &best_sum.1, &best_pr.1, &best_rr.1] {
        match tallies.iter_mut().find(|(m, _)| *m == mapping.as_slice()) {
            Some((_, count)) => *count += 1,
            None => tallies.push((mapping, 1)),
        }
    }
    let votes = tallies.iter().map(|(_, c)| *c).max().unwrap();

    Ok(EvalReport {
        k,
        r,
        category,
        metrics: Some(EqualMetrics {
            jc: MetricBest { value: jc_value, mapping: best_sum.1.clone() },
            fmi: MetricBest { value: fmi_value, mapping: best_sum.1.clone() },
            pr: MetricBest { value: best_pr.0, mapping: best_pr.1 },
            rr: MetricBest { value: best_rr.0, mapping: best_rr.1 },
            votes,
        }),
    })
}

/// Sum of one metric over the reports that carry metrics.
pub fn sum_metric<'a, I>(reports: I, metric: Metric) -> f64
where
    I: IntoIterator<Item = &'a EvalReport>,
{
    reports
        .into_iter()
        .filter_map(|rep| rep.metrics.as_ref())
        .map(|m| m.value(metric))
        .sum()
}

/// Sum of vote counts over the reports that carry metrics.
pub fn sum_vote<'a, I>(reports: I) -> u64
where
    I: IntoIterator<Item = &'a EvalReport>,
{
    reports
        .into_iter()
        .filter_map(|rep| rep.metrics.as_ref())
        .map(|m| u64::from(m.votes))
        .sum()
}

/// Mean miss distances of the cluster-count estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviationSummary {
    /// Mean of `k - r` over overestimated versions.
    pub over: Option<f64>,
    /// Mean of `r - k` over underestimated versions.
    pub under: Option<f64>,
    /// Mean of `|k - r|` over all missed versions.
    pub mean: Option<f64>,
}

/// Deviation statistics over `(k, r)` estimates; exact versions contribute
/// nothing.
pub fn deviation(estimates: &[(usize, usize)]) -> DeviationSummary {
    let mut over = (0u64, 0u64);
    let mut under = (0u64, 0u64);
    for &(k, r) in estimates {
        match categorize(k, r) {
            Category::Over => {
                over.0 += (k - r) as u64;
                over.1 += 1;
            }
            Category::Under => {
                under.0 += (r - k) as u64;
                under.1 += 1;
            }
            Category::Equal => {}
        }
    }
    let mean_of = |sum: u64, count: u64| {
        if count == 0 {
            None
        } else {
            Some(sum as f64 / count as f64)
        }
    };
    DeviationSummary {
        over: mean_of(over.0, over.1),
        under: mean_of(under.0, under.1),
        mean: mean_of(over.0 + under.0, over.1 + under.1),
    }
}
