//! Cluster-count estimation and K-medoids refinement.
//!
//! The number of clusters is not known up front, so it is estimated with a
//! mountain method: every point accumulates potential from its neighbours
//! under a Gaussian kernel, peaks are picked greedily, and each pick
//! suppresses the potential around itself. Picking stops once the best
//! remaining potential falls below a fixed fraction of the first peak. The
//! chosen peaks seed a K-medoids refinement over the same distance matrix.

use crate::distance::DistanceMatrix;
use crate::error::{Error, Result};

/// Tuning knobs of the mountain estimator.
///
/// `bandwidth_scale` scales the kernel bandwidth, which is derived from the
/// mean pairwise distance after winsorizing at the `winsor_low`/`winsor_high`
/// percentiles. `revision_sharpening` narrows the suppression kernel applied
/// around each accepted peak, and `stop_ratio` is the fraction of the first
/// peak's potential below which picking stops.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MountainParams {
    pub bandwidth_scale: f64,
    pub revision_sharpening: f64,
    pub stop_ratio: f64,
    pub winsor_low: f64,
    pub winsor_high: f64,
}

impl Default for MountainParams {
    fn default() -> Self {
        MountainParams {
            bandwidth_scale: 1.0,
            revision_sharpening: 2.0,
            stop_ratio: 0.15,
            winsor_low: 5.0,
            winsor_high: 95.0,
        }
    }
}

impl MountainParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.bandwidth_scale.is_finite() && self.bandwidth_scale > 0.0) {
            return Err(Error::domain("bandwidth_scale must be positive"));
        }
        if !(self.revision_sharpening.is_finite() && self.revision_sharpening > 0.0) {
            return Err(Error::domain("revision_sharpening must be positive"));
        }
        if !(self.stop_ratio > 0.0 && self.stop_ratio < 1.0) {
            return Err(Error::domain("stop_ratio must lie in (0, 1)"));
        }
        if !(0.0..=100.0).contains(&self.winsor_low)
            || !(0.0..=100.0).contains(&self.winsor_high)
            || self.winsor_low >= self.winsor_high
        {
            return Err(Error::domain(
                "winsor percentiles must satisfy 0 <= low < high <= 100",
            ));
        }
        Ok(())
    }
}

/// Output of the mountain estimator: the cluster count, the peak points (in
/// pick order) and each pick's potential at selection time.
#[derive(Debug, Clone)]
pub struct ClusterEstimate {
    pub k: usize,
    pub initial_medoids: Vec<usize>,
    pub potential_trace: Vec<(usize, f64)>,
}

/// Percentile by linear interpolation between closest ranks (inclusive).
fn percentile(sorted: &[f64], pct: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let rank = pct / 100.0 * (n - 1) as f64;
    let lo = rank.floor() as usize;
    let hi = rank.ceil() as usize;
    let frac = rank - lo as f64;
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

fn winsorized_mean(values: &[f64], low_pct: f64, high_pct: f64) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("distances are finite"));
    let lo = percentile(&sorted, low_pct);
    let hi = percentile(&sorted, high_pct);
    let sum: f64 = sorted.iter().map(|&v| v.clamp(lo, hi)).sum();
    sum / sorted.len() as f64
}

/// Estimates the number of failure clusters in a distance matrix.
pub fn estimate_clusters(d: &DistanceMatrix, p: &MountainParams) -> Result<ClusterEstimate> {
    p.validate()?;
    let n = d.n();
    if n == 0 {
        return Err(Error::domain("cannot estimate clusters of zero points"));
    }

    let sigma = p.bandwidth_scale * winsorized_mean(&d.pairwise(), p.winsor_low, p.winsor_high);
    if sigma <= 0.0 {
        // All points coincide (or there is a single point): one cluster.
        return Ok(ClusterEstimate {
            k: 1,
            initial_medoids: vec![0],
            potential_trace: Vec::new(),
        });
    }

    let mut potential: Vec<f64> = (0..n)
        .map(|i| {
            let mut terms: Vec<f64> = (0..n)
                .filter(|&j| j != i)
                .map(|j| (-(d.get(i, j) / sigma).powi(2)).exp())
                .collect();
            // Summing in sorted order gives points with the same distance
            // multiset bit-identical potentials, so index tie-breaks below
            // are decided by the data and not by accumulation order.
            terms.sort_by(|a, b| a.partial_cmp(b).expect("kernel values are finite"));
            terms.iter().sum()
        })
        .collect();

    let mut selected = vec![false; n];
    let mut medoids = Vec::new();
    let mut trace = Vec::new();
    let mut first_peak: Option<f64> = None;
    // Strict comparison keeps the smallest index on ties; `None` once every
    // point became a medoid.
    let highest_remaining = |selected: &[bool], potential: &[f64]| {
        (0..n)
            .filter(|&i| !selected[i])
            .map(|i| (i, potential[i]))
            .fold(None, |best: Option<(usize, f64)>, cand| match best {
                Some((_, bp)) if bp >= cand.1 => best,
                _ => Some(cand),
            })
    };
    while let Some((m, peak)) = highest_remaining(&selected, &potential) {
        match first_peak {
            None => first_peak = Some(peak),
            Some(fp) => {
                if peak < p.stop_ratio * fp {
                    break;
                }
            }
        }
        selected[m] = true;
        medoids.push(m);
        trace.push((m, peak));
        for (i, pot) in potential.iter_mut().enumerate() {
            *pot -= peak * (-(d.get(i, m) * p.revision_sharpening / sigma).powi(2)).exp();
        }
    }

    Ok(ClusterEstimate {
        k: medoids.len(),
        initial_medoids: medoids,
        potential_trace: trace,
    })
}

/// A hard assignment of every point to one of `k` clusters.
///
/// Cluster ids are positions in `medoids`; each medoid belongs to its own
/// cluster, so no cluster is empty. `converged` is false when the
/// assign/recompute alternation was still moving at the iteration cap.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clustering {
    pub assignment: Vec<usize>,
    pub medoids: Vec<usize>,
    pub converged: bool,
    pub iterations: u32,
}

impl Clustering {
    pub fn k(&self) -> usize {
        self.medoids.len()
    }

    pub fn n(&self) -> usize {
        self.assignment.len()
    }

    /// Point indices of one cluster, ascending.
    pub fn members(&self, cluster: usize) -> Vec<usize> {
        (0..self.assignment.len())
            .filter(|&i| self.assignment[i] == cluster)
            .collect()
    }
}

const KMEDOIDS_MAX_ITER: u32 = 100;

fn assign(d: &DistanceMatrix, medoids: &[usize]) -> Vec<usize> {
    (0..d.n())
        .map(|i| {
            // A medoid stays in its own cluster even if another medoid sits
            // at distance zero.
            if let Some(c) = medoids.iter().position(|&m| m == i) {
                return c;
            }
            let mut best = 0;
            for c in 1..medoids.len() {
                if d.get(i, medoids[c]) < d.get(i, medoids[best]) {
                    best = c;
                }
            }
            best
        })
        .collect()
}

fn recompute_medoids(d: &DistanceMatrix, assignment: &[usize], k: usize) -> Vec<usize> {
    (0..k)
        .map(|c| {
            let members: Vec<usize> = (0..assignment.len())
                .filter(|&i| assignment[i] == c)
                .collect();
            let mut best = members[0];
            let mut best_cost = f64::INFINITY;
            for &m in &members {
                let cost: f64 = members.iter().map(|&x| d.get(m, x)).sum();
                if cost < best_cost {
                    best_cost = cost;
                    best = m;
                }
            }
            best
        })
        .collect()
}

pub(crate) fn total_cost(d: &DistanceMatrix, assignment: &[usize], medoids: &[usize]) -> f64 {
    assignment
        .iter()
        .enumerate()
        .map(|(i, &c)| d.get(i, medoids[c]))
        .sum()
}

/// Refines an initial medoid set by alternating nearest-medoid assignment
/// (ties to the lowest cluster id) and per-cluster medoid recomputation
/// (ties to the smallest point index) until the assignment stops changing.
pub fn kmedoids(d: &DistanceMatrix, init: &ClusterEstimate) -> Result<Clustering> {
    let n = d.n();
    let k = init.initial_medoids.len();
    if k == 0 || k != init.k {
        return Err(Error::domain("initial medoid set disagrees with k"));
    }
    if k > n {
        return Err(Error::domain(format!(
            "cannot form {k} clusters from {n} points"
        )));
    }
    let mut seen = vec![false; n];
    for &m in &init.initial_medoids {
        if m >= n {
            return Err(Error::domain(format!("medoid {m} out of range")));
        }
        if seen[m] {
            return Err(Error::domain(format!("duplicate medoid {m}")));
        }
        seen[m] = true;
    }

    let mut medoids = init.initial_medoids.clone();
    let mut assignment = assign(d, &medoids);
    let mut converged = false;
    let mut iterations = 0;
    while iterations < KMEDOIDS_MAX_ITER {
        iterations += 1;
        let new_medoids = recompute_medoids(d, &assignment, k);
        let new_assignment = assign(d, &new_medoids);
        debug_assert!(
            total_cost(d, &new_assignment, &new_medoids)
                <= total_cost(d, &assignment, &medoids) + 1e-9
        );
        medoids = new_medoids;
        if new_assignment == assignment {
            converged = true;
            break;
        }
        assignment = new_assignment;
    }

    Ok(Clustering {
        assignment,
        medoids,
        converged,
        iterations,
    })
}
