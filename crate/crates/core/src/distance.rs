//! Dissimilarity between failure proxies.
//!
//! Two ranking lists are compared with a weighted Kendall-tau variant: only
//! strictly discordant statement pairs count (a tie on either side
//! contributes nothing), and each discordant pair is weighted by the sum of
//! the reciprocals of its four ranks. Disagreements near the top of the
//! lists, where the suspected fault lives, therefore dominate the distance.

use crate::error::{Error, Result};
use crate::refs::RankingList;
use crate::srr::FailureProxy;

/// Weighted discordance between two ranking lists over the same statements.
pub fn revised_kendall(a: &RankingList, b: &RankingList) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::domain(format!(
            "ranking lists differ in length ({} vs {})",
            a.len(),
            b.len()
        )));
    }
    let ra = a.ranks();
    let rb = b.ranks();
    let mut total = 0.0;
    for i in 0..ra.len() {
        for j in (i + 1)..ra.len() {
            let discordant = (ra[i] < ra[j] && rb[i] > rb[j]) || (ra[i] > ra[j] && rb[i] < rb[j]);
            if discordant {
                total += 1.0 / f64::from(ra[i])
                    + 1.0 / f64::from(ra[j])
                    + 1.0 / f64::from(rb[i])
                    + 1.0 / f64::from(rb[j]);
            }
        }
    }
    Ok(total)
}

/// Symmetric pairwise distances with a zero diagonal.
#[derive(Debug, Clone)]
pub struct DistanceMatrix {
    n: usize,
    d: Vec<f64>,
}

impl DistanceMatrix {
    /// Validates an explicit matrix: square, symmetric, non-negative and
    /// finite, with a zero diagonal.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::domain("distance matrix needs at least one point"));
        }
        let mut d = vec![0.0; n * n];
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::domain("distance matrix is not square"));
            }
            for (j, &v) in row.iter().enumerate() {
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::domain(format!(
                        "distance ({i},{j}) = {v} is not a finite non-negative value"
                    )));
                }
                d[i * n + j] = v;
            }
        }
        for i in 0..n {
            if d[i * n + i] != 0.0 {
                return Err(Error::domain("diagonal must be zero"));
            }
            for j in (i + 1)..n {
                if d[i * n + j] != d[j * n + i] {
                    return Err(Error::domain(format!(
                        "matrix is asymmetric at ({i},{j})"
                    )));
                }
            }
        }
        Ok(DistanceMatrix { n, d })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.n + j]
    }

    /// Upper-triangle values, row by row; empty for a single point.
    pub fn pairwise(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.n * (self.n - 1) / 2);
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                out.push(self.get(i, j));
            }
        }
        out
    }
}

/// Builds the proxy-to-proxy distance matrix. All proxies must come from the
/// same formula and rank the same statements; row order follows the input.
pub fn distance_matrix(proxies: &[FailureProxy]) -> Result<DistanceMatrix> {
    if proxies.is_empty() {
        return Err(Error::domain("no failure proxies to compare"));
    }
    let ref_id = proxies[0].ref_id;
    let len = proxies[0].ranking.len();
    for p in proxies {
        if p.ref_id != ref_id {
            return Err(Error::domain(format!(
                "mixed formulas in one matrix ({} vs {})",
                p.ref_id, ref_id
            )));
        }
        if p.ranking.len() != len {
            return Err(Error::domain("proxies rank different statement sets"));
        }
    }
    let n = proxies.len();
    let mut d = vec![0.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let v = revised_kendall(&proxies[i].ranking, &proxies[j].ranking)?;
            d[i * n + j] = v;
            d[j * n + i] = v;
        }
    }
    Ok(DistanceMatrix { n, d })
}
