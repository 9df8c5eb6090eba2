//! Order statistics for the experiment tables.

/// Five-number summary (minus the extremes) of one metric column.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricSummary {
    pub count: usize,
    pub sum: f64,
    pub mean: f64,
    pub median: f64,
    pub lower_quartile: f64,
    pub upper_quartile: f64,
}

/// Percentile by linear interpolation between closest ranks; `sorted` must
/// be ascending and non-empty.
pub(crate) fn percentile(sorted: &[f64], pct: f64) -> f64 {
    if sorted.len() == 1 {
        return sorted[0];
    }
    let rank = pct / 100.0 * (sorted.len() - 1) as f64;
    let lo = rank.floor() as usize;
    let hi = rank.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (rank - lo as f64)
}

pub fn summarize(values: &[f64]) -> Option<MetricSummary> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("metric values are finite"));
    let sum: f64 = sorted.iter().sum();
    Some(MetricSummary {
        count: sorted.len(),
        sum,
        mean: sum / sorted.len() as f64,
        median: percentile(&sorted, 50.0),
        lower_quartile: percentile(&sorted, 25.0),
        upper_quartile: percentile(&sorted, 75.0),
    })
}
