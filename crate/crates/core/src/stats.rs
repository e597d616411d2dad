//! Batch-means confidence interval for the time-average age of a trace.

use crate::domain::AocTrace;

pub const BATCHES: usize = 20;
/// Below this many collection events the first batch is dropped as warm-up.
pub const SHORT_TRACE_EVENTS: usize = 40;

/// Summary of a batch-means estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchMeans {
    pub means: Vec<f64>,
    /// Half-width of the two-sided confidence interval; infinite when fewer
    /// than two batches are available.
    pub halfwidth: f64,
}

/// Splits the inter-collection intervals of `trace` into up to [`BATCHES`]
/// contiguous batches and returns the per-batch time-average ages together
/// with a Student-t confidence half-width.
pub fn batch_means(trace: &AocTrace) -> BatchMeans {
    let intervals = trace.len().saturating_sub(1);
    let batches = intervals.min(BATCHES);
    let mut means: Vec<f64> = (0..batches)
        .map(|b| {
            let lo = b * intervals / batches;
            let hi = (b + 1) * intervals / batches;
            let area: f64 = (lo..hi).map(|k| trace.interval_area(k)).sum();
            let span = trace.events()[hi].completion_time - trace.events()[lo].completion_time;
            area / span
        })
        .collect();
    if trace.len() < SHORT_TRACE_EVENTS && means.len() > 2 {
        means.remove(0);
    }
    let halfwidth = halfwidth(&means);
    BatchMeans { means, halfwidth }
}

fn halfwidth(means: &[f64]) -> f64 {
    let b = means.len();
    if b < 2 {
        return f64::INFINITY;
    }
    let mean = means.iter().sum::<f64>() / b as f64;
    if means.iter().all(|&m| m == mean) {
        return 0.0;
    }
    let var = means.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / (b - 1) as f64;
    student_t_975(b - 1) * (var / b as f64).sqrt()
}

/// Two-sided 95% Student-t critical values for 1..=19 degrees of freedom,
/// the only range a 20-batch estimate can need.
const T_975: [f64; BATCHES - 1] = [
    12.706204736432095,
    4.302652729696142,
    3.182446305284263,
    2.7764451051977987,
    2.570581835636314,
    2.4469118511449692,
    2.3646242515927844,
    2.306004135204166,
    2.2621571628540993,
    2.2281388519649385,
    2.200985160082949,
    2.1788128296634177,
    2.1603686564610127,
    2.1447866879169273,
    2.131449545559323,
    2.1199052992210112,
    2.1098155778331806,
    2.10092204024096,
    2.093024054408263,
];

fn student_t_975(dof: usize) -> f64 {
    T_975[dof.clamp(1, BATCHES - 1) - 1]
}
