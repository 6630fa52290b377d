//! Convergence logging: best error, population sizes, median-based
//! population diversity and the exploration/exploitation split derived from
//! it, plus space-net snapshots.
//!
//! Diversity is the dimension-wise mean absolute deviation from the median,
//!
//! ```text
//! Div = (1/d) * sum_j (1/n) * sum_i |median_j - x_ij|
//! ```
//!
//! and exploration is `Div / Div_max` where `Div_max` is the largest
//! diversity observed so far in the run.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceSample {
    pub fes: u64,
    pub best_error: f64,
    pub n_s: usize,
    pub n_x: usize,
    pub diversity: f64,
    pub xpl_pct: f64,
    pub xpt_pct: f64,
}

/// One elastic point as captured in a snapshot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotPoint {
    pub id: usize,
    pub row: usize,
    pub col: usize,
    pub position: Vec<f64>,
    pub objective: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetSnapshot {
    /// The checkpoint this snapshot was requested for.
    pub checkpoint: u64,
    /// Evaluations actually consumed at capture time.
    pub fes: u64,
    pub points: Vec<SnapshotPoint>,
    pub explorers: Vec<Vec<f64>>,
    pub miners: Vec<Vec<f64>>,
}

impl NetSnapshot {
    pub fn mean_objective(&self) -> f64 {
        self.points.iter().map(|p| p.objective).sum::<f64>() / self.points.len() as f64
    }

    /// Fraction of elastic points within Euclidean distance `radius` of
    /// `center`.
    pub fn fraction_within(&self, center: &[f64], radius: f64) -> f64 {
        let r2 = radius * radius;
        let inside = self
            .points
            .iter()
            .filter(|p| {
                p.position
                    .iter()
                    .zip(center)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    <= r2
            })
            .count();
        inside as f64 / self.points.len() as f64
    }
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Median-based spread of a point set. Returns 0 for an empty set.
pub fn population_diversity<'a, I>(points: I) -> f64
where
    I: IntoIterator<Item = &'a [f64]>,
{
    let points: Vec<&[f64]> = points.into_iter().collect();
    let Some(first) = points.first() else {
        return 0.0;
    };
    let d = first.len();
    if d == 0 {
        return 0.0;
    }
    let n = points.len() as f64;
    let mut column = Vec::with_capacity(points.len());
    let mut total = 0.0;
    for j in 0..d {
        column.clear();
        column.extend(points.iter().map(|p| p[j]));
        let m = median(&mut column);
        total += column.iter().map(|v| (m - v).abs()).sum::<f64>() / n;
    }
    total / d as f64
}

/// `(xpl_pct, xpt_pct)` for a diversity reading against the running
/// maximum. A zero maximum means the search has fully collapsed: `(0, 100)`.
pub fn exploration_exploitation(div: f64, div_max: f64) -> (f64, f64) {
    if !(div_max > 0.0) {
        return (0.0, 100.0);
    }
    let xpl = 100.0 * div / div_max;
    (xpl, 100.0 - xpl)
}

/// Decides when to emit samples and keeps the running diversity maximum.
#[derive(Debug, Clone)]
pub struct MetricRecorder {
    every: u64,
    div_max: f64,
    last_error: f64,
    samples: Vec<ConvergenceSample>,
}

impl MetricRecorder {
    pub fn new(every: u64) -> Self {
        MetricRecorder {
            every: every.max(1),
            div_max: 0.0,
            last_error: f64::INFINITY,
            samples: Vec::new(),
        }
    }

    pub fn cadence(&self) -> u64 {
        self.every
    }

    pub fn is_due(&self, fes: u64) -> bool {
        fes.is_multiple_of(self.every) && self.samples.last().is_none_or(|s| s.fes != fes)
    }

    /// Appends a sample for the given state. `fes` should be fresh.
    pub fn record<'a, I>(&mut self, fes: u64, best_error: f64, n_s: usize, n_x: usize, population: I) -> &ConvergenceSample
    where
        I: IntoIterator<Item = &'a [f64]>,
    {
        let diversity = population_diversity(population);
        self.div_max = self.div_max.max(diversity);
        let (xpl_pct, xpt_pct) = exploration_exploitation(diversity, self.div_max);
        self.last_error = self.last_error.min(best_error);
        self.samples.push(ConvergenceSample {
            fes,
            best_error: self.last_error,
            n_s,
            n_x,
            diversity,
            xpl_pct,
            xpt_pct,
        });
        self.samples.last().unwrap()
    }

    pub fn last_fes(&self) -> Option<u64> {
        self.samples.last().map(|s| s.fes)
    }

    pub fn samples(&self) -> &[ConvergenceSample] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<ConvergenceSample> {
        self.samples
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn div(points: &[Vec<f64>]) -> f64 {
        population_diversity(points.iter().map(Vec::as_slice))
    }

    #[test]
    fn diversity_fixtures() {
        assert_eq!(div(&vec![vec![3.0, 1.0]; 5]), 0.0);
        assert_eq!(div(&[vec![0.0], vec![2.0]]), 1.0);
        assert_eq!(div(&[vec![0.0, 0.0], vec![2.0, 2.0]]), 1.0);
        assert_eq!(div(&[]), 0.0);
    }

    #[test]
    fn split_fixtures() {
        assert_eq!(exploration_exploitation(4.0, 4.0), (100.0, 0.0));
        assert_eq!(exploration_exploitation(0.0, 4.0), (0.0, 100.0));
        assert_eq!(exploration_exploitation(2.0, 4.0), (50.0, 50.0));
        assert_eq!(exploration_exploitation(0.0, 0.0), (0.0, 100.0));
    }

    #[test]
    fn recorder_cadence() {
        let mut rec = MetricRecorder::new(1000);
        let pts = [vec![0.0], vec![2.0]];
        assert!(!rec.is_due(999));
        assert!(rec.is_due(1000));
        rec.record(1000, 5.0, 2, 0, pts.iter().map(Vec::as_slice));
        assert!(!rec.is_due(1000));
        rec.record(2000, 7.0, 2, 0, pts.iter().map(Vec::as_slice));
        let s = rec.samples();
        assert_eq!(s.len(), 2);
        assert!(s[1].best_error <= s[0].best_error);
        assert!((s[1].xpl_pct + s[1].xpt_pct - 100.0).abs() < 1e-9);
    }
}
