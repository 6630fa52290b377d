//! Cross-algorithm comparison: average ranks over functions and trials, and
//! a Wilcoxon-based Better / NoDifference / Worse verdict per function.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};

/// Final errors of one algorithm: function key -> per-trial errors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultTable {
    pub algorithm: String,
    pub functions: BTreeMap<String, Vec<f64>>,
}

impl ResultTable {
    pub fn new(algorithm: impl Into<String>) -> Self {
        ResultTable {
            algorithm: algorithm.into(),
            functions: BTreeMap::new(),
        }
    }

    pub fn with(mut self, function: impl Into<String>, errors: Vec<f64>) -> Self {
        self.functions.insert(function.into(), errors);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RankMode {
    /// Rank every (function, trial) cell.
    Avg,
    /// Rank each algorithm's best trial per function.
    Best,
}

impl FromStr for RankMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "avg" => Ok(RankMode::Avg),
            "best" => Ok(RankMode::Best),
            other => Err(Error::Input(format!("unknown rank mode `{other}` (expected avg or best)"))),
        }
    }
}

impl fmt::Display for RankMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RankMode::Avg => "avg",
            RankMode::Best => "best",
        })
    }
}

/// Ascending 1-based ranks; tied values share their mid-rank.
pub fn mid_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // positions start..end hold ranks start+1..=end
        let rank = (start + 1 + end) as f64 / 2.0;
        for &k in &order[start..end] {
            ranks[k] = rank;
        }
        start = end;
    }
    ranks
}

/// Sizes of the groups of tied values.
fn tie_groups(values: &[f64]) -> Vec<usize> {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut groups = Vec::new();
    let mut start = 0;
    while start < sorted.len() {
        let mut end = start + 1;
        while end < sorted.len() && sorted[end] == sorted[start] {
            end += 1;
        }
        groups.push(end - start);
        start = end;
    }
    groups
}

/// Mean rank of each table (in input order). Lower error ranks better.
pub fn average_ranks(tables: &[ResultTable], mode: RankMode) -> Result<Vec<f64>> {
    if tables.len() < 2 {
        return Err(Error::Input("ranking needs at least two algorithms".into()));
    }
    let reference = &tables[0];
    for t in &tables[1..] {
        if !t.functions.keys().eq(reference.functions.keys()) {
            return Err(Error::Input(format!(
                "`{}` and `{}` cover different function sets",
                reference.algorithm, t.algorithm
            )));
        }
    }
    if reference.functions.is_empty() {
        return Err(Error::Input("no functions to rank".into()));
    }

    let k = tables.len();
    let mut sums = vec![0.0; k];
    let mut cells = 0usize;
    for (function, errors) in &reference.functions {
        let trials = errors.len();
        for t in tables {
            let n = t.functions[function].len();
            if n != trials || n == 0 {
                return Err(Error::Input(format!(
                    "function `{function}`: `{}` has {n} trials, `{}` has {trials}",
                    t.algorithm, reference.algorithm
                )));
            }
        }
        match mode {
            RankMode::Avg => {
                for trial in 0..trials {
                    let cell: Vec<f64> = tables.iter().map(|t| t.functions[function][trial]).collect();
                    for (s, r) in sums.iter_mut().zip(mid_ranks(&cell)) {
                        *s += r;
                    }
                    cells += 1;
                }
            }
            RankMode::Best => {
                let cell: Vec<f64> = tables
                    .iter()
                    .map(|t| t.functions[function].iter().copied().fold(f64::INFINITY, f64::min))
                    .collect();
                for (s, r) in sums.iter_mut().zip(mid_ranks(&cell)) {
                    *s += r;
                }
                cells += 1;
            }
        }
    }
    Ok(sums.into_iter().map(|s| s / cells as f64).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Classification {
    Better,
    NoDifference,
    Worse,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Classification::Better => "Better",
            Classification::NoDifference => "NoDifference",
            Classification::Worse => "Worse",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WilcoxonVariant {
    /// Independent samples (Mann-Whitney).
    #[default]
    RankSum,
    /// Paired samples, e.g. trials sharing seeds.
    SignedRank,
}

/// Test statistic and two-sided p-value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestOutcome {
    /// Rank sum of the first sample, or W+ for the signed-rank test.
    pub statistic: f64,
    /// Expected statistic under the null hypothesis.
    pub expected: f64,
    pub p_value: f64,
    pub exact: bool,
}

/// Below this sample size the null distribution is enumerated exactly.
pub const EXACT_LIMIT: usize = 10;

fn standard_normal_two_sided(z: f64) -> f64 {
    erfc(z.abs() / std::f64::consts::SQRT_2).min(1.0)
}

/// Counts, for every achievable doubled sum, the subsets of `doubled` of
/// size `take` (or any size when `take` is `None`) reaching it.
fn subset_sum_counts(doubled: &[usize], take: Option<usize>) -> Vec<f64> {
    let total: usize = doubled.iter().sum();
    match take {
        Some(m) => {
            // counts[j][s]: subsets of size j with doubled sum s
            let mut counts = vec![vec![0.0f64; total + 1]; m + 1];
            counts[0][0] = 1.0;
            for &r in doubled {
                for j in (1..=m).rev() {
                    for s in (r..=total).rev() {
                        let add = counts[j - 1][s - r];
                        counts[j][s] += add;
                    }
                }
            }
            counts.swap_remove(m)
        }
        None => {
            let mut counts = vec![0.0f64; total + 1];
            counts[0] = 1.0;
            for &r in doubled {
                for s in (r..=total).rev() {
                    counts[s] += counts[s - r];
                }
            }
            counts
        }
    }
}

fn exact_two_sided(counts: &[f64], observed: usize) -> f64 {
    let all: f64 = counts.iter().sum();
    let lower: f64 = counts[..=observed].iter().sum::<f64>() / all;
    let upper: f64 = counts[observed..].iter().sum::<f64>() / all;
    (2.0 * lower.min(upper)).min(1.0)
}

/// Two-sided Wilcoxon rank-sum test. Exact when both samples are smaller
/// than [`EXACT_LIMIT`]; otherwise normal approximation with tie and
/// continuity corrections.
pub fn rank_sum_test(a: &[f64], b: &[f64]) -> Result<TestOutcome> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Input("rank-sum test needs two non-empty samples".into()));
    }
    let (n1, n2) = (a.len(), b.len());
    let n = n1 + n2;
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let ranks = mid_ranks(&pooled);
    let w: f64 = ranks[..n1].iter().sum();
    let expected = n1 as f64 * (n as f64 + 1.0) / 2.0;

    if n1 < EXACT_LIMIT && n2 < EXACT_LIMIT {
        let doubled: Vec<usize> = ranks.iter().map(|r| (2.0 * r).round() as usize).collect();
        let counts = subset_sum_counts(&doubled, Some(n1));
        let p_value = exact_two_sided(&counts, (2.0 * w).round() as usize);
        return Ok(TestOutcome {
            statistic: w,
            expected,
            p_value,
            exact: true,
        });
    }

    let (n1f, n2f, nf) = (n1 as f64, n2 as f64, n as f64);
    let ties: f64 = tie_groups(&pooled).iter().map(|&t| (t * t * t - t) as f64).sum();
    let var = n1f * n2f / 12.0 * ((nf + 1.0) - ties / (nf * (nf - 1.0)));
    let p_value = if var > 0.0 {
        let z = ((w - expected).abs() - 0.5).max(0.0) / var.sqrt();
        standard_normal_two_sided(z)
    } else {
        1.0
    };
    Ok(TestOutcome {
        statistic: w,
        expected,
        p_value,
        exact: false,
    })
}

/// Two-sided Wilcoxon signed-rank test on paired samples. Zero differences
/// are dropped.
pub fn signed_rank_test(a: &[f64], b: &[f64]) -> Result<TestOutcome> {
    if a.len() != b.len() || a.is_empty() {
        return Err(Error::Input("signed-rank test needs two non-empty samples of equal length".into()));
    }
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).filter(|d| *d != 0.0).collect();
    let n = diffs.len();
    if n == 0 {
        return Ok(TestOutcome {
            statistic: 0.0,
            expected: 0.0,
            p_value: 1.0,
            exact: true,
        });
    }
    let magnitudes: Vec<f64> = diffs.iter().map(|d| d.abs()).collect();
    let ranks = mid_ranks(&magnitudes);
    let w_plus: f64 = diffs.iter().zip(&ranks).filter(|(d, _)| **d > 0.0).map(|(_, r)| r).sum();
    let nf = n as f64;
    let expected = nf * (nf + 1.0) / 4.0;

    if n < EXACT_LIMIT {
        let doubled: Vec<usize> = ranks.iter().map(|r| (2.0 * r).round() as usize).collect();
        let counts = subset_sum_counts(&doubled, None);
        let p_value = exact_two_sided(&counts, (2.0 * w_plus).round() as usize);
        return Ok(TestOutcome {
            statistic: w_plus,
            expected,
            p_value,
            exact: true,
        });
    }
    let ties: f64 = tie_groups(&magnitudes).iter().map(|&t| (t * t * t - t) as f64).sum();
    let var = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - ties / 48.0;
    let p_value = if var > 0.0 {
        let z = ((w_plus - expected).abs() - 0.5).max(0.0) / var.sqrt();
        standard_normal_two_sided(z)
    } else {
        1.0
    };
    Ok(TestOutcome {
        statistic: w_plus,
        expected,
        p_value,
        exact: false,
    })
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Rank-sum verdict for errors `a` against errors `b`.
pub fn wilcoxon_classify(a: &[f64], b: &[f64], significance: f64) -> Result<Classification> {
    wilcoxon_classify_with(a, b, significance, WilcoxonVariant::RankSum)
}

/// Verdict for `a` against `b`: `Better` when the difference is significant
/// and `a` has the lower median error (mean rank breaks median ties).
pub fn wilcoxon_classify_with(a: &[f64], b: &[f64], significance: f64, variant: WilcoxonVariant) -> Result<Classification> {
    if a.len() != b.len() {
        return Err(Error::Input(format!("unequal trial counts: {} vs {}", a.len(), b.len())));
    }
    if a.len() < 5 {
        return Err(Error::Input(format!("at least 5 trials required, got {}", a.len())));
    }
    if !(significance > 0.0 && significance < 1.0) {
        return Err(Error::Input(format!("significance must lie in (0, 1), got {significance}")));
    }
    let outcome = match variant {
        WilcoxonVariant::RankSum => rank_sum_test(a, b)?,
        WilcoxonVariant::SignedRank => signed_rank_test(a, b)?,
    };
    if outcome.p_value >= significance {
        return Ok(Classification::NoDifference);
    }
    let (ma, mb) = (median(a), median(b));
    // both statistics grow with a's errors (rank sum of a, or W+ over a > b)
    let a_lower = if ma != mb { ma < mb } else { outcome.statistic < outcome.expected };
    Ok(if a_lower {
        Classification::Better
    } else {
        Classification::Worse
    })
}
