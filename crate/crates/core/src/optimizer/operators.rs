//! Candidate-generation formulas and the selection primitives they use.
//!
//! The arithmetic is kept in small pure functions so it can be checked
//! coordinate by coordinate; the optimizer only decides which branch and
//! which operands to feed them.

use rand::seq::index;
use rand::Rng;

/// One mutated coordinate of a region-search candidate.
///
/// `reference_centred`: `ref + beta * (s_r1 - s_r2)`; otherwise
/// `base + beta * (ref - s_r1)`.
#[inline]
pub fn region_mutation(reference: f64, base: f64, r1: f64, r2: f64, beta: f64, reference_centred: bool) -> f64 {
    if reference_centred {
        reference + beta * (r1 - r2)
    } else {
        base + beta * (reference - r1)
    }
}

/// One mutated coordinate of a point-search candidate. Both branches add
/// the same difference vector; only the base differs.
#[inline]
pub fn point_mutation(reference: f64, base: f64, r1: f64, r2: f64, beta: f64, reference_centred: bool) -> f64 {
    let anchor = if reference_centred { reference } else { base };
    anchor + beta * (r1 - r2)
}

/// Pull candidate centred on the accepted solution:
/// `nu + beta * (nu_r1 - nu_r2)`.
pub fn net_pull_toward_candidate(nu: &[f64], r1: &[f64], r2: &[f64], beta: f64) -> Vec<f64> {
    nu.iter()
        .zip(r1.iter().zip(r2))
        .map(|(n, (a, b))| n + beta * (a - b))
        .collect()
}

/// Pull candidate centred on the elastic point:
/// `p + beta * (nu - p) + beta * (nu_r1 - nu_r2)`.
pub fn net_pull_from_point(point: &[f64], nu: &[f64], r1: &[f64], r2: &[f64], beta: f64) -> Vec<f64> {
    point
        .iter()
        .zip(nu)
        .zip(r1.iter().zip(r2))
        .map(|((p, n), (a, b))| p + beta * (n - p) + beta * (a - b))
        .collect()
}

/// Keeps mutated coordinates of `mutant` where `mask` is set and the
/// original coordinates elsewhere.
pub fn apply_crossover(original: &[f64], mutant: &[f64], mask: &[bool]) -> Vec<f64> {
    original
        .iter()
        .zip(mutant)
        .zip(mask)
        .map(|((o, m), &take)| if take { *m } else { *o })
        .collect()
}

/// `true` when `a` is at least as close to `target` as `b`.
pub fn first_is_closer(a: &[f64], b: &[f64], target: &[f64]) -> bool {
    crate::spacenet::squared_distance(a, target) <= crate::spacenet::squared_distance(b, target)
}

/// New-miner coordinate blended between an elastic point and a uniform
/// sample: `delta^2 * p + (1 - delta^2) * u`.
#[inline]
pub fn blend_coordinate(elastic: f64, uniform: f64, delta: f64) -> f64 {
    let w = delta * delta;
    w * elastic + (1.0 - w) * uniform
}

/// Binomial crossover mask: coordinate `j` mutates when a fresh uniform
/// draw is below `alpha`, and `j_rand` always mutates.
pub fn crossover_mask<R: Rng + ?Sized>(rng: &mut R, dim: usize, alpha: f64) -> Vec<bool> {
    let j_rand = rng.random_range(0..dim);
    (0..dim).map(|j| rng.random::<f64>() < alpha || j == j_rand).collect()
}

/// Two indices in `0..n`, distinct from each other and from `exclude`
/// (when given). Requires `n >= 3` (or `n >= 2` without exclusion).
pub fn distinct_pair<R: Rng + ?Sized>(rng: &mut R, n: usize, exclude: Option<usize>) -> (usize, usize) {
    let pick = |rng: &mut R, taken: &[usize]| loop {
        let k = rng.random_range(0..n);
        if !taken.contains(&k) {
            return k;
        }
    };
    let mut taken: Vec<usize> = exclude.into_iter().collect();
    let r1 = pick(rng, &taken);
    taken.push(r1);
    let r2 = pick(rng, &taken);
    (r1, r2)
}

/// Roulette-wheel draw over `candidates` weighted by `weights[candidate]`.
/// Falls back to a uniform draw when the weights sum to zero.
pub fn roulette<R: Rng + ?Sized>(rng: &mut R, candidates: &[usize], weights: &[f64]) -> usize {
    let total: f64 = candidates.iter().map(|&c| weights[c].max(0.0)).sum();
    if !(total > 0.0) || !total.is_finite() {
        return candidates[rng.random_range(0..candidates.len())];
    }
    let mut target = rng.random::<f64>() * total;
    for &c in candidates {
        let w = weights[c].max(0.0);
        if target < w {
            return c;
        }
        target -= w;
    }
    // rounding slack lands on the last positive-weight candidate
    *candidates.iter().rev().find(|&&c| weights[c] > 0.0).unwrap()
}

/// Tournament among `size` distinct entrants sampled from `entrants`;
/// lowest objective wins, lower index breaks ties.
pub fn tournament<R: Rng + ?Sized>(rng: &mut R, entrants: &[usize], objectives: impl Fn(usize) -> f64, size: usize) -> usize {
    let size = size.clamp(1, entrants.len());
    index::sample(rng, entrants.len(), size)
        .into_iter()
        .map(|k| entrants[k])
        .min_by(|&a, &b| objectives(a).total_cmp(&objectives(b)).then(a.cmp(&b)))
        .unwrap()
}

/// The `m` highest-scoring indices, best first, lower index on ties.
pub fn top_by_score(scores: &[f64], m: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    order.truncate(m);
    order
}
