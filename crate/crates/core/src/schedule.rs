//! Budget-driven parameter schedules. Every schedule is a function of
//! `delta = fes / fes_max`, recomputed from the live evaluation count.

use serde::{Deserialize, Serialize};

/// Linear ramp from `a` (at `delta = 0`) to `b` (at `delta = 1`).
#[inline]
pub fn lambda_adjust(delta: f64, a: f64, b: f64) -> f64 {
    a + delta * (b - a)
}

/// Continuous population size `lambda(delta^(1 - sqrt(delta)))` between
/// `n_init` and `n_end`.
pub fn population_schedule(delta: f64, n_init: usize, n_end: usize) -> f64 {
    let warped = delta.powf(1.0 - delta.sqrt());
    lambda_adjust(warped, n_init as f64, n_end as f64)
}

/// Integer population size target.
pub fn population_target(delta: f64, n_init: usize, n_end: usize) -> usize {
    population_schedule(delta, n_init, n_end).round() as usize
}

/// Number of elastic points attracted by an accepted candidate.
///
/// Clamped to at least one so that the closest point always follows.
pub fn attracted_count(delta: f64, n_a_max: usize) -> usize {
    ((n_a_max as f64 * delta).ceil() as usize).max(1)
}

/// How the number of candidate regions for roulette selection evolves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionSchedule {
    /// From all `h` regions down to `0.1 h`.
    #[default]
    Shrinking,
    /// From `0.1 h` up to all `h` regions.
    Growing,
}

/// Candidate-set size for region selection, in `1..=h`.
pub fn candidate_region_count(delta: f64, h: usize, schedule: RegionSchedule) -> usize {
    let fraction = match schedule {
        RegionSchedule::Shrinking => lambda_adjust(delta, 1.0, 0.1),
        RegionSchedule::Growing => lambda_adjust(delta, 0.1, 1.0),
    };
    ((fraction * h as f64).ceil() as usize).clamp(1, h)
}

/// Weight of the best-corner term in a region's expected value (2 down to 1).
pub fn best_corner_weight(delta: f64) -> f64 {
    lambda_adjust(delta, 2.0, 1.0)
}

/// Probability of using a tournament (rather than the best corner) to pick
/// the reference point of a region.
pub fn tournament_probability(delta: f64) -> f64 {
    lambda_adjust(delta, 0.1, 1.0)
}

/// Probability of the reference-point-centred mutation, `delta^c`.
pub fn reference_branch_probability(delta: f64, c: f64) -> f64 {
    delta.powf(c)
}

/// Top-rho pool fraction for a uniform draw `phi`.
pub fn rho_fraction(phi: f64, rho_max: f64) -> f64 {
    lambda_adjust(phi, 0.1, rho_max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lambda_examples() {
        assert_eq!(lambda_adjust(0.5, 1.0, 2.0), 1.5);
        assert_eq!(lambda_adjust(0.0, 3.0, 7.0), 3.0);
        assert_eq!(lambda_adjust(1.0, 2.0, 1.0), 1.0);
        assert_eq!(best_corner_weight(1.0), 1.0);
        assert_eq!(best_corner_weight(0.0), 2.0);
    }

    #[test]
    fn population_endpoints() {
        assert_eq!(population_target(0.0, 190, 38), 190);
        assert_eq!(population_target(1.0, 190, 38), 38);
        assert_eq!(population_target(0.0, 19, 38), 19);
        assert_eq!(population_target(1.0, 19, 38), 38);
        // 0.25^(1 - 0.5) = 0.5
        assert_eq!(population_schedule(0.25, 190, 38), 114.0);
        assert_eq!(population_target(0.25, 190, 38), 114);
    }

    #[test]
    fn population_is_monotone() {
        let mut prev_s = 190;
        let mut prev_x = 19;
        for k in 0..=1000 {
            let d = k as f64 / 1000.0;
            let s = population_target(d, 190, 38);
            let x = population_target(d, 19, 38);
            assert!(s <= prev_s && x >= prev_x);
            prev_s = s;
            prev_x = x;
        }
    }

    #[test]
    fn attracted_points() {
        assert_eq!(attracted_count(1.0, 5), 5);
        assert_eq!(attracted_count(0.0, 5), 1);
        assert_eq!(attracted_count(1e-9, 5), 1);
        assert_eq!(attracted_count(0.5, 5), 3);
    }

    #[test]
    fn region_counts() {
        assert_eq!(candidate_region_count(0.0, 64, RegionSchedule::Shrinking), 64);
        assert_eq!(candidate_region_count(1.0, 64, RegionSchedule::Shrinking), 7);
        assert_eq!(candidate_region_count(0.0, 64, RegionSchedule::Growing), 7);
        assert_eq!(candidate_region_count(1.0, 64, RegionSchedule::Growing), 64);
        assert_eq!(candidate_region_count(1.0, 1, RegionSchedule::Shrinking), 1);
    }

    #[test]
    fn rs_prefers_reference_more_than_ps() {
        for k in 0..=100 {
            let d = k as f64 / 100.0;
            assert!(reference_branch_probability(d, 2.0) >= reference_branch_probability(d, 2.5));
        }
    }

    #[test]
    fn rho_range() {
        assert_eq!(rho_fraction(0.0, 0.7), 0.1);
        assert!((rho_fraction(1.0, 0.7) - 0.7).abs() < 1e-15);
    }
}
