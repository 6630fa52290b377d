use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objective::DEFAULT_ERROR_THRESHOLD;
use crate::schedule::RegionSchedule;
use crate::spacenet::grid_side;

/// Parameters of the space net optimizer.
///
/// Defaults: 190 explorers shrinking to 38, 19 miners growing to 38, a
/// 9 x 9 net, `alpha = 0.5`, `beta = 0.1`, `c_s = 2.0`, `c_x = 2.5`,
/// `rho_max = 0.7` and up to 5 elastic points attracted per accepted
/// candidate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SnoConfig {
    pub n_s_init: usize,
    pub n_s_end: usize,
    pub n_x_init: usize,
    pub n_x_end: usize,
    /// Elastic points; must be a perfect square.
    pub n_p: usize,
    pub alpha_init: f64,
    pub beta_init: f64,
    /// Exponent of the reference-centred branch probability in region search.
    pub c_s: f64,
    /// Exponent of the reference-centred branch probability in point search.
    pub c_x: f64,
    pub rho_max: f64,
    pub n_a_max: usize,
    pub tournament_size: usize,
    pub fes_max: u64,
    pub error_threshold: f64,
    pub seed: u64,
    /// Optional iteration cap.
    pub t_max: Option<u64>,
    pub region_schedule: RegionSchedule,
    /// Per-region success-driven drift of `alpha`/`beta`. Off by default,
    /// which keeps them at their initial values.
    pub adapt_parameters: bool,
    /// Convergence sample cadence in evaluations; `None` means `fes_max / 200`.
    pub sample_every: Option<u64>,
    /// Evaluation counts at which to capture the space net.
    pub snapshots: Vec<u64>,
}

impl Default for SnoConfig {
    fn default() -> Self {
        SnoConfig::with_explorers(190)
    }
}

impl SnoConfig {
    /// Defaults with every population size derived from `n_s_init`.
    pub fn with_explorers(n_s_init: usize) -> Self {
        SnoConfig {
            n_s_init,
            n_s_end: n_s_init / 5,
            n_x_init: n_s_init / 10,
            n_x_end: n_s_init / 5,
            n_p: 81,
            alpha_init: 0.5,
            beta_init: 0.1,
            c_s: 2.0,
            c_x: 2.5,
            rho_max: 0.7,
            n_a_max: 5,
            tournament_size: 2,
            fes_max: 200_000,
            error_threshold: DEFAULT_ERROR_THRESHOLD,
            seed: 0,
            t_max: None,
            region_schedule: RegionSchedule::Shrinking,
            adapt_parameters: false,
            sample_every: None,
            snapshots: Vec::new(),
        }
    }

    pub fn fes_max(mut self, fes_max: u64) -> Self {
        self.fes_max = fes_max;
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Evaluations spent by initialization.
    pub fn init_cost(&self) -> u64 {
        (self.n_s_init + self.n_x_init + self.n_p) as u64
    }

    pub fn sample_cadence(&self) -> u64 {
        self.sample_every.unwrap_or(self.fes_max / 200).max(1)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        grid_side(self.n_p)?;
        // three distinct members are needed for difference vectors
        for (name, v) in [
            ("n_s_init", self.n_s_init),
            ("n_s_end", self.n_s_end),
            ("n_x_init", self.n_x_init),
            ("n_x_end", self.n_x_end),
        ] {
            if v < 3 {
                return bad(format!("{name} must be at least 3, got {v}"));
            }
        }
        if !(0.0..=1.0).contains(&self.alpha_init) {
            return bad(format!("alpha_init must lie in [0, 1], got {}", self.alpha_init));
        }
        if !(self.beta_init.is_finite() && self.beta_init >= 0.0) {
            return bad(format!("beta_init must be finite and non-negative, got {}", self.beta_init));
        }
        if !(self.rho_max > 0.0 && self.rho_max <= 1.0) {
            return bad(format!("rho_max must lie in (0, 1], got {}", self.rho_max));
        }
        if !(self.c_s.is_finite() && self.c_s > 0.0 && self.c_x.is_finite() && self.c_x > 0.0) {
            return bad("c_s and c_x must be positive".into());
        }
        if self.n_a_max == 0 {
            return bad("n_a_max must be positive".into());
        }
        if !(1..=4).contains(&self.tournament_size) {
            return bad(format!("tournament_size must lie in 1..=4, got {}", self.tournament_size));
        }
        if self.fes_max < self.init_cost() {
            return bad(format!(
                "fes_max = {} cannot cover the {} initial evaluations",
                self.fes_max,
                self.init_cost()
            ));
        }
        if self.error_threshold.is_nan() {
            return bad("error_threshold is NaN".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let c = SnoConfig::default();
        assert_eq!((c.n_s_init, c.n_s_end, c.n_x_init, c.n_x_end, c.n_p), (190, 38, 19, 38, 81));
        assert_eq!(c.init_cost(), 290);
        assert_eq!(c.sample_cadence(), 1000);
        c.validate().unwrap();
    }

    #[test]
    fn rejects_bad_values() {
        let base = SnoConfig::default();
        let cases = [
            SnoConfig { n_p: 80, ..base.clone() },
            SnoConfig { n_x_init: 2, ..base.clone() },
            SnoConfig { alpha_init: 1.5, ..base.clone() },
            SnoConfig { rho_max: 0.0, ..base.clone() },
            SnoConfig { fes_max: 289, ..base.clone() },
            SnoConfig { tournament_size: 0, ..base.clone() },
        ];
        for c in cases {
            assert!(matches!(c.validate(), Err(Error::InvalidConfig(_))), "{c:?}");
        }
    }
}
