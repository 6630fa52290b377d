//! The `run` subcommand: every (function, dimension) cell, every trial.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use sno::{Problem, RunRecord, SnoConfig};

use crate::error::{CliError, Result};
use crate::formats::{self, ResultsFile};

pub const DEFAULT_TRIALS: usize = 30;
pub const DEFAULT_ALGORITHM: &str = "SNO";

/// Budget used when `--fes-max` is not given.
pub fn default_fes_max(dim: usize) -> u64 {
    match dim {
        10 => 200_000,
        20 => 1_000_000,
        d => 10_000 * d as u64,
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub problems: Vec<String>,
    pub dims: Vec<usize>,
    pub trials: usize,
    pub seed_base: u64,
    /// Overrides the per-dimension default when set.
    pub fes_max: Option<u64>,
    /// Base configuration; `fes_max`, `seed` and `snapshots` are filled in
    /// per cell and per trial.
    pub config: SnoConfig,
    pub out: PathBuf,
    pub snapshots: Vec<u64>,
    pub algorithm: String,
    /// Worker threads; `None` uses rayon's global pool, `Some(1)` runs
    /// trials one after another.
    pub jobs: Option<usize>,
}

impl ExperimentSpec {
    pub fn new(problems: Vec<String>, dims: Vec<usize>, out: impl Into<PathBuf>) -> Self {
        ExperimentSpec {
            problems,
            dims,
            trials: DEFAULT_TRIALS,
            seed_base: 0,
            fes_max: None,
            config: SnoConfig::default(),
            out: out.into(),
            snapshots: Vec::new(),
            algorithm: DEFAULT_ALGORITHM.to_string(),
            jobs: None,
        }
    }

    pub fn trial_seed(&self, trial: usize) -> u64 {
        self.seed_base.wrapping_add(trial as u64)
    }

    pub fn cell_config(&self, dim: usize) -> SnoConfig {
        let mut snapshots = self.snapshots.clone();
        snapshots.sort_unstable();
        snapshots.dedup();
        SnoConfig {
            fes_max: self.fes_max.unwrap_or_else(|| default_fes_max(dim)),
            seed: self.seed_base,
            snapshots,
            ..self.config.clone()
        }
    }

    fn cells(&self) -> Result<Vec<(Problem, SnoConfig)>> {
        if self.problems.is_empty() {
            return Err(CliError::Usage("no problem given".into()));
        }
        if self.dims.is_empty() {
            return Err(CliError::Usage("no dimension given".into()));
        }
        if self.trials == 0 {
            return Err(CliError::Usage("trials must be at least 1".into()));
        }
        let mut cells = Vec::new();
        for name in &self.problems {
            for &dim in &self.dims {
                let problem = Problem::by_name(name, dim)?;
                let config = self.cell_config(dim);
                config.validate()?;
                cells.push((problem, config));
            }
        }
        Ok(cells)
    }
}

/// One file to be written, relative to the output directory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub name: String,
    pub body: String,
}

/// Runs all trials of one cell and renders its files in a fixed order.
pub fn run_cell(spec: &ExperimentSpec, problem: &Problem, config: &SnoConfig) -> Result<Vec<Output>> {
    let trial = |t: usize| -> Result<RunRecord> {
        let cfg = SnoConfig {
            seed: spec.trial_seed(t),
            ..config.clone()
        };
        Ok(sno::run(&cfg, problem)?)
    };
    let records: Vec<RunRecord> = match spec.jobs {
        Some(1) => (0..spec.trials).map(trial).collect::<Result<_>>()?,
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?
            .install(|| (0..spec.trials).into_par_iter().map(trial).collect::<Result<_>>())?,
        None => (0..spec.trials).into_par_iter().map(trial).collect::<Result<_>>()?,
    };

    let name = problem.name();
    let dim = problem.dimension();
    let mut outputs = Vec::new();
    for (t, record) in records.iter().enumerate() {
        outputs.push(Output {
            name: formats::convergence_file_name(name, dim, t),
            body: formats::convergence_csv(&record.samples),
        });
        for snap in &record.snapshots {
            outputs.push(Output {
                name: formats::net_file_name(name, dim, t, snap.checkpoint),
                body: formats::net_csv(snap),
            });
        }
    }
    let seeds = (0..spec.trials).map(|t| spec.trial_seed(t)).collect();
    let results = ResultsFile::from_records(
        &spec.algorithm,
        problem.lower(),
        problem.upper(),
        spec.seed_base,
        seeds,
        config,
        &records,
    );
    outputs.push(Output {
        name: formats::results_file_name(name, dim),
        body: results.to_json(),
    });
    Ok(outputs)
}

/// Runs the experiment and writes its files. On any failure the files
/// already written by this call are removed again.
pub fn cmd_run(spec: &ExperimentSpec) -> Result<Vec<PathBuf>> {
    let cells = spec.cells()?;
    let created_dir = !spec.out.exists();
    fs::create_dir_all(&spec.out).map_err(|e| CliError::io(&spec.out, e))?;

    let mut written = Vec::new();
    let outcome = (|| -> Result<()> {
        for (problem, config) in &cells {
            for output in run_cell(spec, problem, config)? {
                let path = spec.out.join(&output.name);
                fs::write(&path, output.body).map_err(|e| CliError::io(&path, e))?;
                written.push(path);
            }
        }
        Ok(())
    })();

    match outcome {
        Ok(()) => Ok(written),
        Err(e) => {
            cleanup(&written, created_dir.then_some(spec.out.as_path()));
            Err(e)
        }
    }
}

fn cleanup(files: &[PathBuf], dir: Option<&Path>) {
    for f in files {
        let _ = fs::remove_file(f);
    }
    if let Some(dir) = dir {
        // only succeeds when nothing else landed there
        let _ = fs::remove_dir(dir);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_budgets() {
        assert_eq!(default_fes_max(10), 200_000);
        assert_eq!(default_fes_max(20), 1_000_000);
        assert_eq!(default_fes_max(2), 20_000);
    }

    #[test]
    fn seeds_follow_trial_index() {
        let mut spec = ExperimentSpec::new(vec!["sphere".into()], vec![2], "unused");
        spec.seed_base = 40;
        assert_eq!(spec.trial_seed(0), 40);
        assert_eq!(spec.trial_seed(3), 43);
    }

    #[test]
    fn cell_config_sorts_checkpoints() {
        let mut spec = ExperimentSpec::new(vec!["sphere".into()], vec![10], "unused");
        spec.snapshots = vec![800, 400, 800];
        let c = spec.cell_config(10);
        assert_eq!(c.fes_max, 200_000);
        assert_eq!(c.snapshots, vec![400, 800]);
    }

    #[test]
    fn invalid_specs() {
        let mut spec = ExperimentSpec::new(vec!["nope".into()], vec![2], "unused");
        assert!(matches!(spec.cells(), Err(CliError::Usage(_))));
        spec.problems = vec!["sphere".into()];
        spec.trials = 0;
        assert!(matches!(spec.cells(), Err(CliError::Usage(_))));
        spec.trials = 1;
        spec.fes_max = Some(10);
        assert!(matches!(spec.cells(), Err(CliError::Usage(_))));
    }

    #[test]
    fn outputs_in_fixed_order() {
        let mut spec = ExperimentSpec::new(vec!["ackley".into()], vec![2], "unused");
        spec.trials = 2;
        spec.fes_max = Some(1000);
        spec.snapshots = vec![400];
        let (problem, config) = spec.cells().unwrap().remove(0);
        let names: Vec<String> = run_cell(&spec, &problem, &config)
            .unwrap()
            .into_iter()
            .map(|o| o.name)
            .collect();
        assert_eq!(
            names,
            [
                "convergence_ackley_2_0.csv",
                "net_ackley_2_0_400.csv",
                "convergence_ackley_2_1.csv",
                "net_ackley_2_1_400.csv",
                "results_ackley_2.json",
            ]
        );
    }
}
