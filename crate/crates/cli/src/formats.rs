//! On-disk formats.
//!
//! * `convergence_<f>_<d>_<trial>.csv`: one row per convergence sample.
//! * `net_<f>_<d>_<trial>_<fes>.csv`: one row per elastic point.
//! * `results_<f>_<d>.json`: config echo, seeds and final errors of every
//!   trial in a cell.
//!
//! Floats are written in Rust's shortest round-trip form, so parsing a
//! written value gives back the identical `f64`.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sno::metrics::{ConvergenceSample, NetSnapshot};
use sno::{RunRecord, SnoConfig, Stop};

use crate::error::{CliError, Result};

pub const CONVERGENCE_HEADER: &str = "fes,best_error,n_s,n_x,diversity,xpl_pct,xpt_pct";

pub fn convergence_file_name(problem: &str, dim: usize, trial: usize) -> String {
    format!("convergence_{problem}_{dim}_{trial}.csv")
}

pub fn net_file_name(problem: &str, dim: usize, trial: usize, checkpoint: u64) -> String {
    format!("net_{problem}_{dim}_{trial}_{checkpoint}.csv")
}

pub fn results_file_name(problem: &str, dim: usize) -> String {
    format!("results_{problem}_{dim}.json")
}

pub fn convergence_csv(samples: &[ConvergenceSample]) -> String {
    let mut out = String::with_capacity(64 * (samples.len() + 1));
    out.push_str(CONVERGENCE_HEADER);
    out.push('\n');
    for s in samples {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            s.fes, s.best_error, s.n_s, s.n_x, s.diversity, s.xpl_pct, s.xpt_pct
        );
    }
    out
}

pub fn parse_convergence_csv(text: &str) -> Result<Vec<ConvergenceSample>> {
    let mut lines = text.lines();
    if lines.next() != Some(CONVERGENCE_HEADER) {
        return Err(CliError::Data("convergence file has an unexpected header".into()));
    }
    lines
        .enumerate()
        .filter(|(_, l)| !l.is_empty())
        .map(|(i, line)| {
            let bad = || CliError::Data(format!("convergence row {}: `{line}`", i + 1));
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 7 {
                return Err(bad());
            }
            let float = |k: usize| f[k].parse::<f64>().map_err(|_| bad());
            let int = |k: usize| f[k].parse::<u64>().map_err(|_| bad());
            Ok(ConvergenceSample {
                fes: int(0)?,
                best_error: float(1)?,
                n_s: int(2)? as usize,
                n_x: int(3)? as usize,
                diversity: float(4)?,
                xpl_pct: float(5)?,
                xpt_pct: float(6)?,
            })
        })
        .collect()
}

pub fn net_header(dim: usize) -> String {
    let mut h = String::from("point_id,row,col");
    for j in 0..dim {
        let _ = write!(h, ",x{j}");
    }
    h.push_str(",objective");
    h
}

pub fn net_csv(snapshot: &NetSnapshot) -> String {
    let dim = snapshot.points.first().map_or(0, |p| p.position.len());
    let mut out = net_header(dim);
    out.push('\n');
    for p in &snapshot.points {
        let _ = write!(out, "{},{},{}", p.id, p.row, p.col);
        for v in &p.position {
            let _ = write!(out, ",{v}");
        }
        let _ = writeln!(out, ",{}", p.objective);
    }
    out
}

/// One parsed row of a net snapshot file.
#[derive(Debug, Clone, PartialEq)]
pub struct NetRow {
    pub id: usize,
    pub row: usize,
    pub col: usize,
    pub position: Vec<f64>,
    pub objective: f64,
}

pub fn parse_net_csv(text: &str) -> Result<Vec<NetRow>> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| CliError::Data("net snapshot file is empty".into()))?;
    let columns: Vec<&str> = header.split(',').collect();
    let n = columns.len();
    if n < 5 || columns[..3] != ["point_id", "row", "col"] || columns[n - 1] != "objective" {
        return Err(CliError::Data(format!("net snapshot file has an unexpected header: `{header}`")));
    }
    let dim = n - 4;
    if header != net_header(dim) {
        return Err(CliError::Data(format!("net snapshot file has an unexpected header: `{header}`")));
    }
    lines
        .enumerate()
        .filter(|(_, l)| !l.is_empty())
        .map(|(i, line)| {
            let bad = || CliError::Data(format!("net snapshot row {}: `{line}`", i + 1));
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != n {
                return Err(bad());
            }
            let int = |k: usize| f[k].parse::<usize>().map_err(|_| bad());
            let position = f[3..3 + dim]
                .iter()
                .map(|v| v.parse::<f64>().map_err(|_| bad()))
                .collect::<Result<Vec<_>>>()?;
            Ok(NetRow {
                id: int(0)?,
                row: int(1)?,
                col: int(2)?,
                position,
                objective: f[n - 1].parse().map_err(|_| bad())?,
            })
        })
        .collect()
}

/// Contents of a results file. Only `algorithm`, `problem`, `dimension`
/// and `final_errors` are needed by `compare`, so files produced by other
/// tools may omit the rest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultsFile {
    pub algorithm: String,
    pub problem: String,
    pub dimension: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lower: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub upper: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fes_max: Option<u64>,
    #[serde(default)]
    pub trials: usize,
    #[serde(default)]
    pub seed_base: u64,
    #[serde(default)]
    pub seeds: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<SnoConfig>,
    pub final_errors: Vec<f64>,
    #[serde(default)]
    pub best_objectives: Vec<f64>,
    #[serde(default)]
    pub evaluations: Vec<u64>,
    #[serde(default)]
    pub stop_reasons: Vec<Stop>,
}

impl ResultsFile {
    /// Function key used to line results up across algorithms.
    pub fn function_key(&self) -> String {
        format!("{}_{}", self.problem, self.dimension)
    }

    pub fn from_records(
        algorithm: &str,
        lower: &[f64],
        upper: &[f64],
        seed_base: u64,
        seeds: Vec<u64>,
        config: &SnoConfig,
        records: &[RunRecord],
    ) -> Self {
        let first = &records[0];
        // per-trial seed lives in `seeds`; echo the base in the config
        let config = SnoConfig {
            seed: seed_base,
            ..config.clone()
        };
        ResultsFile {
            algorithm: algorithm.to_string(),
            problem: first.problem.clone(),
            dimension: first.dimension,
            lower: Some(lower.to_vec()),
            upper: Some(upper.to_vec()),
            fes_max: Some(config.fes_max),
            trials: records.len(),
            seed_base,
            seeds,
            config: Some(config),
            final_errors: records.iter().map(|r| r.final_error).collect(),
            best_objectives: records.iter().map(|r| r.best_objective).collect(),
            evaluations: records.iter().map(|r| r.fes).collect(),
            stop_reasons: records.iter().map(|r| r.stop).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("results serialize");
        s.push('\n');
        s
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
    }
}
