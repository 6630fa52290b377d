//! The `compare` subcommand: mean ranks and pairwise Wilcoxon verdicts over
//! result directories.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use sno::stats::{average_ranks, wilcoxon_classify, Classification, RankMode, ResultTable};

use crate::error::{CliError, Result};
use crate::formats::ResultsFile;

pub const DEFAULT_SIGNIFICANCE: f64 = 0.05;

/// Results of one algorithm, loaded from one directory.
#[derive(Debug, Clone)]
pub struct AlgorithmResults {
    pub dir: PathBuf,
    pub label: String,
    /// Function key to (source file, final errors).
    pub functions: BTreeMap<String, (PathBuf, Vec<f64>)>,
}

impl AlgorithmResults {
    fn table(&self) -> ResultTable {
        ResultTable {
            algorithm: self.label.clone(),
            functions: self
                .functions
                .iter()
                .map(|(k, (_, errors))| (k.clone(), errors.clone()))
                .collect(),
        }
    }
}

pub fn load_dir(dir: &Path) -> Result<AlgorithmResults> {
    let entries = fs::read_dir(dir).map_err(|e| CliError::io(dir, e))?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.file_name()
                .and_then(|n| n.to_str())
                .is_some_and(|n| n.starts_with("results_") && n.ends_with(".json"))
        })
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(CliError::Data(format!("{}: no results_*.json files", dir.display())));
    }

    let mut label: Option<String> = None;
    let mut functions: BTreeMap<String, (PathBuf, Vec<f64>)> = BTreeMap::new();
    for path in paths {
        let file = ResultsFile::read(&path)?;
        if file.final_errors.is_empty() {
            return Err(CliError::Data(format!("{}: no final errors", path.display())));
        }
        match &label {
            None => label = Some(file.algorithm.clone()),
            Some(l) if *l != file.algorithm => {
                return Err(CliError::Data(format!(
                    "{}: algorithm `{}` differs from `{l}` elsewhere in the directory",
                    path.display(),
                    file.algorithm
                )))
            }
            Some(_) => {}
        }
        let key = file.function_key();
        if let Some((other, _)) = functions.get(&key) {
            return Err(CliError::Data(format!(
                "{} and {} both hold results for `{key}`",
                other.display(),
                path.display()
            )));
        }
        functions.insert(key, (path, file.final_errors));
    }
    Ok(AlgorithmResults {
        dir: dir.to_path_buf(),
        label: label.unwrap_or_default(),
        functions,
    })
}

/// Checks that every algorithm covers the same functions with the same
/// trial counts, naming the files involved otherwise.
pub fn check_consistent(algorithms: &[AlgorithmResults]) -> Result<()> {
    let reference = &algorithms[0];
    for other in &algorithms[1..] {
        if !other.functions.keys().eq(reference.functions.keys()) {
            let only = |a: &AlgorithmResults, b: &AlgorithmResults| -> Vec<String> {
                a.functions.keys().filter(|k| !b.functions.contains_key(*k)).cloned().collect()
            };
            return Err(CliError::Data(format!(
                "{} and {} hold different function sets (only in first: [{}]; only in second: [{}])",
                reference.dir.display(),
                other.dir.display(),
                only(reference, other).join(", "),
                only(other, reference).join(", ")
            )));
        }
        for (key, (path, errors)) in &reference.functions {
            let (other_path, other_errors) = &other.functions[key];
            if errors.len() != other_errors.len() {
                return Err(CliError::Data(format!(
                    "mismatched trial counts for `{key}`: {} has {}, {} has {}",
                    path.display(),
                    errors.len(),
                    other_path.display(),
                    other_errors.len()
                )));
            }
        }
    }
    Ok(())
}

/// Gives every algorithm a distinct label, falling back to the directory
/// path when two directories report the same algorithm name.
fn disambiguate(algorithms: &mut [AlgorithmResults]) {
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for a in algorithms.iter() {
        *counts.entry(a.label.clone()).or_default() += 1;
    }
    for a in algorithms.iter_mut() {
        if a.label.is_empty() || counts[&a.label] > 1 {
            a.label = format!("{} ({})", a.label, a.dir.display()).trim().to_string();
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairSummary {
    pub pair: String,
    pub better: usize,
    pub no_difference: usize,
    pub worse: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub ranks_csv: String,
    pub wilcoxon_csv: String,
    pub summaries: Vec<PairSummary>,
}

/// Compares the first algorithm against each of the others. `mode` of
/// `None` reports both ranking modes.
pub fn compare(algorithms: &mut [AlgorithmResults], mode: Option<RankMode>, significance: f64) -> Result<Report> {
    if algorithms.len() < 2 {
        return Err(CliError::Usage("compare needs at least two result directories".into()));
    }
    if !(significance > 0.0 && significance < 1.0) {
        return Err(CliError::Usage(format!("--alpha must lie in (0, 1), got {significance}")));
    }
    check_consistent(algorithms)?;
    disambiguate(algorithms);
    let tables: Vec<ResultTable> = algorithms.iter().map(AlgorithmResults::table).collect();

    let mut ranks_csv = String::from("algorithm,mode,mean_rank\n");
    let modes = match mode {
        Some(m) => vec![m],
        None => vec![RankMode::Avg, RankMode::Best],
    };
    for m in modes {
        let ranks = average_ranks(&tables, m)?;
        for (t, r) in tables.iter().zip(ranks) {
            let _ = writeln!(ranks_csv, "{},{m},{r}", csv_field(&t.algorithm));
        }
    }

    let mut wilcoxon_csv = String::from("algorithm_pair,function,classification\n");
    let mut summaries = Vec::new();
    let reference = &tables[0];
    for other in &tables[1..] {
        let pair = format!("{} vs {}", reference.algorithm, other.algorithm);
        let mut summary = PairSummary {
            pair: pair.clone(),
            better: 0,
            no_difference: 0,
            worse: 0,
        };
        for (function, a) in &reference.functions {
            let verdict = wilcoxon_classify(a, &other.functions[function], significance)
                .map_err(|e| CliError::Data(format!("`{function}`: {e}")))?;
            match verdict {
                Classification::Better => summary.better += 1,
                Classification::NoDifference => summary.no_difference += 1,
                Classification::Worse => summary.worse += 1,
            }
            let _ = writeln!(wilcoxon_csv, "{},{function},{verdict}", csv_field(&pair));
        }
        summaries.push(summary);
    }
    Ok(Report {
        ranks_csv,
        wilcoxon_csv,
        summaries,
    })
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Loads the directories, writes `ranks.csv` and `wilcoxon.csv` into `out`
/// and returns the report.
pub fn cmd_compare(dirs: &[PathBuf], out: &Path, mode: Option<RankMode>, significance: f64) -> Result<Report> {
    let mut algorithms = dirs.iter().map(|d| load_dir(d)).collect::<Result<Vec<_>>>()?;
    let report = compare(&mut algorithms, mode, significance)?;
    fs::create_dir_all(out).map_err(|e| CliError::io(out, e))?;
    for (name, body) in [("ranks.csv", &report.ranks_csv), ("wilcoxon.csv", &report.wilcoxon_csv)] {
        let path = out.join(name);
        fs::write(&path, body).map_err(|e| CliError::io(&path, e))?;
    }
    Ok(report)
}

pub fn summary_text(report: &Report) -> String {
    let mut s = String::new();
    for p in &report.summaries {
        let _ = writeln!(
            s,
            "{}: Better {}, NoDifference {}, Worse {}",
            p.pair, p.better, p.no_difference, p.worse
        );
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn algo(label: &str, dir: &str, functions: &[(&str, Vec<f64>)]) -> AlgorithmResults {
        AlgorithmResults {
            dir: dir.into(),
            label: label.into(),
            functions: functions
                .iter()
                .map(|(k, v)| (k.to_string(), (PathBuf::from(format!("{dir}/results_{k}.json")), v.clone())))
                .collect(),
        }
    }

    #[test]
    fn dominating_pair() {
        let low: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let high: Vec<f64> = (0..10).map(|i| 100.0 + i as f64).collect();
        let mut algos = vec![
            algo("A", "a", &[("f_2", low.clone()), ("g_2", low.clone())]),
            algo("B", "b", &[("f_2", high.clone()), ("g_2", high)]),
        ];
        let r = compare(&mut algos, Some(RankMode::Avg), 0.05).unwrap();
        assert_eq!(r.ranks_csv, "algorithm,mode,mean_rank\nA,avg,1\nB,avg,2\n");
        assert_eq!(
            r.wilcoxon_csv,
            "algorithm_pair,function,classification\nA vs B,f_2,Better\nA vs B,g_2,Better\n"
        );
        assert_eq!(summary_text(&r), "A vs B: Better 2, NoDifference 0, Worse 0\n");
    }

    #[test]
    fn duplicate_labels_use_directory() {
        let v: Vec<f64> = (0..5).map(f64::from).collect();
        let mut algos = vec![algo("SNO", "x", &[("f_2", v.clone())]), algo("SNO", "y", &[("f_2", v)])];
        let r = compare(&mut algos, None, 0.05).unwrap();
        assert!(r.ranks_csv.contains("SNO (x),avg,1.5\n"));
        assert!(r.ranks_csv.contains("SNO (y),best,1.5\n"));
        assert_eq!(r.summaries[0].no_difference, 1);
    }

    #[test]
    fn mismatches_name_files() {
        let mut algos = vec![
            algo("A", "a", &[("f_2", vec![1.0; 5])]),
            algo("B", "b", &[("f_2", vec![1.0; 6])]),
        ];
        let err = compare(&mut algos, None, 0.05).unwrap_err().to_string();
        assert!(err.contains("a/results_f_2.json") && err.contains("b/results_f_2.json"), "{err}");

        let mut algos = vec![algo("A", "a", &[("f_2", vec![1.0; 5])]), algo("B", "b", &[("g_2", vec![1.0; 5])])];
        assert!(matches!(compare(&mut algos, None, 0.05), Err(CliError::Data(_))));
    }

    #[test]
    fn quoting() {
        assert_eq!(csv_field("plain"), "plain");
        assert_eq!(csv_field("a,b"), "\"a,b\"");
    }
}
