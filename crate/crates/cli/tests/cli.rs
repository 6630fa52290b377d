use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn sno(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sno")).args(args).output().expect("binary runs")
}

fn files_in(dir: &Path) -> Vec<String> {
    let mut names: Vec<String> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    names
}

fn run_ackley(out: &Path) -> Output {
    sno(&[
        "run",
        "--problem",
        "ackley",
        "--dim",
        "2",
        "--trials",
        "3",
        "--fes-max",
        "4000",
        "--snapshots",
        "400,800,4000",
        "--out",
        out.to_str().unwrap(),
    ])
}

#[test]
fn run_writes_expected_files() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let o = run_ackley(&out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let names = files_in(&out);
    let count = |prefix: &str| names.iter().filter(|n| n.starts_with(prefix)).count();
    assert_eq!(count("convergence_ackley_2_"), 3);
    assert_eq!(count("net_ackley_2_"), 9);
    assert_eq!(count("results_ackley_2.json"), 1);
    assert_eq!(names.len(), 13);
    for t in 0..3 {
        for c in [400, 800, 4000] {
            assert!(names.contains(&format!("net_ackley_2_{t}_{c}.csv")));
        }
    }

    let net = fs::read_to_string(out.join("net_ackley_2_1_800.csv")).unwrap();
    let mut lines = net.lines();
    assert_eq!(lines.next(), Some("point_id,row,col,x0,x1,objective"));
    assert_eq!(lines.count(), 81);

    let conv = fs::read_to_string(out.join("convergence_ackley_2_0.csv")).unwrap();
    assert!(conv.starts_with("fes,best_error,n_s,n_x,diversity,xpl_pct,xpt_pct\n"));

    let results: Value = serde_json::from_str(&fs::read_to_string(out.join("results_ackley_2.json")).unwrap()).unwrap();
    assert_eq!(results["trials"], 3);
    assert_eq!(results["seeds"], serde_json::json!([0, 1, 2]));
    assert_eq!(results["fes_max"], 4000);
    assert_eq!(results["final_errors"].as_array().unwrap().len(), 3);
    assert_eq!(results["config"]["fes_max"], 4000);
    assert_eq!(results["config"]["snapshots"], serde_json::json!([400, 800, 4000]));
}

#[test]
fn reruns_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    assert!(run_ackley(&a).status.success());
    assert!(run_ackley(&b).status.success());
    let names = files_in(&a);
    assert_eq!(names, files_in(&b));
    for n in names {
        assert_eq!(fs::read(a.join(&n)).unwrap(), fs::read(b.join(&n)).unwrap(), "{n}");
    }
}

#[test]
fn results_echo_reproduces_a_trial() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    assert!(run_ackley(&out).status.success());
    let text = fs::read_to_string(out.join("results_ackley_2.json")).unwrap();
    let results: sno_cli::formats::ResultsFile = serde_json::from_str(&text).unwrap();
    let problem = sno::Problem::by_name(&results.problem, results.dimension).unwrap();
    let config = sno::SnoConfig {
        seed: results.seeds[2],
        ..results.config.unwrap()
    };
    let record = sno::run(&config, &problem).unwrap();
    assert_eq!(record.final_error, results.final_errors[2]);
    let conv = fs::read_to_string(out.join("convergence_ackley_2_2.csv")).unwrap();
    assert_eq!(sno_cli::formats::convergence_csv(&record.samples), conv);
}

#[test]
fn dimension_ten_defaults_to_200k() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let cfg = tmp.path().join("short.cfg");
    // keep the test fast: stop as soon as the error is below 1e3
    fs::write(&cfg, "error_threshold = 1000\n").unwrap();
    let o = sno(&[
        "run",
        "--problem",
        "sphere",
        "--dim",
        "10",
        "--trials",
        "1",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let results: Value = serde_json::from_str(&fs::read_to_string(out.join("results_sphere_10.json")).unwrap()).unwrap();
    assert_eq!(results["fes_max"], 200_000);
    assert_eq!(results["config"]["error_threshold"], 1000.0);
}

#[test]
fn usage_errors_exit_1() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let out_s = out.to_str().unwrap();
    for args in [
        vec!["run", "--problem", "nope", "--dim", "2", "--out", out_s],
        vec!["run", "--problem", "sphere", "--dim", "2", "--fes-max", "10", "--out", out_s],
        vec!["run", "--problem", "sphere", "--dim", "2", "--trials", "0", "--out", out_s],
        vec!["run", "--dim", "2"],
        vec!["frobnicate"],
        vec!["snapshot-plotdata", ""],
    ] {
        let o = sno(&args);
        assert_eq!(o.status.code(), Some(1), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
    // nothing left behind by the failed runs
    assert!(!out.exists());
    assert_eq!(sno(&["--help"]).status.code(), Some(0));
}

fn write_results(dir: &Path, algorithm: &str, function: &str, errors: &[f64]) {
    fs::create_dir_all(dir).unwrap();
    let body = serde_json::json!({
        "algorithm": algorithm,
        "problem": function,
        "dimension": 10,
        "final_errors": errors,
    });
    fs::write(dir.join(format!("results_{function}_10.json")), body.to_string()).unwrap();
}

#[test]
fn compare_dominating_directory() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b, out) = (tmp.path().join("a"), tmp.path().join("b"), tmp.path().join("report"));
    let low: Vec<f64> = (0..10).map(|i| i as f64 * 1e-3).collect();
    let high: Vec<f64> = (0..10).map(|i| 1.0 + i as f64).collect();
    for f in ["sphere", "rastrigin", "ackley"] {
        write_results(&a, "A", f, &low);
        write_results(&b, "B", f, &high);
    }
    let o = sno(&["compare", a.to_str().unwrap(), b.to_str().unwrap(), "--mode", "avg", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(String::from_utf8_lossy(&o.stdout), "A vs B: Better 3, NoDifference 0, Worse 0\n");
    assert_eq!(
        fs::read_to_string(out.join("ranks.csv")).unwrap(),
        "algorithm,mode,mean_rank\nA,avg,1\nB,avg,2\n"
    );
    let wilcoxon = fs::read_to_string(out.join("wilcoxon.csv")).unwrap();
    assert_eq!(wilcoxon.lines().next(), Some("algorithm_pair,function,classification"));
    assert_eq!(wilcoxon.lines().filter(|l| l.ends_with(",Better")).count(), 3);
}

#[test]
fn compare_directory_with_itself() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("run");
    assert!(run_ackley(&out).status.success());
    // three trials are too few for a rank-sum verdict; add a five-trial cell
    write_results(&out, "SNO", "sphere", &[1.0, 2.0, 3.0, 4.0, 5.0]);
    fs::remove_file(out.join("results_ackley_2.json")).unwrap();
    let report = tmp.path().join("report");
    let d = out.to_str().unwrap();
    let o = sno(&["compare", d, d, "--out", report.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stdout).contains("Better 0, NoDifference 1, Worse 0"));
    let ranks = fs::read_to_string(report.join("ranks.csv")).unwrap();
    assert_eq!(ranks.lines().filter(|l| l.ends_with(",1.5")).count(), 4);
}

#[test]
fn compare_three_algorithm_fixture() {
    // two functions, two trials each; ranks worked out by hand
    //   f trial 0: A 1, B 2, C 3      f trial 1: A 3, B 1, C 2
    //   g trial 0: A 1, B 1, C 2      g trial 1: A 2, B 3, C 1
    let tmp = tempfile::tempdir().unwrap();
    let dirs: Vec<_> = ["a", "b", "c"].iter().map(|n| tmp.path().join(n)).collect();
    let data = [
        ("A", [1.0, 3.0], [1.0, 2.0]),
        ("B", [2.0, 1.0], [1.0, 3.0]),
        ("C", [3.0, 2.0], [2.0, 1.0]),
    ];
    for (dir, (name, f, g)) in dirs.iter().zip(&data) {
        write_results(dir, name, "f", f);
        write_results(dir, name, "g", g);
    }
    let algos: Vec<_> = dirs.iter().map(|d| sno_cli::compare::load_dir(d).unwrap()).collect();
    let tables: Vec<sno::ResultTable> = algos
        .iter()
        .map(|a| sno::ResultTable {
            algorithm: a.label.clone(),
            functions: a.functions.iter().map(|(k, (_, v))| (k.clone(), v.clone())).collect(),
        })
        .collect();
    // A: 1 + 3 + 1.5 + 2 = 7.5; B: 2 + 1 + 1.5 + 3 = 7.5; C: 3 + 2 + 3 + 1 = 9
    assert_eq!(
        sno::average_ranks(&tables, sno::RankMode::Avg).unwrap(),
        vec![7.5 / 4.0, 7.5 / 4.0, 9.0 / 4.0]
    );
    // best trials: f: A 1, B 1, C 2; g: A 1, B 1, C 1
    assert_eq!(
        sno::average_ranks(&tables, sno::RankMode::Best).unwrap(),
        vec![(1.5 + 2.0) / 2.0, (1.5 + 2.0) / 2.0, (3.0 + 2.0) / 2.0]
    );
}

#[test]
fn compare_rejects_mismatched_trials() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    write_results(&a, "A", "sphere", &[1.0; 5]);
    write_results(&b, "B", "sphere", &[1.0; 6]);
    let o = sno(&["compare", a.to_str().unwrap(), b.to_str().unwrap(), "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("a/results_sphere_10.json") && err.contains("b/results_sphere_10.json"), "{err}");
}

#[test]
fn plotdata_from_snapshot() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    assert!(run_ackley(&out).status.success());
    let o = sno(&["snapshot-plotdata", out.join("net_ackley_2_0_400.csv").to_str().unwrap()]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows.len(), 81);
    assert!(rows.iter().all(|r| r.split_whitespace().count() == 3));

    let missing = sno(&["snapshot-plotdata", tmp.path().join("absent.csv").to_str().unwrap()]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn plotdata_mean_objective_drops_over_run() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    assert!(run_ackley(&out).status.success());
    let mean_f = |name: &str| {
        let o = sno(&["snapshot-plotdata", out.join(name).to_str().unwrap()]);
        let text = String::from_utf8(o.stdout).unwrap();
        let f: Vec<f64> = text
            .lines()
            .filter(|l| !l.starts_with('#'))
            .map(|l| l.split_whitespace().last().unwrap().parse().unwrap())
            .collect();
        f.iter().sum::<f64>() / f.len() as f64
    };
    let drops = (0..3)
        .filter(|t| mean_f(&format!("net_ackley_2_{t}_4000.csv")) < mean_f(&format!("net_ackley_2_{t}_400.csv")))
        .count();
    assert_eq!(drops, 3);
}
