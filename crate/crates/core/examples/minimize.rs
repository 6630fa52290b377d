//! Minimizes a few bundled functions and a custom objective.
//!
//! ```text
//! cargo run --release -p sno --example minimize
//! ```

use sno::{run, Problem, SnoConfig, TestFunction};

fn main() {
    for f in [TestFunction::Sphere, TestFunction::Rastrigin, TestFunction::Ackley] {
        let problem = Problem::builtin(f, 10).unwrap();
        let record = run(&SnoConfig::default().seed(1), &problem).unwrap();
        println!(
            "{:<10} error {:.3e} after {} evaluations ({:?})",
            f.name(),
            record.final_error,
            record.fes,
            record.stop
        );
    }

    // shifted quadratic with its minimum at (1, 2, 3)
    let shifted = Problem::custom("shifted", vec![-5.0; 3], vec![5.0; 3], 0.0, |x| {
        x.iter().zip([1.0, 2.0, 3.0]).map(|(a, b)| (a - b) * (a - b)).sum()
    })
    .unwrap();
    let record = run(&SnoConfig::default().fes_max(30_000), &shifted).unwrap();
    println!("shifted    best at {:.4?}", record.best_position);
}
