//! Space net optimization for bound-constrained continuous minimization,
//! with the metrics and statistics used to evaluate it.
//!
//! ```
//! use sno::{run, Problem, SnoConfig};
//!
//! let problem = Problem::by_name("sphere", 2).unwrap();
//! let config = SnoConfig::default().fes_max(5_000).seed(7);
//! let record = run(&config, &problem).unwrap();
//! assert!(record.fes <= 5_000);
//! ```

pub mod error;
pub mod metrics;
pub mod objective;
pub mod optimizer;
pub mod schedule;
pub mod spacenet;
pub mod stats;

pub use error::{Error, Result};
pub use metrics::{ConvergenceSample, NetSnapshot};
pub use objective::{EvaluationBudget, Evaluator, Phase, PhaseTally, Problem, Stop, TestFunction};
pub use optimizer::{run, Individual, RunRecord, Sno, SnoConfig};
pub use schedule::{lambda_adjust, RegionSchedule};
pub use spacenet::SpaceNet;
pub use stats::{average_ranks, wilcoxon_classify, Classification, RankMode, ResultTable};
