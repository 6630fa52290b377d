//! Bound-constrained problems, the bundled test functions and
//! budget-tracked evaluation.

use std::f64::consts::{E, PI};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default error threshold below which a run is considered solved.
pub const DEFAULT_ERROR_THRESHOLD: f64 = 1e-8;

/// The classic single-objective test functions shipped with the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestFunction {
    Ackley,
    BentCigar,
    Griewank,
    Rastrigin,
    Rosenbrock,
    Sphere,
}

impl TestFunction {
    pub const ALL: [TestFunction; 6] = [
        TestFunction::Ackley,
        TestFunction::BentCigar,
        TestFunction::Griewank,
        TestFunction::Rastrigin,
        TestFunction::Rosenbrock,
        TestFunction::Sphere,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TestFunction::Ackley => "ackley",
            TestFunction::BentCigar => "bent_cigar",
            TestFunction::Griewank => "griewank",
            TestFunction::Rastrigin => "rastrigin",
            TestFunction::Rosenbrock => "rosenbrock",
            TestFunction::Sphere => "sphere",
        }
    }

    /// Default symmetric search range `[-r, r]` per coordinate.
    pub fn default_range(self) -> f64 {
        match self {
            TestFunction::Ackley => 30.0,
            _ => 100.0,
        }
    }

    /// A known global minimizer in dimension `dim`.
    pub fn optimizer(self, dim: usize) -> Vec<f64> {
        match self {
            TestFunction::Rosenbrock => vec![1.0; dim],
            _ => vec![0.0; dim],
        }
    }

    pub fn eval(self, x: &[f64]) -> f64 {
        match self {
            TestFunction::Ackley => ackley(x),
            TestFunction::BentCigar => bent_cigar(x),
            TestFunction::Griewank => griewank(x),
            TestFunction::Rastrigin => rastrigin(x),
            TestFunction::Rosenbrock => rosenbrock(x),
            TestFunction::Sphere => sphere(x),
        }
    }
}

impl fmt::Display for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TestFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('-', "_");
        TestFunction::ALL
            .into_iter()
            .find(|f| f.name() == key)
            .ok_or_else(|| Error::UnknownProblem(s.to_string()))
    }
}

pub fn ackley(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let sq = x.iter().map(|v| v * v).sum::<f64>() / n;
    let cos = x.iter().map(|v| (2.0 * PI * v).cos()).sum::<f64>() / n;
    -20.0 * (-0.2 * sq.sqrt()).exp() - cos.exp() + 20.0 + E
}

pub fn bent_cigar(x: &[f64]) -> f64 {
    match x.split_first() {
        Some((first, rest)) => first * first + 1e6 * rest.iter().map(|v| v * v).sum::<f64>(),
        None => 0.0,
    }
}

pub fn griewank(x: &[f64]) -> f64 {
    let sum = x.iter().map(|v| v * v).sum::<f64>() / 4000.0;
    let prod = x
        .iter()
        .enumerate()
        .map(|(i, v)| (v / ((i + 1) as f64).sqrt()).cos())
        .product::<f64>();
    1.0 + sum - prod
}

pub fn rastrigin(x: &[f64]) -> f64 {
    10.0 * x.len() as f64
        + x.iter()
            .map(|v| v * v - 10.0 * (2.0 * PI * v).cos())
            .sum::<f64>()
}

pub fn rosenbrock(x: &[f64]) -> f64 {
    x.windows(2)
        .map(|w| 100.0 * (w[1] - w[0] * w[0]).powi(2) + (1.0 - w[0]).powi(2))
        .sum()
}

pub fn sphere(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

type CustomFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Objective {
    Builtin(TestFunction),
    Custom(CustomFn),
}

/// A box-constrained minimization problem.
///
/// Immutable once built; share it freely between concurrent runs.
#[derive(Clone)]
pub struct Problem {
    name: String,
    lower: Vec<f64>,
    upper: Vec<f64>,
    optimum_value: f64,
    objective: Objective,
}

impl fmt::Debug for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Problem")
            .field("name", &self.name)
            .field("dimension", &self.dimension())
            .field("lower", &self.lower)
            .field("upper", &self.upper)
            .field("optimum_value", &self.optimum_value)
            .finish()
    }
}

impl Problem {
    /// A bundled test function on its default box.
    pub fn builtin(function: TestFunction, dim: usize) -> Result<Self> {
        let r = function.default_range();
        Self::builtin_with_bounds(function, vec![-r; dim], vec![r; dim])
    }

    pub fn builtin_with_bounds(function: TestFunction, lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        check_bounds(&lower, &upper)?;
        Ok(Problem {
            name: function.name().to_string(),
            lower,
            upper,
            optimum_value: 0.0,
            objective: Objective::Builtin(function),
        })
    }

    /// Looks a bundled function up by name, e.g. `"rastrigin"`.
    pub fn by_name(name: &str, dim: usize) -> Result<Self> {
        Self::builtin(name.parse()?, dim)
    }

    /// A user-supplied objective. `optimum_value` is the reference used for
    /// error reporting.
    pub fn custom<F>(name: impl Into<String>, lower: Vec<f64>, upper: Vec<f64>, optimum_value: f64, f: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        check_bounds(&lower, &upper)?;
        if !optimum_value.is_finite() {
            return Err(Error::InvalidConfig("optimum value must be finite".into()));
        }
        Ok(Problem {
            name: name.into(),
            lower,
            upper,
            optimum_value,
            objective: Objective::Custom(Arc::new(f)),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dimension(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn optimum_value(&self) -> f64 {
        self.optimum_value
    }

    pub fn test_function(&self) -> Option<TestFunction> {
        match self.objective {
            Objective::Builtin(f) => Some(f),
            Objective::Custom(_) => None,
        }
    }

    /// Raw objective value, bypassing any budget. Use [`Evaluator`] inside
    /// optimizers.
    pub fn value(&self, x: &[f64]) -> f64 {
        match &self.objective {
            Objective::Builtin(f) => f.eval(x),
            Objective::Custom(f) => f(x),
        }
    }

    pub fn error(&self, objective: f64) -> f64 {
        objective - self.optimum_value
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dimension()
            && x.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (lo, hi))| *lo <= *v && *v <= *hi)
    }
}

fn check_bounds(lower: &[f64], upper: &[f64]) -> Result<()> {
    if lower.is_empty() {
        return Err(Error::InvalidBounds("dimension must be positive".into()));
    }
    if lower.len() != upper.len() {
        return Err(Error::InvalidBounds(format!(
            "{} lower bounds but {} upper bounds",
            lower.len(),
            upper.len()
        )));
    }
    for (i, (lo, hi)) in lower.iter().zip(upper).enumerate() {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidBounds(format!("dimension {i}: [{lo}, {hi}]")));
        }
    }
    Ok(())
}

/// Clamps every coordinate into the problem box.
pub fn repair_bounds(point: &mut [f64], problem: &Problem) {
    for ((v, lo), hi) in point.iter_mut().zip(&problem.lower).zip(&problem.upper) {
        *v = v.clamp(*lo, *hi);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvaluationBudget {
    pub fes: u64,
    pub fes_max: u64,
    pub error_threshold: f64,
}

impl EvaluationBudget {
    pub fn new(fes_max: u64) -> Self {
        EvaluationBudget {
            fes: 0,
            fes_max,
            error_threshold: DEFAULT_ERROR_THRESHOLD,
        }
    }

    pub fn exhausted(&self) -> bool {
        self.fes >= self.fes_max
    }

    pub fn remaining(&self) -> u64 {
        self.fes_max.saturating_sub(self.fes)
    }
}

/// Fraction of the budget consumed so far, `fes / fes_max`.
pub fn budget_delta(budget: &EvaluationBudget) -> f64 {
    (budget.fes as f64 / budget.fes_max as f64).min(1.0)
}

/// Why evaluation stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stop {
    BudgetExhausted,
    TargetReached,
    IterationLimit,
}

/// Which operator asked for an evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Init,
    RegionSearch,
    PointSearch,
    NetAdjust,
    PopulationAdjust,
}

/// Per-phase evaluation counts, kept independently of `fes`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseTally {
    pub init: u64,
    pub region_search: u64,
    pub point_search: u64,
    pub net_adjust: u64,
    pub population_adjust: u64,
}

impl PhaseTally {
    fn bump(&mut self, phase: Phase) {
        match phase {
            Phase::Init => self.init += 1,
            Phase::RegionSearch => self.region_search += 1,
            Phase::PointSearch => self.point_search += 1,
            Phase::NetAdjust => self.net_adjust += 1,
            Phase::PopulationAdjust => self.population_adjust += 1,
        }
    }

    pub fn total(&self) -> u64 {
        self.init + self.region_search + self.point_search + self.net_adjust + self.population_adjust
    }
}

/// Counts evaluations and tracks the best point ever evaluated.
#[derive(Debug, Clone)]
pub struct Evaluator {
    budget: EvaluationBudget,
    tally: PhaseTally,
    best: Option<(Vec<f64>, f64)>,
    optimum_value: f64,
}

impl Evaluator {
    pub fn new(budget: EvaluationBudget, problem: &Problem) -> Self {
        Evaluator {
            budget,
            tally: PhaseTally::default(),
            best: None,
            optimum_value: problem.optimum_value(),
        }
    }

    pub fn budget(&self) -> &EvaluationBudget {
        &self.budget
    }

    pub fn fes(&self) -> u64 {
        self.budget.fes
    }

    pub fn delta(&self) -> f64 {
        budget_delta(&self.budget)
    }

    pub fn tally(&self) -> &PhaseTally {
        &self.tally
    }

    pub fn best(&self) -> Option<(&[f64], f64)> {
        self.best.as_ref().map(|(x, f)| (x.as_slice(), *f))
    }

    pub fn best_error(&self) -> f64 {
        self.best
            .as_ref()
            .map_or(f64::INFINITY, |(_, f)| f - self.optimum_value)
    }

    /// `Some(reason)` once no further evaluation is allowed.
    pub fn stop_reason(&self) -> Option<Stop> {
        if self.budget.exhausted() {
            Some(Stop::BudgetExhausted)
        } else if self.best_error() < self.budget.error_threshold {
            Some(Stop::TargetReached)
        } else {
            None
        }
    }

    /// Evaluates `point`, charging one evaluation to `phase`.
    ///
    /// Refuses (without evaluating) once the budget is spent or the error
    /// target has been reached.
    pub fn evaluate(&mut self, problem: &Problem, point: &[f64], phase: Phase) -> std::result::Result<f64, Stop> {
        if let Some(stop) = self.stop_reason() {
            return Err(stop);
        }
        self.evaluate_within_budget(problem, point, phase)
    }

    /// Like [`Evaluator::evaluate`] but only the budget can refuse; used
    /// while populations are being filled.
    pub fn evaluate_within_budget(&mut self, problem: &Problem, point: &[f64], phase: Phase) -> std::result::Result<f64, Stop> {
        if self.budget.exhausted() {
            return Err(Stop::BudgetExhausted);
        }
        let value = problem.value(point);
        self.budget.fes += 1;
        self.tally.bump(phase);
        let improved = match &self.best {
            Some((_, best)) => value < *best,
            None => true,
        };
        if improved {
            self.best = Some((point.to_vec(), value));
        }
        Ok(value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_optima() {
        for f in TestFunction::ALL {
            for d in [1, 2, 10, 30] {
                let x = f.optimizer(d);
                assert!(f.eval(&x).abs() < 1e-12, "{f} d={d} -> {}", f.eval(&x));
            }
        }
    }

    #[test]
    fn names_round_trip() {
        for f in TestFunction::ALL {
            assert_eq!(f.name().parse::<TestFunction>().unwrap(), f);
        }
        assert_eq!("Bent-Cigar".parse::<TestFunction>().unwrap(), TestFunction::BentCigar);
        assert!(matches!("schwefel".parse::<TestFunction>(), Err(Error::UnknownProblem(_))));
    }

    #[test]
    fn spot_values() {
        // 20 + 2 * (1 - 10)
        assert!((rastrigin(&[1.0, 1.0]) - 2.0).abs() < 1e-12);
        assert!((rosenbrock(&[0.0, 0.0]) - 1.0).abs() < 1e-12);
        assert_eq!(bent_cigar(&[1.0, 1.0]), 1.0 + 1e6);
        assert_eq!(sphere(&[3.0, 4.0]), 25.0);
    }

    #[test]
    fn default_ranges() {
        let ackley = Problem::by_name("ackley", 3).unwrap();
        assert_eq!(ackley.lower(), &[-30.0; 3]);
        let sphere = Problem::by_name("sphere", 2).unwrap();
        assert_eq!(sphere.upper(), &[100.0; 2]);
    }

    #[test]
    fn repair_clamps() {
        let p = Problem::by_name("ackley", 3).unwrap();
        let mut x = vec![5.0, 35.0, -40.0];
        repair_bounds(&mut x, &p);
        assert_eq!(x, vec![5.0, 30.0, -30.0]);
        let again = x.clone();
        repair_bounds(&mut x, &p);
        assert_eq!(x, again);
    }

    #[test]
    fn bad_bounds() {
        assert!(Problem::builtin_with_bounds(TestFunction::Sphere, vec![1.0], vec![1.0]).is_err());
        assert!(Problem::builtin_with_bounds(TestFunction::Sphere, vec![0.0, 0.0], vec![1.0]).is_err());
        assert!(Problem::builtin(TestFunction::Sphere, 0).is_err());
    }

    #[test]
    fn delta_ratio() {
        let mut b = EvaluationBudget::new(200_000);
        assert_eq!(budget_delta(&b), 0.0);
        b.fes = 100_000;
        assert_eq!(budget_delta(&b), 0.5);
        b.fes = 200_000;
        assert_eq!(budget_delta(&b), 1.0);
    }

    #[test]
    fn evaluator_counts_and_stops() {
        let p = Problem::by_name("sphere", 2).unwrap();
        let mut ev = Evaluator::new(EvaluationBudget::new(3), &p);
        assert_eq!(ev.evaluate(&p, &[1.0, 2.0], Phase::Init), Ok(5.0));
        assert_eq!(ev.fes(), 1);
        ev.evaluate(&p, &[1.0, 0.0], Phase::RegionSearch).unwrap();
        ev.evaluate(&p, &[3.0, 0.0], Phase::PointSearch).unwrap();
        assert_eq!(ev.evaluate(&p, &[0.0, 0.0], Phase::PointSearch), Err(Stop::BudgetExhausted));
        assert_eq!(ev.fes(), 3);
        assert_eq!(ev.tally().total(), 3);
        assert_eq!(ev.best().unwrap().1, 1.0);
    }

    #[test]
    fn evaluator_stops_at_target() {
        let p = Problem::by_name("sphere", 2).unwrap();
        let mut ev = Evaluator::new(EvaluationBudget::new(100), &p);
        ev.evaluate(&p, &[0.0, 0.0], Phase::Init).unwrap();
        assert_eq!(ev.stop_reason(), Some(Stop::TargetReached));
        assert_eq!(ev.evaluate(&p, &[1.0, 0.0], Phase::Init), Err(Stop::TargetReached));
    }
}
