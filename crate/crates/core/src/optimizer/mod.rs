//! The space net optimizer.
//!
//! Three populations cooperate: explorers (global search, shrinking),
//! miners (local search, growing) and the elastic points of the space net,
//! which never change in number and are pulled toward every accepted
//! candidate. One iteration runs, in order:
//!
//! 1. expected values for every region,
//! 2. region search: one candidate per explorer around a reference point
//!    picked from a roulette-selected region,
//! 3. point search: one candidate per miner slot around a top-rho elastic
//!    point,
//! 4. population adjustment: drop the worst explorers, seed new miners near
//!    good elastic points.
//!
//! Every accepted candidate from steps 2 and 3 immediately adjusts the net.

mod config;
pub mod operators;

pub use config::SnoConfig;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{ConvergenceSample, MetricRecorder, NetSnapshot, SnapshotPoint};
use crate::objective::{repair_bounds, EvaluationBudget, Evaluator, Phase, PhaseTally, Problem, Stop};
use crate::schedule::{
    attracted_count, candidate_region_count, population_target, reference_branch_probability, rho_fraction,
    tournament_probability,
};
use crate::spacenet::{nearest_elastic_points, record_region_visit, top_rho_pool, ExpectedValues, SpaceNet};
use operators::*;

/// A member of the explorer or miner population. `id` is stable for the
/// life of the member, including across in-place improvements.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Individual {
    pub id: u64,
    pub position: Vec<f64>,
    pub objective: f64,
}

/// Everything a finished run reports.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunRecord {
    pub problem: String,
    pub dimension: usize,
    pub config: SnoConfig,
    pub best_position: Vec<f64>,
    pub best_objective: f64,
    pub final_error: f64,
    pub fes: u64,
    pub iterations: u64,
    pub stop: Stop,
    pub tally: PhaseTally,
    pub samples: Vec<ConvergenceSample>,
    pub snapshots: Vec<NetSnapshot>,
}

/// Control parameters drawn for one candidate.
#[derive(Debug, Clone, Copy)]
struct Controls {
    alpha: f64,
    beta: f64,
}

pub struct Sno<'a> {
    problem: &'a Problem,
    config: SnoConfig,
    rng: ChaCha8Rng,
    explorers: Vec<Individual>,
    miners: Vec<Individual>,
    net: SpaceNet,
    evaluator: Evaluator,
    recorder: MetricRecorder,
    snapshots: Vec<NetSnapshot>,
    pending_checkpoints: Vec<u64>,
    next_id: u64,
    iteration: u64,
    stop: Option<Stop>,
}

impl<'a> Sno<'a> {
    /// Validates the configuration and performs initialization: explorers,
    /// miners and elastic points are drawn uniformly in the box and
    /// evaluated.
    pub fn new(config: SnoConfig, problem: &'a Problem) -> Result<Self> {
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let budget = EvaluationBudget {
            fes: 0,
            fes_max: config.fes_max,
            error_threshold: config.error_threshold,
        };
        let mut evaluator = Evaluator::new(budget, problem);

        let sample = |rng: &mut ChaCha8Rng, evaluator: &mut Evaluator| -> Result<(Vec<f64>, f64)> {
            let x: Vec<f64> = problem
                .lower()
                .iter()
                .zip(problem.upper())
                .map(|(lo, hi)| rng.random_range(*lo..=*hi))
                .collect();
            let f = evaluator
                .evaluate_within_budget(problem, &x, Phase::Init)
                .map_err(|_| Error::InvalidConfig("budget exhausted during initialization".into()))?;
            Ok((x, f))
        };

        let mut next_id = 0;
        let mut population = |n: usize, rng: &mut ChaCha8Rng, evaluator: &mut Evaluator| -> Result<Vec<Individual>> {
            (0..n)
                .map(|_| {
                    let (position, objective) = sample(rng, evaluator)?;
                    next_id += 1;
                    Ok(Individual {
                        id: next_id - 1,
                        position,
                        objective,
                    })
                })
                .collect()
        };
        let explorers = population(config.n_s_init, &mut rng, &mut evaluator)?;
        let miners = population(config.n_x_init, &mut rng, &mut evaluator)?;
        let points = (0..config.n_p)
            .map(|_| sample(&mut rng, &mut evaluator))
            .collect::<Result<Vec<_>>>()?;
        let net = SpaceNet::new(points, config.alpha_init, config.beta_init)?;

        let mut pending_checkpoints: Vec<u64> = config
            .snapshots
            .iter()
            .copied()
            .filter(|&c| c <= config.fes_max)
            .collect();
        pending_checkpoints.sort_unstable();
        pending_checkpoints.dedup();

        let mut sno = Sno {
            problem,
            recorder: MetricRecorder::new(config.sample_cadence()),
            config,
            rng,
            explorers,
            miners,
            net,
            evaluator,
            snapshots: Vec::new(),
            pending_checkpoints,
            next_id,
            iteration: 0,
            stop: None,
        };
        sno.record_sample();
        sno.capture_due_snapshots();
        Ok(sno)
    }

    pub fn config(&self) -> &SnoConfig {
        &self.config
    }

    pub fn problem(&self) -> &Problem {
        self.problem
    }

    pub fn explorers(&self) -> &[Individual] {
        &self.explorers
    }

    pub fn miners(&self) -> &[Individual] {
        &self.miners
    }

    pub fn net(&self) -> &SpaceNet {
        &self.net
    }

    pub fn evaluator(&self) -> &Evaluator {
        &self.evaluator
    }

    pub fn iteration(&self) -> u64 {
        self.iteration
    }

    pub fn delta(&self) -> f64 {
        self.evaluator.delta()
    }

    pub fn samples(&self) -> &[ConvergenceSample] {
        self.recorder.samples()
    }

    pub fn snapshots(&self) -> &[NetSnapshot] {
        &self.snapshots
    }

    pub fn best(&self) -> (&[f64], f64) {
        self.evaluator.best().expect("initialization evaluates at least one point")
    }

    /// The reason the run stopped, if it has.
    pub fn stopped(&self) -> Option<Stop> {
        self.stop
    }

    /// Runs one full iteration. Returns `Err(stop)` once the run is over;
    /// a partially completed iteration keeps every improvement it made.
    pub fn step(&mut self) -> std::result::Result<(), Stop> {
        if let Some(stop) = self.stop {
            return Err(stop);
        }
        let pre = self
            .evaluator
            .stop_reason()
            .or_else(|| self.config.t_max.filter(|&t| self.iteration >= t).map(|_| Stop::IterationLimit));
        if let Some(stop) = pre {
            self.stop = Some(stop);
            return Err(stop);
        }
        let outcome = self.iterate();
        self.net.snapshot_objectives();
        self.iteration += 1;
        if let Err(stop) = outcome {
            self.stop = Some(stop);
        }
        outcome
    }

    fn iterate(&mut self) -> std::result::Result<(), Stop> {
        let expected = self.net.expected_values(self.delta());
        self.region_search(&expected)?;
        self.point_search()?;
        self.population_adjust()
    }

    /// Steps until a stop condition fires and returns the record.
    pub fn run_to_end(mut self) -> RunRecord {
        while self.step().is_ok() {}
        self.finish()
    }

    /// Closes the run: records a final sample and fills any snapshot
    /// checkpoint the run did not reach with the final state.
    pub fn finish(mut self) -> RunRecord {
        if self.recorder.last_fes() != Some(self.evaluator.fes()) {
            self.record_sample();
        }
        let remaining = std::mem::take(&mut self.pending_checkpoints);
        for checkpoint in remaining {
            let snap = self.snapshot(checkpoint);
            self.snapshots.push(snap);
        }
        let (best_position, best_objective) = {
            let (x, f) = self.best();
            (x.to_vec(), f)
        };
        RunRecord {
            problem: self.problem.name().to_string(),
            dimension: self.problem.dimension(),
            best_position,
            best_objective,
            final_error: self.problem.error(best_objective),
            fes: self.evaluator.fes(),
            iterations: self.iteration,
            stop: self.stop.or(self.evaluator.stop_reason()).unwrap_or(Stop::IterationLimit),
            tally: *self.evaluator.tally(),
            samples: self.recorder.into_samples(),
            snapshots: self.snapshots,
            config: self.config,
        }
    }

    fn evaluate(&mut self, point: &[f64], phase: Phase) -> std::result::Result<f64, Stop> {
        let value = self.evaluator.evaluate(self.problem, point, phase)?;
        if self.recorder.is_due(self.evaluator.fes()) {
            self.record_sample();
        }
        self.capture_due_snapshots();
        Ok(value)
    }

    fn record_sample(&mut self) {
        let population = self
            .explorers
            .iter()
            .chain(&self.miners)
            .map(|m| m.position.as_slice());
        self.recorder.record(
            self.evaluator.fes(),
            self.evaluator.best_error(),
            self.explorers.len(),
            self.miners.len(),
            population,
        );
    }

    fn capture_due_snapshots(&mut self) {
        let fes = self.evaluator.fes();
        while let Some(&checkpoint) = self.pending_checkpoints.first() {
            if checkpoint > fes {
                break;
            }
            self.pending_checkpoints.remove(0);
            let snap = self.snapshot(checkpoint);
            self.snapshots.push(snap);
        }
    }

    fn snapshot(&self, checkpoint: u64) -> NetSnapshot {
        NetSnapshot {
            checkpoint,
            fes: self.evaluator.fes(),
            points: self
                .net
                .points
                .iter()
                .enumerate()
                .map(|(id, p)| SnapshotPoint {
                    id,
                    row: p.grid.0,
                    col: p.grid.1,
                    position: p.position.clone(),
                    objective: p.objective,
                })
                .collect(),
            explorers: self.explorers.iter().map(|m| m.position.clone()).collect(),
            miners: self.miners.iter().map(|m| m.position.clone()).collect(),
        }
    }

    /// Control parameters for a candidate generated from `region`. With
    /// adaptation on, they are perturbed around the region's values.
    fn controls(&mut self, region: usize) -> Controls {
        let r = &self.net.regions[region];
        let (alpha, beta) = (r.alpha, r.beta);
        if !self.config.adapt_parameters {
            return Controls { alpha, beta };
        }
        let da: f64 = self.rng.sample(StandardNormal);
        let db: f64 = self.rng.sample(StandardNormal);
        Controls {
            alpha: (alpha + 0.1 * da).clamp(0.0, 1.0),
            beta: (beta + 0.1 * db).clamp(0.01, 1.0),
        }
    }

    fn reward(&mut self, region: usize, used: Controls) {
        if !self.config.adapt_parameters {
            return;
        }
        let r = &mut self.net.regions[region];
        r.alpha = 0.9 * r.alpha + 0.1 * used.alpha;
        r.beta = 0.9 * r.beta + 0.1 * used.beta;
    }

    /// Roulette selection among the top-scoring regions; counts the visit.
    pub(crate) fn select_region(&mut self, expected: &ExpectedValues, delta: f64) -> usize {
        let h = expected.values.len();
        let m = candidate_region_count(delta, h, self.config.region_schedule);
        let candidates = top_by_score(&expected.values, m);
        let chosen = roulette(&mut self.rng, &candidates, &expected.values);
        record_region_visit(&mut self.net.regions, chosen);
        chosen
    }

    /// Reference point of a region: a corner tournament with probability
    /// ramping 0.1 -> 1.0, otherwise the best corner.
    pub(crate) fn pick_reference_point(&mut self, region: usize, delta: f64) -> usize {
        let corners = self.net.regions[region].corners;
        if self.rng.random::<f64>() < tournament_probability(delta) {
            let points = &self.net.points;
            tournament(&mut self.rng, &corners, |i| points[i].objective, self.config.tournament_size)
        } else {
            self.net.regions[region].best_corner(&self.net.points)
        }
    }

    fn region_search(&mut self, expected: &ExpectedValues) -> std::result::Result<(), Stop> {
        let n_s = self.explorers.len();
        let dim = self.problem.dimension();
        let mut next = self.explorers.clone();
        let mut outcome = Ok(());
        for i in 0..n_s {
            let delta = self.delta();
            let region = self.select_region(expected, delta);
            let reference = self.pick_reference_point(region, delta);
            let controls = self.controls(region);
            let (r1, r2) = distinct_pair(&mut self.rng, n_s, Some(i));
            let mask = crossover_mask(&mut self.rng, dim, controls.alpha);
            let p_ref = reference_branch_probability(delta, self.config.c_s);

            let base = &self.explorers[i].position;
            let (s1, s2) = (&self.explorers[r1].position, &self.explorers[r2].position);
            let p_sel = &self.net.points[reference].position;
            let mut u = base.clone();
            for j in 0..dim {
                if mask[j] {
                    let centred = self.rng.random::<f64>() < p_ref;
                    u[j] = region_mutation(p_sel[j], base[j], s1[j], s2[j], controls.beta, centred);
                }
            }
            repair_bounds(&mut u, self.problem);

            match self.evaluate(&u, Phase::RegionSearch) {
                Ok(f) if f < next[i].objective => {
                    self.reward(region, controls);
                    if let Err(stop) = self.adjust_net(&u, f) {
                        outcome = Err(stop);
                    }
                    next[i].position = u;
                    next[i].objective = f;
                    if outcome.is_err() {
                        break;
                    }
                }
                Ok(_) => {}
                Err(stop) => {
                    outcome = Err(stop);
                    break;
                }
            }
        }
        self.explorers = next;
        outcome
    }

    fn point_search(&mut self) -> std::result::Result<(), Stop> {
        let n_x = self.miners.len();
        let dim = self.problem.dimension();
        let mut next = self.miners.clone();
        let mut outcome = Ok(());
        for _ in 0..n_x {
            let delta = self.delta();
            let k = self.rng.random_range(0..n_x);
            let rho = rho_fraction(self.rng.random(), self.config.rho_max);
            let pool = top_rho_pool(&self.net.points, rho);
            let reference = pool[self.rng.random_range(0..pool.len())];
            let region = self.net.home_region(reference);
            let controls = self.controls(region);
            let (r1, r2) = distinct_pair(&mut self.rng, n_x, Some(k));
            let mask = crossover_mask(&mut self.rng, dim, controls.alpha);
            let p_ref = reference_branch_probability(delta, self.config.c_x);

            let base = &self.miners[k].position;
            let (x1, x2) = (&self.miners[r1].position, &self.miners[r2].position);
            let p_top = &self.net.points[reference].position;
            let mut v = base.clone();
            for j in 0..dim {
                if mask[j] {
                    let centred = self.rng.random::<f64>() < p_ref;
                    v[j] = point_mutation(p_top[j], base[j], x1[j], x2[j], controls.beta, centred);
                }
            }
            repair_bounds(&mut v, self.problem);

            match self.evaluate(&v, Phase::PointSearch) {
                Ok(f) if f < next[k].objective => {
                    self.reward(region, controls);
                    if let Err(stop) = self.adjust_net(&v, f) {
                        outcome = Err(stop);
                    }
                    next[k].position = v;
                    next[k].objective = f;
                    if outcome.is_err() {
                        break;
                    }
                }
                Ok(_) => {}
                Err(stop) => {
                    outcome = Err(stop);
                    break;
                }
            }
        }
        self.miners = next;
        outcome
    }

    /// Pulls the elastic points nearest to the accepted candidate `nu`
    /// toward it. The closest point is replaced by `nu` itself when that is
    /// an improvement; the others get an evaluated pull candidate.
    pub(crate) fn adjust_net(&mut self, nu: &[f64], f_nu: f64) -> std::result::Result<(), Stop> {
        let n_a = attracted_count(self.delta(), self.config.n_a_max);
        let nearest = nearest_elastic_points(nu, n_a, &self.net.points);
        let dim = self.problem.dimension();
        let pool_size = self.explorers.len() + self.miners.len();

        for (rank, &pi) in nearest.iter().enumerate() {
            if rank == 0 {
                let p = &mut self.net.points[pi];
                if f_nu < p.objective {
                    p.position = nu.to_vec();
                    p.objective = f_nu;
                }
                continue;
            }
            let delta = self.delta();
            let region = &self.net.regions[self.net.home_region(pi)];
            let (alpha, beta) = (region.alpha, region.beta);
            let (a, b) = distinct_pair(&mut self.rng, pool_size, None);
            let member = |k: usize| -> &[f64] {
                if k < self.explorers.len() {
                    &self.explorers[k].position
                } else {
                    &self.miners[k - self.explorers.len()].position
                }
            };
            let (r1, r2) = (member(a), member(b));
            let point = &self.net.points[pi].position;
            let pull_a = net_pull_toward_candidate(nu, r1, r2, beta);
            let pull_b = net_pull_from_point(point, nu, r1, r2, beta);
            let mask = crossover_mask(&mut self.rng, dim, alpha);
            let qa = apply_crossover(point, &pull_a, &mask);
            let qb = apply_crossover(point, &pull_b, &mask);
            let target = if self.rng.random::<f64>() < delta { nu } else { point.as_slice() };
            let mut q = if first_is_closer(&qa, &qb, target) { qa } else { qb };
            repair_bounds(&mut q, self.problem);

            let f = self.evaluate(&q, Phase::NetAdjust)?;
            let p = &mut self.net.points[pi];
            if f < p.objective {
                p.position = q;
                p.objective = f;
            }
        }
        Ok(())
    }

    fn population_adjust(&mut self) -> std::result::Result<(), Stop> {
        let delta = self.delta();
        let c = &self.config;
        let target_s = population_target(delta, c.n_s_init, c.n_s_end);
        let target_x = population_target(delta, c.n_x_init, c.n_x_end);
        remove_worst(&mut self.explorers, target_s);
        remove_worst(&mut self.miners, target_x);
        while self.explorers.len() < target_s {
            let member = self.new_member()?;
            self.explorers.push(member);
        }
        while self.miners.len() < target_x {
            let member = self.new_member()?;
            self.miners.push(member);
        }
        Ok(())
    }

    /// A new member seeded from a top-rho elastic point, each coordinate
    /// either copied or blended with a uniform sample.
    fn new_member(&mut self) -> std::result::Result<Individual, Stop> {
        if let Some(stop) = self.evaluator.stop_reason() {
            return Err(stop);
        }
        let delta = self.delta();
        let rho = rho_fraction(self.rng.random(), self.config.rho_max);
        let pool = top_rho_pool(&self.net.points, rho);
        let chosen = pool[self.rng.random_range(0..pool.len())];
        let elastic = &self.net.points[chosen].position;
        let mut v = Vec::with_capacity(elastic.len());
        for (j, &p) in elastic.iter().enumerate() {
            if self.rng.random::<f64>() < 0.5 {
                let u = self.rng.random_range(self.problem.lower()[j]..=self.problem.upper()[j]);
                v.push(blend_coordinate(p, u, delta));
            } else {
                v.push(p);
            }
        }
        repair_bounds(&mut v, self.problem);
        let objective = self.evaluate(&v, Phase::PopulationAdjust)?;
        self.next_id += 1;
        Ok(Individual {
            id: self.next_id - 1,
            position: v,
            objective,
        })
    }
}

/// Drops the worst members until `target` remain, keeping the survivors'
/// order. Among equal objectives the later member goes first.
fn remove_worst(members: &mut Vec<Individual>, target: usize) {
    if members.len() <= target {
        return;
    }
    let mut order: Vec<usize> = (0..members.len()).collect();
    order.sort_by(|&a, &b| members[b].objective.total_cmp(&members[a].objective).then(b.cmp(&a)));
    let mut drop = vec![false; members.len()];
    for &k in &order[..members.len() - target] {
        drop[k] = true;
    }
    let mut k = 0;
    members.retain(|_| {
        k += 1;
        !drop[k - 1]
    });
}

/// Initializes and runs to completion.
pub fn run(config: &SnoConfig, problem: &Problem) -> Result<RunRecord> {
    Ok(Sno::new(config.clone(), problem)?.run_to_end())
}
