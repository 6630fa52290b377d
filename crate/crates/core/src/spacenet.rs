//! The space net: a fixed set of elastic points laid out on a logical
//! `side x side` grid, and the quadrilateral regions that grid induces.
//!
//! Region membership is topological. Region `(i, j)` always owns the points
//! at grid positions `(i, j)`, `(i, j + 1)`, `(i + 1, j)` and `(i + 1, j + 1)`
//! no matter where those points have moved in the search space, so the
//! layout works in any dimension.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::schedule::best_corner_weight;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElasticPoint {
    pub position: Vec<f64>,
    pub objective: f64,
    /// `(row, col)` in the logical grid.
    pub grid: (usize, usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Region {
    /// Point indices, ordered `(i,j), (i,j+1), (i+1,j), (i+1,j+1)`.
    pub corners: [usize; 4],
    /// Times this region won a selection draw.
    pub visits_selected: u64,
    /// Times another region won.
    pub visits_skipped: u64,
    /// Corner objectives at the previous iteration.
    pub prev_corner_objectives: [f64; 4],
    /// Crossover rate.
    pub alpha: f64,
    /// Scaling factor.
    pub beta: f64,
}

impl Region {
    fn new(corners: [usize; 4]) -> Self {
        Region {
            corners,
            visits_selected: 1,
            visits_skipped: 1,
            prev_corner_objectives: [0.0; 4],
            alpha: 0.5,
            beta: 0.1,
        }
    }

    /// Index (into the point list) of the lowest-objective corner; the
    /// lower index wins ties.
    pub fn best_corner(&self, points: &[ElasticPoint]) -> usize {
        let mut best = self.corners[0];
        for &c in &self.corners[1..] {
            if points[c].objective < points[best].objective
                || (points[c].objective == points[best].objective && c < best)
            {
                best = c;
            }
        }
        best
    }

    pub fn visit_ratio(&self) -> f64 {
        self.visits_skipped as f64 / self.visits_selected as f64
    }

    /// Summed corner improvement since the last snapshot.
    pub fn improvement(&self, points: &[ElasticPoint]) -> f64 {
        self.corners
            .iter()
            .zip(&self.prev_corner_objectives)
            .map(|(&c, prev)| prev - points[c].objective)
            .sum()
    }
}

/// Grid side length for `n_p` points.
pub fn grid_side(n_p: usize) -> Result<usize> {
    let side = (n_p as f64).sqrt().round() as usize;
    if side < 2 || side * side != n_p {
        return Err(Error::InvalidConfig(format!(
            "number of elastic points must be a perfect square >= 4, got {n_p}"
        )));
    }
    Ok(side)
}

/// Builds the `(side - 1)^2` regions of a `side x side` grid, row-major.
pub fn build_grid_topology(n_p: usize) -> Result<Vec<Region>> {
    let side = grid_side(n_p)?;
    let idx = |r: usize, c: usize| r * side + c;
    let mut regions = Vec::with_capacity((side - 1) * (side - 1));
    for i in 0..side - 1 {
        for j in 0..side - 1 {
            regions.push(Region::new([idx(i, j), idx(i, j + 1), idx(i + 1, j), idx(i + 1, j + 1)]));
        }
    }
    Ok(regions)
}

/// Per-region attractiveness scores.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpectedValues {
    pub values: Vec<f64>,
}

/// Min-max normalization over a slice. A constant slice maps to 0.5.
pub fn min_max_normalize(raw: &[f64]) -> Vec<f64> {
    let (lo, hi) = raw
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let span = hi - lo;
    if !(span > 0.0) || !span.is_finite() {
        return vec![0.5; raw.len()];
    }
    raw.iter().map(|v| (v - lo) / span).collect()
}

/// Scores every region from its visit ratio, the recent improvement of its
/// corners and the quality of its best corner.
pub fn compute_expected_values(regions: &[Region], points: &[ElasticPoint], delta: f64) -> ExpectedValues {
    let ratios: Vec<f64> = regions.iter().map(Region::visit_ratio).collect();
    let improvements: Vec<f64> = regions.iter().map(|r| r.improvement(points)).collect();
    let bests: Vec<f64> = regions.iter().map(|r| points[r.best_corner(points)].objective).collect();
    let weight = best_corner_weight(delta);

    let values = min_max_normalize(&ratios)
        .into_iter()
        .zip(min_max_normalize(&improvements))
        .zip(min_max_normalize(&bests))
        .map(|((ratio, improvement), best)| ratio + improvement + weight * (1.0 - best))
        .collect();
    ExpectedValues { values }
}

/// Counts one selection draw: the winner's `visits_selected` and everyone
/// else's `visits_skipped` go up by one.
pub fn record_region_visit(regions: &mut [Region], selected: usize) {
    for (k, region) in regions.iter_mut().enumerate() {
        if k == selected {
            region.visits_selected += 1;
        } else {
            region.visits_skipped += 1;
        }
    }
}

pub fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// The `n_a` elastic points closest to `target`, nearest first. Ties go to
/// the lower index.
pub fn nearest_elastic_points(target: &[f64], n_a: usize, points: &[ElasticPoint]) -> Vec<usize> {
    let mut by_distance: Vec<(f64, usize)> = points
        .iter()
        .enumerate()
        .map(|(i, p)| (squared_distance(target, &p.position), i))
        .collect();
    let n_a = n_a.min(points.len());
    let cmp = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
    if n_a < by_distance.len() && n_a > 0 {
        by_distance.select_nth_unstable_by(n_a - 1, cmp);
        by_distance.truncate(n_a);
    }
    by_distance.sort_unstable_by(cmp);
    by_distance.truncate(n_a);
    by_distance.into_iter().map(|(_, i)| i).collect()
}

/// Indices of the `max(1, floor(rho * n_p))` best elastic points, best
/// first.
pub fn top_rho_pool(points: &[ElasticPoint], rho: f64) -> Vec<usize> {
    let size = ((rho * points.len() as f64).floor() as usize).clamp(1, points.len());
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| {
        points[a]
            .objective
            .total_cmp(&points[b].objective)
            .then(a.cmp(&b))
    });
    order.truncate(size);
    order
}

/// Elastic points plus the fixed region layout over them.
#[derive(Debug, Clone)]
pub struct SpaceNet {
    pub points: Vec<ElasticPoint>,
    pub regions: Vec<Region>,
    side: usize,
    /// Regions containing each point, ascending.
    membership: Vec<Vec<usize>>,
}

impl SpaceNet {
    /// Lays `positions` (row-major) out on the grid. Region control
    /// parameters start at `alpha`/`beta` and the previous-iteration corner
    /// objectives start equal to the current ones.
    pub fn new(positions: Vec<(Vec<f64>, f64)>, alpha: f64, beta: f64) -> Result<Self> {
        let n_p = positions.len();
        let side = grid_side(n_p)?;
        let mut regions = build_grid_topology(n_p)?;
        let points: Vec<ElasticPoint> = positions
            .into_iter()
            .enumerate()
            .map(|(i, (position, objective))| ElasticPoint {
                position,
                objective,
                grid: (i / side, i % side),
            })
            .collect();
        let mut membership = vec![Vec::new(); n_p];
        for (k, region) in regions.iter_mut().enumerate() {
            region.alpha = alpha;
            region.beta = beta;
            for &c in &region.corners {
                membership[c].push(k);
            }
        }
        let mut net = SpaceNet {
            points,
            regions,
            side,
            membership,
        };
        net.snapshot_objectives();
        Ok(net)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn side(&self) -> usize {
        self.side
    }

    /// Regions that contain point `index`, ascending.
    pub fn regions_of(&self, index: usize) -> &[usize] {
        &self.membership[index]
    }

    /// The lowest-indexed region containing `index`; it supplies the
    /// control parameters used when moving that point.
    pub fn home_region(&self, index: usize) -> usize {
        self.membership[index][0]
    }

    /// Records current corner objectives as the "previous iteration" values.
    pub fn snapshot_objectives(&mut self) {
        for region in &mut self.regions {
            for (slot, &c) in region.prev_corner_objectives.iter_mut().zip(&region.corners) {
                *slot = self.points[c].objective;
            }
        }
    }

    pub fn expected_values(&self, delta: f64) -> ExpectedValues {
        compute_expected_values(&self.regions, &self.points, delta)
    }

    pub fn best_point(&self) -> usize {
        top_rho_pool(&self.points, 0.0)[0]
    }

    pub fn mean_objective(&self) -> f64 {
        self.points.iter().map(|p| p.objective).sum::<f64>() / self.points.len() as f64
    }
}
