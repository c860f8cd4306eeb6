//! Aggregation for multi-start benchmarks: shared start lists, iteration
//! summaries and clustering of convergence points into basins.

use alloc::vec;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::math::norm_inf;
use crate::model::HmmModel;
use crate::optim::{Optimizer, RunRecord};

/// `n` starting points drawn with the model's sampler from one
/// `ChaCha8Rng` seeded with `seed`. Every optimizer gets the same list.
pub fn start_list<M: HmmModel>(model: &M, n: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| model.sample_start(&mut rng)).collect()
}

/// Five-number summary plus mean. Quartiles interpolate linearly between
/// order statistics.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quantiles {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub mean: f64,
    pub q3: f64,
    pub max: f64,
}

impl Quantiles {
    pub fn of(values: &[f64]) -> Option<Quantiles> {
        if values.is_empty() {
            return None;
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let at = |p: f64| {
            let h = p * (v.len() - 1) as f64;
            let lo = h as usize;
            let hi = (lo + 1).min(v.len() - 1);
            v[lo] + (h - lo as f64) * (v[hi] - v[lo])
        };
        Some(Quantiles {
            min: v[0],
            q1: at(0.25),
            median: at(0.5),
            mean: v.iter().sum::<f64>() / v.len() as f64,
            q3: at(0.75),
            max: v[v.len() - 1],
        })
    }
}

/// Per-optimizer step statistics over all runs, converged or not.
#[derive(Clone, Debug, PartialEq)]
pub struct OptimizerSummary {
    pub optimizer: Optimizer,
    pub runs: usize,
    pub iterations: Option<Quantiles>,
    pub mean_forward: f64,
    pub mean_backward: f64,
    pub mean_time_s: f64,
    pub percent_converged: f64,
}

pub fn summarize(optimizer: Optimizer, runs: &[RunRecord]) -> OptimizerSummary {
    let n = runs.len();
    let mean = |f: &dyn Fn(&RunRecord) -> f64| if n == 0 { 0.0 } else { runs.iter().map(f).sum::<f64>() / n as f64 };
    let iters: Vec<f64> = runs.iter().map(|r| r.iterations as f64).collect();
    OptimizerSummary {
        optimizer,
        runs: n,
        iterations: Quantiles::of(&iters),
        mean_forward: mean(&|r| r.n_forward as f64),
        mean_backward: mean(&|r| r.n_backward as f64),
        mean_time_s: mean(&|r| r.wall_time_s),
        percent_converged: if n == 0 { 0.0 } else { 100.0 * runs.iter().filter(|r| r.converged).count() as f64 / n as f64 },
    }
}

/// A group of convergence points with close likelihoods and parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct Basin {
    /// Negative log-likelihood of the best member.
    pub nll: f64,
    /// Canonical parameters of the best member; NaN marks a parameter
    /// that does not affect the likelihood there.
    pub theta: Vec<f64>,
    /// Member count per optimizer, in [`BasinTable::optimizers`] order.
    pub counts: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BasinTable {
    pub optimizers: Vec<Optimizer>,
    /// Sorted by increasing NLL.
    pub basins: Vec<Basin>,
    /// Non-converged runs per optimizer.
    pub other: Vec<usize>,
    pub totals: Vec<usize>,
}

impl BasinTable {
    pub fn percent(&self, optimizer: usize, count: usize) -> f64 {
        match self.totals[optimizer] {
            0 => 0.0,
            t => 100.0 * count as f64 / t as f64,
        }
    }
}

/// Clustering thresholds for [`cluster_basins`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BasinConfig {
    pub nll_width: f64,
    pub theta_tol: f64,
}

impl Default for BasinConfig {
    fn default() -> Self {
        BasinConfig { nll_width: 0.1, theta_tol: 1e-2 }
    }
}

/// Max-norm distance where NaN (a parameter without effect) matches only NaN.
fn theta_distance(a: &[f64], b: &[f64]) -> f64 {
    let d: Vec<f64> = a
        .iter()
        .zip(b)
        .map(|(&x, &y)| match (x.is_nan(), y.is_nan()) {
            (true, true) => 0.0,
            (false, false) => x - y,
            _ => f64::INFINITY,
        })
        .collect();
    norm_inf(&d)
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

/// Single-linkage clustering of converged runs: two runs are linked when
/// their NLLs differ by less than `nll_width` and their canonical θ by less
/// than `theta_tol` in the max norm. Runs that did not converge go to
/// [`BasinTable::other`].
pub fn cluster_basins<M: HmmModel>(model: &M, groups: &[(Optimizer, &[RunRecord])], cfg: BasinConfig) -> BasinTable {
    struct Point {
        group: usize,
        nll: f64,
        theta: Vec<f64>,
    }
    let mut points = Vec::new();
    let mut other = vec![0; groups.len()];
    for (g, (_, runs)) in groups.iter().enumerate() {
        for r in runs.iter() {
            if r.converged && r.final_loglik.is_finite() {
                let mut theta = r.final_theta.clone();
                model.canonicalize(&mut theta);
                points.push(Point { group: g, nll: -r.final_loglik, theta });
            } else {
                other[g] += 1;
            }
        }
    }
    points.sort_by(|a, b| a.nll.total_cmp(&b.nll));

    let mut parent: Vec<usize> = (0..points.len()).collect();
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            if points[j].nll - points[i].nll >= cfg.nll_width {
                break;
            }
            if theta_distance(&points[i].theta, &points[j].theta) < cfg.theta_tol {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }

    // Roots are the lowest-NLL member of their cluster, and appear in NLL order.
    let mut basins: Vec<Basin> = Vec::new();
    let mut index_of = vec![usize::MAX; points.len()];
    for i in 0..points.len() {
        let root = find(&mut parent, i);
        if index_of[root] == usize::MAX {
            index_of[root] = basins.len();
            basins.push(Basin { nll: points[root].nll, theta: points[root].theta.clone(), counts: vec![0; groups.len()] });
        }
        basins[index_of[root]].counts[points[i].group] += 1;
    }
    BasinTable {
        optimizers: groups.iter().map(|(o, _)| *o).collect(),
        basins,
        other,
        totals: groups.iter().map(|(_, r)| r.len()).collect(),
    }
}
