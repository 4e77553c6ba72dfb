//! k-means++ seeding and Lloyd iterations on the rows of an embedding.

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::rng;
use crate::ssbm::Partition;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct KmeansConfig {
    pub restarts: usize,
    pub max_iter: usize,
    pub tol: f64,
    /// Scale every row to unit length before clustering.
    pub normalize_rows: bool,
}

impl Default for KmeansConfig {
    fn default() -> Self {
        Self {
            restarts: 10,
            max_iter: 300,
            tol: 1e-9,
            normalize_rows: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct KmeansResult {
    pub partition: Partition,
    /// One center per row.
    pub centers: DMatrix<f64>,
    pub cost: f64,
    /// Index of the restart that produced this result.
    pub best_restart: usize,
    pub restarts_used: usize,
    pub iterations: usize,
    /// Cost after each assignment/update round.
    pub cost_trace: Vec<f64>,
}

fn sq_dist(points: &DMatrix<f64>, i: usize, centers: &DMatrix<f64>, c: usize) -> f64 {
    (0..points.ncols())
        .map(|j| {
            let d = points[(i, j)] - centers[(c, j)];
            d * d
        })
        .sum()
}

/// Choose `k` rows of `points` by D² sampling.
pub fn kmeanspp_seed(points: &DMatrix<f64>, k: usize, seed: u64) -> Result<DMatrix<f64>> {
    let n = points.nrows();
    if k == 0 || n < k {
        return invalid(format!("k-means++ needs n >= k >= 1, got n = {n}, k = {k}"));
    }
    let mut r = rng::stream(seed, rng::tag::KMEANS);
    let mut chosen = vec![r.random_range(0..n)];
    let row = |i: usize| points.row(i).into_owned();
    let mut centers = DMatrix::zeros(k, points.ncols());
    centers.set_row(0, &row(chosen[0]));
    let mut d2: Vec<f64> = (0..n).map(|i| sq_dist(points, i, &centers, 0)).collect();
    for c in 1..k {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let target = r.random::<f64>() * total;
            let mut acc = 0.0;
            let mut pick = None;
            for (i, &d) in d2.iter().enumerate() {
                acc += d;
                if d > 0.0 && acc > target {
                    pick = Some(i);
                    break;
                }
            }
            // Rounding can leave the target just past the last positive
            // weight; take the last such point.
            pick.unwrap_or_else(|| d2.iter().rposition(|&d| d > 0.0).unwrap())
        } else {
            let free: Vec<usize> = (0..n).filter(|i| !chosen.contains(i)).collect();
            free[r.random_range(0..free.len())]
        };
        chosen.push(pick);
        centers.set_row(c, &row(pick));
        for (i, d) in d2.iter_mut().enumerate() {
            *d = d.min(sq_dist(points, i, &centers, c));
        }
    }
    Ok(centers)
}

fn assign(points: &DMatrix<f64>, centers: &DMatrix<f64>) -> Vec<usize> {
    (0..points.nrows())
        .map(|i| {
            let mut best = (0, f64::INFINITY);
            for c in 0..centers.nrows() {
                let d = sq_dist(points, i, centers, c);
                if d < best.1 {
                    best = (c, d);
                }
            }
            best.0
        })
        .collect()
}

/// Centers as means of their points; empty clusters take the point farthest
/// from its own center, which then moves to the empty cluster.
fn update(points: &DMatrix<f64>, labels: &mut [usize], centers: &mut DMatrix<f64>) {
    let k = centers.nrows();
    loop {
        let mut sums = DMatrix::zeros(k, points.ncols());
        let mut counts = vec![0usize; k];
        for (i, &l) in labels.iter().enumerate() {
            counts[l] += 1;
            let mut row = sums.row_mut(l);
            row += points.row(i);
        }
        for c in 0..k {
            if counts[c] > 0 {
                let mean = sums.row(c) / counts[c] as f64;
                centers.set_row(c, &mean);
            }
        }
        let Some(empty) = counts.iter().position(|&c| c == 0) else {
            return;
        };
        let far = (0..points.nrows())
            .filter(|&i| counts[labels[i]] > 1)
            .max_by(|&a, &b| {
                sq_dist(points, a, centers, labels[a])
                    .total_cmp(&sq_dist(points, b, centers, labels[b]))
                    .then(b.cmp(&a))
            });
        match far {
            Some(i) => labels[i] = empty,
            // Fewer distinct assignments than clusters cannot be fixed.
            None => return,
        }
    }
}

fn cost_of(points: &DMatrix<f64>, labels: &[usize], centers: &DMatrix<f64>) -> f64 {
    labels
        .iter()
        .enumerate()
        .map(|(i, &l)| sq_dist(points, i, centers, l))
        .sum()
}

/// Lloyd iterations from the given centers.
pub fn lloyd(points: &DMatrix<f64>, centers: &DMatrix<f64>, max_iter: usize, tol: f64) -> KmeansResult {
    let k = centers.nrows();
    let mut centers = centers.clone();
    let mut labels = assign(points, &centers);
    update(points, &mut labels, &mut centers);
    let mut cost = cost_of(points, &labels, &centers);
    let mut trace = vec![cost];
    let mut iterations = 1;
    while iterations < max_iter.max(1) {
        let mut next = assign(points, &centers);
        if next == labels {
            break;
        }
        iterations += 1;
        update(points, &mut next, &mut centers);
        let new_cost = cost_of(points, &next, &centers);
        labels = next;
        let change = (cost - new_cost).abs() / cost.max(f64::MIN_POSITIVE);
        cost = new_cost;
        trace.push(cost);
        if change < tol {
            break;
        }
    }
    KmeansResult {
        partition: Partition { labels, k },
        centers,
        cost,
        best_restart: 0,
        restarts_used: 1,
        iterations,
        cost_trace: trace,
    }
}

/// Best of `config.restarts` seeded k-means++ runs; ties go to the earliest
/// restart.
pub fn cluster_points(points: &DMatrix<f64>, k: usize, config: &KmeansConfig, seed: u64) -> Result<KmeansResult> {
    if points.ncols() == 0 {
        return invalid("embedding has no columns");
    }
    let normalized;
    let pts = if config.normalize_rows {
        let mut p = points.clone();
        for mut row in p.row_iter_mut() {
            let norm = row.norm();
            if norm > 0.0 {
                row /= norm;
            }
        }
        normalized = p;
        &normalized
    } else {
        points
    };
    let mut best: Option<KmeansResult> = None;
    for restart in 0..config.restarts.max(1) {
        let init = kmeanspp_seed(pts, k, rng::derive(seed, &[restart as u64]))?;
        let mut res = lloyd(pts, &init, config.max_iter, config.tol);
        res.best_restart = restart;
        if best.as_ref().is_none_or(|b| res.cost < b.cost) {
            best = Some(res);
        }
    }
    let mut best = best.unwrap();
    best.restarts_used = config.restarts.max(1);
    Ok(best)
}

/// k-means on the rows of `embedding.vectors`.
pub fn cluster_embedding(
    embedding: &crate::eigen::Embedding,
    k: usize,
    config: &KmeansConfig,
    seed: u64,
) -> Result<KmeansResult> {
    cluster_points(&embedding.vectors, k, config, seed)
}
