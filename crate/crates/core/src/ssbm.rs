//! Signed stochastic block model.
//!
//! Each unordered pair of nodes is an edge with probability `p`. The edge is
//! positive inside a cluster and negative across clusters, and its sign is
//! then flipped with probability `eta`. Clusters occupy contiguous node
//! ranges: the first `sizes[0]` nodes form cluster 0, and so on.

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::graph::{build_from_edges, SignedGraph};
use crate::rng;

/// Largest `n` for which dense expected matrices are produced.
pub const DENSE_LIMIT: usize = 5000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SsbmParams {
    pub n: usize,
    pub k: usize,
    pub sizes: Vec<usize>,
    pub p: f64,
    pub eta: f64,
}

impl SsbmParams {
    pub fn new(sizes: Vec<usize>, p: f64, eta: f64) -> Result<Self> {
        let params = Self {
            n: sizes.iter().sum(),
            k: sizes.len(),
            sizes,
            p,
            eta,
        };
        params.validate()?;
        Ok(params)
    }

    /// `k` clusters whose sizes differ by at most one (larger ones first).
    pub fn equal(n: usize, k: usize, p: f64, eta: f64) -> Result<Self> {
        if k == 0 || n < k {
            return invalid(format!("need n >= k >= 1, got n = {n}, k = {k}"));
        }
        let sizes = (0..k).map(|i| n / k + usize::from(i < n % k)).collect();
        Self::new(sizes, p, eta)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k < 1 || self.sizes.len() != self.k {
            return invalid("sizes must have k >= 1 entries");
        }
        if self.sizes.iter().sum::<usize>() != self.n {
            return invalid("cluster sizes must sum to n");
        }
        if self.sizes.contains(&0) {
            return invalid("every cluster needs at least one node");
        }
        if !(0.0..=1.0).contains(&self.p) {
            return invalid(format!("p = {} outside [0, 1]", self.p));
        }
        if !(0.0..0.5).contains(&self.eta) {
            return invalid(format!("eta = {} outside [0, 1/2)", self.eta));
        }
        Ok(())
    }

    pub fn proportions(&self) -> Vec<f64> {
        let n = self.n as f64;
        self.sizes.iter().map(|&s| s as f64 / n).collect()
    }

    /// Smallest cluster proportion.
    pub fn s(&self) -> f64 {
        *self.sizes.iter().min().unwrap() as f64 / self.n as f64
    }

    /// Largest cluster proportion.
    pub fn l(&self) -> f64 {
        *self.sizes.iter().max().unwrap() as f64 / self.n as f64
    }

    /// Aspect ratio `s / l`.
    pub fn rho(&self) -> f64 {
        self.s() / self.l()
    }

    /// Expected signed degree `p (n - 1)`.
    pub fn dbar(&self) -> f64 {
        self.p * (self.n as f64 - 1.0)
    }

    pub fn is_equal_sized(&self) -> bool {
        self.sizes.iter().all(|&s| s == self.sizes[0])
    }

    pub fn ground_truth(&self) -> Partition {
        Partition::from_sizes(&self.sizes)
    }
}

/// Cluster labels in `0..k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    pub labels: Vec<usize>,
    pub k: usize,
}

impl Partition {
    pub fn new(labels: Vec<usize>, k: usize) -> Result<Self> {
        if let Some(&bad) = labels.iter().find(|&&l| l >= k) {
            return invalid(format!("label {bad} is not below k = {k}"));
        }
        Ok(Self { labels, k })
    }

    /// Contiguous blocks of the given sizes.
    pub fn from_sizes(sizes: &[usize]) -> Self {
        let labels = sizes
            .iter()
            .enumerate()
            .flat_map(|(i, &s)| std::iter::repeat_n(i, s))
            .collect();
        Self {
            labels,
            k: sizes.len(),
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut s = vec![0; self.k];
        for &l in &self.labels {
            s[l] += 1;
        }
        s
    }

    /// Labels of the listed nodes, in order.
    pub fn restrict(&self, nodes: &[usize]) -> Partition {
        Partition {
            labels: nodes.iter().map(|&v| self.labels[v]).collect(),
            k: self.k,
        }
    }

    /// One-hot membership matrix (n × k).
    pub fn membership(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.len(), self.k);
        for (i, &l) in self.labels.iter().enumerate() {
            m[(i, l)] = 1.0;
        }
        m
    }

    /// Membership matrix with column `i` scaled by `1 / sqrt(n_i)`; its
    /// columns are orthonormal when no cluster is empty.
    pub fn normalized_membership(&self) -> DMatrix<f64> {
        let sizes = self.sizes();
        let mut m = self.membership();
        for (j, &s) in sizes.iter().enumerate() {
            if s > 0 {
                m.column_mut(j).scale_mut(1.0 / (s as f64).sqrt());
            }
        }
        m
    }
}

/// Sample a graph and its ground-truth partition.
pub fn sample(params: &SsbmParams, seed: u64) -> Result<(SignedGraph, Partition)> {
    params.validate()?;
    let truth = params.ground_truth();
    let n = params.n;
    let mut r = rng::stream(seed, rng::tag::GRAPH);
    let mut edges = Vec::new();
    let p = params.p;
    if p > 0.0 && n >= 2 {
        // Geometric skipping over the pairs (i, j), i < j, in row-major order.
        let log_q = (1.0 - p).ln();
        let (mut i, mut j) = (0usize, 0usize);
        loop {
            let skip = if p >= 1.0 {
                0
            } else {
                let u: f64 = 1.0 - r.random::<f64>();
                let s = (u.ln() / log_q).floor();
                if s >= (n * n) as f64 {
                    break;
                }
                s as usize
            };
            j += 1 + skip;
            while j >= n {
                i += 1;
                if i + 1 >= n {
                    break;
                }
                j = j - n + i + 1;
            }
            if i + 1 >= n {
                break;
            }
            let same = truth.labels[i] == truth.labels[j];
            let flip = r.random::<f64>() < params.eta;
            let w = if same != flip { 1.0 } else { -1.0 };
            edges.push((i, j, w));
        }
    }
    Ok((build_from_edges(n, &edges)?, truth))
}

/// Cluster sizes with aspect ratio about `rho`: proportions
/// `1/k, 1/(k rho)` for the first and last cluster, the others uniform in
/// between, normalized and rounded by largest remainder.
pub fn sizes_from_rho(n: usize, k: usize, rho: f64, seed: u64) -> Result<Vec<usize>> {
    if k < 2 {
        return invalid("sizes_from_rho needs k >= 2");
    }
    if !(rho > 0.0 && rho <= 1.0) {
        return invalid(format!("rho = {rho} outside (0, 1]"));
    }
    if n < k {
        return invalid(format!("n = {n} is smaller than k = {k}"));
    }
    let first = 1.0 / k as f64;
    let last = first / rho;
    let mut r = rng::stream(seed, rng::tag::SIZES);
    let mut raw = Vec::with_capacity(k);
    raw.push(first);
    for _ in 1..k - 1 {
        raw.push(if last > first {
            r.random_range(first..=last)
        } else {
            first
        });
    }
    raw.push(last);
    let total: f64 = raw.iter().sum();
    let targets: Vec<f64> = raw.iter().map(|s| s / total * n as f64).collect();
    Ok(largest_remainder(&targets, n))
}

/// Round nonnegative reals summing to `n` into integers summing to `n`, each
/// at least one.
fn largest_remainder(targets: &[f64], n: usize) -> Vec<usize> {
    let mut sizes: Vec<usize> = targets.iter().map(|t| t.floor() as usize).collect();
    let mut order: Vec<usize> = (0..targets.len()).collect();
    order.sort_by(|&a, &b| {
        let (ra, rb) = (targets[a] - targets[a].floor(), targets[b] - targets[b].floor());
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    let assigned: usize = sizes.iter().sum();
    for &i in order.iter().cycle().take(n.saturating_sub(assigned)) {
        sizes[i] += 1;
    }
    // Lift empty clusters by taking from the largest one.
    while let Some(z) = sizes.iter().position(|&s| s == 0) {
        let big = (0..sizes.len()).max_by_key(|&i| (sizes[i], usize::MAX - i)).unwrap();
        sizes[big] -= 1;
        sizes[z] += 1;
    }
    sizes
}

fn dense_guard(params: &SsbmParams) -> Result<()> {
    params.validate()?;
    if params.n > DENSE_LIMIT {
        return Err(Error::TooLarge {
            n: params.n,
            limit: DENSE_LIMIT,
        });
    }
    Ok(())
}

fn block_matrix(params: &SsbmParams, intra: f64, inter: f64) -> Result<DMatrix<f64>> {
    dense_guard(params)?;
    let labels = params.ground_truth().labels;
    let n = params.n;
    Ok(DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            0.0
        } else if labels[i] == labels[j] {
            intra
        } else {
            inter
        }
    }))
}

/// `E[A]`: `p (1 - 2 eta)` inside clusters, its negative across, zero diagonal.
pub fn expected_adjacency(params: &SsbmParams) -> Result<DMatrix<f64>> {
    let v = params.p * (1.0 - 2.0 * params.eta);
    block_matrix(params, v, -v)
}

/// `E[A⁺]`: `p (1 - eta)` inside clusters, `p eta` across.
pub fn expected_positive_adjacency(params: &SsbmParams) -> Result<DMatrix<f64>> {
    block_matrix(params, params.p * (1.0 - params.eta), params.p * params.eta)
}

/// `E[A⁻]`: `p eta` inside clusters, `p (1 - eta)` across.
pub fn expected_negative_adjacency(params: &SsbmParams) -> Result<DMatrix<f64>> {
    block_matrix(params, params.p * params.eta, params.p * (1.0 - params.eta))
}
