//! Agreement between partitions: adjusted Rand index and the
//! permutation-matched mis-clustering rate.

use crate::error::{invalid, Error, Result};
use crate::ssbm::Partition;

/// Largest `k` accepted by the assignment solver.
pub const MAX_MATCH_K: usize = 64;

/// Counts `n_ij` of nodes with label `i` in the first partition and `j` in
/// the second.
#[derive(Debug, Clone, PartialEq)]
pub struct Contingency {
    pub table: Vec<Vec<u64>>,
    pub row_sums: Vec<u64>,
    pub col_sums: Vec<u64>,
    pub n: u64,
}

impl Contingency {
    pub fn new(a: &Partition, b: &Partition) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::DimensionMismatch(format!(
                "partitions have {} and {} labels",
                a.len(),
                b.len()
            )));
        }
        let mut table = vec![vec![0u64; b.k]; a.k];
        for (&x, &y) in a.labels.iter().zip(&b.labels) {
            table[x][y] += 1;
        }
        let row_sums = table.iter().map(|r| r.iter().sum()).collect();
        let col_sums = (0..b.k).map(|j| table.iter().map(|r| r[j]).sum()).collect();
        Ok(Self {
            table,
            row_sums,
            col_sums,
            n: a.len() as u64,
        })
    }
}

fn pairs(x: u64) -> f64 {
    (x as f64) * (x as f64 - 1.0) / 2.0
}

/// Adjusted Rand index. When the chance-corrected denominator vanishes
/// (both partitions trivial) the result is 1 for identical pair structure
/// and 0 otherwise.
pub fn ari(a: &Partition, b: &Partition) -> Result<f64> {
    let c = Contingency::new(a, b)?;
    let index: f64 = c.table.iter().flatten().map(|&x| pairs(x)).sum();
    let sa: f64 = c.row_sums.iter().map(|&x| pairs(x)).sum();
    let sb: f64 = c.col_sums.iter().map(|&x| pairs(x)).sum();
    let total = pairs(c.n);
    let expected = if total > 0.0 { sa * sb / total } else { 0.0 };
    let max = 0.5 * (sa + sb);
    let denom = max - expected;
    if denom == 0.0 {
        return Ok(if index == max { 1.0 } else { 0.0 });
    }
    Ok((index - expected) / denom)
}

/// Minimum-cost perfect assignment on a square matrix (Hungarian method,
/// potentials form). Returns `assignment[row] = column`.
pub fn hungarian(cost: &[Vec<f64>]) -> Vec<usize> {
    let n = cost.len();
    let inf = f64::INFINITY;
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assignment = vec![0; n];
    for j in 1..=n {
        if p[j] > 0 {
            assignment[p[j] - 1] = j - 1;
        }
    }
    assignment
}

/// Fraction of nodes whose predicted label, after the best relabeling,
/// differs from the truth. The permutation maps predicted labels to true
/// labels.
pub fn misclustering_rate(pred: &Partition, truth: &Partition) -> Result<(f64, Vec<usize>)> {
    if pred.k != truth.k {
        return invalid(format!("k differs: {} vs {}", pred.k, truth.k));
    }
    if pred.k > MAX_MATCH_K {
        return invalid(format!("k = {} exceeds {MAX_MATCH_K}", pred.k));
    }
    let c = Contingency::new(pred, truth)?;
    if c.n == 0 {
        return Ok((0.0, (0..pred.k).collect()));
    }
    let cost: Vec<Vec<f64>> = c
        .table
        .iter()
        .map(|row| row.iter().map(|&x| -(x as f64)).collect())
        .collect();
    let perm = hungarian(&cost);
    let agree: u64 = perm.iter().enumerate().map(|(i, &j)| c.table[i][j]).sum();
    Ok(((c.n - agree) as f64 / c.n as f64, perm))
}

/// For each true cluster, the fraction of its nodes mislabeled under
/// `perm` (predicted label → true label). Empty clusters report 0.
pub fn per_cluster_error(pred: &Partition, truth: &Partition, perm: &[usize]) -> Result<Vec<f64>> {
    if pred.len() != truth.len() {
        return Err(Error::DimensionMismatch("partition lengths differ".into()));
    }
    if perm.len() != pred.k {
        return invalid("permutation length must equal the predicted k");
    }
    let sizes = truth.sizes();
    let mut wrong = vec![0usize; truth.k];
    for (&p, &t) in pred.labels.iter().zip(&truth.labels) {
        if perm[p] != t {
            wrong[t] += 1;
        }
    }
    Ok(wrong
        .iter()
        .zip(&sizes)
        .map(|(&w, &s)| if s > 0 { w as f64 / s as f64 } else { 0.0 })
        .collect())
}
