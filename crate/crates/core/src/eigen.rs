//! Dense and iterative symmetric eigensolvers.
//!
//! [`smallest_k`] and [`smallest_k_generalized`] run a LOBPCG iteration
//! without preconditioner: Rayleigh–Ritz over `[X, W, P]` (iterates,
//! residuals, previous directions), with the search basis orthonormalized in
//! the metric of the right-hand operator by Gram–Schmidt with one
//! reorthogonalization pass. Converged columns are soft-locked, i.e. they
//! stay in `X` but stop contributing residual directions.

use nalgebra::DMatrix;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operators::{LinearOperator, Pencil};
use crate::rng;

/// Largest dimension accepted by the dense routines.
pub const DENSE_LIMIT: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Metric {
    /// Columns orthonormal: `VᵀV = I`.
    Euclidean,
    /// Columns orthonormal in the pencil denominator: `VᵀBV = I`.
    Pencil,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveMethod {
    Dense,
    Lobpcg,
    /// LOBPCG did not converge and the dense solver took over.
    DenseFallback,
}

#[derive(Debug, Clone)]
pub struct Embedding {
    /// One eigenvector per column.
    pub vectors: DMatrix<f64>,
    pub values: Vec<f64>,
    /// Absolute residual norms `‖M v − λ B v‖`.
    pub residuals: Vec<f64>,
    /// Residuals are compared against `tol * residual_scale`.
    pub residual_scale: f64,
    pub iterations: usize,
    pub converged: bool,
    pub restarts: usize,
    pub metric: Metric,
    pub method: SolveMethod,
    /// Largest relative residual over the wanted columns, per iteration.
    pub history: Vec<f64>,
}

impl Embedding {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }

    /// Keep the first `m` columns.
    pub fn truncate(mut self, m: usize) -> Self {
        self.vectors = self.vectors.columns(0, m).into_owned();
        self.values.truncate(m);
        self.residuals.truncate(m);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverOptions {
    /// Relative residual tolerance.
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
    /// Below this size a non-converged LOBPCG run is redone densely.
    pub dense_fallback_below: usize,
    /// Extra block columns beyond `k`; `None` picks `max(2, k / 2)`.
    pub guard: Option<usize>,
    /// Use the dense solver outright when the block would be a large
    /// fraction of `n`.
    pub allow_dense: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 500,
            seed: 0,
            dense_fallback_below: 500,
            guard: None,
            allow_dense: true,
        }
    }
}

fn check_square(m: &DMatrix<f64>) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "expected a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    if m.nrows() > DENSE_LIMIT {
        return Err(Error::TooLarge {
            n: m.nrows(),
            limit: DENSE_LIMIT,
        });
    }
    Ok(())
}

fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// Eigenpairs of `m` sorted ascending.
fn sorted_eigh(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let eig = symmetrize(m).symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(m.nrows(), order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Eigenvalues of a dense symmetric matrix, ascending.
pub fn dense_sym_eigenvalues(m: &DMatrix<f64>) -> Result<Vec<f64>> {
    check_square(m)?;
    let mut v: Vec<f64> = symmetrize(m).symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

/// Full eigendecomposition of a dense symmetric matrix, ascending.
pub fn dense_sym_eig(m: &DMatrix<f64>) -> Result<Embedding> {
    check_square(m)?;
    let (values, vectors) = sorted_eigh(m);
    let resid = m * &vectors - &vectors * DMatrix::from_diagonal(&values.clone().into());
    let residuals = resid.column_iter().map(|c| c.norm()).collect();
    Ok(Embedding {
        vectors,
        residual_scale: values.iter().fold(1.0, |a: f64, v| a.max(v.abs())),
        values,
        residuals,
        iterations: 0,
        converged: true,
        restarts: 0,
        metric: Metric::Euclidean,
        method: SolveMethod::Dense,
        history: Vec::new(),
    })
}

/// All generalized eigenpairs of `num v = λ den v` with `den` positive
/// definite, via Cholesky reduction. Vectors are `den`-orthonormal.
pub fn dense_generalized_eig(num: &DMatrix<f64>, den: &DMatrix<f64>) -> Result<Embedding> {
    check_square(num)?;
    check_square(den)?;
    if num.nrows() != den.nrows() {
        return Err(Error::DimensionMismatch("pencil sides differ in size".into()));
    }
    let chol = symmetrize(den)
        .cholesky()
        .ok_or(Error::IndefinitePencil(f64::NAN))?;
    let l = chol.l();
    let linv = l
        .clone()
        .try_inverse()
        .ok_or(Error::IndefinitePencil(f64::NAN))?;
    let c = &linv * num * linv.transpose();
    let (values, y) = sorted_eigh(&c);
    let vectors = linv.transpose() * y;
    let resid = num * &vectors - den * &vectors * DMatrix::from_diagonal(&values.clone().into());
    let residuals = resid.column_iter().map(|c| c.norm()).collect();
    Ok(Embedding {
        vectors,
        residual_scale: values.iter().fold(1.0, |a: f64, v| a.max(v.abs())),
        values,
        residuals,
        iterations: 0,
        converged: true,
        restarts: 0,
        metric: Metric::Pencil,
        method: SolveMethod::Dense,
        history: Vec::new(),
    })
}

/// Thin QR orthonormalization of the columns.
pub fn orthonormalize(v: &DMatrix<f64>) -> DMatrix<f64> {
    v.clone().qr().q()
}

/// `‖(I − U Uᵀ) V‖₂` for column-orthonormal `U`, `V` of equal shape.
pub fn subspace_distance(u: &DMatrix<f64>, v: &DMatrix<f64>) -> Result<f64> {
    if u.shape() != v.shape() {
        return Err(Error::DimensionMismatch(format!(
            "subspace shapes {:?} and {:?} differ",
            u.shape(),
            v.shape()
        )));
    }
    if u.ncols() == 0 {
        return Ok(0.0);
    }
    let e = v - u * (u.transpose() * v);
    let g = e.transpose() * &e;
    let top = symmetrize(&g)
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(0.0, f64::max);
    Ok(top.max(0.0).sqrt().min(1.0))
}

struct Negated<'a>(&'a dyn LinearOperator);

impl LinearOperator for Negated<'_> {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.0.apply(x, y);
        y.iter_mut().for_each(|v| *v = -*v);
    }
}

/// The `k` smallest eigenpairs of a symmetric operator.
pub fn smallest_k(op: &dyn LinearOperator, k: usize, opts: &SolverOptions) -> Result<Embedding> {
    solve(op, None, k, opts)
}

/// The `k` largest eigenpairs, values in descending order.
pub fn largest_k(op: &dyn LinearOperator, k: usize, opts: &SolverOptions) -> Result<Embedding> {
    let mut e = solve(&Negated(op), None, k, opts)?;
    e.values.iter_mut().for_each(|v| *v = -*v);
    Ok(e)
}

/// The `k` smallest generalized eigenpairs of `numerator v = λ denominator v`.
pub fn smallest_k_generalized(pencil: &Pencil, k: usize, opts: &SolverOptions) -> Result<Embedding> {
    solve(&pencil.numerator, Some(&pencil.denominator), k, opts)
}

/// Generalized solve for arbitrary operators; `den` must be positive definite.
pub fn smallest_k_generalized_ops(
    num: &dyn LinearOperator,
    den: &dyn LinearOperator,
    k: usize,
    opts: &SolverOptions,
) -> Result<Embedding> {
    solve(num, Some(den), k, opts)
}

fn solve(
    a: &dyn LinearOperator,
    b: Option<&dyn LinearOperator>,
    k: usize,
    opts: &SolverOptions,
) -> Result<Embedding> {
    let n = a.dim();
    if let Some(b) = b {
        if b.dim() != n {
            return Err(Error::DimensionMismatch("pencil sides differ in size".into()));
        }
    }
    if k == 0 || k > n {
        return Err(Error::InvalidParams(format!(
            "need 1 <= k <= n, got k = {k}, n = {n}"
        )));
    }
    let guard = opts.guard.unwrap_or((k / 2).max(2));
    let m = (k + guard).min(n);
    let small = 3 * m >= n || n <= 32;
    if small && opts.allow_dense {
        return dense_route(a, b, k, SolveMethod::Dense);
    }
    let m = if small { (n / 3).max(k) } else { m };
    let emb = lobpcg(a, b, k, m, opts);
    if !emb.converged && n < opts.dense_fallback_below {
        return dense_route(a, b, k, SolveMethod::DenseFallback);
    }
    Ok(emb)
}

fn dense_route(
    a: &dyn LinearOperator,
    b: Option<&dyn LinearOperator>,
    k: usize,
    method: SolveMethod,
) -> Result<Embedding> {
    let am = a.materialize();
    let mut e = match b {
        None => dense_sym_eig(&am)?,
        Some(b) => dense_generalized_eig(&am, &b.materialize())?,
    }
    .truncate(k);
    e.method = method;
    Ok(e)
}

/// Basis vectors together with their images under `B`.
struct Basis {
    vecs: Vec<Vec<f64>>,
    bvecs: Vec<Vec<f64>>,
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

fn apply_b(b: Option<&dyn LinearOperator>, v: &[f64]) -> Vec<f64> {
    match b {
        None => v.to_vec(),
        Some(b) => {
            let mut out = vec![0.0; v.len()];
            b.apply(v, &mut out);
            out
        }
    }
}

impl Basis {
    fn new() -> Self {
        Self {
            vecs: Vec::new(),
            bvecs: Vec::new(),
        }
    }

    /// Orthogonalize `v` against the basis in the `B` metric (two passes),
    /// normalize and append it. Returns false when `v` is numerically in
    /// the span already.
    fn push(&mut self, b: Option<&dyn LinearOperator>, mut v: Vec<f64>) -> bool {
        let bv0 = apply_b(b, &v);
        let norm0 = dot(&v, &bv0).max(0.0).sqrt();
        if !(norm0 > 0.0) || !norm0.is_finite() {
            return false;
        }
        v.iter_mut().for_each(|x| *x /= norm0);
        for _ in 0..2 {
            for (q, bq) in self.vecs.iter().zip(&self.bvecs) {
                let c = dot(bq, &v);
                v.iter_mut().zip(q).for_each(|(x, y)| *x -= c * y);
            }
        }
        let bv = apply_b(b, &v);
        let norm = dot(&v, &bv).max(0.0).sqrt();
        if norm < 1e-10 {
            return false;
        }
        self.vecs.push(v.iter().map(|x| x / norm).collect());
        self.bvecs.push(bv.iter().map(|x| x / norm).collect());
        true
    }

    fn len(&self) -> usize {
        self.vecs.len()
    }

    fn matrix(&self, n: usize, from: usize) -> DMatrix<f64> {
        let cols = self.vecs.len() - from;
        DMatrix::from_fn(n, cols, |r, c| self.vecs[from + c][r])
    }

    fn bmatrix(&self, n: usize, from: usize) -> DMatrix<f64> {
        let cols = self.bvecs.len() - from;
        DMatrix::from_fn(n, cols, |r, c| self.bvecs[from + c][r])
    }
}

fn random_block(n: usize, m: usize, r: &mut rand_chacha::ChaCha8Rng) -> DMatrix<f64> {
    DMatrix::from_fn(n, m, |_, _| StandardNormal.sample(r))
}

fn lobpcg(
    a: &dyn LinearOperator,
    b: Option<&dyn LinearOperator>,
    k: usize,
    m: usize,
    opts: &SolverOptions,
) -> Embedding {
    let n = a.dim();
    let mut r = rng::stream(opts.seed, rng::tag::EIGEN);
    let mut restarts = 0;

    // Initial block: random, B-orthonormalized, topped up if rank is lost.
    let mut basis = Basis::new();
    while basis.len() < m {
        let blk = random_block(n, 1, &mut r);
        basis.push(b, blk.column(0).iter().copied().collect());
    }
    let mut x = basis.matrix(n, 0);
    let mut bx = basis.bmatrix(n, 0);
    let mut ax = a.apply_block(&x);
    let (theta_all, c) = sorted_eigh(&(x.transpose() * &ax));
    x = &x * &c;
    bx = &bx * &c;
    ax = &ax * &c;
    let mut theta: Vec<f64> = theta_all;
    let mut scale = theta.iter().fold(1.0, |acc: f64, t| acc.max(t.abs()));
    let mut p: Option<DMatrix<f64>> = None;
    let mut history = Vec::new();
    let mut residuals = vec![f64::INFINITY; m];
    let mut converged = false;
    let mut iterations = 0;

    for it in 1..=opts.max_iter {
        iterations = it;
        let resid = &ax - &bx * DMatrix::from_diagonal(&theta.clone().into());
        residuals = resid.column_iter().map(|col| col.norm()).collect();
        let rel: Vec<f64> = residuals.iter().map(|v| v / scale).collect();
        history.push(rel[..k].iter().copied().fold(0.0, f64::max));
        if rel[..k].iter().all(|&v| v <= opts.tol) {
            converged = true;
            break;
        }
        let active: Vec<usize> = (0..m).filter(|&j| rel[j] > opts.tol).collect();

        let mut basis = Basis {
            vecs: x.column_iter().map(|c| c.iter().copied().collect()).collect(),
            bvecs: bx.column_iter().map(|c| c.iter().copied().collect()).collect(),
        };
        for &j in &active {
            basis.push(b, resid.column(j).iter().copied().collect());
        }
        let w_count = basis.len() - m;
        if w_count == 0 {
            if restarts >= 3 {
                break;
            }
            restarts += 1;
            for _ in 0..active.len() {
                let blk = random_block(n, 1, &mut r);
                basis.push(b, blk.column(0).iter().copied().collect());
            }
        } else if let Some(pm) = &p {
            for col in pm.column_iter() {
                basis.push(b, col.iter().copied().collect());
            }
        }
        let s = basis.matrix(n, 0);
        let bs = basis.bmatrix(n, 0);
        let as_ = {
            let fresh = a.apply_block(&basis.matrix(n, m));
            let mut full = DMatrix::zeros(n, s.ncols());
            full.columns_mut(0, m).copy_from(&ax);
            full.columns_mut(m, s.ncols() - m).copy_from(&fresh);
            full
        };
        let h = s.transpose() * &as_;
        let (vals, vecs) = sorted_eigh(&h);
        scale = vals.iter().fold(scale, |acc, t| acc.max(t.abs()));
        let c = vecs.columns(0, m).into_owned();
        x = &s * &c;
        bx = &bs * &c;
        ax = a.apply_block(&x);
        theta = vals[..m].to_vec();
        let tail = s.columns(m, s.ncols() - m) * c.rows(m, s.ncols() - m);
        let keep: Vec<usize> = active.iter().copied().filter(|&j| j < m).collect();
        p = if keep.is_empty() {
            None
        } else {
            Some(DMatrix::from_fn(n, keep.len(), |r, c| tail[(r, keep[c])]))
        };
    }

    Embedding {
        vectors: x.columns(0, k).into_owned(),
        values: theta[..k].to_vec(),
        residuals: residuals[..k].to_vec(),
        residual_scale: scale,
        iterations,
        converged,
        restarts,
        metric: if b.is_some() {
            Metric::Pencil
        } else {
            Metric::Euclidean
        },
        method: SolveMethod::Lobpcg,
        history,
    }
}
