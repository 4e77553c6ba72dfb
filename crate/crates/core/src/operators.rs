//! Graph operators and matrix pencils as implicit symmetric matrices.
//!
//! Every operator here has the form
//!
//! ```text
//! M = diag(d) + alpha * S W S + beta * s sᵀ
//! ```
//!
//! with `W` one of the sparse matrices `A`, `A⁺`, `A⁻`, `S = diag(s)` a
//! diagonal scaling and `beta * s sᵀ` the rank-one regularization term. The
//! rank-one part is applied in the matvec and never stored.

use std::sync::Arc;

use nalgebra::DMatrix;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::graph::{degrees, support_components, CsrMatrix, Regularization, SignedGraph};
use crate::rng;

/// Symmetric linear operator.
pub trait LinearOperator: Sync {
    fn dim(&self) -> usize;

    /// `y = M x`.
    fn apply(&self, x: &[f64], y: &mut [f64]);

    /// Apply to every column of `x`.
    fn apply_block(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        let mut y = DMatrix::zeros(x.nrows(), x.ncols());
        for j in 0..x.ncols() {
            let xs = x.column(j);
            let mut ys = y.column_mut(j);
            self.apply(xs.as_slice(), ys.as_mut_slice());
        }
        y
    }

    /// Dense materialization, one matvec per unit vector.
    fn materialize(&self) -> DMatrix<f64> {
        self.apply_block(&DMatrix::identity(self.dim(), self.dim()))
    }
}

/// A dense symmetric matrix used as an operator.
#[derive(Debug, Clone)]
pub struct DenseOperator(pub DMatrix<f64>);

impl LinearOperator for DenseOperator {
    fn dim(&self) -> usize {
        self.0.nrows()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let n = self.0.nrows();
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = (0..n).map(|j| self.0[(i, j)] * x[j]).sum();
        }
    }

    fn apply_block(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        &self.0 * x
    }

    fn materialize(&self) -> DMatrix<f64> {
        self.0.clone()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OperatorKind {
    SignedLaplacian,
    SymSignedLaplacian,
    RegSymSignedLaplacian,
    Adjacency,
    Brc,
    Bnc,
    UnsignedLaplacianPlus,
    UnsignedLaplacianMinus,
    UnsignedSymLaplacianPlus,
    UnsignedSymLaplacianMinus,
    RegUnsignedSymLaplacianPlus,
    RegUnsignedSymLaplacianMinus,
}

/// Which end of the spectrum an embedding is taken from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EigenEnd {
    Smallest,
    Largest,
}

/// Embedding selection attached to an operator: which end, and whether the
/// embedding uses `k` or `k - 1` vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddingRule {
    pub end: EigenEnd,
    pub drop_one: bool,
}

impl EmbeddingRule {
    pub fn dim(&self, k: usize) -> usize {
        if self.drop_one {
            k.saturating_sub(1)
        } else {
            k
        }
    }
}

/// How unregularized normalized operators treat rows of zero degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ZeroDegree {
    /// Return [`Error::IsolatedNode`].
    #[default]
    Reject,
    /// Use `d^{-1/2} = 0`, which turns the row into a unit row of `I`.
    UnitRow,
}

#[derive(Debug, Clone)]
pub struct Operator {
    kind: OperatorKind,
    n: usize,
    diag: Vec<f64>,
    alpha: f64,
    scale: Option<Vec<f64>>,
    matrix: Arc<CsrMatrix>,
    beta: f64,
    reg: Regularization,
    shift: f64,
}

impl Operator {
    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    pub fn regularization(&self) -> Regularization {
        self.reg
    }

    /// Multiple of the identity added at construction.
    pub fn shift(&self) -> f64 {
        self.shift
    }

    pub fn embedding_rule(&self) -> EmbeddingRule {
        use OperatorKind::*;
        match self.kind {
            Adjacency => EmbeddingRule {
                end: EigenEnd::Largest,
                drop_one: false,
            },
            SignedLaplacian | SymSignedLaplacian | RegSymSignedLaplacian => EmbeddingRule {
                end: EigenEnd::Smallest,
                drop_one: true,
            },
            _ => EmbeddingRule {
                end: EigenEnd::Smallest,
                drop_one: false,
            },
        }
    }

    /// Add `t I`.
    fn shifted(mut self, t: f64) -> Self {
        for d in &mut self.diag {
            *d += t;
        }
        self.shift += t;
        self
    }

    /// Dense copy. Refused above 5000 nodes.
    pub fn to_dense(&self) -> Result<DMatrix<f64>> {
        const LIMIT: usize = 5000;
        if self.n > LIMIT {
            return Err(Error::TooLarge {
                n: self.n,
                limit: LIMIT,
            });
        }
        let s = |i: usize| self.scale.as_ref().map_or(1.0, |s| s[i]);
        let mut m = DMatrix::from_fn(self.n, self.n, |i, j| self.beta * s(i) * s(j));
        for i in 0..self.n {
            m[(i, i)] += self.diag[i];
            let (cols, vals) = self.matrix.row(i);
            for (&c, &v) in cols.iter().zip(vals) {
                m[(i, c)] += self.alpha * s(i) * v * s(c);
            }
        }
        Ok(m)
    }
}

impl LinearOperator for Operator {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        match &self.scale {
            None => {
                self.matrix.matvec(x, y);
                for i in 0..self.n {
                    y[i] = self.diag[i] * x[i] + self.alpha * y[i];
                }
                if self.beta != 0.0 {
                    let sum: f64 = x.iter().sum();
                    for yi in y.iter_mut() {
                        *yi += self.beta * sum;
                    }
                }
            }
            Some(s) => {
                let sx: Vec<f64> = s.iter().zip(x).map(|(a, b)| a * b).collect();
                self.matrix.matvec(&sx, y);
                for i in 0..self.n {
                    y[i] = self.diag[i] * x[i] + self.alpha * s[i] * y[i];
                }
                if self.beta != 0.0 {
                    let dot: f64 = sx.iter().sum();
                    for i in 0..self.n {
                        y[i] += self.beta * s[i] * dot;
                    }
                }
            }
        }
    }
}

fn inv_sqrt(
    degrees: &[f64],
    gamma: f64,
    policy: ZeroDegree,
    which: &'static str,
) -> Result<Vec<f64>> {
    degrees
        .iter()
        .enumerate()
        .map(|(node, &d)| {
            let v = d + gamma;
            if v > 0.0 {
                Ok(1.0 / v.sqrt())
            } else if policy == ZeroDegree::UnitRow {
                Ok(0.0)
            } else {
                Err(Error::IsolatedNode { node, which })
            }
        })
        .collect()
}

/// `I - D^{-1/2} (W + (c/n) 11ᵀ) D^{-1/2}` with `D = diag(degrees) + gamma I`.
fn normalized(
    kind: OperatorKind,
    matrix: Arc<CsrMatrix>,
    degrees: &[f64],
    gamma: f64,
    rank_one: f64,
    reg: Regularization,
    policy: ZeroDegree,
    which: &'static str,
) -> Result<Operator> {
    let n = matrix.dim();
    let scale = inv_sqrt(degrees, gamma, policy, which)?;
    Ok(Operator {
        kind,
        n,
        diag: vec![1.0; n],
        alpha: -1.0,
        scale: Some(scale),
        matrix,
        beta: if n > 0 { -rank_one / n as f64 } else { 0.0 },
        reg,
        shift: 0.0,
    })
}

/// `L̄ = D̄ − A`.
pub fn signed_laplacian(g: &SignedGraph) -> Operator {
    Operator {
        kind: OperatorKind::SignedLaplacian,
        n: g.n(),
        diag: degrees(g).dbar,
        alpha: -1.0,
        scale: None,
        matrix: g.adjacency().clone(),
        beta: 0.0,
        reg: Regularization::none(),
        shift: 0.0,
    }
}

/// `L̄_sym = I − D̄^{-1/2} A D̄^{-1/2}`; rejects nodes with no edges.
pub fn sym_signed_laplacian(g: &SignedGraph) -> Result<Operator> {
    sym_signed_laplacian_with(g, ZeroDegree::Reject)
}

pub fn sym_signed_laplacian_with(g: &SignedGraph, policy: ZeroDegree) -> Result<Operator> {
    regularized_sym_signed_laplacian_with(g, Regularization::none(), policy)
        .map(|mut op| {
            op.kind = OperatorKind::SymSignedLaplacian;
            op
        })
}

/// `L_γ = I − D̄_γ^{-1/2} A_γ D̄_γ^{-1/2}` with `A_γ = A + ((γ⁺ − γ⁻)/n) 11ᵀ`
/// and `D̄_γ = D̄ + γ I`.
pub fn regularized_sym_signed_laplacian(g: &SignedGraph, reg: Regularization) -> Result<Operator> {
    regularized_sym_signed_laplacian_with(g, reg, ZeroDegree::Reject)
}

pub fn regularized_sym_signed_laplacian_with(
    g: &SignedGraph,
    reg: Regularization,
    policy: ZeroDegree,
) -> Result<Operator> {
    normalized(
        OperatorKind::RegSymSignedLaplacian,
        g.adjacency().clone(),
        &degrees(g).dbar,
        reg.gamma(),
        reg.gamma_plus - reg.gamma_minus,
        reg,
        policy,
        "signed",
    )
}

/// Which half of a signed graph an unsigned operator is built on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Positive,
    Negative,
}

/// `L^±_{sym,γ} = I − (D^± + γ I)^{-1/2} (A^± + (γ/n) 11ᵀ) (D^± + γ I)^{-1/2}`.
pub fn unsigned_sym_laplacian(
    g: &SignedGraph,
    side: Side,
    gamma: f64,
    policy: ZeroDegree,
) -> Result<Operator> {
    if !(gamma >= 0.0 && gamma.is_finite()) {
        return invalid(format!("gamma = {gamma} must be finite and nonnegative"));
    }
    let (matrix, which, kind, reg) = match side {
        Side::Positive => (
            g.positive().clone(),
            "positive",
            if gamma > 0.0 {
                OperatorKind::RegUnsignedSymLaplacianPlus
            } else {
                OperatorKind::UnsignedSymLaplacianPlus
            },
            Regularization {
                gamma_plus: gamma,
                gamma_minus: 0.0,
            },
        ),
        Side::Negative => (
            g.negative().clone(),
            "negative",
            if gamma > 0.0 {
                OperatorKind::RegUnsignedSymLaplacianMinus
            } else {
                OperatorKind::UnsignedSymLaplacianMinus
            },
            Regularization {
                gamma_plus: 0.0,
                gamma_minus: gamma,
            },
        ),
    };
    let deg = matrix.row_sums();
    normalized(kind, matrix, &deg, gamma, gamma, reg, policy, which)
}

/// Combinatorial unsigned Laplacian `D^± − A^±`.
pub fn unsigned_laplacian(g: &SignedGraph, side: Side) -> Operator {
    let (matrix, kind) = match side {
        Side::Positive => (g.positive().clone(), OperatorKind::UnsignedLaplacianPlus),
        Side::Negative => (g.negative().clone(), OperatorKind::UnsignedLaplacianMinus),
    };
    Operator {
        kind,
        n: g.n(),
        diag: matrix.row_sums(),
        alpha: -1.0,
        scale: None,
        matrix,
        beta: 0.0,
        reg: Regularization::none(),
        shift: 0.0,
    }
}

/// The signed adjacency matrix; embeddings use its largest eigenvectors.
pub fn adjacency_operator(g: &SignedGraph) -> Operator {
    Operator {
        kind: OperatorKind::Adjacency,
        n: g.n(),
        diag: vec![0.0; g.n()],
        alpha: 1.0,
        scale: None,
        matrix: g.adjacency().clone(),
        beta: 0.0,
        reg: Regularization::none(),
        shift: 0.0,
    }
}

/// Balanced ratio cut `D⁺ − A`.
pub fn brc_operator(g: &SignedGraph) -> Operator {
    Operator {
        kind: OperatorKind::Brc,
        n: g.n(),
        diag: degrees(g).dplus,
        alpha: -1.0,
        scale: None,
        matrix: g.adjacency().clone(),
        beta: 0.0,
        reg: Regularization::none(),
        shift: 0.0,
    }
}

/// Balanced normalized cut `D̄^{-1/2} (D⁺ − A) D̄^{-1/2}`.
pub fn bnc_operator(g: &SignedGraph) -> Result<Operator> {
    bnc_operator_with(g, ZeroDegree::Reject)
}

pub fn bnc_operator_with(g: &SignedGraph, policy: ZeroDegree) -> Result<Operator> {
    let d = degrees(g);
    let scale = inv_sqrt(&d.dbar, 0.0, policy, "signed")?;
    let diag = d
        .dplus
        .iter()
        .zip(&d.dbar)
        .map(|(p, b)| if *b > 0.0 { p / b } else { 1.0 })
        .collect();
    Ok(Operator {
        kind: OperatorKind::Bnc,
        n: g.n(),
        diag,
        alpha: -1.0,
        scale: Some(scale),
        matrix: g.adjacency().clone(),
        beta: 0.0,
        reg: Regularization::none(),
        shift: 0.0,
    })
}

/// Symmetric-definite pair `(numerator, denominator)` for the problem
/// `numerator v = λ denominator v`.
#[derive(Debug, Clone)]
pub struct Pencil {
    pub numerator: Operator,
    pub denominator: Operator,
    pub tau_plus: f64,
    pub tau_minus: f64,
    /// Smallest Ritz value of the denominator after a short Lanczos run
    /// (an upper estimate of its smallest eigenvalue).
    pub denominator_ritz_min: f64,
    /// Ritz value minus its residual norm: a heuristic lower estimate.
    pub denominator_lower_estimate: f64,
}

const LANCZOS_STEPS: usize = 20;

/// `(θ_min, θ_min − |residual|)` from a fully reorthogonalized Lanczos run.
pub fn lanczos_min_estimate(op: &dyn LinearOperator, steps: usize, seed: u64) -> (f64, f64) {
    let n = op.dim();
    if n == 0 {
        return (f64::INFINITY, f64::INFINITY);
    }
    let m = steps.min(n);
    let mut r = rng::stream(seed, rng::tag::LANCZOS);
    let mut q: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut r)).collect();
    let norm = q.iter().map(|v| v * v).sum::<f64>().sqrt();
    q.iter_mut().for_each(|v| *v /= norm);
    let mut basis: Vec<Vec<f64>> = vec![q];
    let mut alphas = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut w = vec![0.0; n];
    loop {
        let j = basis.len() - 1;
        op.apply(&basis[j], &mut w);
        let a: f64 = w.iter().zip(&basis[j]).map(|(x, y)| x * y).sum();
        alphas.push(a);
        for _ in 0..2 {
            for b in &basis {
                let c: f64 = w.iter().zip(b).map(|(x, y)| x * y).sum();
                w.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
            }
        }
        let beta = w.iter().map(|v| v * v).sum::<f64>().sqrt();
        if basis.len() == m || beta <= 1e-12 * a.abs().max(1.0) {
            betas.push(beta);
            break;
        }
        betas.push(beta);
        basis.push(w.iter().map(|v| v / beta).collect());
    }
    let len = alphas.len();
    let t = DMatrix::from_fn(len, len, |i, j| {
        if i == j {
            alphas[i]
        } else if i + 1 == j {
            betas[i]
        } else if j + 1 == i {
            betas[j]
        } else {
            0.0
        }
    });
    let eig = t.symmetric_eigen();
    let (idx, theta) = eig
        .eigenvalues
        .iter()
        .copied()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap();
    let resid = (betas[len - 1] * eig.eigenvectors[(len - 1, idx)]).abs();
    (theta, theta - resid)
}

fn finish_pencil(
    numerator: Operator,
    denominator: Operator,
    tau_plus: f64,
    tau_minus: f64,
) -> Result<Pencil> {
    let (ritz, lower) = lanczos_min_estimate(&denominator, LANCZOS_STEPS, 0);
    // A Ritz value is an upper bound on the smallest eigenvalue, so a
    // nonpositive one proves the denominator is not definite.
    if ritz <= 0.0 {
        return Err(Error::IndefinitePencil(ritz));
    }
    Ok(Pencil {
        numerator,
        denominator,
        tau_plus,
        tau_minus,
        denominator_ritz_min: ritz,
        denominator_lower_estimate: lower,
    })
}

fn check_taus(tau_plus: f64, tau_minus: f64) -> Result<()> {
    if !(tau_plus > 0.0 && tau_plus.is_finite()) {
        return invalid(format!("tau_plus = {tau_plus} must be positive"));
    }
    if !(tau_minus >= 0.0 && tau_minus.is_finite()) {
        return invalid(format!("tau_minus = {tau_minus} must be nonnegative"));
    }
    Ok(())
}

/// `(L⁺_{sym,γ⁺} + τ⁻ I, L⁻_{sym,γ⁻} + τ⁺ I)`; `reg = none` gives the
/// unregularized pencil.
pub fn sponge_sym_pencil(
    g: &SignedGraph,
    tau_plus: f64,
    tau_minus: f64,
    reg: Regularization,
) -> Result<Pencil> {
    sponge_sym_pencil_with(g, tau_plus, tau_minus, reg, ZeroDegree::Reject)
}

pub fn sponge_sym_pencil_with(
    g: &SignedGraph,
    tau_plus: f64,
    tau_minus: f64,
    reg: Regularization,
    policy: ZeroDegree,
) -> Result<Pencil> {
    check_taus(tau_plus, tau_minus)?;
    let num = unsigned_sym_laplacian(g, Side::Positive, reg.gamma_plus, policy)?.shifted(tau_minus);
    let den = unsigned_sym_laplacian(g, Side::Negative, reg.gamma_minus, policy)?.shifted(tau_plus);
    finish_pencil(num, den, tau_plus, tau_minus)
}

/// `(L⁺ + τ⁻ D⁻, L⁻ + τ⁺ D⁺)` with combinatorial Laplacians.
///
/// The denominator is singular exactly when some connected component of the
/// negative graph contains no node with positive degree; that case is
/// rejected before the Lanczos check.
pub fn sponge_pencil(g: &SignedGraph, tau_plus: f64, tau_minus: f64) -> Result<Pencil> {
    check_taus(tau_plus, tau_minus)?;
    let d = degrees(g);
    let mut num = unsigned_laplacian(g, Side::Positive);
    for (x, m) in num.diag.iter_mut().zip(&d.dminus) {
        *x += tau_minus * m;
    }
    let mut den = unsigned_laplacian(g, Side::Negative);
    for (x, p) in den.diag.iter_mut().zip(&d.dplus) {
        *x += tau_plus * p;
    }
    if support_components(g.negative())
        .iter()
        .any(|c| c.iter().all(|&v| d.dplus[v] == 0.0))
    {
        return Err(Error::IndefinitePencil(0.0));
    }
    finish_pencil(num, den, tau_plus, tau_minus)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_from_edges;

    fn eigvals(m: &DMatrix<f64>) -> Vec<f64> {
        let mut v: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
        v.sort_by(f64::total_cmp);
        v
    }

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn two_node_laplacians() {
        let pos = build_from_edges(2, &[(0, 1, 1.0)]).unwrap();
        let neg = build_from_edges(2, &[(0, 1, -1.0)]).unwrap();
        let lp = signed_laplacian(&pos).to_dense().unwrap();
        assert_eq!(lp, DMatrix::from_row_slice(2, 2, &[1., -1., -1., 1.]));
        let ln = signed_laplacian(&neg).to_dense().unwrap();
        assert_eq!(ln, DMatrix::from_row_slice(2, 2, &[1., 1., 1., 1.]));
        assert!(close(&eigvals(&lp), &[0.0, 2.0], 1e-14));
        assert!(close(&eigvals(&ln), &[0.0, 2.0], 1e-14));
        let ls = sym_signed_laplacian(&pos).unwrap().to_dense().unwrap();
        assert!(close(&eigvals(&ls), &[0.0, 2.0], 1e-14));
    }

    #[test]
    fn isolated_node_is_rejected_or_unit_row() {
        let g = build_from_edges(3, &[(0, 1, 1.0)]).unwrap();
        assert!(matches!(
            sym_signed_laplacian(&g),
            Err(Error::IsolatedNode { node: 2, .. })
        ));
        let op = sym_signed_laplacian_with(&g, ZeroDegree::UnitRow).unwrap();
        let m = op.to_dense().unwrap();
        assert_eq!(m[(2, 2)], 1.0);
        assert_eq!(m[(2, 0)], 0.0);
    }

    #[test]
    fn empty_graph_regularized_is_projector() {
        let n = 6;
        let g = SignedGraph::empty(n);
        let op = regularized_sym_signed_laplacian(&g, Regularization::new(1.0, 0.0).unwrap()).unwrap();
        let mut want = vec![1.0; n];
        want[0] = 0.0;
        assert!(close(&eigvals(&op.to_dense().unwrap()), &want, 1e-12));
    }

    #[test]
    fn complete_unsigned_spectrum_and_large_gamma_limit() {
        let n = 10;
        let edges: Vec<_> = (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j, 1.0)))
            .collect();
        let g = build_from_edges(n, &edges).unwrap();
        let op = unsigned_sym_laplacian(&g, Side::Positive, 0.0, ZeroDegree::Reject).unwrap();
        let mut want = vec![n as f64 / (n as f64 - 1.0); n];
        want[0] = 0.0;
        assert!(close(&eigvals(&op.to_dense().unwrap()), &want, 1e-12));

        let op = unsigned_sym_laplacian(&g, Side::Positive, 1e6, ZeroDegree::Reject).unwrap();
        let proj = DMatrix::identity(n, n) - DMatrix::from_element(n, n, 1.0 / n as f64);
        assert!((op.to_dense().unwrap() - proj).amax() < 1e-3);
    }

    #[test]
    fn brc_small_cases() {
        let neg = build_from_edges(2, &[(0, 1, -1.0)]).unwrap();
        let m = brc_operator(&neg).to_dense().unwrap();
        assert_eq!(m, DMatrix::from_row_slice(2, 2, &[0., 1., 1., 0.]));
        let pos = build_from_edges(3, &[(0, 1, 1.0), (1, 2, 2.0)]).unwrap();
        let brc = brc_operator(&pos).to_dense().unwrap();
        let lap = unsigned_laplacian(&pos, Side::Positive).to_dense().unwrap();
        assert_eq!(brc, lap);
    }

    #[test]
    fn embedding_rules() {
        let g = build_from_edges(3, &[(0, 1, 1.0), (1, 2, -1.0)]).unwrap();
        assert_eq!(adjacency_operator(&g).embedding_rule().end, EigenEnd::Largest);
        assert_eq!(sym_signed_laplacian(&g).unwrap().embedding_rule().dim(3), 2);
        assert_eq!(brc_operator(&g).embedding_rule().dim(3), 3);
    }

    #[test]
    fn pencil_rejects_bad_tau_and_singular_denominator() {
        let g = build_from_edges(4, &[(0, 1, 1.0), (1, 2, -1.0), (2, 3, 1.0), (0, 3, -1.0)]).unwrap();
        assert!(sponge_sym_pencil(&g, 0.0, 1.0, Regularization::none()).is_err());
        assert!(sponge_sym_pencil(&g, 1.0, -1.0, Regularization::none()).is_err());
        assert!(sponge_sym_pencil(&g, 1.0, 1.0, Regularization::none()).is_ok());
        assert!(sponge_pencil(&g, 1.0, 1.0).is_ok());
        // Node 2 has no positive edge and forms its own negative component
        // with node 3, which also has no positive edge.
        let h = build_from_edges(4, &[(0, 1, 1.0), (2, 3, -1.0)]).unwrap();
        assert!(matches!(
            sponge_pencil(&h, 1.0, 1.0),
            Err(Error::IndefinitePencil(_))
        ));
    }

    #[test]
    fn lanczos_estimate_brackets_small_spectrum() {
        let m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![0.5, 1.0, 2.0, 3.0]));
        let (ritz, lower) = lanczos_min_estimate(&DenseOperator(m), 20, 1);
        assert!((ritz - 0.5).abs() < 1e-10);
        assert!(lower <= ritz);
    }
}
