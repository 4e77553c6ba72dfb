//! Closed forms for the expected graph of the signed stochastic block model.
//!
//! For SPONGE_sym the expected operator `T̄ = P̄^{-1/2} Q̄ P̄^{-1/2}`, with
//! `Q̄ = E[L⁺_sym] + τ⁻ I` and `P̄ = E[L⁻_sym] + τ⁺ I`, acts on the span of
//! the normalized membership matrix `Θ` through the k×k matrices `C⁺`, `C⁻`
//! and as the scalar `α⁺ᵢ/α⁻ᵢ` on the vectors of cluster `i` orthogonal to
//! the constant. For the symmetric signed Laplacian of the expected graph the
//! analogous pieces are `C̄` and `ᾱ`.
//!
//! Every closed form here has a dense counterpart built from
//! [`ssbm::expected_adjacency`](crate::ssbm::expected_adjacency) and friends,
//! so the two can be compared.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::eigen::{dense_sym_eigenvalues, subspace_distance, DENSE_LIMIT};
use crate::error::{invalid, Error, Result};
use crate::graph::SignedGraph;
use crate::operators::sym_signed_laplacian;
use crate::ssbm::{expected_adjacency, expected_negative_adjacency, expected_positive_adjacency, SsbmParams};

/// Largest `k` handled by the k×k closed forms.
pub const MAX_K: usize = 64;

/// Dense-constant used for the dense-regime density threshold.
pub const DENSE_CONSTANT: f64 = 43.0;

fn sym_eigh(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let eig = ((m + m.transpose()) * 0.5).symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = DMatrix::from_fn(m.nrows(), order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
    (vals, vecs)
}

/// `m^{-1/2}` for symmetric positive definite `m`.
fn inv_sqrt_spd(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let (vals, vecs) = sym_eigh(m);
    if vals.iter().any(|&v| v <= 0.0) {
        return invalid("matrix is not positive definite");
    }
    let d = DMatrix::from_diagonal(&DVector::from_iterator(vals.len(), vals.iter().map(|v| 1.0 / v.sqrt())));
    Ok(&vecs * d * vecs.transpose())
}

fn check_k(params: &SsbmParams) -> Result<()> {
    params.validate()?;
    if params.k > MAX_K {
        return invalid(format!("k = {} exceeds {MAX_K}", params.k));
    }
    Ok(())
}

fn dense_guard(n: usize) -> Result<()> {
    if n > DENSE_LIMIT {
        return Err(Error::TooLarge {
            n,
            limit: DENSE_LIMIT,
        });
    }
    Ok(())
}

/// Expected positive degree of a node in cluster `i`.
pub fn expected_dplus(params: &SsbmParams, i: usize) -> f64 {
    let (n, p, eta) = (params.n as f64, params.p, params.eta);
    let s = params.sizes[i] as f64 / n;
    p * (n * (s * (1.0 - 2.0 * eta) + eta) - (1.0 - eta))
}

/// Expected negative degree of a node in cluster `i`.
pub fn expected_dminus(params: &SsbmParams, i: usize) -> f64 {
    let (n, p, eta) = (params.n as f64, params.p, params.eta);
    let s = params.sizes[i] as f64 / n;
    p * (n * (-s * (1.0 - 2.0 * eta) + (1.0 - eta)) - eta)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpongeBlocks {
    pub tau_plus: f64,
    pub tau_minus: f64,
    pub sizes: Vec<usize>,
    pub dplus: Vec<f64>,
    pub dminus: Vec<f64>,
    pub alpha_plus: Vec<f64>,
    pub alpha_minus: Vec<f64>,
    pub u_plus: Vec<f64>,
    pub u_minus: Vec<f64>,
    pub cplus: DMatrix<f64>,
    pub cminus: DMatrix<f64>,
    /// Eigenvalues of `(C⁻)^{-1/2} C⁺ (C⁻)^{-1/2}`, ascending.
    pub lambda: Vec<f64>,
    /// Matching eigenvectors.
    pub r: DMatrix<f64>,
}

/// The k×k blocks of the expected SPONGE_sym operator.
pub fn expected_sponge_blocks(params: &SsbmParams, tau_plus: f64, tau_minus: f64) -> Result<SpongeBlocks> {
    check_k(params)?;
    if !(tau_plus > 0.0) || !(tau_minus >= 0.0) {
        return invalid("need tau_plus > 0 and tau_minus >= 0");
    }
    let k = params.k;
    let (p, eta) = (params.p, params.eta);
    let dplus: Vec<f64> = (0..k).map(|i| expected_dplus(params, i)).collect();
    let dminus: Vec<f64> = (0..k).map(|i| expected_dminus(params, i)).collect();
    if dplus.iter().chain(&dminus).any(|&d| !(d > 0.0)) {
        return invalid("an expected cluster degree is not positive; increase n or p");
    }
    let ni: Vec<f64> = params.sizes.iter().map(|&s| s as f64).collect();
    let u_plus: Vec<f64> = (0..k).map(|i| (ni[i] / dplus[i]).sqrt()).collect();
    let u_minus: Vec<f64> = (0..k).map(|i| (ni[i] / dminus[i]).sqrt()).collect();
    let alpha_plus = (0..k).map(|i| 1.0 + tau_minus + p * (1.0 - eta) / dplus[i]).collect();
    let alpha_minus = (0..k).map(|i| 1.0 + tau_plus + p * eta / dminus[i]).collect();
    let cplus = DMatrix::from_fn(k, k, |i, j| {
        let diag = if i == j {
            1.0 + tau_minus + p / dplus[i] * (1.0 - eta - ni[i] * (1.0 - 2.0 * eta))
        } else {
            0.0
        };
        diag - p * eta * u_plus[i] * u_plus[j]
    });
    let cminus = DMatrix::from_fn(k, k, |i, j| {
        let diag = if i == j {
            1.0 + tau_plus + p / dminus[i] * (eta + ni[i] * (1.0 - 2.0 * eta))
        } else {
            0.0
        };
        diag - p * (1.0 - eta) * u_minus[i] * u_minus[j]
    });
    let h = inv_sqrt_spd(&cminus)?;
    let (lambda, r) = sym_eigh(&(&h * &cplus * &h));
    Ok(SpongeBlocks {
        tau_plus,
        tau_minus,
        sizes: params.sizes.clone(),
        dplus,
        dminus,
        alpha_plus,
        alpha_minus,
        u_plus,
        u_minus,
        cplus,
        cminus,
        lambda,
        r,
    })
}

impl SpongeBlocks {
    /// `(C⁻)^{-1/2} C⁺ (C⁻)^{-1/2}`.
    pub fn core(&self) -> DMatrix<f64> {
        let h = inv_sqrt_spd(&self.cminus).expect("checked at construction");
        &h * &self.cplus * &h
    }

    /// `α⁺ᵢ / α⁻ᵢ`, the eigenvalue of `T̄` on cluster `i`'s non-constant
    /// directions.
    pub fn ratios(&self) -> Vec<f64> {
        self.alpha_plus
            .iter()
            .zip(&self.alpha_minus)
            .map(|(a, b)| a / b)
            .collect()
    }

    /// Spectral norm of the core matrix, its largest eigenvalue.
    pub fn core_norm(&self) -> f64 {
        self.lambda.iter().fold(0.0, |a: f64, v| a.max(v.abs()))
    }

    pub fn min_ratio(&self) -> f64 {
        self.ratios().into_iter().fold(f64::INFINITY, f64::min)
    }

    /// Whether the k smallest eigenvalues of `T̄` are the core eigenvalues,
    /// so that its k smallest eigenvectors span `Θ`.
    pub fn embedding_is_informative(&self) -> bool {
        self.core_norm() < self.min_ratio()
    }

    /// Smallest eigenvalue of `C⁻`.
    pub fn cminus_min_eigenvalue(&self) -> f64 {
        sym_eigh(&self.cminus).0[0]
    }

    /// `T̄` assembled from the blocks:
    /// `Θ core Θᵀ + Σᵢ (α⁺ᵢ/α⁻ᵢ)(diag(1_{Cᵢ}) − θᵢθᵢᵀ)`.
    pub fn assemble_tbar(&self, params: &SsbmParams) -> Result<DMatrix<f64>> {
        dense_guard(params.n)?;
        let theta = params.ground_truth().normalized_membership();
        let labels = params.ground_truth().labels;
        let core = self.core();
        let ratios = self.ratios();
        let mut t = &theta * core * theta.transpose();
        for a in 0..params.n {
            for b in 0..params.n {
                let i = labels[a];
                if labels[b] == i {
                    let proj = if a == b { 1.0 } else { 0.0 } - 1.0 / self.sizes[i] as f64;
                    t[(a, b)] += ratios[i] * proj;
                }
            }
        }
        Ok(t)
    }

    /// `Θ (C⁻)^{-1/2} R`: the embedding given by the k smallest generalized
    /// eigenvectors of the expected pencil.
    pub fn expected_embedding(&self, params: &SsbmParams) -> DMatrix<f64> {
        let theta = params.ground_truth().normalized_membership();
        let h = inv_sqrt_spd(&self.cminus).expect("checked at construction");
        theta * h * &self.r
    }
}

/// Dense `T̄` from the expected adjacency matrices, independent of the
/// block formulas.
pub fn expected_tbar_dense(params: &SsbmParams, tau_plus: f64, tau_minus: f64) -> Result<DMatrix<f64>> {
    dense_guard(params.n)?;
    let normalized = |a: DMatrix<f64>, shift: f64| -> Result<DMatrix<f64>> {
        let d = a.column_sum();
        if d.iter().any(|&x| !(x > 0.0)) {
            return invalid("zero expected degree");
        }
        let s = d.map(|x| 1.0 / x.sqrt());
        let n = a.nrows();
        Ok(DMatrix::from_fn(n, n, |i, j| {
            (if i == j { 1.0 + shift } else { 0.0 }) - s[i] * a[(i, j)] * s[j]
        }))
    };
    let q = normalized(expected_positive_adjacency(params)?, tau_minus)?;
    let p = normalized(expected_negative_adjacency(params)?, tau_plus)?;
    let h = inv_sqrt_spd(&p)?;
    Ok(&h * q * &h)
}

/// Dense `P̄ = E[L⁻_sym] + τ⁺ I` and `Q̄ = E[L⁺_sym] + τ⁻ I`.
pub fn expected_pencil_dense(
    params: &SsbmParams,
    tau_plus: f64,
    tau_minus: f64,
) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    dense_guard(params.n)?;
    let normalized = |a: DMatrix<f64>, shift: f64| {
        let s = a.column_sum().map(|x| 1.0 / x.sqrt());
        let n = a.nrows();
        DMatrix::from_fn(n, n, |i, j| {
            (if i == j { 1.0 + shift } else { 0.0 }) - s[i] * a[(i, j)] * s[j]
        })
    };
    Ok((
        normalized(expected_positive_adjacency(params)?, tau_minus),
        normalized(expected_negative_adjacency(params)?, tau_plus),
    ))
}

/// Closed-form spectrum for equal cluster sizes: the eigenvalue of the
/// core matrix along the all-ones direction and the one repeated `k − 1`
/// times, each as `(Σ⁺, Σ⁻, ratio)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EqualSizeSponge {
    pub sigma_plus_ones: f64,
    pub sigma_minus_ones: f64,
    pub sigma_plus_rest: f64,
    pub sigma_minus_rest: f64,
}

impl EqualSizeSponge {
    pub fn ratio_ones(&self) -> f64 {
        self.sigma_plus_ones / self.sigma_minus_ones
    }

    pub fn ratio_rest(&self) -> f64 {
        self.sigma_plus_rest / self.sigma_minus_rest
    }

    /// The core-matrix spectrum (one value plus `k − 1` copies), ascending.
    pub fn spectrum(&self, k: usize) -> Vec<f64> {
        let mut v = vec![self.ratio_ones()];
        v.extend(std::iter::repeat_n(self.ratio_rest(), k - 1));
        v.sort_by(f64::total_cmp);
        v
    }

    /// `max{τ⁻/τ⁺, (τ⁻ + pnη/d⁺)/(τ⁺ + pn(1−η)/d⁻)}`.
    pub fn norm(&self) -> f64 {
        self.ratio_ones().abs().max(self.ratio_rest().abs())
    }
}

pub fn equal_size_sponge(params: &SsbmParams, tau_plus: f64, tau_minus: f64) -> Result<EqualSizeSponge> {
    params.validate()?;
    if !params.is_equal_sized() {
        return invalid("cluster sizes are not equal");
    }
    let (n, k, p, eta) = (params.n as f64, params.k as f64, params.p, params.eta);
    let dp = expected_dplus(params, 0);
    let dm = expected_dminus(params, 0);
    Ok(EqualSizeSponge {
        sigma_plus_ones: 1.0 + tau_minus + p / dp * (1.0 - eta - n * (eta + (1.0 - 2.0 * eta) / k)),
        sigma_minus_ones: 1.0 + tau_plus + p / dm * (eta - n * (1.0 - eta - (1.0 - 2.0 * eta) / k)),
        sigma_plus_rest: 1.0 + tau_minus + p / dp * (1.0 - eta - n * (1.0 - 2.0 * eta) / k),
        sigma_minus_rest: 1.0 + tau_plus + p / dm * (eta + n * (1.0 - 2.0 * eta) / k),
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LaplacianBlocks {
    pub alpha_bar: f64,
    pub bbar: DMatrix<f64>,
    pub cbar: DMatrix<f64>,
    /// Eigenvalues of `C̄`, ascending.
    pub eigenvalues: Vec<f64>,
    /// Eigenvectors of `C̄`, ascending.
    pub r: DMatrix<f64>,
}

/// Blocks of `𝓛_sym = I − E[A]/d̄`.
pub fn expected_laplacian_blocks(params: &SsbmParams) -> Result<LaplacianBlocks> {
    check_k(params)?;
    if !(params.p > 0.0) || params.n < 2 {
        return invalid("need p > 0 and n >= 2");
    }
    let dbar = params.dbar();
    let c = params.p * (1.0 - 2.0 * params.eta) / dbar;
    let alpha_bar = 1.0 + c;
    let ni: Vec<f64> = params.sizes.iter().map(|&s| s as f64).collect();
    let k = params.k;
    let bbar = DMatrix::from_fn(k, k, |i, j| {
        if i == j {
            ni[i] * c
        } else {
            -(ni[i] * ni[j]).sqrt() * c
        }
    });
    let cbar = DMatrix::identity(k, k) * alpha_bar - &bbar;
    let (eigenvalues, r) = sym_eigh(&cbar);
    Ok(LaplacianBlocks {
        alpha_bar,
        bbar,
        cbar,
        eigenvalues,
        r,
    })
}

impl LaplacianBlocks {
    /// `spectrum(C̄) ∪ {ᾱ}^{n−k}`, ascending.
    pub fn full_spectrum(&self, n: usize) -> Vec<f64> {
        let k = self.eigenvalues.len();
        let mut v = self.eigenvalues.clone();
        v.extend(std::iter::repeat_n(self.alpha_bar, n - k));
        v.sort_by(f64::total_cmp);
        v
    }

    /// `R_{k−1}`: the `k − 1` smallest eigenvectors of `C̄`.
    pub fn r_km1(&self) -> DMatrix<f64> {
        let k = self.r.ncols();
        self.r.columns(0, k - 1).into_owned()
    }

    /// `Θ R_{k−1}`.
    pub fn expected_embedding(&self, params: &SsbmParams) -> DMatrix<f64> {
        params.ground_truth().normalized_membership() * self.r_km1()
    }
}

/// Dense `𝓛_sym = I − E[A]/d̄`.
pub fn expected_laplacian_dense(params: &SsbmParams) -> Result<DMatrix<f64>> {
    dense_guard(params.n)?;
    let a = expected_adjacency(params)?;
    Ok(DMatrix::identity(params.n, params.n) - a / params.dbar())
}

/// `(2 n p / (k d̄)) (1 − 2η)` for equal cluster sizes.
pub fn eigengap_equal(params: &SsbmParams) -> Result<f64> {
    params.validate()?;
    if !params.is_equal_sized() {
        return invalid("eigengap_equal needs equal cluster sizes");
    }
    let (n, k) = (params.n as f64, params.k as f64);
    Ok(2.0 * n * params.p / (k * params.dbar()) * (1.0 - 2.0 * params.eta))
}

/// Threshold on `√ρ` above which the general eigengap bound applies.
pub fn rho_threshold(k: usize) -> f64 {
    let k = k as f64;
    1.0 - 1.0 / (4.0 * k * (2.0 + k.sqrt()))
}

/// `(1 − 2η)/k` and whether `√ρ` clears [`rho_threshold`].
pub fn eigengap_lower_bound(params: &SsbmParams) -> (f64, bool) {
    (
        (1.0 - 2.0 * params.eta) / params.k as f64,
        params.rho().sqrt() > rho_threshold(params.k),
    )
}

/// Gap between the `k`-th and `(k−1)`-th smallest eigenvalues of a
/// dense spectrum.
pub fn spectrum_gap(spectrum: &[f64], k: usize) -> f64 {
    spectrum[k - 1] - spectrum[k - 2]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TauCase {
    /// `β = 4η / (s(1−2η) + 4η)`.
    Case1,
    /// `β = 1/2`, requires `η ≤ s/(2s+4)`.
    Case2,
    Inadmissible,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TauAdmissibility {
    pub verdict: TauCase,
    pub beta: Option<f64>,
    pub tau_plus_lower: Option<f64>,
    pub tau_minus_upper: Option<f64>,
    /// `n ≥ max{2(1−η)/(s(1−2η)), 2η/((1−l)(1−η))}`.
    pub n_condition_met: bool,
}

fn tau_bounds(beta: f64, s: f64, eta: f64, tau_plus: f64) -> (f64, f64) {
    let a = s * (1.0 - 2.0 * eta);
    let lower = 16.0 * eta / (beta * a);
    let cap = (1.0 / (4.0 * (1.0 - beta))).min(tau_plus / 8.0);
    let upper = beta / 2.0 * (a / (a + 2.0 * eta)) * cap;
    (lower, upper)
}

/// Check `(τ⁺, τ⁻)` against the two parameter regimes of the SPONGE_sym
/// recovery guarantee, trying `β = 1/2` first.
pub fn sponge_tau_admissible(params: &SsbmParams, tau_plus: f64, tau_minus: f64) -> TauAdmissibility {
    let (s, l, eta, n) = (params.s(), params.l(), params.eta, params.n as f64);
    let n_need = (2.0 * (1.0 - eta) / (s * (1.0 - 2.0 * eta))).max(if l < 1.0 {
        2.0 * eta / ((1.0 - l) * (1.0 - eta))
    } else {
        f64::INFINITY
    });
    let n_condition_met = n >= n_need;
    let mut candidates = Vec::new();
    if eta <= s / (2.0 * s + 4.0) {
        candidates.push((TauCase::Case2, 0.5));
    }
    if eta > 0.0 && eta < 0.5 {
        candidates.push((TauCase::Case1, 4.0 * eta / (s * (1.0 - 2.0 * eta) + 4.0 * eta)));
    }
    for (case, beta) in candidates {
        let (lower, upper) = tau_bounds(beta, s, eta, tau_plus);
        if tau_plus > lower && tau_minus < upper {
            return TauAdmissibility {
                verdict: case,
                beta: Some(beta),
                tau_plus_lower: Some(lower),
                tau_minus_upper: Some(upper),
                n_condition_met,
            };
        }
    }
    TauAdmissibility {
        verdict: TauCase::Inadmissible,
        beta: None,
        tau_plus_lower: None,
        tau_minus_upper: None,
        n_condition_met,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecommendedRegularization {
    /// Edge probability used: the model's `p`, or the graph estimate.
    pub p: f64,
    pub empirical: bool,
    /// `d̄^{7/8}` with `d̄ = p (n − 1)`.
    pub gamma_laplacian: f64,
    /// Even split of `gamma_laplacian`.
    pub laplacian: crate::graph::Regularization,
    /// `(n p (1 − η))^{6/7}`, used on both sides.
    pub gamma_sponge: f64,
}

fn recommend(n: usize, p: f64, eta: f64, empirical: bool) -> Result<RecommendedRegularization> {
    if !(p > 0.0) {
        return invalid("recommended regularization needs p > 0");
    }
    let nf = n as f64;
    let gamma_laplacian = (p * (nf - 1.0)).powf(7.0 / 8.0);
    Ok(RecommendedRegularization {
        p,
        empirical,
        gamma_laplacian,
        laplacian: crate::graph::Regularization::even(gamma_laplacian)?,
        gamma_sponge: (nf * p * (1.0 - eta)).powf(6.0 / 7.0),
    })
}

pub fn recommended_regularization(params: &SsbmParams) -> Result<RecommendedRegularization> {
    params.validate()?;
    recommend(params.n, params.p, params.eta, false)
}

/// Same rule with `p` replaced by `p̂ = 2/(n(n−1)) Σ_{i<j} |A_ij|`. The flip
/// probability cannot be read off a graph, so the caller supplies a guess.
pub fn recommended_regularization_from_graph(g: &SignedGraph, eta: f64) -> Result<RecommendedRegularization> {
    recommend(g.n(), g.density(), eta, true)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MisclusteringBounds {
    /// `δ²(64+32ξ) k (τ⁺ + 2/(1−l)) ((τ⁺)³+1)/(τ⁺)⁴`.
    pub sponge: f64,
    /// Largest `δ` for which the SPONGE bound forces exact recovery.
    pub sponge_exact_recovery_delta: f64,
    /// `96(2+ξ)(k−1)δ²`.
    pub laplacian: f64,
    /// `√(1/(12(16+8ξ)(k−1)))`, the admissible range of `δ`.
    pub laplacian_delta_max: f64,
}

pub fn misclustering_bounds(delta: f64, xi: f64, k: usize, tau_plus: f64, l: f64) -> MisclusteringBounds {
    let kf = k as f64;
    let factor = (64.0 + 32.0 * xi) * kf * (tau_plus + 2.0 / (1.0 - l)) * (tau_plus.powi(3) + 1.0);
    MisclusteringBounds {
        sponge: delta * delta * factor / tau_plus.powi(4),
        sponge_exact_recovery_delta: tau_plus * tau_plus / factor.sqrt(),
        laplacian: 96.0 * (2.0 + xi) * (kf - 1.0) * delta * delta,
        laplacian_delta_max: (1.0 / (12.0 * (16.0 + 8.0 * xi) * (kf - 1.0))).sqrt(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityThresholds {
    /// Constant `C` of the dense condition.
    pub c_dense: f64,
    /// `C(k,η,δ) ln n / n` with `C(k,η,δ) = (2Ck/(δ(1−2η)))²`.
    pub dense: f64,
    /// Constant `C` inside `C₄ = 128 C r² + 1` (no value is fixed for it).
    pub c_sparse: f64,
    pub r: f64,
    pub c4: f64,
    /// `(2kC₄/(δ(1−2η)))⁸ · 2/n`.
    pub sparse: f64,
}

pub fn dense_density_condition(params: &SsbmParams, delta: f64, r: f64) -> DensityThresholds {
    let (n, k, eta) = (params.n as f64, params.k as f64, params.eta);
    let c_sparse = 1.0;
    let c4 = 128.0 * c_sparse * r * r + 1.0;
    let base = (2.0 * DENSE_CONSTANT * k / (delta * (1.0 - 2.0 * eta))).powi(2);
    DensityThresholds {
        c_dense: DENSE_CONSTANT,
        dense: base * n.ln() / n,
        c_sparse,
        r,
        c4,
        sparse: (2.0 * k * c4 / (delta * (1.0 - 2.0 * eta))).powi(8) * 2.0 / n,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowSeparation {
    /// Minimum over cluster pairs of `‖(R_{k−1})ᵢ − (R_{k−1})ᵢ'‖`.
    pub min_row_distance: f64,
    /// Minimum over pairs of `‖(R_{k−1})ᵢ/√nᵢ − (R_{k−1})ᵢ'/√nᵢ'‖²`.
    pub min_scaled_sq_distance: f64,
    /// Per pair, the scaled distance minus `2/(3 max(nᵢ, nᵢ'))`; the
    /// smallest value over pairs.
    pub min_scaled_margin: f64,
    /// The aspect-ratio condition under which the bounds are guaranteed.
    pub condition_met: bool,
}

pub fn check_row_separation(params: &SsbmParams) -> Result<RowSeparation> {
    let blocks = expected_laplacian_blocks(params)?;
    let r = blocks.r_km1();
    let k = params.k;
    let ni: Vec<f64> = params.sizes.iter().map(|&s| s as f64).collect();
    let mut out = RowSeparation {
        min_row_distance: f64::INFINITY,
        min_scaled_sq_distance: f64::INFINITY,
        min_scaled_margin: f64::INFINITY,
        condition_met: eigengap_lower_bound(params).1,
    };
    for i in 0..k {
        for j in (i + 1)..k {
            let d = (r.row(i) - r.row(j)).norm();
            let scaled = (r.row(i) / ni[i].sqrt() - r.row(j) / ni[j].sqrt()).norm_squared();
            out.min_row_distance = out.min_row_distance.min(d);
            out.min_scaled_sq_distance = out.min_scaled_sq_distance.min(scaled);
            out.min_scaled_margin = out
                .min_scaled_margin
                .min(scaled - 2.0 / (3.0 * ni[i].max(ni[j])));
        }
    }
    Ok(out)
}

/// `‖L̄_sym − 𝓛_sym‖₂` for a sampled graph and its model.
pub fn laplacian_deviation(g: &SignedGraph, params: &SsbmParams) -> Result<f64> {
    dense_guard(params.n)?;
    if g.n() != params.n {
        return Err(Error::DimensionMismatch("graph and model sizes differ".into()));
    }
    let sampled = sym_signed_laplacian(g)?.to_dense()?;
    let diff = sampled - expected_laplacian_dense(params)?;
    let vals = dense_sym_eigenvalues(&diff)?;
    Ok(vals[0].abs().max(vals[vals.len() - 1].abs()))
}

/// Closed form against dense computation for one parameter set.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TheoryReport {
    pub params: SsbmParams,
    pub tau_plus: f64,
    pub tau_minus: f64,
    pub laplacian_spectrum_max_error: f64,
    pub laplacian_gap_dense: f64,
    pub eigengap_equal_formula: Option<f64>,
    pub eigengap_lower_bound: f64,
    pub eigengap_rho_condition_met: bool,
    pub tbar_reconstruction_max_error: f64,
    pub tbar_embedding_subspace_distance: Option<f64>,
    pub sponge_core_spectrum: Vec<f64>,
    pub sponge_equal_size_spectrum: Option<Vec<f64>>,
    pub sponge_core_norm: f64,
    pub sponge_min_ratio: f64,
    pub sponge_embedding_informative: bool,
    pub cminus_min_eigenvalue: f64,
    pub tau_admissibility: TauAdmissibility,
    pub row_separation: RowSeparation,
    pub recommended_regularization: RecommendedRegularization,
    pub misclustering_bounds: MisclusteringBounds,
    pub density_thresholds: DensityThresholds,
}

/// Options for bound evaluation inside [`theory_check`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundInputs {
    pub delta: f64,
    pub xi: f64,
    pub r: f64,
}

impl Default for BoundInputs {
    fn default() -> Self {
        Self {
            delta: 0.1,
            xi: 1.0,
            r: 1.0,
        }
    }
}

pub fn theory_check(
    params: &SsbmParams,
    tau_plus: f64,
    tau_minus: f64,
    bounds: BoundInputs,
) -> Result<TheoryReport> {
    dense_guard(params.n)?;
    let lap = expected_laplacian_blocks(params)?;
    let dense_spectrum = dense_sym_eigenvalues(&expected_laplacian_dense(params)?)?;
    let block_spectrum = lap.full_spectrum(params.n);
    let laplacian_spectrum_max_error = dense_spectrum
        .iter()
        .zip(&block_spectrum)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let sponge = expected_sponge_blocks(params, tau_plus, tau_minus)?;
    let tbar = expected_tbar_dense(params, tau_plus, tau_minus)?;
    let tbar_reconstruction_max_error = (sponge.assemble_tbar(params)? - &tbar).amax();
    let tbar_embedding_subspace_distance = if sponge.embedding_is_informative() {
        let (_, pbar) = expected_pencil_dense(params, tau_plus, tau_minus)?;
        let (_, vecs) = sym_eigh(&tbar);
        let vk = vecs.columns(0, params.k).into_owned();
        let g = inv_sqrt_spd(&pbar)? * vk;
        let q1 = crate::eigen::orthonormalize(&g);
        let q2 = crate::eigen::orthonormalize(&sponge.expected_embedding(params));
        Some(subspace_distance(&q1, &q2)?)
    } else {
        None
    };
    let (bound, cond) = eigengap_lower_bound(params);
    Ok(TheoryReport {
        params: params.clone(),
        tau_plus,
        tau_minus,
        laplacian_spectrum_max_error,
        laplacian_gap_dense: if params.k >= 2 {
            spectrum_gap(&dense_spectrum, params.k)
        } else {
            f64::NAN
        },
        eigengap_equal_formula: eigengap_equal(params).ok(),
        eigengap_lower_bound: bound,
        eigengap_rho_condition_met: cond,
        tbar_reconstruction_max_error,
        tbar_embedding_subspace_distance,
        sponge_core_spectrum: sponge.lambda.clone(),
        sponge_equal_size_spectrum: equal_size_sponge(params, tau_plus, tau_minus)
            .ok()
            .map(|e| e.spectrum(params.k)),
        sponge_core_norm: sponge.core_norm(),
        sponge_min_ratio: sponge.min_ratio(),
        sponge_embedding_informative: sponge.embedding_is_informative(),
        cminus_min_eigenvalue: sponge.cminus_min_eigenvalue(),
        tau_admissibility: sponge_tau_admissible(params, tau_plus, tau_minus),
        row_separation: check_row_separation(params)?,
        recommended_regularization: recommended_regularization(params)?,
        misclustering_bounds: misclustering_bounds(bounds.delta, bounds.xi, params.k, tau_plus, params.l()),
        density_thresholds: dense_density_condition(params, bounds.delta, bounds.r),
    })
}
