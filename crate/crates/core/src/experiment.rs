//! Monte Carlo experiments on sampled block-model graphs: τ and γ grids,
//! accuracy against the aspect ratio, and method comparisons.
//!
//! Trial `t` always uses graphs derived from `(seed, t)`, so every method
//! and every grid cell sees the same graphs, and results do not depend on
//! the order in which trials run.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::eigen::SolverOptions;
use crate::error::{invalid, Result};
use crate::graph::{largest_connected_component, SignedGraph};
use crate::kmeans::KmeansConfig;
use crate::operators::ZeroDegree;
use crate::pipeline::{run_pipeline, Method, PipelineConfig};
use crate::rng;
use crate::ssbm::{sample, sizes_from_rho, Partition, SsbmParams};
use crate::theory::recommended_regularization;

/// Log-spaced grid of `count` points from `lo` to `hi`.
pub fn logspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.log10(), hi.log10());
    (0..count)
        .map(|i| 10f64.powf(a + (b - a) * i as f64 / (count - 1) as f64))
        .collect()
}

/// Every knob of every experiment; each subcommand reads the fields it
/// needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub n: usize,
    pub k: usize,
    pub p: f64,
    pub eta: f64,
    /// Aspect ratio used when `sizes` is absent.
    pub rho: f64,
    pub sizes: Option<Vec<usize>>,
    pub seed: u64,
    pub trials: usize,
    /// A sampled graph is redrawn while its largest component holds fewer
    /// than this fraction of the nodes.
    pub min_lcc_fraction: f64,
    pub max_attempts: usize,
    pub methods: Vec<Method>,
    pub tau_plus: f64,
    pub tau_minus: f64,
    pub tau_plus_grid: Vec<f64>,
    pub tau_minus_grid: Vec<f64>,
    pub gamma_plus_grid: Vec<f64>,
    pub gamma_minus_grid: Vec<f64>,
    pub rhos: Vec<f64>,
    pub eigen: SolverOptions,
    pub kmeans: KmeansConfig,
    pub zero_degree: ZeroDegree,
    /// Store per-trial wall time (makes output differ between runs).
    pub record_wall_time: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let mut tau_minus_grid = vec![0.0];
        tau_minus_grid.extend(logspace(1e-3, 1e1, 9));
        let mut gamma = vec![0.0];
        gamma.extend(logspace(0.1, 100.0, 7));
        Self {
            n: 1000,
            k: 3,
            p: 0.02,
            eta: 0.1,
            rho: 1.0,
            sizes: None,
            seed: 0,
            trials: 20,
            min_lcc_fraction: 0.5,
            max_attempts: 10,
            methods: Method::ALL.to_vec(),
            tau_plus: 1.0,
            tau_minus: 1.0,
            tau_plus_grid: logspace(1e-2, 1e2, 9),
            tau_minus_grid,
            gamma_plus_grid: gamma.clone(),
            gamma_minus_grid: gamma,
            rhos: vec![0.1, 0.2, 0.3, 0.5, 0.7, 1.0],
            eigen: SolverOptions::default(),
            kmeans: KmeansConfig::default(),
            zero_degree: ZeroDegree::UnitRow,
            record_wall_time: false,
        }
    }
}

impl ExperimentConfig {
    /// Model parameters for trial `trial` at aspect ratio `rho`.
    pub fn params(&self, rho: f64, trial: usize) -> Result<SsbmParams> {
        match &self.sizes {
            Some(s) => SsbmParams::new(s.clone(), self.p, self.eta),
            None if rho == 1.0 => SsbmParams::equal(self.n, self.k, self.p, self.eta),
            None => {
                let sizes = sizes_from_rho(self.n, self.k, rho, rng::derive(self.seed, &[trial as u64, rng::tag::SIZES]))?;
                SsbmParams::new(sizes, self.p, self.eta)
            }
        }
    }

    /// Pipeline settings shared by all runs of this experiment.
    pub fn pipeline(&self, method: Method, trial: usize) -> PipelineConfig {
        PipelineConfig {
            method,
            k: self.k,
            tau_plus: self.tau_plus,
            tau_minus: self.tau_minus,
            gamma_plus: None,
            gamma_minus: None,
            eta_hint: self.eta,
            eigen: self.eigen,
            kmeans: self.kmeans,
            seed: rng::derive(self.seed, &[trial as u64, 0xC1]),
            zero_degree: self.zero_degree,
            extract_lcc: true,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return invalid("trials must be positive");
        }
        if self.max_attempts == 0 {
            return invalid("max_attempts must be positive");
        }
        Ok(())
    }
}

/// A sampled graph reduced to its largest component.
#[derive(Debug, Clone)]
pub struct TrialGraph {
    pub params: SsbmParams,
    pub graph: SignedGraph,
    pub truth: Partition,
    pub attempts: usize,
}

/// Sample the graph of trial `trial`; `None` when every attempt left a
/// largest component below the size threshold.
pub fn trial_graph(cfg: &ExperimentConfig, rho: f64, trial: usize) -> Result<Option<TrialGraph>> {
    let params = cfg.params(rho, trial)?;
    let need = cfg.min_lcc_fraction * params.n as f64;
    for attempt in 0..cfg.max_attempts {
        let seed = rng::derive(cfg.seed, &[trial as u64, attempt as u64, (rho * 1e6) as u64]);
        let (g, truth) = sample(&params, seed)?;
        let (sub, map) = largest_connected_component(&g);
        if (sub.n() as f64) >= need && sub.n() >= params.k {
            return Ok(Some(TrialGraph {
                truth: truth.restrict(&map.new_to_old),
                params,
                graph: sub,
                attempts: attempt + 1,
            }));
        }
    }
    Ok(None)
}

/// Outcome of one (cell, trial) run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialEntry {
    pub method: Method,
    pub x: Option<f64>,
    pub y: Option<f64>,
    pub rho: f64,
    pub trial: usize,
    pub valid: bool,
    pub attempts: usize,
    pub lcc_size: usize,
    pub ari: Option<f64>,
    pub misclustering: Option<f64>,
    pub eigen_converged: bool,
    pub eigen_max_residual: f64,
    pub eigen_iterations: usize,
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellStats {
    pub mean_ari: f64,
    /// Population standard deviation over valid trials.
    pub std_ari: f64,
    pub trials: usize,
    pub invalid: usize,
}

pub fn aggregate<'a>(entries: impl IntoIterator<Item = &'a TrialEntry>) -> CellStats {
    let mut vals = Vec::new();
    let mut bad = 0;
    for e in entries {
        match (e.valid, e.ari) {
            (true, Some(a)) => vals.push(a),
            _ => bad += 1,
        }
    }
    let m = vals.len();
    let (mean, std) = if m == 0 {
        (f64::NAN, f64::NAN)
    } else {
        let mean = vals.iter().sum::<f64>() / m as f64;
        let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / m as f64;
        (mean, var.sqrt())
    };
    CellStats {
        mean_ari: mean,
        std_ari: std,
        trials: m,
        invalid: bad,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeatCell {
    pub x: f64,
    pub y: f64,
    pub stats: CellStats,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Heatmap {
    pub method: Method,
    pub x_name: String,
    pub y_name: String,
    pub x_values: Vec<f64>,
    pub y_values: Vec<f64>,
    /// Row-major in `x`, then `y`.
    pub cells: Vec<HeatCell>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub method: Method,
    pub rho: f64,
    pub stats: CellStats,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Curve {
    pub rows: Vec<CurveRow>,
}

/// Full output of one experiment.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub version: String,
    pub command: String,
    pub config: ExperimentConfig,
    pub heatmaps: Vec<Heatmap>,
    pub curve: Option<Curve>,
    pub trials: Vec<TrialEntry>,
}

fn run_one(
    cfg: &ExperimentConfig,
    tg: &Option<TrialGraph>,
    pc: &PipelineConfig,
    rho: f64,
    trial: usize,
    x: Option<f64>,
    y: Option<f64>,
) -> TrialEntry {
    let start = std::time::Instant::now();
    let mut entry = TrialEntry {
        method: pc.method,
        x,
        y,
        rho,
        trial,
        valid: false,
        attempts: tg.as_ref().map_or(cfg.max_attempts, |t| t.attempts),
        lcc_size: tg.as_ref().map_or(0, |t| t.graph.n()),
        ari: None,
        misclustering: None,
        eigen_converged: false,
        eigen_max_residual: f64::NAN,
        eigen_iterations: 0,
        error: None,
        wall_time_ms: None,
    };
    match tg {
        None => entry.error = Some("largest connected component too small".into()),
        Some(t) => match run_pipeline(&t.graph, Some(&t.truth), pc) {
            Ok(r) => {
                entry.valid = true;
                entry.ari = r.ari;
                entry.misclustering = r.misclustering;
                entry.eigen_converged = r.eigen_converged;
                entry.eigen_max_residual = r.eigen_max_residual;
                entry.eigen_iterations = r.eigen_iterations;
            }
            Err(e) => entry.error = Some(e.to_string()),
        },
    }
    if cfg.record_wall_time {
        entry.wall_time_ms = Some(start.elapsed().as_secs_f64() * 1e3);
    }
    entry
}

fn trial_graphs(cfg: &ExperimentConfig, rho: f64) -> Result<Vec<Option<TrialGraph>>> {
    (0..cfg.trials)
        .into_par_iter()
        .map(|t| trial_graph(cfg, rho, t))
        .collect()
}

/// Mean ARI of SPONGE_sym over the `(τ⁺, τ⁻)` grid.
pub fn grid_tau(cfg: &ExperimentConfig) -> Result<ExperimentRecord> {
    cfg.validate()?;
    let graphs = trial_graphs(cfg, cfg.rho)?;
    let cells: Vec<(f64, f64)> = cfg
        .tau_plus_grid
        .iter()
        .flat_map(|&a| cfg.tau_minus_grid.iter().map(move |&b| (a, b)))
        .collect();
    let jobs: Vec<(usize, usize)> = (0..cells.len())
        .flat_map(|c| (0..cfg.trials).map(move |t| (c, t)))
        .collect();
    let trials: Vec<TrialEntry> = jobs
        .par_iter()
        .map(|&(c, t)| {
            let (tp, tm) = cells[c];
            let pc = PipelineConfig {
                tau_plus: tp,
                tau_minus: tm,
                ..cfg.pipeline(Method::SpongeSym, t)
            };
            run_one(cfg, &graphs[t], &pc, cfg.rho, t, Some(tp), Some(tm))
        })
        .collect();
    let heat = Heatmap {
        method: Method::SpongeSym,
        x_name: "tau_plus".into(),
        y_name: "tau_minus".into(),
        x_values: cfg.tau_plus_grid.clone(),
        y_values: cfg.tau_minus_grid.clone(),
        cells: cells
            .iter()
            .enumerate()
            .map(|(c, &(x, y))| HeatCell {
                x,
                y,
                stats: aggregate(&trials[c * cfg.trials..(c + 1) * cfg.trials]),
            })
            .collect(),
    };
    Ok(ExperimentRecord {
        version: crate::VERSION.into(),
        command: "grid-tau".into(),
        config: cfg.clone(),
        heatmaps: vec![heat],
        curve: None,
        trials,
    })
}

/// Mean ARI over the `(γ⁺, γ⁻)` grid for each regularized method in
/// `cfg.methods` (both when none is listed).
pub fn grid_gamma(cfg: &ExperimentConfig) -> Result<ExperimentRecord> {
    cfg.validate()?;
    let mut methods: Vec<Method> = cfg.methods.iter().copied().filter(|m| m.is_regularized()).collect();
    if methods.is_empty() {
        methods = vec![Method::LbarSymReg, Method::SpongeSymReg];
    }
    let graphs = trial_graphs(cfg, cfg.rho)?;
    let cells: Vec<(f64, f64)> = cfg
        .gamma_plus_grid
        .iter()
        .flat_map(|&a| cfg.gamma_minus_grid.iter().map(move |&b| (a, b)))
        .collect();
    let jobs: Vec<(Method, usize, usize)> = methods
        .iter()
        .flat_map(|&m| (0..cells.len()).flat_map(move |c| (0..cfg.trials).map(move |t| (m, c, t))))
        .collect();
    let trials: Vec<TrialEntry> = jobs
        .par_iter()
        .map(|&(m, c, t)| {
            let (gp, gm) = cells[c];
            let pc = PipelineConfig {
                gamma_plus: Some(gp),
                gamma_minus: Some(gm),
                ..cfg.pipeline(m, t)
            };
            run_one(cfg, &graphs[t], &pc, cfg.rho, t, Some(gp), Some(gm))
        })
        .collect();
    let per_method = cells.len() * cfg.trials;
    let heatmaps = methods
        .iter()
        .enumerate()
        .map(|(mi, &m)| Heatmap {
            method: m,
            x_name: "gamma_plus".into(),
            y_name: "gamma_minus".into(),
            x_values: cfg.gamma_plus_grid.clone(),
            y_values: cfg.gamma_minus_grid.clone(),
            cells: cells
                .iter()
                .enumerate()
                .map(|(c, &(x, y))| {
                    let lo = mi * per_method + c * cfg.trials;
                    HeatCell {
                        x,
                        y,
                        stats: aggregate(&trials[lo..lo + cfg.trials]),
                    }
                })
                .collect(),
        })
        .collect();
    Ok(ExperimentRecord {
        version: crate::VERSION.into(),
        command: "grid-gamma".into(),
        config: cfg.clone(),
        heatmaps,
        curve: None,
        trials,
    })
}

/// Pipeline settings for `method`; regularized methods get the recommended
/// amounts computed from the model.
fn method_config(cfg: &ExperimentConfig, params: &SsbmParams, method: Method, trial: usize) -> Result<PipelineConfig> {
    let mut pc = cfg.pipeline(method, trial);
    if method.is_regularized() && params.p > 0.0 {
        let rec = recommended_regularization(params)?;
        let (a, b) = match method {
            Method::SpongeSymReg => (rec.gamma_sponge, rec.gamma_sponge),
            _ => (rec.laplacian.gamma_plus, rec.laplacian.gamma_minus),
        };
        pc.gamma_plus = Some(a);
        pc.gamma_minus = Some(b);
    }
    Ok(pc)
}

fn curve_at(cfg: &ExperimentConfig, rhos: &[f64], command: &str) -> Result<ExperimentRecord> {
    cfg.validate()?;
    if cfg.methods.is_empty() {
        return invalid("no methods selected");
    }
    let mut trials = Vec::new();
    let mut rows = Vec::new();
    for &rho in rhos {
        let graphs = trial_graphs(cfg, rho)?;
        let jobs: Vec<(Method, usize)> = cfg
            .methods
            .iter()
            .flat_map(|&m| (0..cfg.trials).map(move |t| (m, t)))
            .collect();
        let entries: Vec<TrialEntry> = jobs
            .par_iter()
            .map(|&(m, t)| {
                let params = match &graphs[t] {
                    Some(g) => g.params.clone(),
                    None => cfg.params(rho, t)?,
                };
                let pc = method_config(cfg, &params, m, t)?;
                Ok(run_one(cfg, &graphs[t], &pc, rho, t, None, None))
            })
            .collect::<Result<_>>()?;
        for (mi, &m) in cfg.methods.iter().enumerate() {
            rows.push(CurveRow {
                method: m,
                rho,
                stats: aggregate(&entries[mi * cfg.trials..(mi + 1) * cfg.trials]),
            });
        }
        trials.extend(entries);
    }
    Ok(ExperimentRecord {
        version: crate::VERSION.into(),
        command: command.into(),
        config: cfg.clone(),
        heatmaps: Vec::new(),
        curve: Some(Curve { rows }),
        trials,
    })
}

/// Mean ARI of every method in `cfg.methods` for each aspect ratio in
/// `cfg.rhos`.
pub fn rho_curve(cfg: &ExperimentConfig) -> Result<ExperimentRecord> {
    curve_at(cfg, &cfg.rhos, "rho-curve")
}

/// All methods on the same graphs at `cfg.rho`.
pub fn compare(cfg: &ExperimentConfig) -> Result<ExperimentRecord> {
    curve_at(cfg, &[cfg.rho], "compare")
}

/// Per-trial ARI of `method` at `rho`, in trial order, from a record.
pub fn trial_aris(record: &ExperimentRecord, method: Method, rho: f64) -> Vec<Option<f64>> {
    record
        .trials
        .iter()
        .filter(|e| e.method == method && e.rho == rho)
        .map(|e| if e.valid { e.ari } else { None })
        .collect()
}
