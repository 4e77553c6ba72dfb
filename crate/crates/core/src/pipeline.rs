//! End-to-end clustering of one graph: largest connected component,
//! spectral embedding, k-means, and scoring against a ground truth.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::eigen::{largest_k, smallest_k, smallest_k_generalized, Embedding, SolveMethod, SolverOptions};
use crate::error::{invalid, Error, Result};
use crate::graph::{largest_connected_component, Regularization, SignedGraph};
use crate::kmeans::{cluster_points, KmeansConfig};
use crate::metrics::{ari, misclustering_rate};
use crate::operators::{
    adjacency_operator, bnc_operator_with, brc_operator, regularized_sym_signed_laplacian_with,
    signed_laplacian, sponge_pencil, sponge_sym_pencil_with, sym_signed_laplacian_with, EigenEnd,
    Operator, ZeroDegree,
};
use crate::rng;
use crate::ssbm::Partition;
use crate::theory::recommended_regularization_from_graph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "A")]
    A,
    #[serde(rename = "Lbar")]
    Lbar,
    #[serde(rename = "Lbar_sym")]
    LbarSym,
    #[serde(rename = "SPONGE")]
    Sponge,
    #[serde(rename = "SPONGE_sym")]
    SpongeSym,
    #[serde(rename = "BRC")]
    Brc,
    #[serde(rename = "BNC")]
    Bnc,
    #[serde(rename = "Lbar_sym_reg")]
    LbarSymReg,
    #[serde(rename = "SPONGE_sym_reg")]
    SpongeSymReg,
}

impl Method {
    pub const ALL: [Method; 9] = [
        Method::A,
        Method::Lbar,
        Method::LbarSym,
        Method::Sponge,
        Method::SpongeSym,
        Method::Brc,
        Method::Bnc,
        Method::LbarSymReg,
        Method::SpongeSymReg,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Method::A => "A",
            Method::Lbar => "Lbar",
            Method::LbarSym => "Lbar_sym",
            Method::Sponge => "SPONGE",
            Method::SpongeSym => "SPONGE_sym",
            Method::Brc => "BRC",
            Method::Bnc => "BNC",
            Method::LbarSymReg => "Lbar_sym_reg",
            Method::SpongeSymReg => "SPONGE_sym_reg",
        }
    }

    /// Number of eigenvectors in the embedding for `k` clusters.
    pub fn embedding_dim(&self, k: usize) -> usize {
        match self {
            Method::Lbar | Method::LbarSym | Method::LbarSymReg => k.saturating_sub(1),
            _ => k,
        }
    }

    pub fn is_regularized(&self) -> bool {
        matches!(self, Method::LbarSymReg | Method::SpongeSymReg)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .iter()
            .copied()
            .find(|m| m.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                let names: Vec<_> = Method::ALL.iter().map(|m| m.name()).collect();
                Error::InvalidParams(format!("unknown method {s:?}; expected one of {}", names.join(", ")))
            })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    pub method: Method,
    pub k: usize,
    pub tau_plus: f64,
    pub tau_minus: f64,
    /// Regularization for the `_reg` methods. Unset values follow the
    /// recommended rule with `p` estimated from the graph.
    pub gamma_plus: Option<f64>,
    pub gamma_minus: Option<f64>,
    /// Flip probability assumed by the default SPONGE regularization.
    pub eta_hint: f64,
    pub eigen: SolverOptions,
    pub kmeans: KmeansConfig,
    pub seed: u64,
    pub zero_degree: ZeroDegree,
    pub extract_lcc: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            method: Method::SpongeSym,
            k: 2,
            tau_plus: 1.0,
            tau_minus: 1.0,
            gamma_plus: None,
            gamma_minus: None,
            eta_hint: 0.0,
            eigen: SolverOptions::default(),
            kmeans: KmeansConfig::default(),
            seed: 0,
            zero_degree: ZeroDegree::UnitRow,
            extract_lcc: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineResult {
    pub method: Method,
    pub n: usize,
    pub lcc_size: usize,
    pub ari: Option<f64>,
    pub misclustering: Option<f64>,
    pub eigen_converged: bool,
    pub eigen_method: Option<SolveMethod>,
    pub eigen_iterations: usize,
    pub eigen_restarts: usize,
    pub eigen_max_residual: f64,
    pub kmeans_cost: f64,
    pub regularization: Option<Regularization>,
    /// Label per original node; `None` for nodes outside the component.
    #[serde(skip)]
    pub labels: Vec<Option<usize>>,
    /// Labels on the clustered component.
    #[serde(skip)]
    pub partition: Option<Partition>,
}

fn regularization_for(g: &SignedGraph, cfg: &PipelineConfig) -> Result<Regularization> {
    if let (Some(a), Some(b)) = (cfg.gamma_plus, cfg.gamma_minus) {
        return Regularization::new(a, b);
    }
    let rec = recommended_regularization_from_graph(g, cfg.eta_hint)?;
    let default = match cfg.method {
        Method::SpongeSymReg => Regularization::new(rec.gamma_sponge, rec.gamma_sponge)?,
        _ => rec.laplacian,
    };
    Regularization::new(
        cfg.gamma_plus.unwrap_or(default.gamma_plus),
        cfg.gamma_minus.unwrap_or(default.gamma_minus),
    )
}

fn embed_operator(op: &Operator, k: usize, opts: &SolverOptions) -> Result<Embedding> {
    let rule = op.embedding_rule();
    let m = rule.dim(k);
    match rule.end {
        EigenEnd::Smallest => smallest_k(op, m, opts),
        EigenEnd::Largest => largest_k(op, m, opts),
    }
}

/// Spectral embedding of `g` for the configured method, plus the
/// regularization it used.
pub fn embed(g: &SignedGraph, cfg: &PipelineConfig) -> Result<(Embedding, Option<Regularization>)> {
    let k = cfg.k;
    let opts = SolverOptions {
        seed: rng::derive(cfg.seed, &[rng::tag::EIGEN]),
        ..cfg.eigen
    };
    let policy = cfg.zero_degree;
    Ok(match cfg.method {
        Method::A => (embed_operator(&adjacency_operator(g), k, &opts)?, None),
        Method::Lbar => (embed_operator(&signed_laplacian(g), k, &opts)?, None),
        Method::LbarSym => (
            embed_operator(&sym_signed_laplacian_with(g, policy)?, k, &opts)?,
            None,
        ),
        Method::Brc => (embed_operator(&brc_operator(g), k, &opts)?, None),
        Method::Bnc => (embed_operator(&bnc_operator_with(g, policy)?, k, &opts)?, None),
        Method::LbarSymReg => {
            let reg = regularization_for(g, cfg)?;
            let op = regularized_sym_signed_laplacian_with(g, reg, policy)?;
            (embed_operator(&op, k, &opts)?, Some(reg))
        }
        Method::Sponge => {
            let pencil = sponge_pencil(g, cfg.tau_plus, cfg.tau_minus)?;
            (smallest_k_generalized(&pencil, k, &opts)?, None)
        }
        Method::SpongeSym => {
            let pencil = sponge_sym_pencil_with(g, cfg.tau_plus, cfg.tau_minus, Regularization::none(), policy)?;
            (smallest_k_generalized(&pencil, k, &opts)?, None)
        }
        Method::SpongeSymReg => {
            let reg = regularization_for(g, cfg)?;
            let pencil = sponge_sym_pencil_with(g, cfg.tau_plus, cfg.tau_minus, reg, policy)?;
            (smallest_k_generalized(&pencil, k, &opts)?, Some(reg))
        }
    })
}

/// Cluster `g` into `cfg.k` groups and score against `truth` when given.
pub fn run_pipeline(g: &SignedGraph, truth: Option<&Partition>, cfg: &PipelineConfig) -> Result<PipelineResult> {
    if cfg.k == 0 {
        return invalid("k must be at least 1");
    }
    if let Some(t) = truth {
        if t.len() != g.n() {
            return Err(Error::DimensionMismatch(format!(
                "truth has {} labels for a graph with {} nodes",
                t.len(),
                g.n()
            )));
        }
    }
    let (sub, map) = if cfg.extract_lcc {
        largest_connected_component(g)
    } else {
        (g.clone(), crate::graph::NodeMap::identity(g.n()))
    };
    let n_sub = sub.n();
    if n_sub < cfg.k {
        return invalid(format!(
            "the clustered graph has {n_sub} nodes, fewer than k = {}",
            cfg.k
        ));
    }

    let dim = cfg.method.embedding_dim(cfg.k);
    let (labels, cost, emb, reg) = if cfg.k == 1 || dim == 0 {
        (vec![0; n_sub], 0.0, None, None)
    } else {
        let (emb, reg) = embed(&sub, cfg)?;
        let km = cluster_points(
            &emb.vectors,
            cfg.k,
            &cfg.kmeans,
            rng::derive(cfg.seed, &[rng::tag::KMEANS]),
        )?;
        (km.partition.labels, km.cost, Some(emb), reg)
    };
    let partition = Partition { labels, k: cfg.k };

    let (ari_v, mis) = match truth {
        Some(t) => {
            let t_sub = t.restrict(&map.new_to_old);
            let a = ari(&partition, &t_sub)?;
            let m = if t_sub.k == partition.k {
                Some(misclustering_rate(&partition, &t_sub)?.0)
            } else {
                None
            };
            (Some(a), m)
        }
        None => (None, None),
    };
    let mut full = vec![None; g.n()];
    for (new, &old) in map.new_to_old.iter().enumerate() {
        full[old] = Some(partition.labels[new]);
    }
    Ok(PipelineResult {
        method: cfg.method,
        n: g.n(),
        lcc_size: n_sub,
        ari: ari_v,
        misclustering: mis,
        eigen_converged: emb.as_ref().is_none_or(|e| e.converged),
        eigen_method: emb.as_ref().map(|e| e.method),
        eigen_iterations: emb.as_ref().map_or(0, |e| e.iterations),
        eigen_restarts: emb.as_ref().map_or(0, |e| e.restarts),
        eigen_max_residual: emb.as_ref().map_or(0.0, |e| e.max_residual()),
        kmeans_cost: cost,
        regularization: reg,
        labels: full,
        partition: Some(partition),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_from_edges;

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
            let json = serde_json::to_string(&m).unwrap();
            assert_eq!(json, format!("\"{}\"", m.name()));
        }
        assert!("nope".parse::<Method>().is_err());
        assert_eq!(Method::LbarSym.embedding_dim(3), 2);
        assert_eq!(Method::SpongeSym.embedding_dim(3), 3);
    }

    #[test]
    fn single_cluster_adjacency() {
        let g = build_from_edges(4, &[(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)]).unwrap();
        let truth = Partition::new(vec![0; 4], 1).unwrap();
        let cfg = PipelineConfig {
            method: Method::A,
            k: 1,
            ..Default::default()
        };
        let r = run_pipeline(&g, Some(&truth), &cfg).unwrap();
        assert_eq!(r.ari, Some(1.0));
        assert!(r.labels.iter().all(|l| *l == Some(0)));
    }

    #[test]
    fn nodes_outside_component_are_unlabeled() {
        let g = build_from_edges(5, &[(0, 1, 1.0), (1, 2, -1.0), (3, 4, 1.0)]).unwrap();
        let cfg = PipelineConfig {
            method: Method::Lbar,
            k: 2,
            ..Default::default()
        };
        let r = run_pipeline(&g, None, &cfg).unwrap();
        assert_eq!(r.lcc_size, 3);
        assert_eq!(r.labels[3], None);
        assert!(r.labels[..3].iter().all(|l| l.is_some()));
    }
}
