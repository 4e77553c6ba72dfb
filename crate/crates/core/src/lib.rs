//! Spectral clustering of signed graphs.
//!
//! The crate covers the whole pipeline: sparse signed graphs
//! ([`graph`]), the signed stochastic block model ([`ssbm`]), signed and
//! unsigned Laplacians and the SPONGE pencils as implicit operators
//! ([`operators`]), dense and LOBPCG eigensolvers ([`eigen`]), k-means++
//! ([`kmeans`]), agreement metrics ([`metrics`]), closed forms for the
//! expected graph ([`theory`]), and the experiment harness behind the
//! `signclust` binary ([`pipeline`], [`experiment`], [`emit`]).

pub mod eigen;
pub mod emit;
pub mod error;
pub mod experiment;
pub mod graph;
pub mod kmeans;
pub mod metrics;
pub mod operators;
pub mod pipeline;
pub mod rng;
pub mod ssbm;
pub mod theory;

pub use error::{Error, Result};

/// Library version recorded in experiment outputs.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
