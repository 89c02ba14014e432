//! Simulation and analysis toolkit for planted high-dimensional geometric
//! communities in random graphs.
//!
//! A graph `G(n, p, d, k)` is drawn by letting each vertex join a hidden
//! community with probability `k/n`; community members receive uniform
//! latent vectors on `S^{d-1}` and connect when their inner product exceeds
//! `τ(p, d)`, every other pair is an independent `Bernoulli(p)` edge. The
//! crate provides the samplers, signed subgraph statistics, Gegenbauer
//! series for expected signed cycles, the triangle/scan detection tests with
//! Monte Carlo error estimation, low-degree Fourier diagnostics and the
//! Wishart/GOE matrix constructions.

pub mod detection;
pub mod ensembles;
pub mod error;
pub mod graph;
pub mod lowdeg;
pub mod quadrature;
pub mod scalar;
pub mod special;
pub mod sphere;
pub mod stats;

pub use detection::{Decision, ErrorEstimate, TestKind, TestSpec};
pub use error::{Error, Result};
pub use graph::{Graph, ModelParams, PlantedSample, Sampler, Seed};
pub use lowdeg::SmallGraph;
pub use scalar::Scalar;

/// `f64` instantiations used by the samplers and harnesses.
pub type Basis = sphere::GegenbauerBasis<f64>;
pub type Threshold = sphere::ThresholdResult<f64>;
pub type CycleExpectation = sphere::CycleExpectationResult<f64>;
pub type Law = sphere::InnerProductLaw<f64>;
pub type Adjacency = stats::CenteredAdjacency<f64>;
pub type Matrix = ensembles::SymMatrix<f64>;
