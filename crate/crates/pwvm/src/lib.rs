//! Continuous-time dynamic network embedding with piecewise-velocity
//! latent trajectories.
//!
//! Nodes of a temporal interaction network are embedded as continuous
//! piecewise-linear paths in a low-dimensional Euclidean space. Interactions
//! on a dyad are modeled as a nonhomogeneous Poisson process whose intensity
//! decays with the squared latent distance, and the whole trajectory ensemble
//! carries a Kronecker-structured Gaussian prior evaluated with low-rank
//! identities so that inference never materializes the full covariance.
//!
//! The crate is organized around the pipeline stages:
//!
//! * [`graph`] — edge-list ingestion, timeline normalization, train/test
//!   splitting and labeled-instance construction;
//! * [`model`] — positions, intensities, exact intensity integrals and the
//!   Poisson log-likelihood;
//! * [`prior`] — the structured Gaussian prior, its log-density and sampler;
//! * [`train`] — Adam-based MAP optimization with phased schedules and
//!   annealed prior-weight selection;
//! * [`sample`] — synthetic network generators (prior-driven and
//!   block-structured);
//! * [`eval`] — reconstruction / completion / future-prediction scoring with
//!   ROC and PR AUCs.

pub mod error;
pub mod eval;
pub mod graph;
pub mod model;
pub mod prior;
pub mod rng;
pub mod sample;
pub mod train;

pub use error::Error;

/// Convenience result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
