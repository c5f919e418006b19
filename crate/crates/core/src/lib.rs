//! Gibbs samplers for binary logistic regression under Bayesian fused-lasso
//! shrinkage, with Pólya-Gamma data augmentation.
//!
//! Three models are provided: the Bayesian lasso baseline, the Laplace-fusion
//! model (`lbfl`), and the horseshoe-fusion model (`lbfh`). Around them sit
//! posterior summaries with credible-interval selection and fusion flags,
//! the evaluation metrics, a synthetic-data harness, and file I/O.

pub mod banded;
pub mod chain;
pub mod cli;
pub mod data;
pub mod diagnostics;
pub mod distributions;
pub mod error;
pub mod gibbs;
pub mod io;
pub mod metrics;
pub mod rng;
pub mod simulation;
pub mod summary;

pub use chain::{run_chain, run_chain_on_stream, Chain, HyperConfig};
pub use data::{log_likelihood, predict_prob, Dataset};
pub use error::{Error, Result};
pub use gibbs::{ModelKind, PriorConfig};
pub use rng::RngStream;
