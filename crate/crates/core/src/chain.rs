//! Chain runner: initialisation, burn-in, thinning, and retained draws.

use serde::{Deserialize, Serialize};

use crate::data::{log_likelihood, Dataset};
use crate::error::{Error, Result};
use crate::gibbs::{gibbs_step, McmcState, ModelKind, PriorConfig, Workspace};
use crate::rng::RngStream;

/// Prior hyperparameters plus chain controls.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HyperConfig {
    pub prior: PriorConfig,
    pub iterations: usize,
    pub burnin: usize,
    pub thin: usize,
    pub seed: u64,
}

impl Default for HyperConfig {
    fn default() -> Self {
        Self {
            prior: PriorConfig::default(),
            iterations: 10_000,
            burnin: 6_000,
            thin: 1,
            seed: 1,
        }
    }
}

impl HyperConfig {
    pub fn validate(&self) -> Result<()> {
        self.prior.validate()?;
        if self.iterations == 0 {
            return Err(Error::Config("iterations must be positive".into()));
        }
        if self.burnin >= self.iterations {
            return Err(Error::Config(format!(
                "burnin ({}) must be below iterations ({})",
                self.burnin, self.iterations
            )));
        }
        if self.thin == 0 {
            return Err(Error::Config("thin must be at least 1".into()));
        }
        Ok(())
    }

    /// ⌊(iterations − burnin) / thin⌋
    pub fn retained(&self) -> usize {
        (self.iterations - self.burnin) / self.thin
    }
}

/// Retained post-burn-in draws.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Chain {
    pub model: ModelKind,
    /// Iteration number (1-based) of each retained draw.
    pub iterations: Vec<usize>,
    pub beta0_draws: Vec<f64>,
    /// One row per retained draw.
    pub beta_draws: Vec<Vec<f64>>,
    pub hyper_names: Vec<String>,
    /// One column per hyperparameter, aligned with `hyper_names`.
    pub hyper_draws: Vec<Vec<f64>>,
    /// Log-likelihood of each retained draw.
    pub loglik_draws: Vec<f64>,
    pub retained: usize,
    pub pd_retry_count: usize,
}

impl Chain {
    fn empty(model: ModelKind, capacity: usize) -> Self {
        let names = model.hyper_names();
        Self {
            model,
            iterations: Vec::with_capacity(capacity),
            beta0_draws: Vec::with_capacity(capacity),
            beta_draws: Vec::with_capacity(capacity),
            hyper_names: names.iter().map(|s| s.to_string()).collect(),
            hyper_draws: vec![Vec::with_capacity(capacity); names.len()],
            loglik_draws: Vec::with_capacity(capacity),
            retained: 0,
            pd_retry_count: 0,
        }
    }

    pub fn p(&self) -> usize {
        self.beta_draws.first().map_or(0, Vec::len)
    }

    /// Draws of coefficient `j` (zero-based) across retained iterations.
    pub fn beta_column(&self, j: usize) -> Vec<f64> {
        self.beta_draws.iter().map(|row| row[j]).collect()
    }

    pub fn hyper_column(&self, name: &str) -> Option<&[f64]> {
        self.hyper_names
            .iter()
            .position(|n| n == name)
            .map(|k| self.hyper_draws[k].as_slice())
    }

    fn record(&mut self, iteration: usize, state: &McmcState, data: &Dataset) -> Result<()> {
        let beta = state.beta.as_slice().to_vec();
        self.loglik_draws.push(log_likelihood(state.beta0, &beta, data)?);
        self.iterations.push(iteration);
        self.beta0_draws.push(state.beta0);
        self.beta_draws.push(beta);
        for (col, v) in self.hyper_draws.iter_mut().zip(state.scales.hyper_values()) {
            col.push(v);
        }
        self.retained += 1;
        Ok(())
    }
}

/// Run one chain on stream 0 of `hyper.seed`.
pub fn run_chain(model: ModelKind, data: &Dataset, hyper: &HyperConfig) -> Result<Chain> {
    run_chain_on_stream(model, data, hyper, 0)
}

/// Run one chain on an explicit stream; used when several chains share a seed.
pub fn run_chain_on_stream(model: ModelKind, data: &Dataset, hyper: &HyperConfig, stream_id: u64) -> Result<Chain> {
    hyper.validate()?;
    let mut rng = RngStream::new(hyper.seed, stream_id);
    let mut state = McmcState::initial(model, data, &mut rng);
    let mut ws = Workspace::new(data);
    let mut chain = Chain::empty(model, hyper.retained());

    for it in 1..=hyper.iterations {
        match gibbs_step(&mut state, data, &mut ws, &hyper.prior, &mut rng) {
            Ok(retries) => chain.pd_retry_count += retries,
            Err(Error::NotPositiveDefinite) => {
                return Err(Error::ChainAborted {
                    iteration: it,
                    retries: crate::gibbs::MAX_PD_RETRIES,
                })
            }
            Err(e) => return Err(e),
        }
        if it > hyper.burnin && (it - hyper.burnin).is_multiple_of(hyper.thin) {
            chain.record(it, &state, data)?;
        }
    }
    if chain.pd_retry_count > 0 {
        log::warn!("{model}: {} positive-definiteness retries", chain.pd_retry_count);
    }
    Ok(chain)
}
