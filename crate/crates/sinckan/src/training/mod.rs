//! Adam optimization with exponential learning-rate decay, mini-batch
//! sampling, metric computation, and the supervised approximation loop.

mod adam;
mod approx;
mod metrics;
mod report;
pub mod rng;
mod sample;

pub use adam::{adam_step, lr_at, AdamState};
pub use approx::{fit_approximation, MseLoss};
pub use metrics::{relative_l2, rmse};
pub use report::{
    mean_std, summarize, ComponentSummary, EvalRecord, RunOutcome, RunReport, SeedRun, Summary,
};
pub use sample::sample_batch;


use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn default_beta1() -> f64 {
    0.9
}

fn default_beta2() -> f64 {
    0.999
}

fn default_eps() -> f64 {
    1e-8
}

fn default_eval_every() -> usize {
    1000
}

fn default_seeds() -> Vec<u64> {
    vec![1, 2, 3]
}

fn default_n_train() -> usize {
    5000
}

fn default_n_fine() -> usize {
    10_000
}

/// Optimization schedule. The decay constants are not pinned by the
/// benchmark protocol, so they live here as explicit, echoed configuration:
/// lr0 = 1e-3 decaying by 0.9 every 10^4 steps, Adam (0.9, 0.999, 1e-8).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub iterations: usize,
    pub batch_size: usize,
    pub lr0: f64,
    pub decay_rate: f64,
    pub decay_every: usize,
    #[serde(default = "default_beta1")]
    pub beta1: f64,
    #[serde(default = "default_beta2")]
    pub beta2: f64,
    #[serde(default = "default_eps")]
    pub eps: f64,
    #[serde(default = "default_eval_every")]
    pub eval_every: usize,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    /// Training-grid size for approximation runs.
    #[serde(default = "default_n_train")]
    pub n_train: usize,
    /// Fine evaluation grid for approximation runs.
    #[serde(default = "default_n_fine")]
    pub n_fine: usize,
}

impl TrainConfig {
    /// Desk-scale approximation defaults: 2e4 iterations, batch 3000 of a
    /// 5000-point grid.
    pub fn default_approx() -> Self {
        TrainConfig {
            iterations: 20_000,
            batch_size: 3000,
            lr0: 1e-3,
            decay_rate: 0.9,
            decay_every: 10_000,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            eval_every: 1000,
            seeds: vec![1, 2, 3],
            n_train: 5000,
            n_fine: 10_000,
        }
    }

    /// Desk-scale physics-informed defaults: 5e4 iterations; batch size is
    /// taken from the problem's protocol when left at 0.
    pub fn default_pinn() -> Self {
        TrainConfig {
            iterations: 50_000,
            batch_size: 0,
            ..TrainConfig::default_approx()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::config("iterations must be positive"));
        }
        if !(self.lr0 > 0.0) {
            return Err(Error::config("lr0 must be positive"));
        }
        if !(self.decay_rate > 0.0 && self.decay_rate < 1.0) {
            return Err(Error::config("decay_rate must lie in (0, 1)"));
        }
        if self.decay_every == 0 || self.eval_every == 0 {
            return Err(Error::config("decay_every and eval_every must be positive"));
        }
        if !(self.beta1 > 0.0 && self.beta1 < 1.0 && self.beta2 > 0.0 && self.beta2 < 1.0) {
            return Err(Error::config("adam betas must lie in (0, 1)"));
        }
        if !(self.eps > 0.0) {
            return Err(Error::config("adam eps must be positive"));
        }
        if self.seeds.is_empty() {
            return Err(Error::config("at least one seed is required"));
        }
        Ok(())
    }
}
