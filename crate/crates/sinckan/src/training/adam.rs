//! Adam with exponentially decaying learning rate.

use crate::error::{Error, Result};
use crate::networks::{GradSink, ParamStore};

use super::TrainConfig;

/// Learning rate at an iteration: lr0 * rate^(step / every) with a
/// continuous (real-valued) exponent.
pub fn lr_at(cfg: &TrainConfig, step: usize) -> f64 {
    cfg.lr0 * cfg.decay_rate.powf(step as f64 / cfg.decay_every as f64)
}

/// First/second-moment state mirroring the parameter store.
#[derive(Debug, Clone)]
pub struct AdamState {
    pub m: ParamStore,
    pub v: ParamStore,
    pub t: u64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl AdamState {
    pub fn new(params: &ParamStore, cfg: &TrainConfig) -> Self {
        AdamState {
            m: params.zeros_like(),
            v: params.zeros_like(),
            t: 0,
            beta1: cfg.beta1,
            beta2: cfg.beta2,
            eps: cfg.eps,
        }
    }
}

/// One biased-moment update with bias correction. Name-indexed and
/// deterministic: walking arrays in store order gives identical results on
/// every invocation.
pub fn adam_step(
    state: &mut AdamState,
    params: &mut ParamStore,
    grads: &ParamStore,
    lr: f64,
) -> Result<()> {
    if !params.same_layout(grads) {
        return Err(Error::shape("adam_step", "gradient layout differs from parameters"));
    }
    for (name, g) in grads.iter() {
        if !g.data.iter().all(|v| v.is_finite()) {
            return Err(Error::non_finite("adam_step", format!("gradient array {name}")));
        }
    }
    let views: Vec<&[f64]> = grads.iter().map(|(_, a)| a.data.as_slice()).collect();
    step_views(state, params, &views, lr);
    Ok(())
}

/// Hot-path variant over an order-aligned gradient sink; validation happens
/// once per run, not per step.
pub(crate) fn adam_step_sink(
    state: &mut AdamState,
    params: &mut ParamStore,
    grads: &GradSink<f64>,
    lr: f64,
) -> Result<()> {
    for (i, g) in grads.arrays.iter().enumerate() {
        if !g.iter().all(|v| v.is_finite()) {
            let name = params
                .names()
                .nth(i)
                .unwrap_or("<unknown>")
                .to_string();
            return Err(Error::non_finite("adam_step", format!("gradient array {name}")));
        }
    }
    let views: Vec<&[f64]> = grads.arrays.iter().map(|a| a.as_slice()).collect();
    step_views(state, params, &views, lr);
    Ok(())
}

fn step_views(state: &mut AdamState, params: &mut ParamStore, grads: &[&[f64]], lr: f64) {
    state.t += 1;
    let t = state.t as i32;
    let (b1, b2, eps) = (state.beta1, state.beta2, state.eps);
    let bc1 = 1.0 - b1.powi(t);
    let bc2 = 1.0 - b2.powi(t);
    for (i, (_, p)) in params.iter_mut().enumerate() {
        let g = grads[i];
        let m = &mut state.m.array_at_mut(i).data;
        let v = &mut state.v.array_at_mut(i).data;
        for k in 0..p.data.len() {
            m[k] = b1 * m[k] + (1.0 - b1) * g[k];
            v[k] = b2 * v[k] + (1.0 - b2) * g[k] * g[k];
            let mhat = m[k] / bc1;
            let vhat = v[k] / bc2;
            p.data[k] -= lr * mhat / (vhat.sqrt() + eps);
        }
    }
}
