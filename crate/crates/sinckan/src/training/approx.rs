//! Supervised function approximation: MSE training on a uniform grid with
//! fine-grid generalization tracking.

use std::time::Instant;

use crate::autodiff::LossFn;
use crate::error::{Error, Result};
use crate::networks::{
    backward, check_layout, forward_cached, EvalCache, GradSink, Network, NetworkSpec, ParamStore,
};
use crate::problems::{linspace, TargetFunction};

use super::adam::{adam_step_sink, lr_at, AdamState};
use super::metrics::rmse;
use super::report::{EvalRecord, RunOutcome, RunReport, SeedRun};
use super::rng::Rng;
use super::sample::sample_batch;
use super::TrainConfig;

/// Mean-squared error of a 1-D network against fixed samples; implements
/// the gradient-check interface over the training backward pass.
pub struct MseLoss<'a> {
    pub net: &'a Network,
    pub xs: &'a [f64],
    pub ys: &'a [f64],
}

impl<'a> MseLoss<'a> {
    fn eval(&self, params: &ParamStore, cache: &mut EvalCache<f64>) -> Result<f64> {
        let mut acc = 0.0;
        for (&x, &y) in self.xs.iter().zip(self.ys) {
            forward_cached(self.net, params, &[x], cache, false)?;
            let d = cache.output()[0] - y;
            acc += d * d;
        }
        Ok(acc / self.xs.len() as f64)
    }
}

impl<'a> LossFn for MseLoss<'a> {
    fn loss(&self, params: &ParamStore) -> Result<f64> {
        let mut cache = EvalCache::for_network(self.net);
        self.eval(params, &mut cache)
    }

    fn grad(&self, params: &ParamStore) -> Result<ParamStore> {
        let mut cache = EvalCache::for_network(self.net);
        let mut sink = GradSink::zeros_for(self.net);
        let scale = 2.0 / self.xs.len() as f64;
        for (&x, &y) in self.xs.iter().zip(self.ys) {
            forward_cached(self.net, params, &[x], &mut cache, true)?;
            let seed = [(cache.output()[0] - y) * scale];
            backward(self.net, params, &mut cache, &seed, &mut sink);
        }
        Ok(sink.to_store(self.net))
    }
}

struct Grids {
    xs_train: Vec<f64>,
    ys_train: Vec<f64>,
    xs_fine: Vec<f64>,
    ys_fine: Vec<f64>,
}

fn predict_all(
    net: &Network,
    params: &ParamStore,
    xs: &[f64],
    cache: &mut EvalCache<f64>,
) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(xs.len());
    for &x in xs {
        forward_cached(net, params, &[x], cache, false)?;
        out.push(cache.output()[0]);
    }
    Ok(out)
}

/// Train one seed; returns the seed run (marked diverged if the loss or the
/// gradients left the finite range, keeping the last valid metrics).
fn run_seed(
    net: &Network,
    cfg: &TrainConfig,
    grids: &Grids,
    seed: u64,
) -> Result<(SeedRun, ParamStore)> {
    let start = Instant::now();
    let mut params = net.init(seed);
    check_layout(net, &params)?;
    let mut adam = AdamState::new(&params, cfg);
    let mut rng = Rng::derive(seed, 0xBA7C);
    let mut scratch = Vec::new();
    let mut cache = EvalCache::for_network(net);
    let mut sink: GradSink<f64> = GradSink::zeros_for(net);
    let mut records: Vec<EvalRecord> = Vec::new();
    let mut diverged = false;

    let evaluate = |params: &ParamStore, iteration: usize, cache: &mut EvalCache<f64>| -> Result<EvalRecord> {
        let pred_train = predict_all(net, params, &grids.xs_train, cache)?;
        let pred_fine = predict_all(net, params, &grids.xs_fine, cache)?;
        let metric_train = rmse(&grids.ys_train, &pred_train)?;
        let metric_fine = rmse(&grids.ys_fine, &pred_fine)?;
        Ok(EvalRecord {
            iteration,
            loss: metric_train * metric_train,
            metric_train,
            metric_fine,
            lr: lr_at(cfg, iteration),
        })
    };

    records.push(evaluate(&params, 0, &mut cache)?);

    'train: for it in 0..cfg.iterations {
        let lr = lr_at(cfg, it);
        let batch = sample_batch(grids.xs_train.len(), cfg.batch_size, &mut rng, &mut scratch)?;
        sink.reset();
        let scale = 2.0 / batch.len() as f64;
        for &i in &batch {
            forward_cached(net, &params, &[grids.xs_train[i]], &mut cache, true)?;
            let seed_adj = [(cache.output()[0] - grids.ys_train[i]) * scale];
            backward(net, &params, &mut cache, &seed_adj, &mut sink);
        }
        if adam_step_sink(&mut adam, &mut params, &sink, lr).is_err() {
            diverged = true;
            break 'train;
        }
        if (it + 1) % cfg.eval_every == 0 {
            match evaluate(&params, it + 1, &mut cache) {
                Ok(rec) if rec.loss.is_finite() => records.push(rec),
                _ => {
                    diverged = true;
                    break 'train;
                }
            }
        }
    }

    let last = records.last().expect("at least the initial record exists");
    let run = SeedRun {
        seed,
        final_train: last.metric_train,
        final_fine: last.metric_fine,
        components_fine: Vec::new(),
        records,
        diverged,
        wall_secs: start.elapsed().as_secs_f64(),
    };
    Ok((run, params))
}

/// Train `spec` against a 1-D target per the approximation protocol:
/// MSE on the `n_train`-point uniform grid, RMSE tracked on both that grid
/// and the `n_fine`-point fine grid, repeated per seed and aggregated.
pub fn fit_approximation(
    target: &TargetFunction,
    spec: &NetworkSpec,
    cfg: &TrainConfig,
) -> Result<RunOutcome> {
    if spec.in_dim != 1 || spec.out_dim != 1 {
        return Err(Error::config("approximation targets are scalar functions of one input"));
    }
    cfg.validate()?;
    if cfg.batch_size > cfg.n_train {
        return Err(Error::config(format!(
            "batch size {} exceeds the {}-point training grid",
            cfg.batch_size, cfg.n_train
        )));
    }
    let net = Network::new(spec)?;
    let (lo, hi) = target.domain;
    let xs_train = linspace(lo, hi, cfg.n_train)?;
    let xs_fine = linspace(lo, hi, cfg.n_fine)?;
    let grids = Grids {
        ys_train: xs_train.iter().map(|&x| target.eval(x)).collect(),
        ys_fine: xs_fine.iter().map(|&x| target.eval(x)).collect(),
        xs_train,
        xs_fine,
    };

    let start = Instant::now();
    let mut seed_runs = Vec::with_capacity(cfg.seeds.len());
    let mut trained = Vec::with_capacity(cfg.seeds.len());
    for &seed in &cfg.seeds {
        let (run, params) = run_seed(&net, cfg, &grids, seed)?;
        seed_runs.push(run);
        trained.push((seed, params));
    }
    let config = serde_json::json!({
        "mode": "approx",
        "problem": target.name,
        "network": spec,
        "train": cfg,
        "conventions": {
            "depth": "number of affine maps (mlp family) or kan layers",
            "summary_std": "population std over seeds",
        },
    });
    let report = RunReport::assemble(config, seed_runs, start.elapsed().as_secs_f64());
    Ok(RunOutcome { report, trained })
}
