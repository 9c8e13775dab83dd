//! The PIKAN training loop: minimize the physics-informed loss, track
//! relative L2 error against the exact solution.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::networks::{check_layout, forward_cached, EvalCache, GradSink, Network, NetworkSpec};
use crate::problems::{make_grid, PointSet, Problem};
use crate::training::rng::Rng;
use crate::training::{
    adam_step, lr_at, relative_l2, sample_batch, AdamState, EvalRecord, RunOutcome, RunReport,
    SeedRun, TrainConfig,
};

use super::grad::PinnLossFn;
use super::{pinn_loss, Field};

struct EvalGrid {
    points: PointSet,
    /// exact values per output component, column-major by component
    exact: Vec<Vec<f64>>,
}

impl EvalGrid {
    fn build(problem: &Problem, counts: &[usize]) -> Result<Self> {
        let points = make_grid(&problem.domain, counts)?;
        let mut exact = vec![Vec::with_capacity(points.len()); problem.output_dim];
        for p in points.iter() {
            let vals = problem.eval_exact_stable(p);
            for (q, v) in vals.into_iter().enumerate() {
                exact[q].push(v);
            }
        }
        Ok(EvalGrid { points, exact })
    }

    /// Relative L2 per reported component, plus their mean as the scalar
    /// metric.
    fn metric(&self, problem: &Problem, net: &Network, params: &crate::networks::ParamStore, cache: &mut EvalCache<f64>) -> Result<(f64, Vec<f64>)> {
        let mut preds = vec![Vec::with_capacity(self.points.len()); problem.output_dim];
        for p in self.points.iter() {
            forward_cached(net, params, p, cache, false)?;
            for (q, v) in cache.output().iter().enumerate() {
                preds[q].push(*v);
            }
        }
        let mut per_component = Vec::with_capacity(problem.metric_outputs.len());
        for &q in &problem.metric_outputs {
            per_component.push(relative_l2(&self.exact[q], &preds[q])?);
        }
        let mean = per_component.iter().sum::<f64>() / per_component.len() as f64;
        Ok((mean, per_component))
    }
}

fn run_seed(
    problem: &Problem,
    net: &Network,
    cfg: &TrainConfig,
    batch_size: usize,
    loss_fn: &PinnLossFn<'_>,
    train_grid: &EvalGrid,
    fine_grid: &EvalGrid,
    seed: u64,
) -> Result<(SeedRun, crate::networks::ParamStore)> {
    let start = Instant::now();
    let mut params = net.init(seed);
    check_layout(net, &params)?;
    let mut adam = AdamState::new(&params, cfg);
    let mut rng = Rng::derive(seed, 0xB1);
    let mut scratch = Vec::new();
    let mut cache = EvalCache::for_network(net);
    let mut sink: GradSink<f64> = GradSink::zeros_for(net);
    let mut records: Vec<EvalRecord> = Vec::new();
    let mut diverged = false;

    let evaluate = |params: &crate::networks::ParamStore,
                    iteration: usize,
                    cache: &mut EvalCache<f64>|
     -> Result<(EvalRecord, Vec<f64>)> {
        let field = Field::Network { net, params };
        let loss =
            pinn_loss(problem, field, &loss_fn.residual_points, &loss_fn.constraints)?.total;
        let (metric_train, _) = train_grid.metric(problem, net, params, cache)?;
        let (metric_fine, components) = fine_grid.metric(problem, net, params, cache)?;
        Ok((
            EvalRecord { iteration, loss, metric_train, metric_fine, lr: lr_at(cfg, iteration) },
            components,
        ))
    };

    let (first, mut last_components) = evaluate(&params, 0, &mut cache)?;
    records.push(first);

    'train: for it in 0..cfg.iterations {
        let lr = lr_at(cfg, it);
        let batch = sample_batch(loss_fn.residual_points.len(), batch_size, &mut rng, &mut scratch)?;
        sink.reset();
        if loss_fn.grad_batch_into(&params, &batch, &mut sink).is_err() {
            diverged = true;
            break 'train;
        }
        let grads = sink.to_store(net);
        if adam_step(&mut adam, &mut params, &grads, lr).is_err() {
            diverged = true;
            break 'train;
        }
        if (it + 1) % cfg.eval_every == 0 {
            match evaluate(&params, it + 1, &mut cache) {
                Ok((rec, comps)) if rec.loss.is_finite() => {
                    records.push(rec);
                    last_components = comps;
                }
                _ => {
                    diverged = true;
                    break 'train;
                }
            }
        }
    }

    let last = records.last().expect("initial record always present");
    let components_fine = problem
        .metric_outputs
        .iter()
        .zip(&last_components)
        .map(|(&q, &v)| (problem.output_names[q].to_string(), v))
        .collect();
    let run = SeedRun {
        seed,
        final_train: last.metric_train,
        final_fine: last.metric_fine,
        components_fine,
        records,
        diverged,
        wall_secs: start.elapsed().as_secs_f64(),
    };
    Ok((run, params))
}

/// Train `spec` to satisfy `problem`'s residual and constraints, evaluating
/// relative L2 against the exact solution on the training-density grid and
/// on an independent grid of one extra point per dimension.
pub fn fit_pinn(problem: &Problem, spec: &NetworkSpec, cfg: &TrainConfig) -> Result<RunOutcome> {
    if spec.in_dim != problem.input_dim() || spec.out_dim != problem.output_dim {
        return Err(Error::config(format!(
            "network is {}x{} but {} needs {}x{}",
            spec.in_dim,
            spec.out_dim,
            problem.name,
            problem.input_dim(),
            problem.output_dim
        )));
    }
    cfg.validate()?;
    let net = Network::new(spec)?;
    let residual_points = problem.residual_points(&problem.train_counts)?;
    let constraints = problem.constraint_sets()?;
    let batch_size = if cfg.batch_size == 0 { problem.default_batch } else { cfg.batch_size };
    let batch_size = batch_size.min(residual_points.len());
    let loss_fn = PinnLossFn { problem, net: &net, residual_points, constraints };

    let train_grid = EvalGrid::build(problem, &problem.train_counts)?;
    let fine_grid = EvalGrid::build(problem, &problem.eval_counts)?;

    let start = Instant::now();
    let mut seed_runs = Vec::with_capacity(cfg.seeds.len());
    let mut trained = Vec::with_capacity(cfg.seeds.len());
    for &seed in &cfg.seeds {
        let (run, params) = run_seed(
            problem,
            &net,
            cfg,
            batch_size,
            &loss_fn,
            &train_grid,
            &fine_grid,
            seed,
        )?;
        seed_runs.push(run);
        trained.push((seed, params));
    }
    let config = serde_json::json!({
        "mode": "pinn",
        "problem": problem.name,
        "problem_params": {
            "eps": problem.eps,
            "nu": problem.nu,
            "a": problem.a,
            "alpha1": problem.alpha1,
            "alpha2": problem.alpha2,
        },
        "network": spec,
        "train": cfg,
        "batch_size_effective": batch_size,
        "conventions": {
            "metric": "relative L2 against the exact solution",
            "train_grid": problem.train_counts,
            "eval_grid": problem.eval_counts,
        },
    });
    let report = RunReport::assemble(config, seed_runs, start.elapsed().as_secs_f64());
    Ok(RunOutcome { report, trained })
}
