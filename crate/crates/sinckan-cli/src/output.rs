//! Command implementations: execution, report/dump emission, self-tests.

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::Value;

use sinckan::autodiff::check_gradient;
use sinckan::error::{Error, Result};
use sinckan::networks::{dump_activations, Network, ParamStore};
use sinckan::pinn::{fit_pinn, predictions_csv, Field};
use sinckan::problems::{linspace, TargetFunction, PROBLEM_NAMES};
use sinckan::training::{fit_approximation, mean_std, MseLoss, RunOutcome};

use crate::config::{apply_override, expand, ExperimentConfig, SweepSpec, Target};

fn load_json(path: &Path) -> Result<Value> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::config(format!("{}: {e}", path.display())))
}

fn load_config(path: &Path, overrides: &[String]) -> Result<ExperimentConfig> {
    let mut tree = load_json(path)?;
    for spec in overrides {
        apply_override(&mut tree, spec)?;
    }
    ExperimentConfig::from_value(tree)
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| Error::io("mkdir", e.to_string()))?;
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| Error::io("write", e.to_string()))?;
    Ok(path)
}

fn activation_grid(domain: (f64, f64)) -> Vec<f64> {
    linspace(domain.0, domain.1, 401).expect("static grid")
}

/// Per-target approximation predictions on the fine grid.
fn approx_predictions_csv(
    target: &TargetFunction,
    net: &Network,
    params: &ParamStore,
    n: usize,
) -> Result<String> {
    let xs = linspace(target.domain.0, target.domain.1, n)?;
    let mut out = String::from("x,u_exact,u_pred,abs_error\n");
    for &x in &xs {
        let exact = target.eval(x);
        let pred = sinckan::networks::forward::<f64>(net, params, &[x])?[0];
        out.push_str(&format!("{x},{exact},{pred},{}\n", (exact - pred).abs()));
    }
    Ok(out)
}

/// Execute one resolved config and write its artifacts; returns the outcome
/// so sweeps can consolidate.
pub(crate) fn execute(cfg: &mut ExperimentConfig, dir: &Path) -> Result<RunOutcome> {
    let target = cfg.resolve()?;
    let outcome = match &target {
        Target::Function(f) => fit_approximation(f, &cfg.network, &cfg.train)?,
        Target::Problem(p) => fit_pinn(p, &cfg.network, &cfg.train)?,
    };
    // echo the full experiment config verbatim into the report
    let mut outcome = outcome;
    outcome.report.config = serde_json::json!({
        "experiment": cfg.to_value()?,
        "resolved": outcome.report.config,
    });

    write_file(dir, "report.json", &outcome.report.to_json()?)?;
    write_file(dir, "metrics.csv", &outcome.report.metrics_csv())?;

    let net = Network::new(&cfg.network)?;
    if cfg.save_params {
        for (seed, params) in &outcome.trained {
            let bin = dir.join(format!("params_seed{seed}.bin"));
            let manifest = dir.join(format!("params_seed{seed}.manifest.txt"));
            fs::create_dir_all(dir).map_err(|e| Error::io("mkdir", e.to_string()))?;
            params.save(&bin, &manifest)?;
        }
    }
    if cfg.dump_predictions {
        let (seed, params) = outcome
            .trained
            .first()
            .ok_or_else(|| Error::config("no trained parameters to dump"))?;
        let csv = match &target {
            Target::Function(f) => approx_predictions_csv(f, &net, params, cfg.train.n_fine)?,
            Target::Problem(p) => {
                predictions_csv(p, Field::Network { net: &net, params }, &p.eval_counts)?
            }
        };
        write_file(dir, &format!("predictions_seed{seed}.csv"), &csv)?;
    }
    if cfg.dump_activations {
        let (seed, params) = outcome
            .trained
            .first()
            .ok_or_else(|| Error::config("no trained parameters to dump"))?;
        let domain = match &target {
            Target::Function(f) => f.domain,
            Target::Problem(p) => p.domain[0],
        };
        let (layer, pin, qout) = cfg.activation_edge;
        let samples = dump_activations(&net, params, layer, (pin, qout), &activation_grid(domain))?;
        let mut csv = String::from("x,phi\n");
        for (x, phi) in samples {
            csv.push_str(&format!("{x},{phi}\n"));
        }
        write_file(dir, &format!("activations_seed{seed}.csv"), &csv)?;
    }
    Ok(outcome)
}

pub(crate) fn run(config: &Path, overrides: &[String], out: Option<PathBuf>) -> Result<()> {
    let mut cfg = load_config(config, overrides)?;
    let dir = out
        .or_else(|| cfg.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    let outcome = execute(&mut cfg, &dir)?;
    let s = &outcome.report.summary;
    let diverged = outcome.report.seed_runs.iter().any(|r| r.diverged);
    println!(
        "{}: train {:.3e} +- {:.3e}, fine {:.3e} +- {:.3e} ({} seeds, {:.1}s{})",
        cfg.problem,
        s.train_mean,
        s.train_std,
        s.fine_mean,
        s.fine_std,
        outcome.report.seed_runs.len(),
        outcome.report.wall_secs,
        if diverged { ", diverged" } else { "" },
    );
    println!("artifacts in {}", dir.display());
    Ok(())
}

pub(crate) fn sweep(config: &Path, out: Option<PathBuf>) -> Result<()> {
    let tree = load_json(config)?;
    let spec: SweepSpec =
        serde_json::from_value(tree).map_err(|e| Error::config(format!("bad sweep spec: {e}")))?;
    let combos = expand(&spec)?;
    let dir = out
        .or_else(|| spec.base.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("sweep-out"));

    let axis_names: Vec<String> = combos[0].0.iter().map(|(n, _)| n.clone()).collect();
    let mut csv = format!(
        "combo,{},kind,seed,metric_train,metric_fine,train_std,fine_std\n",
        axis_names.join(",")
    );
    for (i, (combo, mut cfg)) in combos.into_iter().enumerate() {
        let combo_dir = dir.join(format!("combo_{i:03}"));
        let outcome = execute(&mut cfg, &combo_dir)?;
        let axis_cells: Vec<String> = combo.iter().map(|(_, v)| v.to_string()).collect();
        for run in &outcome.report.seed_runs {
            csv.push_str(&format!(
                "{i},{},seed,{},{},{},,\n",
                axis_cells.join(","),
                run.seed,
                run.final_train,
                run.final_fine
            ));
        }
        let trains: Vec<f64> = outcome.report.seed_runs.iter().map(|r| r.final_train).collect();
        let fines: Vec<f64> = outcome.report.seed_runs.iter().map(|r| r.final_fine).collect();
        let (tm, ts) = mean_std(&trains);
        let (fm, fs) = mean_std(&fines);
        csv.push_str(&format!(
            "{i},{},summary,,{tm},{fm},{ts},{fs}\n",
            axis_cells.join(",")
        ));
        println!(
            "combo {i} [{}]: train {:.3e} +- {:.3e}, fine {:.3e} +- {:.3e}",
            combo
                .iter()
                .map(|(n, v)| format!("{n}={v}"))
                .collect::<Vec<_>>()
                .join(" "),
            tm,
            ts,
            fm,
            fs
        );
    }
    let path = write_file(&dir, "sweep.csv", &csv)?;
    println!("consolidated results in {}", path.display());
    Ok(())
}

pub(crate) fn dump(
    config: &Path,
    overrides: &[String],
    params_path: &Path,
    kind: &str,
    out: Option<PathBuf>,
) -> Result<()> {
    let mut cfg = load_config(config, overrides)?;
    let target = cfg.resolve()?;
    if !params_path.exists() {
        return Err(Error::io(
            "dump",
            format!("no parameter snapshot at {}", params_path.display()),
        ));
    }
    let params = ParamStore::load(params_path)?;
    let net = Network::new(&cfg.network)?;
    sinckan::networks::check_layout(&net, &params)?;
    let dir = out
        .or_else(|| cfg.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    match kind {
        "predictions" => {
            let csv = match &target {
                Target::Function(f) => approx_predictions_csv(f, &net, &params, cfg.train.n_fine)?,
                Target::Problem(p) => {
                    predictions_csv(p, Field::Network { net: &net, params: &params }, &p.eval_counts)?
                }
            };
            let path = write_file(&dir, "predictions.csv", &csv)?;
            println!("wrote {}", path.display());
        }
        "activations" => {
            let domain = match &target {
                Target::Function(f) => f.domain,
                Target::Problem(p) => p.domain[0],
            };
            let (layer, pin, qout) = cfg.activation_edge;
            let samples =
                dump_activations(&net, &params, layer, (pin, qout), &activation_grid(domain))?;
            let mut csv = String::from("x,phi\n");
            for (x, phi) in samples {
                csv.push_str(&format!("{x},{phi}\n"));
            }
            let path = write_file(&dir, "activations.csv", &csv)?;
            println!("wrote {}", path.display());
        }
        other => return Err(Error::config(format!("unknown dump kind {other:?}"))),
    }
    Ok(())
}

pub(crate) fn selftest(only: Option<&str>) -> Result<()> {
    let mut all_ok = true;
    let names: Vec<&str> = match only {
        Some(name) => vec![name],
        None => PROBLEM_NAMES.to_vec(),
    };
    for name in names {
        let problem = sinckan::problems::get_problem(name)?;
        let report = problem.self_test(1000, 42)?;
        let ok = report.max_residual <= 1e-8 && report.max_constraint <= 1e-10;
        all_ok &= ok;
        println!(
            "{}: residual {:.2e}, constraints {:.2e}, divergence {:.2e} ... {}",
            name,
            report.max_residual,
            report.max_constraint,
            report.max_divergence,
            if ok { "ok" } else { "FAIL" }
        );
    }
    if only.is_none() {
        // gradient spot-check on a small sinckan mse loss
        let spec = sinckan::networks::NetworkSpec {
            arch: sinckan::networks::ArchKind::SincKan,
            in_dim: 1,
            out_dim: 1,
            depth: 2,
            width: 8,
            degree: 9,
            hgrid: Some(sinckan::bases::make_hgrid(sinckan::bases::HScheme::Inverse, 2.0, 2)?),
            skip: sinckan::networks::SkipKind::Linear,
            transform: sinckan::networks::TransformKind::Tanh,
            log_domain: None,
            seed: 0,
        };
        let net = Network::new(&spec)?;
        let xs: Vec<f64> = (0..23).map(|i| -1.0 + 2.0 * (i as f64 + 0.217) / 23.0).collect();
        let ys: Vec<f64> = xs.iter().map(|x| (3.0 * x).sin() + 0.5).collect();
        let loss = MseLoss { net: &net, xs: &xs, ys: &ys };
        let worst = check_gradient(&loss, &net.init(1), 1e-5)?;
        let ok = worst <= 1e-5;
        all_ok &= ok;
        println!("gradient check (sinckan mse): {worst:.2e} ... {}", if ok { "ok" } else { "FAIL" });
    }
    if all_ok {
        Ok(())
    } else {
        Err(Error::non_finite("selftest", "one or more checks failed"))
    }
}

