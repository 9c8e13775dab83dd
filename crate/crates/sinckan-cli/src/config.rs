//! Experiment and sweep configuration: a JSON key/value tree plus dotted
//! command-line overrides, validated against the problem registries.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use sinckan::bases::{make_hgrid, HScheme};
use sinckan::error::{Error, Result};
use sinckan::networks::{NetworkSpec, TransformKind};
use sinckan::problems::{get_function, get_problem, Problem, TargetFunction};
use sinckan::training::TrainConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Approx,
    Pinn,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub problem: String,
    /// Boundary-layer problem parameter (bl-1d only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    pub network: NetworkSpec,
    pub train: TrainConfig,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub dump_activations: bool,
    #[serde(default)]
    pub dump_predictions: bool,
    #[serde(default)]
    pub save_params: bool,
    /// Edge dumped by `dump_activations` as (layer, input, output).
    #[serde(default)]
    pub activation_edge: (usize, usize, usize),
}

/// What the config resolves to after registry lookup.
pub enum Target {
    Function(TargetFunction),
    Problem(Problem),
}

impl ExperimentConfig {
    pub fn from_value(value: Value) -> Result<Self> {
        serde_json::from_value(value).map_err(|e| Error::config(format!("bad config: {e}")))
    }

    pub fn to_value(&self) -> Result<Value> {
        serde_json::to_value(self).map_err(|e| Error::config(e.to_string()))
    }

    /// Registry lookup plus mode/problem and dimension compatibility, and
    /// defaulting of the log-transform domain from the problem domain.
    pub fn resolve(&mut self) -> Result<Target> {
        let target = match self.mode {
            Mode::Approx => {
                if self.epsilon.is_some() {
                    return Err(Error::config("epsilon only applies to the bl-1d problem"));
                }
                Target::Function(get_function(&self.problem)?)
            }
            Mode::Pinn => {
                let problem = match (self.problem.as_str(), self.epsilon) {
                    ("bl-1d", Some(eps)) => {
                        if !(eps > 0.0) {
                            return Err(Error::config("epsilon must be positive"));
                        }
                        Problem::bl_1d(eps)
                    }
                    (_, Some(_)) => {
                        return Err(Error::config("epsilon only applies to the bl-1d problem"))
                    }
                    (name, None) => get_problem(name)?,
                };
                Target::Problem(problem)
            }
        };
        let (in_dim, out_dim, domain) = match &target {
            Target::Function(f) => (1, 1, vec![f.domain]),
            Target::Problem(p) => (p.input_dim(), p.output_dim, p.domain.clone()),
        };
        if self.network.in_dim != in_dim || self.network.out_dim != out_dim {
            return Err(Error::config(format!(
                "network is {}x{} but {} needs {}x{}",
                self.network.in_dim, self.network.out_dim, self.problem, in_dim, out_dim
            )));
        }
        if let Some(grid) = &self.network.hgrid {
            // rebuild the step values so configs may omit them and stale
            // values can never disagree with (scheme, h0, m)
            self.network.hgrid = Some(make_hgrid(grid.scheme, grid.h0, grid.m)?);
        }
        if self.network.transform == TransformKind::Log && self.network.log_domain.is_none() {
            // widen by 1% so grid endpoints stay strictly inside (a, b)
            self.network.log_domain = Some(
                domain
                    .iter()
                    .map(|&(a, b)| {
                        let margin = 0.01 * (b - a);
                        (a - margin, b + margin)
                    })
                    .collect(),
            );
        }
        self.network.validate()?;
        self.train.validate()?;
        Ok(target)
    }
}

/// Apply a `--set path.to.field=value` override onto the raw JSON tree.
pub fn apply_override(tree: &mut Value, spec: &str) -> Result<()> {
    let (path, raw) = spec
        .split_once('=')
        .ok_or_else(|| Error::config(format!("override {spec:?} is not path=value")))?;
    let parsed: Value = serde_json::from_str(raw).unwrap_or(Value::String(raw.to_string()));
    let mut node = tree;
    let parts: Vec<&str> = path.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        let obj = node
            .as_object_mut()
            .ok_or_else(|| Error::config(format!("{path}: {part} is not an object")))?;
        if i == parts.len() - 1 {
            obj.insert(part.to_string(), parsed);
            return Ok(());
        }
        node = obj.entry(part.to_string()).or_insert(Value::Object(Default::default()));
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepSpec {
    pub base: ExperimentConfig,
    /// Axis name -> list of values. Known axes: h0, m, scheme, degree,
    /// n_points, epsilon, skip, transform, seed.
    pub axes: std::collections::BTreeMap<String, Vec<Value>>,
    /// Cartesian product of the axes (default); otherwise the axes are
    /// zipped row by row and must have equal lengths.
    #[serde(default = "default_product")]
    pub product: bool,
    #[serde(default = "default_cap")]
    pub cap: usize,
}

fn default_product() -> bool {
    true
}

fn default_cap() -> usize {
    256
}

pub const SWEEP_AXES: [&str; 9] =
    ["h0", "m", "scheme", "degree", "n_points", "epsilon", "skip", "transform", "seed"];

fn axis_f64(value: &Value) -> Result<f64> {
    value
        .as_f64()
        .ok_or_else(|| Error::config(format!("expected a number, got {value}")))
}

/// Set one axis value on a config.
pub fn apply_axis(cfg: &mut ExperimentConfig, axis: &str, value: &Value) -> Result<()> {
    match axis {
        "h0" | "m" | "scheme" => {
            let grid = cfg.network.hgrid.as_ref().ok_or_else(|| {
                Error::config(format!("axis {axis} needs a network with an hgrid"))
            })?;
            let (mut h0, mut m, mut scheme) = (grid.h0, grid.m, grid.scheme);
            match axis {
                "h0" => h0 = axis_f64(value)?,
                "m" => m = axis_f64(value)? as usize,
                _ => {
                    scheme = match value.as_str() {
                        Some("inverse") => HScheme::Inverse,
                        Some("exponential") => HScheme::Exponential,
                        other => {
                            return Err(Error::config(format!("unknown scheme {other:?}")))
                        }
                    }
                }
            }
            cfg.network.hgrid = Some(make_hgrid(scheme, h0, m)?);
        }
        "degree" => cfg.network.degree = axis_f64(value)? as usize,
        "n_points" => {
            // the degree-vs-data study adapts the batch to a quarter of the
            // grid so small grids stay sampleable
            let n = axis_f64(value)? as usize;
            cfg.train.n_train = n;
            cfg.train.batch_size = (n / 4).max(1);
        }
        "epsilon" => cfg.epsilon = Some(axis_f64(value)?),
        "skip" => {
            cfg.network.skip = serde_json::from_value(value.clone())
                .map_err(|e| Error::config(format!("skip axis: {e}")))?
        }
        "transform" => {
            cfg.network.transform = serde_json::from_value(value.clone())
                .map_err(|e| Error::config(format!("transform axis: {e}")))?
        }
        "seed" => cfg.network.seed = axis_f64(value)? as u64,
        other => {
            return Err(Error::config(format!(
                "unknown sweep axis {other:?}; known: {}",
                SWEEP_AXES.join(", ")
            )))
        }
    }
    Ok(())
}

/// Expand a sweep into concrete configs with their axis assignments.
pub fn expand(spec: &SweepSpec) -> Result<Vec<(Vec<(String, Value)>, ExperimentConfig)>> {
    if spec.axes.is_empty() {
        return Err(Error::config("sweep needs at least one axis"));
    }
    for name in spec.axes.keys() {
        if !SWEEP_AXES.contains(&name.as_str()) {
            return Err(Error::config(format!(
                "unknown sweep axis {name:?}; known: {}",
                SWEEP_AXES.join(", ")
            )));
        }
    }
    let names: Vec<&String> = spec.axes.keys().collect();
    let mut combos: Vec<Vec<(String, Value)>> = Vec::new();
    if spec.product {
        let total: usize = spec.axes.values().map(|v| v.len()).product();
        if total > spec.cap {
            return Err(Error::config(format!(
                "sweep would run {total} combinations, over the cap of {}",
                spec.cap
            )));
        }
        let mut idx = vec![0usize; names.len()];
        loop {
            combos.push(
                names
                    .iter()
                    .zip(&idx)
                    .map(|(n, &i)| ((*n).clone(), spec.axes[*n][i].clone()))
                    .collect(),
            );
            let mut done = true;
            for d in (0..names.len()).rev() {
                idx[d] += 1;
                if idx[d] < spec.axes[names[d]].len() {
                    done = false;
                    break;
                }
                idx[d] = 0;
            }
            if done {
                break;
            }
        }
    } else {
        let len = spec.axes[names[0]].len();
        if spec.axes.values().any(|v| v.len() != len) {
            return Err(Error::config("zipped sweep axes must have equal lengths"));
        }
        if len > spec.cap {
            return Err(Error::config(format!(
                "sweep would run {len} rows, over the cap of {}",
                spec.cap
            )));
        }
        for i in 0..len {
            combos.push(
                names
                    .iter()
                    .map(|n| ((*n).clone(), spec.axes[*n][i].clone()))
                    .collect(),
            );
        }
    }
    let mut out = Vec::with_capacity(combos.len());
    for combo in combos {
        let mut cfg = spec.base.clone();
        for (axis, value) in &combo {
            apply_axis(&mut cfg, axis, value)?;
        }
        out.push((combo, cfg));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base_json() -> Value {
        serde_json::json!({
            "mode": "approx",
            "problem": "sin-low",
            "network": {
                "arch": "sinckan",
                "in_dim": 1, "out_dim": 1, "depth": 2, "width": 8, "degree": 33,
                "hgrid": {"scheme": "inverse", "h0": 6.0, "m": 6,
                          "values": [0.16666666666666666, 0.08333333333333333, 0.05555555555555555,
                                     0.041666666666666664, 0.03333333333333333, 0.027777777777777776]},
                "skip": "linear", "transform": "tanh"
            },
            "train": {
                "iterations": 100, "batch_size": 50, "lr0": 1e-3,
                "decay_rate": 0.9, "decay_every": 10000, "n_train": 100, "n_fine": 200,
                "seeds": [1]
            }
        })
    }

    #[test]
    fn config_round_trips_through_echo() {
        let mut cfg = ExperimentConfig::from_value(base_json()).unwrap();
        cfg.resolve().unwrap();
        let echoed = cfg.to_value().unwrap();
        let mut back = ExperimentConfig::from_value(echoed).unwrap();
        back.resolve().unwrap();
        assert_eq!(cfg, back);
    }

    #[test]
    fn overrides_reach_nested_fields() {
        let mut tree = base_json();
        apply_override(&mut tree, "train.iterations=250").unwrap();
        apply_override(&mut tree, "network.degree=9").unwrap();
        apply_override(&mut tree, "problem=\"sqrt\"").unwrap();
        let cfg = ExperimentConfig::from_value(tree).unwrap();
        assert_eq!(cfg.train.iterations, 250);
        assert_eq!(cfg.network.degree, 9);
        assert_eq!(cfg.problem, "sqrt");
        assert!(apply_override(&mut base_json(), "no-equals-sign").is_err());
    }

    #[test]
    fn mode_problem_compatibility() {
        let mut tree = base_json();
        apply_override(&mut tree, "problem=\"perturbed\"").unwrap();
        let mut cfg = ExperimentConfig::from_value(tree).unwrap();
        assert!(cfg.resolve().is_err(), "pde name under approx mode must fail");

        let mut tree = base_json();
        apply_override(&mut tree, "mode=\"pinn\"").unwrap();
        apply_override(&mut tree, "problem=\"perturbed\"").unwrap();
        let mut cfg = ExperimentConfig::from_value(tree).unwrap();
        cfg.resolve().unwrap();
    }

    #[test]
    fn epsilon_only_for_bl_1d() {
        let mut tree = base_json();
        apply_override(&mut tree, "mode=\"pinn\"").unwrap();
        apply_override(&mut tree, "problem=\"bl-1d\"").unwrap();
        apply_override(&mut tree, "epsilon=100.0").unwrap();
        let mut cfg = ExperimentConfig::from_value(tree).unwrap();
        match cfg.resolve().unwrap() {
            Target::Problem(p) => assert_eq!(p.eps, 100.0),
            _ => panic!("expected a problem"),
        }

        let mut tree = base_json();
        apply_override(&mut tree, "epsilon=2.0").unwrap();
        let mut cfg = ExperimentConfig::from_value(tree).unwrap();
        assert!(cfg.resolve().is_err());
    }

    #[test]
    fn sweep_product_and_cap() {
        let base = ExperimentConfig::from_value(base_json()).unwrap();
        let mut axes = std::collections::BTreeMap::new();
        axes.insert("h0".to_string(), vec![2.0.into(), 6.0.into()]);
        axes.insert("m".to_string(), vec![1.into(), 6.into(), 12.into()]);
        let spec = SweepSpec { base: base.clone(), axes: axes.clone(), product: true, cap: 256 };
        let combos = expand(&spec).unwrap();
        assert_eq!(combos.len(), 6);
        let grid = combos[0].1.network.hgrid.as_ref().unwrap();
        assert_eq!((grid.h0, grid.m), (2.0, 1));

        let capped = SweepSpec { base, axes, product: true, cap: 5 };
        assert!(expand(&capped).is_err());
    }

    #[test]
    fn sweep_zip_mode_builds_rows() {
        let base = ExperimentConfig::from_value(base_json()).unwrap();
        let mut axes = std::collections::BTreeMap::new();
        axes.insert(
            "skip".to_string(),
            vec!["none".into(), "linear".into(), "silu".into()],
        );
        axes.insert(
            "transform".to_string(),
            vec!["none".into(), "tanh".into(), "tanh".into()],
        );
        let spec = SweepSpec { base, axes, product: false, cap: 256 };
        let combos = expand(&spec).unwrap();
        assert_eq!(combos.len(), 3);
        assert_eq!(combos[2].1.network.skip, sinckan::networks::SkipKind::Silu);
    }

    #[test]
    fn unknown_axis_is_rejected() {
        let base = ExperimentConfig::from_value(base_json()).unwrap();
        let mut axes = std::collections::BTreeMap::new();
        axes.insert("width".to_string(), vec![8.into()]);
        let spec = SweepSpec { base, axes, product: true, cap: 16 };
        let err = expand(&spec).unwrap_err();
        assert!(err.to_string().contains("h0"));
    }
}
