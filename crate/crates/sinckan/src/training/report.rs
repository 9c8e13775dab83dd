//! Seeded experiment output: per-eval records, per-seed finals, and the
//! mean +- std summary, with JSON and CSV emitters.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRecord {
    pub iteration: usize,
    pub loss: f64,
    pub metric_train: f64,
    pub metric_fine: f64,
    pub lr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedRun {
    pub seed: u64,
    pub records: Vec<EvalRecord>,
    pub final_train: f64,
    pub final_fine: f64,
    /// Per-output fine-grid metrics for multi-output problems
    /// (name, value), e.g. ns-tg-u / ns-tg-v rows.
    pub components_fine: Vec<(String, f64)>,
    pub diverged: bool,
    pub wall_secs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentSummary {
    pub name: String,
    pub mean: f64,
    pub std: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub train_mean: f64,
    pub train_std: f64,
    pub fine_mean: f64,
    pub fine_std: f64,
    pub components: Vec<ComponentSummary>,
}

/// A finished run: the serializable report plus the trained parameters per
/// seed (parameters travel separately so reports stay lightweight).
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub report: RunReport,
    pub trained: Vec<(u64, crate::networks::ParamStore)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    /// Verbatim echo of the configuration that produced this run.
    pub config: serde_json::Value,
    pub seed_runs: Vec<SeedRun>,
    pub summary: Summary,
    pub wall_secs: f64,
}

/// Mean and population standard deviation (std over >= 1 seeds; a single
/// seed reports std 0).
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

pub fn summarize(seed_runs: &[SeedRun]) -> Summary {
    let train: Vec<f64> = seed_runs.iter().map(|r| r.final_train).collect();
    let fine: Vec<f64> = seed_runs.iter().map(|r| r.final_fine).collect();
    let (train_mean, train_std) = mean_std(&train);
    let (fine_mean, fine_std) = mean_std(&fine);
    let mut components = Vec::new();
    if let Some(first) = seed_runs.first() {
        for (ci, (name, _)) in first.components_fine.iter().enumerate() {
            let vals: Vec<f64> = seed_runs.iter().map(|r| r.components_fine[ci].1).collect();
            let (mean, std) = mean_std(&vals);
            components.push(ComponentSummary { name: name.clone(), mean, std });
        }
    }
    Summary { train_mean, train_std, fine_mean, fine_std, components }
}

impl RunReport {
    pub fn assemble(config: serde_json::Value, seed_runs: Vec<SeedRun>, wall_secs: f64) -> Self {
        let summary = summarize(&seed_runs);
        RunReport { config, seed_runs, summary, wall_secs }
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::io("report.json", e.to_string()))
    }

    /// Flat CSV of per-eval records across seeds.
    pub fn metrics_csv(&self) -> String {
        let mut out = String::from("iteration,loss,rmse_train,rmse_fine,lr,seed\n");
        for run in &self.seed_runs {
            for r in &run.records {
                out.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    r.iteration, r.loss, r.metric_train, r.metric_fine, r.lr, run.seed
                ));
            }
        }
        out
    }
}
