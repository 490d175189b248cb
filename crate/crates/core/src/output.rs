//! CSV outputs, run manifests and parameter sweeps.
//!
//! All CSV files use LF line endings, `.` as decimal separator and Rust's
//! shortest round-trip float formatting, so identical runs produce
//! byte-identical files.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::ScenarioConfig;
use crate::error::{Error, Result};
use crate::sim::{run, RunOutput, Snapshot, HISTOGRAM_BINS};

/// Population mean |a| a run must reach to count as converged.
pub const CONVERGENCE_THRESHOLD: f64 = 0.9;

pub const SNAPSHOTS_FILE: &str = "snapshots.csv";
pub const ACTORS_FILE: &str = "actors.csv";
pub const SUMMARY_FILE: &str = "summary.csv";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const SWEEP_FILE: &str = "sweep.csv";

pub const SUMMARY_HEADER: &str =
    "scenario,seed,steps,final_mean_abs,steps_to_0.9,sender_send_rate,feedback_rate";
pub const ACTORS_HEADER: &str = "step,actor_id,mean_value,mean_abs_value,popularity,reputation";

pub fn snapshots_header() -> String {
    let mut h = String::from("step,mean_value,mean_abs_value,std_value");
    for b in 0..HISTOGRAM_BINS {
        write!(h, ",bin_{b:02}").unwrap();
    }
    h
}

pub fn snapshots_csv(snapshots: &[Snapshot]) -> String {
    let mut out = snapshots_header();
    out.push('\n');
    for s in snapshots {
        write!(
            out,
            "{},{},{},{}",
            s.step, s.population_mean, s.population_mean_abs, s.population_std
        )
        .unwrap();
        for c in &s.histogram {
            write!(out, ",{c}").unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn actors_csv(snapshots: &[Snapshot]) -> String {
    let mut out = String::from(ACTORS_HEADER);
    out.push('\n');
    for s in snapshots {
        for x in 0..s.mean_value.len() {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                s.step, x, s.mean_value[x], s.mean_abs_value[x], s.popularity[x], s.reputation[x]
            )
            .unwrap();
        }
    }
    out
}

/// First snapshot step with population mean |a| at or above `threshold`.
pub fn steps_to_threshold(snapshots: &[Snapshot], threshold: f64) -> Option<u64> {
    snapshots
        .iter()
        .find(|s| s.population_mean_abs >= threshold)
        .map(|s| s.step)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub scenario: String,
    pub seed: u64,
    pub steps: u64,
    pub final_mean_abs: f64,
    pub steps_to_threshold: Option<u64>,
    pub sender_send_rate: f64,
    pub feedback_rate: f64,
}

impl Summary {
    pub fn new(cfg: &ScenarioConfig, out: &RunOutput) -> Self {
        let last = out
            .snapshots
            .last()
            .expect("a run has at least one snapshot");
        Summary {
            scenario: cfg.name.clone(),
            seed: cfg.rng_seed,
            steps: last.step,
            final_mean_abs: last.population_mean_abs,
            steps_to_threshold: steps_to_threshold(&out.snapshots, CONVERGENCE_THRESHOLD),
            sender_send_rate: out.stats.send_rate(),
            feedback_rate: out.stats.feedback_rate(),
        }
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.scenario,
            self.seed,
            self.steps,
            self.final_mean_abs,
            self.steps_to_threshold
                .map(|s| s.to_string())
                .unwrap_or_default(),
            self.sender_send_rate,
            self.feedback_rate
        )
    }
}

pub fn summary_csv(rows: &[Summary]) -> String {
    let mut out = String::from(SUMMARY_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.csv_row());
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub seed: u64,
    pub config: ScenarioConfig,
    pub outputs: Vec<PathBuf>,
}

/// Writes snapshots, summary, optional per-actor table and the manifest into `dir`.
pub fn write_run(
    dir: &Path,
    cfg: &ScenarioConfig,
    out: &RunOutput,
    per_actor: bool,
) -> Result<RunManifest> {
    fs::create_dir_all(dir)?;
    let mut outputs = vec![PathBuf::from(SNAPSHOTS_FILE), PathBuf::from(SUMMARY_FILE)];
    fs::write(dir.join(SNAPSHOTS_FILE), snapshots_csv(&out.snapshots))?;
    fs::write(
        dir.join(SUMMARY_FILE),
        summary_csv(&[Summary::new(cfg, out)]),
    )?;
    if per_actor {
        fs::write(dir.join(ACTORS_FILE), actors_csv(&out.snapshots))?;
        outputs.push(PathBuf::from(ACTORS_FILE));
    }
    let manifest = RunManifest {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        seed: cfg.rng_seed,
        config: cfg.clone(),
        outputs,
    };
    let mut text = serde_json::to_string_pretty(&manifest)?;
    text.push('\n');
    fs::write(dir.join(MANIFEST_FILE), text)?;
    Ok(manifest)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub param: String,
    pub value: String,
    pub summary: Summary,
}

pub const SWEEP_HEADER: &str =
    "scenario,param,value,seed,steps,final_mean_abs,steps_to_0.9,sender_send_rate,feedback_rate";

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for r in rows {
        let s = &r.summary;
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            s.scenario,
            r.param,
            r.value,
            s.seed,
            s.steps,
            s.final_mean_abs,
            s.steps_to_threshold
                .map(|x| x.to_string())
                .unwrap_or_default(),
            s.sender_send_rate,
            s.feedback_rate
        )
        .unwrap();
    }
    out
}

/// Every (value, seed) configuration of a sweep, validated up front.
pub fn sweep_configs(
    base: &ScenarioConfig,
    param: &str,
    values: &[String],
    seeds: &[u64],
) -> Result<Vec<(String, ScenarioConfig)>> {
    if values.is_empty() || seeds.is_empty() {
        return Err(Error::config(
            "a sweep needs at least one value and one seed",
        ));
    }
    let mut configs = Vec::with_capacity(values.len() * seeds.len());
    for value in values {
        for &seed in seeds {
            let mut cfg = base.clone();
            cfg.set_param(param, value)?;
            cfg.rng_seed = seed;
            cfg.validate()?;
            configs.push((value.clone(), cfg));
        }
    }
    Ok(configs)
}

/// Runs the cross product of `values` and `seeds` on at most `jobs` threads.
/// Rows come back in (value, seed) order regardless of scheduling.
pub fn sweep(
    base: &ScenarioConfig,
    param: &str,
    values: &[String],
    seeds: &[u64],
    jobs: usize,
) -> Result<Vec<SweepRow>> {
    let configs = sweep_configs(base, param, values, seeds)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::config(format!("cannot start worker pool: {e}")))?;
    pool.install(|| {
        configs
            .par_iter()
            .map(|(value, cfg)| {
                let out = run(cfg)?;
                Ok(SweepRow {
                    param: param.to_string(),
                    value: value.clone(),
                    summary: Summary::new(cfg, &out),
                })
            })
            .collect()
    })
}
