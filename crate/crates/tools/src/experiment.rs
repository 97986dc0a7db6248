//! Runs every configured strategy and writes the outputs.

use std::fmt;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use sdre_core::model::RepresentationFamily;
use sdre_core::simulate::{compare_runs, run_with_clock, Comparison, TrajectoryRecord};

use crate::config::{ExperimentConfig, OutputFormat};
use crate::output;
use crate::registry::Registry;
use crate::WallClock;

/// Overrides `output_dir` from the config when set.
pub const OUTPUT_DIR_ENV: &str = "SDRE_OUTPUT_DIR";

#[derive(Debug)]
pub enum ExperimentError {
    Validation(String),
    Io { path: PathBuf, source: io::Error },
}

impl fmt::Display for ExperimentError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExperimentError::Validation(m) => write!(f, "invalid experiment: {m}"),
            ExperimentError::Io { path, source } => {
                write!(f, "cannot write {}: {source}", path.display())
            }
        }
    }
}

impl std::error::Error for ExperimentError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            ExperimentError::Io { source, .. } => Some(source),
            ExperimentError::Validation(_) => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub output_dir: PathBuf,
    pub records: Vec<TrajectoryRecord>,
    pub comparison: Option<Comparison>,
}

impl ExperimentReport {
    /// 0 when every run settled or ran to the horizon, 2 when any diverged
    /// or hit a Riccati failure.
    pub fn exit_code(&self) -> i32 {
        if self.records.iter().any(|r| r.status.is_failure()) {
            2
        } else {
            0
        }
    }
}

fn write(path: &Path, contents: &str) -> Result<(), ExperimentError> {
    fs::write(path, contents).map_err(|source| ExperimentError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn create_dir(path: &Path) -> Result<(), ExperimentError> {
    fs::create_dir_all(path).map_err(|source| ExperimentError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Output directory after the environment override.
pub fn resolve_output_dir(cfg: &ExperimentConfig) -> PathBuf {
    match std::env::var_os(OUTPUT_DIR_ENV) {
        Some(dir) if !dir.is_empty() => PathBuf::from(dir),
        _ => cfg.output_dir.clone(),
    }
}

/// Simulates every strategy in order and writes per-run files under
/// `<output_dir>/<label>/` plus `comparison.json` for two or more runs.
///
/// Runs are sequential so the recorded wall times are comparable.
pub fn run_experiment(
    cfg: &ExperimentConfig,
    registry: &Registry,
) -> Result<ExperimentReport, ExperimentError> {
    let invalid = |m: String| ExperimentError::Validation(m);
    let problem = registry
        .build(&cfg.problem, &cfg.params)
        .map_err(|e| invalid(e.to_string()))?;
    let family =
        RepresentationFamily::generate_full(problem, &cfg.c_set).map_err(|e| invalid(e.to_string()))?;
    let fixed = cfg.fixed.resolve(&family).map_err(invalid)?;

    let mut records = Vec::with_capacity(cfg.strategies.len());
    for (i, strategy) in cfg.strategies.iter().enumerate() {
        let mut sim = cfg.simulation_for(*strategy);
        sim.fixed_alpha = Some(fixed.clone());
        let clock = WallClock::new();
        let mut rec =
            run_with_clock(&family, &cfg.x0, &sim, &clock).map_err(|e| invalid(e.to_string()))?;
        if cfg.strategies[..i].contains(strategy) {
            rec.label = format!("{}-{}", rec.label, i + 1);
        }
        records.push(rec);
    }
    let comparison = if records.len() >= 2 {
        Some(compare_runs(&records).map_err(|e| invalid(e.to_string()))?)
    } else {
        None
    };

    let dir = resolve_output_dir(cfg);
    create_dir(&dir)?;
    for rec in &records {
        let sub = dir.join(&rec.label);
        create_dir(&sub)?;
        if cfg.wants(OutputFormat::Csv) {
            write(&sub.join("trajectory.csv"), &output::trajectory_csv(rec))?;
            write(&sub.join("residual_trace.csv"), &output::residual_trace_csv(rec))?;
        }
        if cfg.wants(OutputFormat::Json) {
            write(&sub.join("summary.json"), &pretty(&output::summary_json(rec)))?;
        }
    }
    if let (Some(cmp), true) = (&comparison, cfg.wants(OutputFormat::Json)) {
        write(&dir.join("comparison.json"), &pretty(&output::comparison_json(cmp)))?;
    }
    Ok(ExperimentReport {
        output_dir: dir,
        records,
        comparison,
    })
}

fn pretty(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values always serialize");
    s.push('\n');
    s
}
