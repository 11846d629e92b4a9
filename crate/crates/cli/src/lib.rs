//! Verification campaigns for `plap-core`: each campaign runs a fixed set of
//! checks, writes its CSV artifacts and a `checks.csv`/`summary.json` pair,
//! and reports pass/fail per check.

pub mod campaigns;
pub mod config;
pub mod report;

use std::collections::HashSet;
use std::path::{Path, PathBuf};
use std::time::Instant;

use log::{debug, info};
use plap_core::exec::{self, Exec};
use thiserror::Error;

pub use campaigns::CheckError;
pub use config::{Campaign, ConfigError, ExperimentConfig};
pub use report::{CheckRow, ExperimentReport};

use report::StepTiming;

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Check(#[from] CheckError),
    #[error("check {0} reported twice")]
    DuplicateCheck(String),
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl RunError {
    /// Process exit status: 2 for configuration problems, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Overrides the config's `output`.
    pub out: Option<PathBuf>,
    /// Run independent steps concurrently; the report order is unchanged.
    pub parallel: bool,
    /// Overrides the config's `seed`.
    pub seed: Option<u64>,
}

pub const DEFAULT_OUT: &str = "plap-out";

/// Validates `cfg`, runs every step of `campaign`, and writes the outputs.
pub fn run(campaign: Campaign, cfg: &ExperimentConfig, opts: &RunOptions) -> Result<ExperimentReport, RunError> {
    cfg.validate(campaign)?;
    let seed = opts.seed.unwrap_or_else(|| cfg.seed());
    let out = opts
        .out
        .clone()
        .or_else(|| cfg.output.clone())
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    let steps = campaigns::steps(campaign);
    let policy = if opts.parallel { Exec::Parallel } else { Exec::Sequential };
    info!("campaign {campaign}: {} steps, seed {seed}, {policy:?}", steps.len());

    let results = exec::map(policy, &steps, |step| {
        let start = Instant::now();
        debug!("step {} started", step.name);
        let r = (step.run)(cfg, seed);
        let secs = start.elapsed().as_secs_f64();
        debug!("step {} finished in {secs:.3} s", step.name);
        (step.name, secs, r)
    });

    let mut report = ExperimentReport {
        campaign: campaign.name().to_string(),
        seed,
        parallel: opts.parallel,
        rows: Vec::new(),
        timings: Vec::new(),
        artifacts: Vec::new(),
    };
    let mut artifacts = Vec::new();
    let mut seen = HashSet::new();
    for (name, seconds, result) in results {
        let output = result?;
        for row in output.rows {
            if !seen.insert(row.name.clone()) {
                return Err(RunError::DuplicateCheck(row.name));
            }
            report.rows.push(row);
        }
        report.timings.push(StepTiming {
            step: name.to_string(),
            seconds,
        });
        artifacts.extend(output.artifacts);
    }

    create_dir(&out)?;
    for a in &artifacts {
        let path = out.join(&a.name);
        std::fs::write(&path, &a.bytes).map_err(|source| RunError::Io { path, source })?;
        report.artifacts.push(a.name.clone());
    }
    report
        .write_summary(&out)
        .map_err(|source| RunError::Io { path: out.clone(), source })?;
    info!("{} checks, {} failed", report.rows.len(), report.failures().count());
    Ok(report)
}

fn create_dir(dir: &Path) -> Result<(), RunError> {
    std::fs::create_dir_all(dir).map_err(|source| RunError::Io {
        path: dir.to_path_buf(),
        source,
    })
}
