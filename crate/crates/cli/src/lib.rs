//! Batch verification of transfer-operator identities.
//!
//! A [`Config`] selects checks; [`run`] executes them on a worker pool and
//! assembles a [`RunReport`] whose JSON form is byte-identical across runs
//! with the same configuration.

pub mod checks;
pub mod config;
pub mod contexts;
pub mod report;
pub mod seeds;

use std::time::Instant;

use rayon::prelude::*;

use qtransfer_core::Error as CoreError;

pub use config::{Config, CHECKS};
pub use report::{CheckRecord, ReportRecord, RunReport};

#[derive(Clone, Copy, Debug, Default)]
pub struct Options {
    /// Include wall times in the report (which then differs between runs).
    pub timings: bool,
}

fn is_pole(e: &anyhow::Error) -> bool {
    e.chain()
        .any(|c| matches!(c.downcast_ref::<CoreError>(), Some(CoreError::Pole { .. })))
}

fn run_check(cfg: &Config, name: &'static str, opts: Options) -> CheckRecord {
    let start = Instant::now();
    let mut attempt = 0;
    loop {
        let mut run = checks::Run::new(cfg, name, attempt, opts.timings);
        let outcome = checks::dispatch(&mut run);
        let error = match outcome {
            Err(e) if attempt == 0 && is_pole(&e) => {
                attempt += 1;
                continue;
            }
            Err(e) if is_pole(&e) => Some(format!("pole collision persisted after re-seeding: {e:#}")),
            Err(e) => Some(format!("{e:#}")),
            Ok(()) => None,
        };
        let pass = error.is_none() && !run.reports.is_empty() && run.reports.iter().all(|r| r.pass);
        return CheckRecord {
            name: name.to_string(),
            pass,
            attempts: attempt + 1,
            error,
            reports: run.reports.iter().map(|r| ReportRecord::new(r, opts.timings)).collect(),
            contexts: run.contexts,
            artifact: run.artifact,
            elapsed_ms: opts.timings.then(|| start.elapsed().as_secs_f64() * 1e3),
        };
    }
}

/// Runs the selected checks. `cfg` must already be validated.
pub fn run(cfg: &Config, opts: Options) -> RunReport {
    let checks: Vec<CheckRecord> = cfg
        .selected()
        .into_par_iter()
        .map(|name| run_check(cfg, name, opts))
        .collect();
    let pass = !checks.is_empty() && checks.iter().all(|c| c.pass);
    RunReport {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        config: cfg.clone(),
        pass,
        checks,
    }
}
