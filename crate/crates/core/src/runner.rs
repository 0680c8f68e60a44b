//! Execute a [`RunConfig`], write the CSV table and a JSON manifest.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use log::info;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::config::{ExperimentKind, RunConfig};
use crate::diagnostics::{observed_orders, EnergyTrace};
use crate::error::{Error, Result};
use crate::simulation::{run_case, CaseResult, CaseSpec};
use crate::studies::{
    energy_run, gpc_sweep, long_time_error, perturbation_study, GpcSweep, LongTimeSeries,
    PerturbationRun,
};

/// What a run produced, before it is written out.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Outcome {
    Convergence { cases: Vec<CaseResult> },
    GpcSweep(GpcSweep),
    Energy(EnergyTrace),
    LongTime(LongTimeSeries),
    Perturbation { runs: Vec<PerturbationRun> },
}

/// Result of [`run`]: the outcome plus the files written.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub outcome: Outcome,
    pub csv: PathBuf,
    pub manifest: PathBuf,
    /// `wave-sgldg-<version>+<hash of the resolved configuration>`.
    pub provenance: String,
    pub summary: Value,
}

fn fmt(x: f64) -> String {
    format!("{x:.6e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt).unwrap_or_default()
}

/// Provenance tag derived from the resolved configuration (output location
/// excluded), so identical inputs always carry the same tag.
pub fn provenance(config: &RunConfig) -> Result<String> {
    let mut config = config.clone();
    config.output = Default::default();
    let canonical = serde_json::to_vec(&config)?;
    let digest = Sha256::digest(&canonical);
    let hex: String = digest.iter().take(8).map(|b| format!("{b:02x}")).collect();
    Ok(format!("wave-sgldg-{}+{hex}", env!("CARGO_PKG_VERSION")))
}

/// Compute the experiment described by `config` on a pool of `workers`
/// threads (`0` lets rayon decide).
pub fn execute(config: &RunConfig, workers: usize) -> Result<Outcome> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    pool.install(|| execute_in_pool(config))
}

fn execute_in_pool(config: &RunConfig) -> Result<Outcome> {
    let first = |config: &RunConfig| config.case(config.h[0]);
    Ok(match config.experiment {
        ExperimentKind::Convergence => {
            let specs = config
                .h
                .iter()
                .map(|&h| config.case(h))
                .collect::<Result<Vec<CaseSpec>>>()?;
            let cases = specs
                .par_iter()
                .map(|spec| {
                    let r = run_case(spec)?;
                    info!(
                        "h = {:.4e}: e_u = {:.4e}, e_q = ({:.4e}, {:.4e}) in {:.1} s",
                        r.h,
                        r.max_error.u,
                        r.max_error.q1,
                        r.max_error.q2,
                        r.assemble_seconds + r.solve_seconds
                    );
                    Ok(r)
                })
                .collect::<Result<Vec<_>>>()?;
            Outcome::Convergence { cases }
        }
        ExperimentKind::GpcSweep => {
            Outcome::GpcSweep(gpc_sweep(&first(config)?, &config.sweep_orders)?)
        }
        ExperimentKind::Energy => Outcome::Energy(energy_run(&first(config)?)?),
        ExperimentKind::LongTime => {
            Outcome::LongTime(long_time_error(&first(config)?, config.sample_every)?)
        }
        ExperimentKind::Perturbation => Outcome::Perturbation {
            runs: perturbation_study(
                &first(config)?,
                &config.perturbation_eps,
                config.sample_every,
            )?,
        },
    })
}

/// Write the CSV table of an outcome.
pub fn write_csv(outcome: &Outcome, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    match outcome {
        Outcome::Convergence { cases } => {
            w.write_record([
                "h", "e_u", "order_u", "e_qx", "order_qx", "e_qy", "order_qy",
            ])?;
            let h: Vec<f64> = cases.iter().map(|c| c.h).collect();
            let col = |f: fn(&CaseResult) -> f64| {
                observed_orders(&h, &cases.iter().map(f).collect::<Vec<_>>())
            };
            let (ou, o1, o2) = (
                col(|c| c.max_error.u),
                col(|c| c.max_error.q1),
                col(|c| c.max_error.q2),
            );
            for (i, c) in cases.iter().enumerate() {
                let e = c.max_error;
                w.write_record([
                    fmt(c.h),
                    fmt(e.u),
                    fmt_opt(ou[i]),
                    fmt(e.q1),
                    fmt_opt(o1[i]),
                    fmt(e.q2),
                    fmt_opt(o2[i]),
                ])?;
            }
        }
        Outcome::GpcSweep(sweep) => {
            w.write_record(["order", "modes", "e_u", "e_qx", "e_qy"])?;
            for p in &sweep.points {
                w.write_record([
                    p.order.to_string(),
                    p.modes.to_string(),
                    fmt(p.error.u),
                    fmt(p.error.q1),
                    fmt(p.error.q2),
                ])?;
            }
        }
        Outcome::Energy(trace) => {
            w.write_record(["step", "t", "energy", "energy_alt"])?;
            for r in &trace.records {
                w.write_record([
                    r.step.to_string(),
                    fmt(r.t),
                    fmt(r.fully_discrete),
                    fmt(r.alternative),
                ])?;
            }
        }
        Outcome::LongTime(series) => {
            w.write_record(["t", "e_u", "e_qx", "e_qy"])?;
            for s in &series.samples {
                w.write_record([fmt(s.t), fmt(s.u), fmt(s.q1), fmt(s.q2)])?;
            }
        }
        Outcome::Perturbation { runs } => {
            w.write_record(["eps", "t", "distance"])?;
            for run in runs {
                for s in &run.samples {
                    w.write_record([fmt(run.eps), fmt(s.t), fmt(s.distance)])?;
                }
            }
        }
    }
    w.flush().map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Headline numbers of an outcome.
pub fn summarize(outcome: &Outcome) -> Value {
    match outcome {
        Outcome::Convergence { cases } => {
            let h: Vec<f64> = cases.iter().map(|c| c.h).collect();
            let orders = |e: Vec<f64>| observed_orders(&h, &e).last().copied().flatten();
            json!({
                "finest_h": h.last(),
                "finest_error": cases.last().map(|c| c.max_error),
                "final_order_u": orders(cases.iter().map(|c| c.max_error.u).collect()),
                "final_order_qx": orders(cases.iter().map(|c| c.max_error.q1).collect()),
                "final_order_qy": orders(cases.iter().map(|c| c.max_error.q2).collect()),
            })
        }
        Outcome::GpcSweep(sweep) => json!({
            "plateau_order": sweep.plateau.map(|i| sweep.points[i].order),
            "errors_u": sweep.points.iter().map(|p| p.error.u).collect::<Vec<_>>(),
        }),
        Outcome::Energy(trace) => json!({
            "records": trace.records.len(),
            "max_relative_drift": trace.max_relative_drift(),
            "max_form_gap": trace.max_form_gap(),
        }),
        Outcome::LongTime(series) => json!({
            "samples": series.samples.len(),
            "max_scaled_error": series.max_scaled,
            "envelope_exponent": series.envelope_exponent,
        }),
        Outcome::Perturbation { runs } => json!({
            "eps": runs.iter().map(|r| r.eps).collect::<Vec<_>>(),
            "max_scaled_distance": runs.iter().map(|r| r.max_scaled).collect::<Vec<_>>(),
            "distance_over_eps": runs.iter().map(|r| r.max_scaled / r.eps).collect::<Vec<_>>(),
        }),
    }
}

/// Run `config` and write `<dir>/<csv>` and `<dir>/<manifest>`. The CSV is a
/// pure function of the configuration; the manifest additionally records
/// wall-clock timings.
pub fn run(config: &RunConfig, workers: usize) -> Result<RunReport> {
    let dir = &config.output.dir;
    fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.clone(),
        source,
    })?;
    info!("running `{}` ({:?})", config.name, config.experiment);
    let start = Instant::now();
    let outcome = execute(config, workers)?;
    let seconds = start.elapsed().as_secs_f64();
    let csv = config.csv_path();
    write_csv(&outcome, &csv)?;
    let provenance = provenance(config)?;
    let summary = summarize(&outcome);
    let timings = match &outcome {
        Outcome::Convergence { cases } => json!({
            "total_seconds": seconds,
            "cases": cases.iter().map(|c| json!({
                "h": c.h,
                "assemble_seconds": c.assemble_seconds,
                "solve_seconds": c.solve_seconds,
            })).collect::<Vec<_>>(),
        }),
        _ => json!({ "total_seconds": seconds }),
    };
    let manifest = json!({
        "provenance": provenance,
        "config": config,
        "defaults_filled": config.defaults_filled,
        "outputs": { "csv": config.output.csv },
        "summary": summary,
        "timings": timings,
    });
    let manifest_path = config.manifest_path();
    let text = serde_json::to_string_pretty(&manifest)?;
    fs::write(&manifest_path, text).map_err(|source| Error::Io {
        path: manifest_path.clone(),
        source,
    })?;
    info!("wrote {} and {}", csv.display(), manifest_path.display());
    Ok(RunReport {
        outcome,
        csv,
        manifest: manifest_path,
        provenance,
        summary,
    })
}
