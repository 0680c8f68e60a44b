//! Parameter studies built on [`run_case`]: gPC-order sweeps, coefficient
//! perturbations, long-time error growth and energy conservation.

use rayon::prelude::*;
use serde::Serialize;

use crate::diagnostics::{log_growth_rate, plateau_start, EnergyTrace, ErrorReport};
use crate::error::{Error, Result};
use crate::gpc::MultiIndexSet;
use crate::leapfrog::{discrete_energy, SolverState};
use crate::simulation::{run_case, BoundaryKind, CaseSpec, Discretization};

/// One row of a gPC sweep.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SweepPoint {
    pub order: usize,
    pub modes: usize,
    pub error: ErrorReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct GpcSweep {
    pub points: Vec<SweepPoint>,
    /// Index into `points` where the error stops decreasing.
    pub plateau: Option<usize>,
}

/// Relative decrease below which consecutive sweep errors count as flat.
pub const PLATEAU_TOLERANCE: f64 = 0.5;

/// `e_u` for each gPC order at fixed spatial and temporal resolution.
pub fn gpc_sweep(base: &CaseSpec, orders: &[usize]) -> Result<GpcSweep> {
    let points = orders
        .par_iter()
        .map(|&order| {
            let spec = CaseSpec {
                gpc_order: order,
                ..base.clone()
            };
            let result = run_case(&spec)?;
            let dims = spec.random_dims.unwrap_or(2).max(1);
            Ok(SweepPoint {
                order,
                modes: MultiIndexSet::new(dims, order)?.len(),
                error: result.max_error,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let errors: Vec<f64> = points.iter().map(|p| p.error.u).collect();
    Ok(GpcSweep {
        plateau: plateau_start(&errors, PLATEAU_TOLERANCE),
        points,
    })
}

/// Difference of the perturbed and unperturbed runs at one level.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PerturbationSample {
    pub t: f64,
    /// `sqrt(E |(u - u~)_t|^2) + sqrt(E |q - q~|^2)`.
    pub distance: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PerturbationRun {
    pub eps: f64,
    pub samples: Vec<PerturbationSample>,
    /// `max_t D(t) / (t + 1)`.
    pub max_scaled: f64,
}

/// Solve with `a^2` and with `a^2 + eps` from the same discrete initial data
/// and record `D(t)` every `sample_every` steps.
pub fn perturbation_study(
    base: &CaseSpec,
    eps: &[f64],
    sample_every: usize,
) -> Result<Vec<PerturbationRun>> {
    let reference = Discretization::build(&CaseSpec {
        perturbation: None,
        ..base.clone()
    })?;
    let (v0, w0) = reference.initial_data()?;
    let steps = base.steps();
    let every = sample_every.max(1);
    let area = reference.op.mesh().domain().area();
    let norm = |x: f64| (x / area).sqrt();
    eps.par_iter()
        .map(|&e| {
            let perturbed = Discretization::build(&CaseSpec {
                perturbation: Some(e),
                ..base.clone()
            })?;
            let mut a = reference.solver.initialize(v0.clone(), &w0, 0.0, base.dt)?;
            let mut b = perturbed.solver.initialize(v0.clone(), &w0, 0.0, base.dt)?;
            // velocity over the last step, S at the current level (level 0 at the start)
            let distance = |a: &SolverState, b: &SolverState, at_start: bool| {
                let mut dv = a.v_curr.clone();
                dv.axpy(-1.0, &a.v_prev);
                dv.axpy(-1.0, &b.v_curr);
                dv.axpy(1.0, &b.v_prev);
                let (sa, sb) = if at_start {
                    (&a.s_prev, &b.s_prev)
                } else {
                    (&a.s_curr, &b.s_curr)
                };
                let mut ds = sa.clone();
                ds.axpy(-1.0, sb);
                norm(dv.norm_sq()) / a.dt.abs() + norm(ds.norm_sq())
            };
            let mut samples = vec![PerturbationSample {
                t: 0.0,
                distance: distance(&a, &b, true),
            }];
            for n in 2..=steps {
                reference.solver.step(&mut a)?;
                perturbed.solver.step(&mut b)?;
                if n % every == 0 || n == steps {
                    samples.push(PerturbationSample {
                        t: a.t,
                        distance: distance(&a, &b, false),
                    });
                }
            }
            let max_scaled = samples
                .iter()
                .map(|s| s.distance / (s.t + 1.0))
                .fold(0.0, f64::max);
            Ok(PerturbationRun {
                eps: e,
                samples,
                max_scaled,
            })
        })
        .collect()
}

/// Error time series of a long run.
#[derive(Debug, Clone, Serialize)]
pub struct LongTimeSeries {
    pub samples: Vec<ErrorReport>,
    /// `sup_t e_u(t) / (t + 1)`.
    pub max_scaled: f64,
    /// Slope of `log max_{s <= t} e_u(s)` against `log(t + 1)`.
    pub envelope_exponent: f64,
}

/// Record `e_u(t)` every `sample_every` steps up to `final_time`.
pub fn long_time_error(base: &CaseSpec, sample_every: usize) -> Result<LongTimeSeries> {
    let spec = CaseSpec {
        error_every: sample_every.max(1),
        ..base.clone()
    };
    let result = run_case(&spec)?;
    Ok(summarize_long_time(result.history))
}

pub fn summarize_long_time(samples: Vec<ErrorReport>) -> LongTimeSeries {
    let max_scaled = samples
        .iter()
        .map(|s| s.u / (s.t + 1.0))
        .fold(0.0, f64::max);
    let mut running = 0.0f64;
    let mut log_t = Vec::new();
    let mut envelope = Vec::new();
    for s in &samples {
        running = running.max(s.u);
        log_t.push((s.t + 1.0).ln());
        envelope.push(running);
    }
    LongTimeSeries {
        envelope_exponent: log_growth_rate(&log_t, &envelope),
        max_scaled,
        samples,
    }
}

/// Energy trace of a run with homogeneous Dirichlet data.
pub fn energy_run(base: &CaseSpec) -> Result<EnergyTrace> {
    if base.boundary != BoundaryKind::Homogeneous {
        return Err(Error::InvalidArgument(
            "the discrete energy is only conserved with homogeneous boundary data".into(),
        ));
    }
    let disc = Discretization::build(base)?;
    let mut state = disc.initial_state(base.dt)?;
    let mut trace = EnergyTrace::default();
    trace.push(discrete_energy(&state));
    let steps = base.steps();
    disc.solver
        .advance(&mut state, steps.saturating_sub(1), |s| {
            trace.push(discrete_energy(s));
            Ok(())
        })?;
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_perturbation_gives_zero_distance() {
        let mut spec = CaseSpec::new("test1", 0.01, 1, 1, 2, 1e-2, 0.1);
        spec.boundary = BoundaryKind::Homogeneous;
        let runs = perturbation_study(&spec, &[0.0], 1).unwrap();
        assert!(runs[0].samples.iter().all(|s| s.distance == 0.0));
    }

    #[test]
    fn energy_requires_homogeneous_data() {
        let spec = CaseSpec::new("test1", 0.0, 1, 0, 2, 1e-2, 0.1);
        assert!(energy_run(&spec).is_err());
    }

    #[test]
    fn deterministic_sweep_is_flat_without_noise() {
        let spec = CaseSpec::new("test1", 0.0, 1, 0, 2, 1e-3, 1e-2);
        let sweep = gpc_sweep(&spec, &[0, 1, 2]).unwrap();
        let e0 = sweep.points[0].error.u;
        for p in &sweep.points {
            assert!((p.error.u - e0).abs() <= 1e-12 * e0);
        }
    }
}
