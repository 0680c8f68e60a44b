//! End-to-end runs of a benchmark: discretise, project, step, measure.

use std::sync::Arc;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::coeff::{CoefficientModel, GalerkinCoeffField, ShiftedSquare};
use crate::dg::{DgScalarField, LocalBasis};
use crate::diagnostics::{EnergyTrace, ErrorEvaluator, ErrorReport, NormScaling};
use crate::error::{Error, Result};
use crate::gpc::GpcBasis;
use crate::ldg::{BoundaryData, FluxConvention, LdgOperator};
use crate::leapfrog::{discrete_energy, SolverState, WaveSolver};
use crate::mesh::Mesh2D;
use crate::presets::{build_preset, Preset};
use crate::projection::{project_initial_plain, project_initial_vplus};

/// Dirichlet data used by a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryKind {
    /// Traces of the exact solution.
    #[default]
    Exact,
    /// `u = 0`, for which the discrete energy is conserved.
    Homogeneous,
}

/// Everything needed to run one discretisation of a benchmark.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseSpec {
    pub problem: String,
    pub delta: f64,
    pub degree: usize,
    pub gpc_order: usize,
    /// Number of random variables `N`; `None` uses the coefficient's own count.
    pub random_dims: Option<usize>,
    /// Gauss nodes per random dimension; `None` uses `P + 5`.
    pub y_nodes: Option<usize>,
    /// Gauss points per cell direction; `None` uses `k + 2`.
    pub cell_quadrature: Option<usize>,
    /// Cells per direction.
    pub cells: usize,
    pub dt: f64,
    pub final_time: f64,
    pub flux: FluxConvention,
    pub boundary: BoundaryKind,
    /// Shift `a^2 -> a^2 + eps` of the coefficient.
    pub perturbation: Option<f64>,
    pub scaling: NormScaling,
    /// Measure the error every this many steps (always at the first and last).
    pub error_every: usize,
    pub record_energy: bool,
}

impl CaseSpec {
    pub fn new(
        problem: &str,
        delta: f64,
        degree: usize,
        gpc_order: usize,
        cells: usize,
        dt: f64,
        final_time: f64,
    ) -> Self {
        Self {
            problem: problem.to_string(),
            delta,
            degree,
            gpc_order,
            random_dims: None,
            y_nodes: None,
            cell_quadrature: None,
            cells,
            dt,
            final_time,
            flux: FluxConvention::default(),
            boundary: BoundaryKind::Exact,
            perturbation: None,
            scaling: NormScaling::DomainAverage,
            error_every: 1,
            record_energy: false,
        }
    }

    /// Number of steps, rounding `T / dt` to the nearest integer.
    pub fn steps(&self) -> usize {
        (self.final_time / self.dt).round() as usize
    }
}

/// A fully assembled discretisation of a benchmark.
#[derive(Debug, Clone)]
pub struct Discretization {
    pub preset: Preset,
    pub model: Arc<dyn CoefficientModel>,
    pub gpc: GpcBasis,
    pub op: Arc<LdgOperator>,
    pub solver: WaveSolver,
}

impl Discretization {
    pub fn build(spec: &CaseSpec) -> Result<Self> {
        if spec.cells == 0 {
            return Err(Error::InvalidArgument(
                "mesh needs at least one cell per direction".into(),
            ));
        }
        let preset = build_preset(&spec.problem, spec.delta)?;
        let model: Arc<dyn CoefficientModel> = match spec.perturbation {
            Some(eps) => Arc::new(ShiftedSquare::new(preset.model.clone(), eps)?),
            None => preset.model.clone(),
        };
        let dims = spec.random_dims.unwrap_or(model.random_dims()).max(1);
        let gpc = GpcBasis::with_nodes(
            dims,
            spec.gpc_order,
            spec.y_nodes.unwrap_or(spec.gpc_order + 5),
        )?;
        let mesh = Mesh2D::new(preset.domain, spec.cells, spec.cells, &model.interfaces())?;
        let basis = LocalBasis::with_quadrature(
            spec.degree,
            spec.cell_quadrature.unwrap_or(spec.degree + 2),
        )?;
        let coeffs = GalerkinCoeffField::assemble(model.as_ref(), &gpc, &mesh, basis.rule())?;
        let op = Arc::new(LdgOperator::new(mesh, basis, Arc::new(coeffs), spec.flux)?);
        let boundary = match spec.boundary {
            BoundaryKind::Homogeneous => BoundaryData::Homogeneous,
            BoundaryKind::Exact => {
                let exact = preset.exact.clone();
                let f = preset
                    .exact
                    .modal_fn(&gpc, preset.model.as_ref(), op.mesh());
                BoundaryData::separable(&op, move |t| exact.tau(t), f)
            }
        };
        let solver = WaveSolver::new(op.clone(), boundary);
        Ok(Self {
            preset,
            model,
            gpc,
            op,
            solver,
        })
    }

    /// Projected initial displacement and velocity.
    pub fn initial_data(&self) -> Result<(DgScalarField, DgScalarField)> {
        let exact = &self.preset.exact;
        let f = exact.modal_fn(&self.gpc, self.preset.model.as_ref(), self.op.mesh());
        let tau0 = exact.tau(0.0);
        let dtau0 = exact.tau_dot(0.0);
        let v0 = project_initial_vplus(&self.op, |c, x, out: &mut [f64]| {
            f(c, x, out);
            out.iter_mut().for_each(|v| *v *= tau0);
        })?;
        let w0 = if dtau0 == 0.0 {
            self.op.zero_scalar()
        } else {
            project_initial_plain(&self.op, |c, x, out: &mut [f64]| {
                f(c, x, out);
                out.iter_mut().for_each(|v| *v *= dtau0);
            })?
        };
        Ok((v0, w0))
    }

    pub fn initial_state(&self, dt: f64) -> Result<SolverState> {
        let (v0, w0) = self.initial_data()?;
        self.solver.initialize(v0, &w0, 0.0, dt)
    }

    pub fn error_evaluator(&self, scaling: NormScaling) -> Result<ErrorEvaluator> {
        ErrorEvaluator::with_default_rule(
            self.op.mesh(),
            self.op.basis(),
            &self.gpc,
            self.preset.model.as_ref(),
            &self.preset.exact,
            scaling,
        )
    }

    pub fn h(&self) -> f64 {
        let [hx, hy] = self.op.mesh().h();
        hx.max(hy)
    }
}

/// Outcome of [`run_case`].
#[derive(Debug, Clone, Serialize)]
pub struct CaseResult {
    pub h: f64,
    pub steps: usize,
    /// Component-wise maximum over all measured levels, including `t = 0`.
    pub max_error: ErrorReport,
    pub history: Vec<ErrorReport>,
    pub energy: EnergyTrace,
    pub assemble_seconds: f64,
    pub solve_seconds: f64,
}

/// Run a case from the projected initial data to `final_time`.
pub fn run_case(spec: &CaseSpec) -> Result<CaseResult> {
    let start = Instant::now();
    let disc = Discretization::build(spec)?;
    let eval = disc.error_evaluator(spec.scaling)?;
    let assemble_seconds = start.elapsed().as_secs_f64();
    let start = Instant::now();
    let steps = spec.steps();
    if steps == 0 {
        return Err(Error::InvalidArgument(
            "final time is shorter than one step".into(),
        ));
    }
    let mut state = disc.initial_state(spec.dt)?;
    let mut history = vec![eval.evaluate(&state.v_prev, &state.s_prev, 0.0)?];
    let every = spec.error_every.max(1);
    if every == 1 || steps == 1 {
        history.push(eval.evaluate(&state.v_curr, &state.s_curr, state.t)?);
    }
    let mut energy = EnergyTrace::default();
    if spec.record_energy {
        energy.push(discrete_energy(&state));
    }
    disc.solver.advance(&mut state, steps - 1, |s| {
        if s.step % every == 0 || s.step == steps {
            history.push(eval.evaluate(&s.v_curr, &s.s_curr, s.t)?);
        }
        if spec.record_energy {
            energy.push(discrete_energy(s));
        }
        Ok(())
    })?;
    let max_error = history.iter().copied().fold(history[0], ErrorReport::max);
    Ok(CaseResult {
        h: disc.h(),
        steps,
        max_error,
        history,
        energy,
        assemble_seconds,
        solve_seconds: start.elapsed().as_secs_f64(),
    })
}
