//! Explicit leap-frog time stepping for the semi-discrete system
//! `v'' = div(A S(v))`.

use std::sync::Arc;

use crate::dg::{DgScalarField, DgVectorField};
use crate::error::{Error, Result};
use crate::ldg::{BoundaryData, LdgOperator};

/// Coefficient magnitude treated as a blow-up.
pub const BLOWUP_THRESHOLD: f64 = 1e12;

/// Two consecutive time levels and their auxiliary fields.
#[derive(Debug, Clone)]
pub struct SolverState {
    pub v_prev: DgScalarField,
    pub v_curr: DgScalarField,
    pub s_prev: DgVectorField,
    pub s_curr: DgVectorField,
    /// Index of the current level.
    pub step: usize,
    /// Time of the current level.
    pub t: f64,
    pub dt: f64,
}

impl SolverState {
    /// The same pair of levels traversed backwards in time.
    pub fn reversed(&self) -> Self {
        Self {
            v_prev: self.v_curr.clone(),
            v_curr: self.v_prev.clone(),
            s_prev: self.s_curr.clone(),
            s_curr: self.s_prev.clone(),
            step: self.step,
            t: self.t - self.dt,
            dt: -self.dt,
        }
    }
}

/// Discrete energies of the level pair `(n, n+1)` held in a state.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct EnergyRecord {
    pub step: usize,
    pub t: f64,
    /// `|dv/dt|^2 + |(S1 + S0)/2|^2 - dt^2/4 |dS/dt|^2`.
    pub fully_discrete: f64,
    /// `|dv/dt|^2 + (S0, S1)`.
    pub alternative: f64,
}

/// Energies of the pair `(prev, curr)` of `state`.
pub fn discrete_energy(state: &SolverState) -> EnergyRecord {
    let dt = state.dt;
    let mut dv = state.v_curr.clone();
    dv.axpy(-1.0, &state.v_prev);
    let kinetic = dv.norm_sq() / (dt * dt);
    let mut mean = state.s_curr.clone();
    mean.axpy(1.0, &state.s_prev);
    let mut ds = state.s_curr.clone();
    ds.axpy(-1.0, &state.s_prev);
    let fully = kinetic + 0.25 * mean.norm_sq() - 0.25 * ds.norm_sq();
    let alternative = kinetic + state.s_prev.dot(&state.s_curr);
    EnergyRecord {
        step: state.step,
        t: state.t,
        fully_discrete: fully,
        alternative,
    }
}

/// Semi-discrete energy at the middle of three levels:
/// `|(v+ - v-)/(2 dt)|^2 + |S|^2`.
pub fn semi_discrete_energy(
    v_next: &DgScalarField,
    v_prev: &DgScalarField,
    s: &DgVectorField,
    dt: f64,
) -> f64 {
    let mut dv = v_next.clone();
    dv.axpy(-1.0, v_prev);
    dv.norm_sq() / (4.0 * dt * dt) + s.norm_sq()
}

/// Time step `c h_min / ((2k + 1) lambda_max(A))`.
pub fn suggest_dt(op: &LdgOperator, safety: f64) -> f64 {
    let [hx, hy] = op.mesh().h();
    let k = op.basis().degree() as f64;
    safety * hx.min(hy) / ((2.0 * k + 1.0) * op.coefficients().max_eigenvalue())
}

/// Default safety factor for [`suggest_dt`].
pub const DEFAULT_CFL: f64 = 0.1;

/// A leap-frog integrator bound to an operator and boundary data.
#[derive(Debug, Clone)]
pub struct WaveSolver {
    op: Arc<LdgOperator>,
    boundary: BoundaryData,
}

impl WaveSolver {
    pub fn new(op: Arc<LdgOperator>, boundary: BoundaryData) -> Self {
        Self { op, boundary }
    }

    pub fn operator(&self) -> &LdgOperator {
        &self.op
    }

    pub fn boundary(&self) -> &BoundaryData {
        &self.boundary
    }

    pub fn compute_s(&self, v: &DgScalarField, t: f64) -> Result<DgVectorField> {
        let g = self.op.boundary_values(&self.boundary, t);
        self.op.compute_s(v, g.as_deref())
    }

    /// Levels 0 and 1 from the projected initial displacement `v0` and
    /// velocity `w0`: `v1 = v0 + dt w0 + dt^2/2 div(A S(v0))`.
    pub fn initialize(
        &self,
        v0: DgScalarField,
        w0: &DgScalarField,
        t0: f64,
        dt: f64,
    ) -> Result<SolverState> {
        if !(dt.is_finite() && dt != 0.0) {
            return Err(Error::InvalidArgument(format!(
                "time step {dt} must be finite and non-zero"
            )));
        }
        let s0 = self.compute_s(&v0, t0)?;
        let acc = self.op.compute_acceleration(&s0)?;
        let mut v1 = v0.clone();
        v1.axpy(dt, w0);
        v1.axpy(0.5 * dt * dt, &acc);
        let s1 = self.compute_s(&v1, t0 + dt)?;
        let state = SolverState {
            v_prev: v0,
            v_curr: v1,
            s_prev: s0,
            s_curr: s1,
            step: 1,
            t: t0 + dt,
            dt,
        };
        self.check(&state)?;
        Ok(state)
    }

    /// `v^{n+1} = 2 v^n - v^{n-1} + dt^2 div(A S^n)`.
    pub fn step(&self, state: &mut SolverState) -> Result<()> {
        let dt = state.dt;
        let acc = self.op.compute_acceleration(&state.s_curr)?;
        let mut next = std::mem::replace(&mut state.v_prev, DgScalarField::zeros(0, 0, 0));
        next.scale(-1.0);
        next.axpy(2.0, &state.v_curr);
        next.axpy(dt * dt, &acc);
        let s_next = self.compute_s(&next, state.t + dt)?;
        state.v_prev = std::mem::replace(&mut state.v_curr, next);
        state.s_prev = std::mem::replace(&mut state.s_curr, s_next);
        state.step += 1;
        state.t += dt;
        self.check(state)
    }

    fn check(&self, state: &SolverState) -> Result<()> {
        let unstable = |reason: String| Error::Unstable {
            step: state.step,
            reason,
            dt: state.dt.abs(),
            suggested: suggest_dt(&self.op, DEFAULT_CFL),
        };
        let peak = state.v_curr.max_abs().max(state.s_curr.max_abs());
        if !peak.is_finite() || !state.v_curr.is_finite() {
            return Err(unstable("non-finite coefficients".into()));
        }
        if peak > BLOWUP_THRESHOLD {
            return Err(unstable(format!("coefficient magnitude {peak:e}")));
        }
        if self.boundary.is_homogeneous() {
            let e = discrete_energy(state).fully_discrete;
            if e < 0.0 {
                return Err(unstable(format!("negative discrete energy {e:e}")));
            }
        }
        Ok(())
    }

    /// Advance `steps` times, calling `observe` after every step.
    pub fn advance(
        &self,
        state: &mut SolverState,
        steps: usize,
        mut observe: impl FnMut(&SolverState) -> Result<()>,
    ) -> Result<()> {
        for _ in 0..steps {
            self.step(state)?;
            observe(state)?;
        }
        Ok(())
    }
}
