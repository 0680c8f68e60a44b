//! Error norms, convergence orders and energy bookkeeping.

use rayon::prelude::*;
use serde::Serialize;

use crate::coeff::CoefficientModel;
use crate::dg::{DgScalarField, DgVectorField, LocalBasis};
use crate::error::{Error, Result};
use crate::gpc::GpcBasis;
use crate::leapfrog::EnergyRecord;
use crate::mesh::Mesh2D;
use crate::presets::ExactSolution;
use crate::quadrature::GaussRule;

/// How a space-time-random `L^2` error is normalised.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormScaling {
    /// `sqrt( int_D E[e^2] dx )`.
    Absolute,
    /// The absolute norm divided by `sqrt(|D|)`.
    #[default]
    DomainAverage,
}

/// Errors of `u`, `q1 = a u_x1` and `q2 = a u_x2` at one time.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct ErrorReport {
    pub t: f64,
    pub u: f64,
    pub q1: f64,
    pub q2: f64,
}

impl ErrorReport {
    /// Component-wise maximum.
    pub fn max(self, other: Self) -> Self {
        Self {
            t: if other.u > self.u { other.t } else { self.t },
            u: self.u.max(other.u),
            q1: self.q1.max(other.q1),
            q2: self.q2.max(other.q2),
        }
    }
}

/// `E[(u - u_h)^2]` evaluator for a separable exact solution.
///
/// At every error-quadrature point the gPC coefficients `F_m` of the exact
/// spatial factor and its truncation remainder `R = E[(f - sum F_m Phi_m)^2]`
/// are tabulated once, so that by orthonormality
/// `E[(tau f - u_h)^2] = sum_m (tau F_m - u_m)^2 + tau^2 R`.
#[derive(Debug, Clone)]
pub struct ErrorEvaluator {
    modes: usize,
    n_local: usize,
    points: usize,
    /// `psi_j` at each error point, `[q * n_local + j]`.
    psi: Vec<f64>,
    /// Physical quadrature weight of each error point.
    weights: Vec<f64>,
    /// Per `(cell, point)`: `3 (M + 1)` values `F_u, R_u, F_q1, R_q1, F_q2, R_q2`.
    exact: Vec<f64>,
    omega_tau: ExactSolution,
    scale: f64,
}

impl ErrorEvaluator {
    /// Tabulate the exact solution with `points_per_dim` Gauss points per
    /// cell direction (the default in [`ErrorEvaluator::with_default_rule`] is `k + 3`).
    pub fn new(
        mesh: &Mesh2D,
        basis: &LocalBasis,
        gpc: &GpcBasis,
        model: &dyn CoefficientModel,
        exact: &ExactSolution,
        points_per_dim: usize,
        scaling: NormScaling,
    ) -> Result<Self> {
        let rule = GaussRule::legendre(points_per_dim)?;
        let n = rule.len();
        let points = n * n;
        let nl = basis.len();
        let m = gpc.len();
        let [hx, hy] = mesh.h();
        let scale_psi = 2.0 / (hx * hy).sqrt();
        let mut psi = Vec::with_capacity(points * nl);
        let mut weights = Vec::with_capacity(points);
        let mut refs = Vec::with_capacity(points);
        for qy in 0..n {
            for qx in 0..n {
                let xi = [rule.nodes[qx], rule.nodes[qy]];
                psi.extend(
                    basis
                        .reference_values(xi)
                        .into_iter()
                        .map(|v| v * scale_psi),
                );
                weights.push(0.25 * hx * hy * rule.weights[qx] * rule.weights[qy]);
                refs.push(xi);
            }
        }
        let ry = gpc.rule();
        let stride = 3 * (m + 1);
        let mut table = vec![0.0; mesh.n_cells() * points * stride];
        table
            .par_chunks_mut(points * stride)
            .enumerate()
            .for_each(|(cell, chunk)| {
                let region = model.region_of(mesh.cell_center(cell));
                let mut f = vec![[0.0; 3]; ry.len()];
                for (q, xi) in refs.iter().enumerate() {
                    let x = mesh.to_physical(cell, *xi);
                    for (node, (y, _)) in ry.iter().enumerate() {
                        let g = exact.q(region, x, y);
                        f[node] = [exact.f(region, x, y), g[0], g[1]];
                    }
                    let out = &mut chunk[q * stride..(q + 1) * stride];
                    for c in 0..3 {
                        let block = &mut out[c * (m + 1)..(c + 1) * (m + 1)];
                        for (node, w) in ry.weights().iter().enumerate() {
                            let phi = gpc.phi_at_node(node);
                            for mode in 0..m {
                                block[mode] += w * f[node][c] * phi[mode];
                            }
                        }
                        let mut rem = 0.0;
                        for (node, w) in ry.weights().iter().enumerate() {
                            let phi = gpc.phi_at_node(node);
                            let proj: f64 = (0..m).map(|mode| block[mode] * phi[mode]).sum();
                            rem += w * (f[node][c] - proj).powi(2);
                        }
                        block[m] = rem;
                    }
                }
            });
        let scale = match scaling {
            NormScaling::Absolute => 1.0,
            NormScaling::DomainAverage => 1.0 / mesh.domain().area().sqrt(),
        };
        Ok(Self {
            modes: m,
            n_local: nl,
            points,
            psi,
            weights,
            exact: table,
            omega_tau: exact.clone(),
            scale,
        })
    }

    /// Evaluator with `k + 3` points per cell direction.
    pub fn with_default_rule(
        mesh: &Mesh2D,
        basis: &LocalBasis,
        gpc: &GpcBasis,
        model: &dyn CoefficientModel,
        exact: &ExactSolution,
        scaling: NormScaling,
    ) -> Result<Self> {
        Self::new(mesh, basis, gpc, model, exact, basis.degree() + 3, scaling)
    }

    /// Errors of `(v, S)` against the exact solution at time `t`.
    pub fn evaluate(&self, v: &DgScalarField, s: &DgVectorField, t: f64) -> Result<ErrorReport> {
        let shape = v.shape();
        if shape.1 != self.modes
            || shape.2 != self.n_local
            || self.exact.len() != shape.0 * self.points * 3 * (self.modes + 1)
        {
            return Err(Error::ShapeMismatch(
                "field does not match the error evaluator".into(),
            ));
        }
        let tau = self.omega_tau.tau(t);
        let m = self.modes;
        let nl = self.n_local;
        let stride = 3 * (m + 1);
        let fields = [v, &s.components[0], &s.components[1]];
        let sums = (0..shape.0)
            .into_par_iter()
            .map(|cell| {
                let mut acc = [0.0; 3];
                let mut vals = vec![0.0; m];
                for q in 0..self.points {
                    let psi = &self.psi[q * nl..(q + 1) * nl];
                    let ex = &self.exact[(cell * self.points + q) * stride..][..stride];
                    for (c, field) in fields.iter().enumerate() {
                        field.modal_values_at(cell, psi, &mut vals);
                        let block = &ex[c * (m + 1)..(c + 1) * (m + 1)];
                        let mut e2 = tau * tau * block[m];
                        for mode in 0..m {
                            e2 += (tau * block[mode] - vals[mode]).powi(2);
                        }
                        acc[c] += self.weights[q] * e2;
                    }
                }
                acc
            })
            .collect::<Vec<_>>();
        // fixed-order reduction for run-to-run reproducibility
        let mut total = [0.0; 3];
        for a in sums {
            for c in 0..3 {
                total[c] += a[c];
            }
        }
        let [u, q1, q2] = total.map(|e| self.scale * e.sqrt());
        if !(u.is_finite() && q1.is_finite() && q2.is_finite()) {
            return Err(Error::NonFinite("error norm"));
        }
        Ok(ErrorReport { t, u, q1, q2 })
    }
}

/// `log(e_coarse / e_fine) / log(h_coarse / h_fine)`.
pub fn convergence_order(e_coarse: f64, e_fine: f64, h_coarse: f64, h_fine: f64) -> f64 {
    (e_coarse / e_fine).ln() / (h_coarse / h_fine).ln()
}

/// Observed orders between consecutive entries; the first entry has none.
pub fn observed_orders(h: &[f64], e: &[f64]) -> Vec<Option<f64>> {
    (0..e.len())
        .map(|i| (i > 0).then(|| convergence_order(e[i - 1], e[i], h[i - 1], h[i])))
        .collect()
}

/// Energies recorded along a run.
#[derive(Debug, Clone, Default, Serialize)]
pub struct EnergyTrace {
    pub records: Vec<EnergyRecord>,
}

impl EnergyTrace {
    pub fn push(&mut self, record: EnergyRecord) {
        self.records.push(record);
    }

    /// `max_n |E^n - E^0| / |E^0|` of the fully discrete energy.
    pub fn max_relative_drift(&self) -> f64 {
        let Some(first) = self.records.first() else {
            return 0.0;
        };
        let e0 = first.fully_discrete;
        self.records
            .iter()
            .map(|r| (r.fully_discrete - e0).abs() / e0.abs().max(f64::MIN_POSITIVE))
            .fold(0.0, f64::max)
    }

    /// Largest gap between the two discrete energy expressions.
    pub fn max_form_gap(&self) -> f64 {
        self.records
            .iter()
            .map(|r| {
                (r.fully_discrete - r.alternative).abs()
                    / r.fully_discrete.abs().max(f64::MIN_POSITIVE)
            })
            .fold(0.0, f64::max)
    }
}

/// First index from which the errors stop decreasing by more than the
/// relative tolerance `rel_tol`, i.e. where the spatial/temporal error
/// dominates the gPC truncation error.
pub fn plateau_start(errors: &[f64], rel_tol: f64) -> Option<usize> {
    (1..errors.len())
        .find(|&i| {
            let prev = errors[i - 1];
            (prev - errors[i]) <= rel_tol * prev.abs()
        })
        .map(|i| i - 1)
}

/// Least-squares slope of `log(e)` against `t`: a positive slope means
/// exponential growth.
pub fn log_growth_rate(t: &[f64], e: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = t
        .iter()
        .zip(e)
        .filter(|(_, e)| **e > 0.0)
        .map(|(t, e)| (*t, e.ln()))
        .collect();
    let n = pts.len() as f64;
    if n < 2.0 {
        return 0.0;
    }
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let me = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let cov: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - me)).sum();
    let var: f64 = pts.iter().map(|p| (p.0 - mt).powi(2)).sum();
    if var == 0.0 {
        0.0
    } else {
        cov / var
    }
}
