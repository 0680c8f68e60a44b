//! Benchmark problems with closed-form solutions.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::coeff::{CoefficientModel, LayeredRandomSpeed, SmoothRandomSpeed};
use crate::error::{Error, Result};
use crate::gpc::GpcBasis;
use crate::mesh::{Mesh2D, Rect};

type SpatialFn = dyn Fn(usize, [f64; 2], &[f64]) -> f64 + Send + Sync;
type FluxFn = dyn Fn(usize, [f64; 2], &[f64]) -> [f64; 2] + Send + Sync;

/// A separable exact solution `u(x, t, y) = cos(omega t) f(x, y)`, given per
/// coefficient region together with `q = a grad f`.
#[derive(Clone)]
pub struct ExactSolution {
    pub omega: f64,
    spatial: Arc<SpatialFn>,
    flux: Arc<FluxFn>,
}

impl std::fmt::Debug for ExactSolution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ExactSolution")
            .field("omega", &self.omega)
            .finish_non_exhaustive()
    }
}

impl ExactSolution {
    pub fn new(
        omega: f64,
        spatial: impl Fn(usize, [f64; 2], &[f64]) -> f64 + Send + Sync + 'static,
        flux: impl Fn(usize, [f64; 2], &[f64]) -> [f64; 2] + Send + Sync + 'static,
    ) -> Self {
        Self {
            omega,
            spatial: Arc::new(spatial),
            flux: Arc::new(flux),
        }
    }

    pub fn tau(&self, t: f64) -> f64 {
        (self.omega * t).cos()
    }

    pub fn tau_dot(&self, t: f64) -> f64 {
        -self.omega * (self.omega * t).sin()
    }

    /// `f(x, y)` in `region`.
    pub fn f(&self, region: usize, x: [f64; 2], y: &[f64]) -> f64 {
        (self.spatial)(region, x, y)
    }

    /// `a grad f` in `region`.
    pub fn q(&self, region: usize, x: [f64; 2], y: &[f64]) -> [f64; 2] {
        (self.flux)(region, x, y)
    }

    /// `u(x, t, y)`.
    pub fn u(&self, region: usize, x: [f64; 2], t: f64, y: &[f64]) -> f64 {
        self.tau(t) * self.f(region, x, y)
    }

    /// gPC coefficients `E[f Phi_m]` at `x`.
    pub fn modal_f(&self, basis: &GpcBasis, region: usize, x: [f64; 2], out: &mut [f64]) {
        out.copy_from_slice(&basis.project(|y| self.f(region, x, y)));
    }

    /// Modal function of `f` for a mesh aligned with the coefficient
    /// regions: each cell reads the region of its centre.
    pub fn modal_fn<'a>(
        &'a self,
        basis: &'a GpcBasis,
        model: &'a dyn CoefficientModel,
        mesh: &'a Mesh2D,
    ) -> impl Fn(usize, [f64; 2], &mut [f64]) + Sync + 'a {
        move |cell, x, out| {
            let region = model.region_of(mesh.cell_center(cell));
            self.modal_f(basis, region, x, out)
        }
    }
}

/// A named benchmark: domain, coefficient and optional exact solution.
#[derive(Debug, Clone)]
pub struct Preset {
    pub name: String,
    pub domain: Rect,
    pub model: Arc<dyn CoefficientModel>,
    pub exact: ExactSolution,
}

/// `test1`: smooth coefficient on `[0, 2]^2`, `u = cos(sqrt(2) pi t)
/// sin(pi (1 + d y1) x1) sin(pi (1 + d y2) x2)`.
pub fn smooth_test(delta: f64) -> Preset {
    let model = SmoothRandomSpeed { delta };
    let exact = ExactSolution::new(
        2f64.sqrt() * PI,
        move |_, x, y| {
            let k1 = PI * (1.0 + delta * y[0]);
            let k2 = PI * (1.0 + delta * y[1]);
            (k1 * x[0]).sin() * (k2 * x[1]).sin()
        },
        move |_, x, y| {
            let k1 = PI * (1.0 + delta * y[0]);
            let k2 = PI * (1.0 + delta * y[1]);
            let a = model.a(0, x, y);
            [
                a * k1 * (k1 * x[0]).cos() * (k2 * x[1]).sin(),
                a * k2 * (k1 * x[0]).sin() * (k2 * x[1]).cos(),
            ]
        },
    );
    Preset {
        name: "test1".into(),
        domain: Rect::square(0.0, 2.0),
        model: Arc::new(model),
        exact,
    }
}

/// `test2`: coefficient jumping across `x1 = 0` on `[-1, 1]^2`, with
/// `x1`-wavenumber `3 pi` on the left and `5 pi` on the right.
pub fn layered_test(delta: f64) -> Preset {
    let model = LayeredRandomSpeed { delta };
    let wavenumbers = move |region: usize, y: &[f64]| {
        let n1 = if region == 0 { 3.0 } else { 5.0 };
        (
            n1 * PI * (1.0 + delta * y[0]),
            3.0 * PI * (1.0 + delta * y[1]),
        )
    };
    let exact = ExactSolution::new(
        3.0 * PI,
        move |region, x, y| {
            let (k1, k2) = wavenumbers(region, y);
            (k1 * x[0]).sin() * (k2 * x[1]).sin()
        },
        move |region, x, y| {
            let (k1, k2) = wavenumbers(region, y);
            let a = model.a(region, x, y);
            [
                a * k1 * (k1 * x[0]).cos() * (k2 * x[1]).sin(),
                a * k2 * (k1 * x[0]).sin() * (k2 * x[1]).cos(),
            ]
        },
    );
    Preset {
        name: "test2".into(),
        domain: Rect::square(-1.0, 1.0),
        model: Arc::new(model),
        exact,
    }
}

/// Look up a benchmark by name.
pub fn build_preset(name: &str, delta: f64) -> Result<Preset> {
    match name {
        "test1" => Ok(smooth_test(delta)),
        "test2" => Ok(layered_test(delta)),
        other => Err(Error::UnknownPreset(other.to_string())),
    }
}
