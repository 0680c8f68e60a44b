//! Random wave-speed coefficients and the Galerkin coefficient matrices
//! `A(x)_{kj} = E[a(x, .) Phi_k Phi_j]` built from them.

use std::collections::HashMap;
use std::fmt::Debug;
use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gpc::GpcBasis;
use crate::mesh::{Face, InterfaceLine, Mesh2D, Side};
use crate::quadrature::GaussRule;

/// A positive random wave speed `a(x, y)`, smooth inside each region.
///
/// Regions are separated by the interface lines; a cell of a mesh aligned
/// with those lines lies in exactly one region and always evaluates the
/// coefficient through that region, which is how one-sided limits are taken.
pub trait CoefficientModel: Debug + Send + Sync {
    /// Number of random variables the coefficient reads.
    fn random_dims(&self) -> usize;

    /// `a` in region `region` at physical point `x` and random point `y`.
    fn a(&self, region: usize, x: [f64; 2], y: &[f64]) -> f64;

    /// Spatial gradient of `a` inside `region`.
    fn grad_a(&self, region: usize, x: [f64; 2], y: &[f64]) -> [f64; 2];

    /// Lines across which `a` may jump.
    fn interfaces(&self) -> Vec<InterfaceLine> {
        Vec::new()
    }

    /// Region of a point that is not on an interface.
    fn region_of(&self, _x: [f64; 2]) -> usize {
        0
    }

    /// `(a_min, a_max)` with `0 < a_min <= a <= a_max`.
    fn bounds(&self) -> (f64, f64);

    /// True when `a` does not depend on `x` inside any region.
    fn piecewise_constant_in_x(&self) -> bool {
        false
    }
}

/// Region of `x`, taking the one-sided limit selected by `side` when `x`
/// lies on an interface.
pub fn region_at(model: &dyn CoefficientModel, x: [f64; 2], side: Option<Side>) -> Result<usize> {
    let mut probe = x;
    for line in model.interfaces() {
        if line.contains(x) {
            let nudge = 1e-9 * line.position().abs().max(1.0);
            match side {
                None => return Err(Error::OnInterface { x: x[0], y: x[1] }),
                Some(Side::Minus) => probe[line.normal_axis()] -= nudge,
                Some(Side::Plus) => probe[line.normal_axis()] += nudge,
            }
        }
    }
    Ok(model.region_of(probe))
}

/// `a(x, y) = value`, deterministic and uniform.
#[derive(Debug, Clone, Copy)]
pub struct ConstantCoefficient {
    pub value: f64,
}

impl CoefficientModel for ConstantCoefficient {
    fn random_dims(&self) -> usize {
        0
    }
    fn a(&self, _: usize, _: [f64; 2], _: &[f64]) -> f64 {
        self.value
    }
    fn grad_a(&self, _: usize, _: [f64; 2], _: &[f64]) -> [f64; 2] {
        [0.0, 0.0]
    }
    fn bounds(&self) -> (f64, f64) {
        (self.value, self.value)
    }
    fn piecewise_constant_in_x(&self) -> bool {
        true
    }
}

/// Continuous test coefficient `a^2 = 2 / ((1 + d y1)^2 + (1 + d y2)^2)`.
#[derive(Debug, Clone, Copy)]
pub struct SmoothRandomSpeed {
    pub delta: f64,
}

impl CoefficientModel for SmoothRandomSpeed {
    fn random_dims(&self) -> usize {
        2
    }
    fn a(&self, _: usize, _: [f64; 2], y: &[f64]) -> f64 {
        let s1 = 1.0 + self.delta * y[0];
        let s2 = 1.0 + self.delta * y[1];
        (2.0 / (s1 * s1 + s2 * s2)).sqrt()
    }
    fn grad_a(&self, _: usize, _: [f64; 2], _: &[f64]) -> [f64; 2] {
        [0.0, 0.0]
    }
    fn bounds(&self) -> (f64, f64) {
        let lo = 1.0 - self.delta;
        let hi = 1.0 + self.delta;
        (1.0 / hi, 1.0 / lo)
    }
    fn piecewise_constant_in_x(&self) -> bool {
        true
    }
}

/// Discontinuous test coefficient on `[-1, 1]^2`, jumping across `x1 = 0`:
///
/// * region 0 (`x1 < 0`): `a^2 = 1 / ((1 + d y1)^2 + (1 + d y2)^2)`
/// * region 1 (`x1 > 0`): `a^2 = 9 / (25 (1 + d y1)^2 + 9 (1 + d y2)^2)`
#[derive(Debug, Clone, Copy)]
pub struct LayeredRandomSpeed {
    pub delta: f64,
}

impl LayeredRandomSpeed {
    /// `a^2` in `region`.
    pub fn a_squared(&self, region: usize, y: &[f64]) -> f64 {
        let s1 = 1.0 + self.delta * y[0];
        let s2 = 1.0 + self.delta * y[1];
        if region == 0 {
            1.0 / (s1 * s1 + s2 * s2)
        } else {
            9.0 / (25.0 * s1 * s1 + 9.0 * s2 * s2)
        }
    }
}

impl CoefficientModel for LayeredRandomSpeed {
    fn random_dims(&self) -> usize {
        2
    }
    fn a(&self, region: usize, _: [f64; 2], y: &[f64]) -> f64 {
        self.a_squared(region, y).sqrt()
    }
    fn grad_a(&self, _: usize, _: [f64; 2], _: &[f64]) -> [f64; 2] {
        [0.0, 0.0]
    }
    fn interfaces(&self) -> Vec<InterfaceLine> {
        vec![InterfaceLine::Vertical(0.0)]
    }
    fn region_of(&self, x: [f64; 2]) -> usize {
        usize::from(x[0] > 0.0)
    }
    fn bounds(&self) -> (f64, f64) {
        let lo = 1.0 - self.delta;
        let hi = 1.0 + self.delta;
        let a0 = (1.0 / (2.0 * hi * hi)).sqrt();
        let a1 = (9.0 / (34.0 * hi * hi)).sqrt();
        let b0 = (1.0 / (2.0 * lo * lo)).sqrt();
        let b1 = (9.0 / (34.0 * lo * lo)).sqrt();
        (a0.min(a1), b0.max(b1))
    }
    fn piecewise_constant_in_x(&self) -> bool {
        true
    }
}

type ScalarFn = dyn Fn([f64; 2], &[f64]) -> f64 + Send + Sync;
type GradFn = dyn Fn([f64; 2], &[f64]) -> [f64; 2] + Send + Sync;

/// Single-region coefficient given by closures; used for synthetic
/// `x`-dependent coefficients.
#[derive(Clone)]
pub struct FnCoefficient {
    dims: usize,
    a: Arc<ScalarFn>,
    grad: Arc<GradFn>,
    bounds: (f64, f64),
}

impl FnCoefficient {
    pub fn new(
        dims: usize,
        bounds: (f64, f64),
        a: impl Fn([f64; 2], &[f64]) -> f64 + Send + Sync + 'static,
        grad: impl Fn([f64; 2], &[f64]) -> [f64; 2] + Send + Sync + 'static,
    ) -> Self {
        Self {
            dims,
            a: Arc::new(a),
            grad: Arc::new(grad),
            bounds,
        }
    }

    /// `a(x, y) = scale * (1 + x1)`.
    pub fn linear_in_x1(scale: f64) -> Self {
        Self::new(
            0,
            (scale, 3.0 * scale),
            move |x, _| scale * (1.0 + x[0]),
            move |_, _| [scale, 0.0],
        )
    }
}

impl Debug for FnCoefficient {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FnCoefficient")
            .field("dims", &self.dims)
            .field("bounds", &self.bounds)
            .finish_non_exhaustive()
    }
}

impl CoefficientModel for FnCoefficient {
    fn random_dims(&self) -> usize {
        self.dims
    }
    fn a(&self, _: usize, x: [f64; 2], y: &[f64]) -> f64 {
        (self.a)(x, y)
    }
    fn grad_a(&self, _: usize, x: [f64; 2], y: &[f64]) -> [f64; 2] {
        (self.grad)(x, y)
    }
    fn bounds(&self) -> (f64, f64) {
        self.bounds
    }
}

/// Perturbed coefficient with `a~^2 = a^2 + eps`.
#[derive(Debug, Clone)]
pub struct ShiftedSquare {
    base: Arc<dyn CoefficientModel>,
    eps: f64,
}

impl ShiftedSquare {
    /// Fails if `a^2 + eps` is not positive somewhere in the base bounds.
    pub fn new(base: Arc<dyn CoefficientModel>, eps: f64) -> Result<Self> {
        let (lo, _) = base.bounds();
        if lo * lo + eps <= 0.0 {
            return Err(Error::SignMismatch {
                x: f64::NAN,
                y: f64::NAN,
            });
        }
        Ok(Self { base, eps })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }
}

impl CoefficientModel for ShiftedSquare {
    fn random_dims(&self) -> usize {
        self.base.random_dims()
    }
    fn a(&self, region: usize, x: [f64; 2], y: &[f64]) -> f64 {
        let a = self.base.a(region, x, y);
        (a * a + self.eps).sqrt()
    }
    fn grad_a(&self, region: usize, x: [f64; 2], y: &[f64]) -> [f64; 2] {
        // grad sqrt(a^2 + eps) = a grad a / a~
        let a = self.base.a(region, x, y);
        let g = self.base.grad_a(region, x, y);
        let scale = a / (a * a + self.eps).sqrt();
        [scale * g[0], scale * g[1]]
    }
    fn interfaces(&self) -> Vec<InterfaceLine> {
        self.base.interfaces()
    }
    fn region_of(&self, x: [f64; 2]) -> usize {
        self.base.region_of(x)
    }
    fn bounds(&self) -> (f64, f64) {
        let (lo, hi) = self.base.bounds();
        ((lo * lo + self.eps).sqrt(), (hi * hi + self.eps).sqrt())
    }
    fn piecewise_constant_in_x(&self) -> bool {
        self.base.piecewise_constant_in_x()
    }
}

fn check_dims(model: &dyn CoefficientModel, basis: &GpcBasis) -> Result<()> {
    if model.random_dims() > basis.dims() {
        return Err(Error::ShapeMismatch(format!(
            "coefficient reads {} random variables, basis has {}",
            model.random_dims(),
            basis.dims()
        )));
    }
    Ok(())
}

/// `sum_q w_q f(y_q) Phi_k(y_q) Phi_j(y_q)` as a row-major `M x M` buffer.
fn galerkin_matrix(basis: &GpcBasis, f: impl Fn(&[f64]) -> f64, out: &mut [f64]) {
    let m = basis.len();
    out.iter_mut().for_each(|v| *v = 0.0);
    for (q, (y, w)) in basis.rule().iter().enumerate() {
        let fw = w * f(y);
        let phi = basis.phi_at_node(q);
        for k in 0..m {
            let s = fw * phi[k];
            let row = &mut out[k * m..(k + 1) * m];
            // symmetric: fill the upper triangle, mirror below
            for j in k..m {
                row[j] += s * phi[j];
            }
        }
    }
    for k in 0..m {
        for j in 0..k {
            out[k * m + j] = out[j * m + k];
        }
    }
}

fn to_matrix(m: usize, data: &[f64]) -> DMatrix<f64> {
    DMatrix::from_row_slice(m, m, data)
}

/// Galerkin coefficient matrix `A(x)` for the region at `x`. On an interface
/// a side must be given.
pub fn assemble_a(
    model: &dyn CoefficientModel,
    basis: &GpcBasis,
    x: [f64; 2],
    side: Option<Side>,
) -> Result<DMatrix<f64>> {
    check_dims(model, basis)?;
    let region = region_at(model, x, side)?;
    let m = basis.len();
    let mut buf = vec![0.0; m * m];
    galerkin_matrix(basis, |y| model.a(region, x, y), &mut buf);
    Ok(to_matrix(m, &buf))
}

/// Gradient matrices `(A_x, A_y)` with entries `E[d a / d x_i Phi_k Phi_j]`.
pub fn assemble_grad_a(
    model: &dyn CoefficientModel,
    basis: &GpcBasis,
    x: [f64; 2],
    side: Option<Side>,
) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    check_dims(model, basis)?;
    let region = region_at(model, x, side)?;
    let m = basis.len();
    let mut bx = vec![0.0; m * m];
    let mut by = vec![0.0; m * m];
    galerkin_matrix(basis, |y| model.grad_a(region, x, y)[0], &mut bx);
    galerkin_matrix(basis, |y| model.grad_a(region, x, y)[1], &mut by);
    Ok((to_matrix(m, &bx), to_matrix(m, &by)))
}

/// Row-major `M x M` matrices at a set of points; a stride of zero means one
/// matrix shared by every point.
#[derive(Debug, Clone)]
pub struct PointMatrices {
    data: Vec<f64>,
    stride: usize,
}

impl PointMatrices {
    fn uniform(matrix: Vec<f64>) -> Self {
        Self {
            data: matrix,
            stride: 0,
        }
    }

    fn per_point(data: Vec<f64>, mm: usize) -> Self {
        Self { data, stride: mm }
    }

    #[inline]
    pub fn get(&self, point: usize, mm: usize) -> &[f64] {
        let start = point * self.stride;
        &self.data[start..start + mm]
    }

    pub fn is_uniform(&self) -> bool {
        self.stride == 0
    }

    fn distinct(&self, mm: usize) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(mm)
    }
}

/// Coefficient data owned by one cell.
#[derive(Debug, Clone)]
pub struct CellCoefficients {
    /// `A` at the volume quadrature points (`qx + nq * qy`).
    pub volume: PointMatrices,
    /// `(A_x, A_y)` at the volume points; `None` when identically zero.
    pub gradient: Option<[PointMatrices; 2]>,
    /// One-sided traces of `A` from inside the cell, per face in
    /// [`Face::ALL`] order, at the edge quadrature points.
    pub faces: [PointMatrices; 4],
}

/// Galerkin coefficient matrices evaluated at every quadrature point of a
/// mesh, each cell using its own region for traces.
#[derive(Debug, Clone)]
pub struct GalerkinCoeffField {
    modes: usize,
    points_per_dim: usize,
    cells: Vec<CellCoefficients>,
}

impl GalerkinCoeffField {
    /// Evaluate `A`, its gradients and its face traces at the tensor points of
    /// `rule` mapped into every cell.
    pub fn assemble(
        model: &dyn CoefficientModel,
        basis: &GpcBasis,
        mesh: &Mesh2D,
        rule: &GaussRule,
    ) -> Result<Self> {
        check_dims(model, basis)?;
        for line in model.interfaces() {
            if !mesh.interfaces().contains(&line) {
                Mesh2D::new(mesh.domain(), mesh.nx(), mesh.ny(), &[line])?;
            }
        }
        let m = basis.len();
        let mm = m * m;
        let nq = rule.len();
        let matrix_at = |region: usize, x: [f64; 2]| {
            let mut buf = vec![0.0; mm];
            galerkin_matrix(basis, |y| model.a(region, x, y), &mut buf);
            buf
        };

        if model.piecewise_constant_in_x() {
            let mut per_region: HashMap<usize, Vec<f64>> = HashMap::new();
            let mut cells = Vec::with_capacity(mesh.n_cells());
            for cell in 0..mesh.n_cells() {
                let center = mesh.cell_center(cell);
                let region = model.region_of(center);
                let a = per_region
                    .entry(region)
                    .or_insert_with(|| matrix_at(region, center))
                    .clone();
                cells.push(CellCoefficients {
                    volume: PointMatrices::uniform(a.clone()),
                    gradient: None,
                    faces: std::array::from_fn(|_| PointMatrices::uniform(a.clone())),
                });
            }
            return Ok(Self {
                modes: m,
                points_per_dim: nq,
                cells,
            });
        }

        let cells = (0..mesh.n_cells())
            .into_par_iter()
            .map(|cell| {
                let region = model.region_of(mesh.cell_center(cell));
                let mut volume = Vec::with_capacity(nq * nq * mm);
                let mut gx = Vec::with_capacity(nq * nq * mm);
                let mut gy = Vec::with_capacity(nq * nq * mm);
                let mut buf = vec![0.0; mm];
                for qy in 0..nq {
                    for qx in 0..nq {
                        let x = mesh.to_physical(cell, [rule.nodes[qx], rule.nodes[qy]]);
                        volume.extend(matrix_at(region, x));
                        galerkin_matrix(basis, |y| model.grad_a(region, x, y)[0], &mut buf);
                        gx.extend_from_slice(&buf);
                        galerkin_matrix(basis, |y| model.grad_a(region, x, y)[1], &mut buf);
                        gy.extend_from_slice(&buf);
                    }
                }
                let faces = Face::ALL.map(|face| {
                    let mut data = Vec::with_capacity(nq * mm);
                    for &s in &rule.nodes {
                        let xi = face_reference_point(face, s);
                        data.extend(matrix_at(region, mesh.to_physical(cell, xi)));
                    }
                    PointMatrices::per_point(data, mm)
                });
                let zero = gx.iter().chain(&gy).all(|v| *v == 0.0);
                CellCoefficients {
                    volume: PointMatrices::per_point(volume, mm),
                    gradient: (!zero).then(|| {
                        [
                            PointMatrices::per_point(gx, mm),
                            PointMatrices::per_point(gy, mm),
                        ]
                    }),
                    faces,
                }
            })
            .collect();
        Ok(Self {
            modes: m,
            points_per_dim: nq,
            cells,
        })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn points_per_dim(&self) -> usize {
        self.points_per_dim
    }

    pub fn n_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn cell(&self, cell: usize) -> &CellCoefficients {
        &self.cells[cell]
    }

    /// Largest eigenvalue of `A` over every stored volume matrix.
    pub fn max_eigenvalue(&self) -> f64 {
        let m = self.modes;
        let mm = m * m;
        self.cells
            .par_iter()
            .map(|c| {
                c.volume
                    .distinct(mm)
                    .map(|a| {
                        SymmetricEigen::new(to_matrix(m, a))
                            .eigenvalues
                            .iter()
                            .cloned()
                            .fold(f64::NEG_INFINITY, f64::max)
                    })
                    .fold(f64::NEG_INFINITY, f64::max)
            })
            .reduce(|| f64::NEG_INFINITY, f64::max)
    }
}

/// Reference coordinates of the point with tangential coordinate `s` on `face`.
#[inline]
pub fn face_reference_point(face: Face, s: f64) -> [f64; 2] {
    match face {
        Face::Left => [-1.0, s],
        Face::Right => [1.0, s],
        Face::Bottom => [s, -1.0],
        Face::Top => [s, 1.0],
    }
}
