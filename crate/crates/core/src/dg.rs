//! Discontinuous piecewise-polynomial spaces on a [`Mesh2D`].
//!
//! The local space on each cell is the tensor-product space `Q^k` spanned by
//! `psi_{a,b}(x) = l_a(xi) l_b(eta) * 2 / sqrt(h_x h_y)` where `l_n` are the
//! Lebesgue-orthonormal Legendre polynomials on `[-1, 1]`. With this scaling
//! the mass matrix of every cell is the identity, so coefficient vectors carry
//! the `L^2` inner product directly.

use crate::coeff::face_reference_point;
use crate::error::{Error, Result};
use crate::gpc::GpcBasis;
use crate::legendre::{lebesgue_scale, legendre_with_derivatives};
use crate::mesh::{Edge, Face, Mesh2D, Side};
use crate::quadrature::GaussRule;

/// Reference-cell data for `Q^k` with an `n_q`-point Gauss rule per direction.
#[derive(Debug, Clone)]
pub struct LocalBasis {
    degree: usize,
    rule: GaussRule,
    /// `l_n(xi_q)`, row `n`.
    val: Vec<Vec<f64>>,
    /// `l_n'(xi_q)`, row `n`.
    der: Vec<Vec<f64>>,
}

impl LocalBasis {
    /// `Q^k` with the default `k + 2` quadrature points per direction.
    pub fn new(degree: usize) -> Result<Self> {
        Self::with_quadrature(degree, degree + 2)
    }

    pub fn with_quadrature(degree: usize, points: usize) -> Result<Self> {
        if points < degree + 1 {
            return Err(Error::InvalidArgument(format!(
                "{points} quadrature points cannot integrate Q^{degree} mass products"
            )));
        }
        let rule = GaussRule::legendre(points)?;
        let mut val = vec![vec![0.0; points]; degree + 1];
        let mut der = vec![vec![0.0; points]; degree + 1];
        let mut v = vec![0.0; degree + 1];
        let mut d = vec![0.0; degree + 1];
        for (q, &x) in rule.nodes.iter().enumerate() {
            legendre_with_derivatives(degree, x, &mut v, &mut d);
            for n in 0..=degree {
                val[n][q] = lebesgue_scale(n) * v[n];
                der[n][q] = lebesgue_scale(n) * d[n];
            }
        }
        Ok(Self {
            degree,
            rule,
            val,
            der,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Number of local functions `(k + 1)^2`.
    pub fn len(&self) -> usize {
        (self.degree + 1) * (self.degree + 1)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn rule(&self) -> &GaussRule {
        &self.rule
    }

    pub fn points_per_dim(&self) -> usize {
        self.rule.len()
    }

    /// Split a local index into its `(x-degree, y-degree)` pair.
    #[inline]
    pub fn degrees(&self, j: usize) -> (usize, usize) {
        (j % (self.degree + 1), j / (self.degree + 1))
    }

    #[inline]
    pub fn local_index(&self, a: usize, b: usize) -> usize {
        a + (self.degree + 1) * b
    }

    /// Lebesgue-orthonormal 1D values `l_0..l_k` (and derivatives) at `s`.
    pub fn line_values(&self, s: f64) -> (Vec<f64>, Vec<f64>) {
        let k = self.degree;
        let mut v = vec![0.0; k + 1];
        let mut d = vec![0.0; k + 1];
        legendre_with_derivatives(k, s, &mut v, &mut d);
        for n in 0..=k {
            v[n] *= lebesgue_scale(n);
            d[n] *= lebesgue_scale(n);
        }
        (v, d)
    }

    /// Reference-cell values `l_a(xi) l_b(eta)` of every local function.
    pub fn reference_values(&self, xi: [f64; 2]) -> Vec<f64> {
        let (vx, _) = self.line_values(xi[0]);
        let (vy, _) = self.line_values(xi[1]);
        (0..self.len())
            .map(|j| {
                let (a, b) = self.degrees(j);
                vx[a] * vy[b]
            })
            .collect()
    }
}

/// Physical-cell tables for a uniform mesh: basis values and
/// quadrature-weighted test functions at volume and face points.
#[derive(Debug, Clone)]
pub struct ElementTables {
    pub n_local: usize,
    pub nq: usize,
    /// `psi_j` at volume point `q`, stored `[j * nq2 + q]`.
    pub phi: Vec<f64>,
    /// `|K| / 4 * w_q * psi_j(q)`.
    pub w_phi: Vec<f64>,
    /// `|K| / 4 * w_q * d psi_j / d x1 (q)`.
    pub w_dx: Vec<f64>,
    /// `|K| / 4 * w_q * d psi_j / d x2 (q)`.
    pub w_dy: Vec<f64>,
    /// Per face (in [`Face::ALL`] order): `psi_j` at the edge points, `[j * nq + s]`.
    pub face_phi: [Vec<f64>; 4],
    /// Per face: `|e| / 2 * w_s * psi_j(s)`.
    pub face_w_phi: [Vec<f64>; 4],
    /// Quadrature weights for volume integrals, `|K| / 4 * w_q`.
    pub vol_weights: Vec<f64>,
    /// Quadrature weights for face integrals, per face.
    pub face_weights: [Vec<f64>; 4],
}

impl ElementTables {
    pub fn new(basis: &LocalBasis, mesh: &Mesh2D) -> Self {
        let [hx, hy] = mesh.h();
        let nq = basis.points_per_dim();
        let nq2 = nq * nq;
        let nl = basis.len();
        let scale = 2.0 / (hx * hy).sqrt();
        let jac = 0.25 * hx * hy;
        let w = &basis.rule.weights;
        let mut phi = vec![0.0; nl * nq2];
        let mut w_phi = vec![0.0; nl * nq2];
        let mut w_dx = vec![0.0; nl * nq2];
        let mut w_dy = vec![0.0; nl * nq2];
        let mut vol_weights = vec![0.0; nq2];
        for qy in 0..nq {
            for qx in 0..nq {
                let q = qx + nq * qy;
                let wq = jac * w[qx] * w[qy];
                vol_weights[q] = wq;
                for j in 0..nl {
                    let (a, b) = basis.degrees(j);
                    let v = scale * basis.val[a][qx] * basis.val[b][qy];
                    phi[j * nq2 + q] = v;
                    w_phi[j * nq2 + q] = wq * v;
                    w_dx[j * nq2 + q] =
                        wq * scale * (2.0 / hx) * basis.der[a][qx] * basis.val[b][qy];
                    w_dy[j * nq2 + q] =
                        wq * scale * (2.0 / hy) * basis.val[a][qx] * basis.der[b][qy];
                }
            }
        }
        let face_phi = Face::ALL.map(|face| {
            let mut t = vec![0.0; nl * nq];
            for (s, &node) in basis.rule.nodes.iter().enumerate() {
                let vals = basis.reference_values(face_reference_point(face, node));
                for j in 0..nl {
                    t[j * nq + s] = scale * vals[j];
                }
            }
            t
        });
        let face_weights = Face::ALL.map(|face| {
            let len = if face.axis() == 0 { hy } else { hx };
            w.iter().map(|wi| 0.5 * len * wi).collect::<Vec<_>>()
        });
        let face_w_phi = std::array::from_fn(|f| {
            let mut t = face_phi[f].clone();
            for j in 0..nl {
                for s in 0..nq {
                    t[j * nq + s] *= face_weights[f][s];
                }
            }
            t
        });
        Self {
            n_local: nl,
            nq,
            phi,
            w_phi,
            w_dx,
            w_dy,
            face_phi,
            face_w_phi,
            vol_weights,
            face_weights,
        }
    }

    pub fn n_volume_points(&self) -> usize {
        self.nq * self.nq
    }
}

/// Coefficients of a vector-of-modes DG function, laid out as
/// `[(cell * modes + m) * n_local + j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DgScalarField {
    n_cells: usize,
    modes: usize,
    n_local: usize,
    data: Vec<f64>,
}

impl DgScalarField {
    pub fn zeros(n_cells: usize, modes: usize, n_local: usize) -> Self {
        Self {
            n_cells,
            modes,
            n_local,
            data: vec![0.0; n_cells * modes * n_local],
        }
    }

    pub fn from_vec(n_cells: usize, modes: usize, n_local: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n_cells * modes * n_local {
            return Err(Error::ShapeMismatch(format!(
                "expected {} coefficients, got {}",
                n_cells * modes * n_local,
                data.len()
            )));
        }
        Ok(Self {
            n_cells,
            modes,
            n_local,
            data,
        })
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn n_local(&self) -> usize {
        self.n_local
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        (self.n_cells, self.modes, self.n_local)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn block_len(&self) -> usize {
        self.modes * self.n_local
    }

    /// Coefficients of one cell, `modes x n_local` row-major.
    pub fn cell(&self, cell: usize) -> &[f64] {
        let b = self.block_len();
        &self.data[cell * b..(cell + 1) * b]
    }

    pub fn cell_mut(&mut self, cell: usize) -> &mut [f64] {
        let b = self.block_len();
        &mut self.data[cell * b..(cell + 1) * b]
    }

    #[inline]
    pub fn get(&self, cell: usize, mode: usize, j: usize) -> f64 {
        self.data[(cell * self.modes + mode) * self.n_local + j]
    }

    #[inline]
    pub fn set(&mut self, cell: usize, mode: usize, j: usize, value: f64) {
        self.data[(cell * self.modes + mode) * self.n_local + j] = value;
    }

    pub fn same_shape(&self, other: &Self) -> bool {
        self.shape() == other.shape()
    }

    /// `self += alpha * other`.
    pub fn axpy(&mut self, alpha: f64, other: &Self) {
        debug_assert!(self.same_shape(other));
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += alpha * b;
        }
    }

    pub fn scale(&mut self, alpha: f64) {
        self.data.iter_mut().for_each(|v| *v *= alpha);
    }

    /// `L^2(D)` inner product of the stacked mode vectors.
    pub fn dot(&self, other: &Self) -> f64 {
        debug_assert!(self.same_shape(other));
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Modal values `u_m(x)` of the field at reference point `xi` in `cell`,
    /// using `psi` values from [`ElementTables`]-compatible scaling.
    pub fn modal_values_at(&self, cell: usize, psi: &[f64], out: &mut [f64]) {
        let block = self.cell(cell);
        for (m, o) in out.iter_mut().enumerate() {
            let row = &block[m * self.n_local..(m + 1) * self.n_local];
            *o = row.iter().zip(psi).map(|(c, p)| c * p).sum();
        }
    }
}

/// The pair `(S^1, S^2)` of DG fields.
#[derive(Debug, Clone, PartialEq)]
pub struct DgVectorField {
    pub components: [DgScalarField; 2],
}

impl DgVectorField {
    pub fn zeros(n_cells: usize, modes: usize, n_local: usize) -> Self {
        Self {
            components: [
                DgScalarField::zeros(n_cells, modes, n_local),
                DgScalarField::zeros(n_cells, modes, n_local),
            ],
        }
    }

    pub fn new(first: DgScalarField, second: DgScalarField) -> Result<Self> {
        if !first.same_shape(&second) {
            return Err(Error::ShapeMismatch(
                "vector field components differ in shape".into(),
            ));
        }
        Ok(Self {
            components: [first, second],
        })
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.components[0].dot(&other.components[0]) + self.components[1].dot(&other.components[1])
    }

    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    pub fn axpy(&mut self, alpha: f64, other: &Self) {
        self.components[0].axpy(alpha, &other.components[0]);
        self.components[1].axpy(alpha, &other.components[1]);
    }

    pub fn max_abs(&self) -> f64 {
        self.components[0]
            .max_abs()
            .max(self.components[1].max_abs())
    }
}

/// Physical values of all local functions at reference point `xi` of a cell of `mesh`.
pub fn physical_values(basis: &LocalBasis, mesh: &Mesh2D, xi: [f64; 2]) -> Vec<f64> {
    let [hx, hy] = mesh.h();
    let scale = 2.0 / (hx * hy).sqrt();
    let mut v = basis.reference_values(xi);
    v.iter_mut().for_each(|p| *p *= scale);
    v
}

fn on_interior_mesh_line(mesh: &Mesh2D, x: [f64; 2]) -> bool {
    let d = mesh.domain();
    let h = mesh.h();
    (0..2).any(|a| {
        let s = (x[a] - d.lo[a]) / h[a];
        let n = s.round();
        (s - n).abs() < 1e-12 * (mesh.nx().max(mesh.ny())) as f64
            && n > 0.0
            && n < if a == 0 { mesh.nx() } else { mesh.ny() } as f64
    })
}

/// Modal values `u_m(x)` of a field at a physical point. Points on interior
/// mesh lines need an explicit side.
pub fn evaluate_modes(
    field: &DgScalarField,
    basis: &LocalBasis,
    mesh: &Mesh2D,
    x: [f64; 2],
    side: Option<Side>,
) -> Result<Vec<f64>> {
    if side.is_none() && mesh.domain().contains(x) && on_interior_mesh_line(mesh, x) {
        return Err(Error::InvalidArgument(format!(
            "point ({}, {}) is on a mesh line; a side is required",
            x[0], x[1]
        )));
    }
    let cell = mesh.locate(x, side)?;
    let xi = mesh.to_reference(cell, x);
    let psi = physical_values(basis, mesh, xi);
    let mut out = vec![0.0; field.modes()];
    field.modal_values_at(cell, &psi, &mut out);
    Ok(out)
}

/// `u_h(x, y) = sum_m u_m(x) Phi_m(y)`.
pub fn evaluate_field(
    field: &DgScalarField,
    basis: &LocalBasis,
    mesh: &Mesh2D,
    gpc: &GpcBasis,
    x: [f64; 2],
    y: &[f64],
    side: Option<Side>,
) -> Result<f64> {
    let modes = evaluate_modes(field, basis, mesh, x, side)?;
    Ok(gpc.evaluate_expansion(&modes, y))
}

/// One-sided modal trace of a field at edge quadrature point `point`.
pub fn trace(
    field: &DgScalarField,
    basis: &LocalBasis,
    mesh: &Mesh2D,
    edge: &Edge,
    side: Side,
    point: usize,
) -> Result<Vec<f64>> {
    let (cell, face) = match side {
        Side::Minus => (
            edge.minus,
            if edge.normal_axis == 0 {
                Face::Right
            } else {
                Face::Top
            },
        ),
        Side::Plus => (
            edge.plus,
            if edge.normal_axis == 0 {
                Face::Left
            } else {
                Face::Bottom
            },
        ),
    };
    let cell = cell.ok_or(Error::NoExteriorTrace)?;
    let s = *basis
        .rule()
        .nodes
        .get(point)
        .ok_or_else(|| Error::InvalidArgument(format!("edge point {point} out of range")))?;
    let psi = physical_values(basis, mesh, face_reference_point(face, s));
    let mut out = vec![0.0; field.modes()];
    field.modal_values_at(cell, &psi, &mut out);
    Ok(out)
}

/// Physical location of edge quadrature point `point`.
pub fn edge_point(basis: &LocalBasis, edge: &Edge, point: usize) -> [f64; 2] {
    let s = basis.rule().nodes[point];
    let t = 0.5 * (edge.span[0] + edge.span[1]) + 0.5 * (edge.span[1] - edge.span[0]) * s;
    if edge.normal_axis == 0 {
        [edge.position, t]
    } else {
        [t, edge.position]
    }
}

/// Plain `L^2` projection, cell by cell, of a function returning modal values.
pub fn project_l2(
    basis: &LocalBasis,
    mesh: &Mesh2D,
    modes: usize,
    f: impl Fn([f64; 2], &mut [f64]) + Sync,
) -> DgScalarField {
    use rayon::prelude::*;
    let tables = ElementTables::new(basis, mesh);
    let nl = basis.len();
    let nq = basis.points_per_dim();
    let nq2 = nq * nq;
    let nodes = &basis.rule().nodes;
    let mut field = DgScalarField::zeros(mesh.n_cells(), modes, nl);
    let block = modes * nl;
    field
        .as_mut_slice()
        .par_chunks_mut(block)
        .enumerate()
        .for_each(|(cell, out)| {
            let mut vals = vec![0.0; modes];
            for q in 0..nq2 {
                let x = mesh.to_physical(cell, [nodes[q % nq], nodes[q / nq]]);
                f(x, &mut vals);
                for m in 0..modes {
                    for j in 0..nl {
                        out[m * nl + j] += tables.w_phi[j * nq2 + q] * vals[m];
                    }
                }
            }
        });
    field
}
