//! Shared fixtures for the integration tests: an independent dense-matrix
//! assembly of the LDG operator, built from scratch (own Gauss rule, own
//! Legendre recursion, own gPC index set) so it shares nothing with the
//! library but the storage layout `(cell * M + m) * n_local + a + (k + 1) b`.
#![allow(dead_code)]

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use wave_sgldg::coeff::{CoefficientModel, FnCoefficient, GalerkinCoeffField};
use wave_sgldg::dg::{DgScalarField, DgVectorField, LocalBasis};
use wave_sgldg::gpc::GpcBasis;
use wave_sgldg::ldg::{FluxChoice, FluxConvention, LdgOperator};
use wave_sgldg::mesh::{Mesh2D, Rect};
use wave_sgldg::presets::build_preset;
use wave_sgldg::projection::{project_initial_plain, project_initial_vplus};

/// Orthonormal Legendre `l_n(x) = sqrt((2n+1)/2) P_n(x)` on `[-1, 1]` and
/// its derivative, from the three-term recursion.
pub fn legendre_on(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    let (mut d0, mut d1) = (0.0, 1.0);
    let (p, d) = if n == 0 {
        (1.0, 0.0)
    } else {
        for j in 1..n {
            let jf = j as f64;
            let p2 = ((2.0 * jf + 1.0) * x * p1 - jf * p0) / (jf + 1.0);
            let d2 = d0 + (2.0 * jf + 1.0) * p1;
            p0 = p1;
            p1 = p2;
            d0 = d1;
            d1 = d2;
        }
        (p1, d1)
    };
    let c = ((2 * n + 1) as f64 / 2.0).sqrt();
    (c * p, c * d)
}

/// Gauss–Legendre nodes and weights on `[-1, 1]` by Newton iteration.
pub fn gauss(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = raw_legendre(n, z);
            let dz = p / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = raw_legendre(n, z);
        x[n - 1 - i] = z;
        w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    (x, w)
}

fn raw_legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for j in 1..n {
        let jf = j as f64;
        let p2 = ((2.0 * jf + 1.0) * x * p1 - jf * p0) / (jf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let prev = if n == 0 { 0.0 } else { p0 };
    (p, n as f64 * (x * p - prev) / (x * x - 1.0))
}

/// Total-degree multi-indices in two variables, by degree, then descending
/// lexicographically.
pub fn index_set(order: usize) -> Vec<[usize; 2]> {
    let mut out = Vec::new();
    for deg in 0..=order {
        for a in (0..=deg).rev() {
            out.push([a, deg - a]);
        }
    }
    out
}

/// `Phi_m(y)` for the uniform density on `[-1, 1]^2`.
pub fn phi(alpha: [usize; 2], y: [f64; 2]) -> f64 {
    // orthonormal w.r.t. density 1/2 per variable
    (0..2)
        .map(|d| std::f64::consts::SQRT_2 * legendre_on(alpha[d], y[d]).0)
        .product()
}

/// Galerkin matrices of `f(y)` against the gPC basis, by a tensor rule of
/// `nodes` points per variable.
pub fn galerkin(order: usize, nodes: usize, f: impl Fn([f64; 2]) -> f64) -> DMatrix<f64> {
    let set = index_set(order);
    let m = set.len();
    let (x, w) = gauss(nodes);
    let mut out = DMatrix::zeros(m, m);
    for (i, &y1) in x.iter().enumerate() {
        for (j, &y2) in x.iter().enumerate() {
            let y = [y1, y2];
            let wt = 0.25 * w[i] * w[j] * f(y);
            for r in 0..m {
                let pr = phi(set[r], y);
                for c in 0..m {
                    out[(r, c)] += wt * pr * phi(set[c], y);
                }
            }
        }
    }
    out
}

/// A coefficient that depends on `x` and `y`, polynomial in both so every
/// quadrature in the comparison is exact.
pub fn polynomial_model() -> FnCoefficient {
    FnCoefficient::new(
        2,
        (0.2, 2.0),
        |x, y| 1.0 + 0.3 * x[0] - 0.2 * x[1] + 0.1 * y[0] * x[0] + 0.05 * y[1],
        |_, y| [0.3 + 0.1 * y[0], -0.2],
    )
}

/// Dense matrices of the scheme on one mesh.
pub struct DenseOracle {
    pub n_dofs: usize,
    /// `S^i = s_op[i] v` with homogeneous data.
    pub s_op: [DMatrix<f64>; 2],
    /// `div(A S) = acc_op[0] S^1 + acc_op[1] S^2`.
    pub acc_op: [DMatrix<f64>; 2],
    /// Boundary contributions: `S^i += s_bc[i] g` with `g` sampled per
    /// boundary point, see [`DenseOracle::boundary_points`].
    pub s_bc: [DMatrix<f64>; 2],
    /// `(cell, x)` of each boundary sample, `M` values per sample.
    pub boundary_points: Vec<(usize, [f64; 2])>,
}

struct Cell {
    lo: [f64; 2],
    h: [f64; 2],
    region: usize,
}

impl Cell {
    fn xi(&self, x: [f64; 2]) -> [f64; 2] {
        [
            2.0 * (x[0] - self.lo[0]) / self.h[0] - 1.0,
            2.0 * (x[1] - self.lo[1]) / self.h[1] - 1.0,
        ]
    }

    fn x(&self, xi: [f64; 2]) -> [f64; 2] {
        [
            self.lo[0] + 0.5 * (xi[0] + 1.0) * self.h[0],
            self.lo[1] + 0.5 * (xi[1] + 1.0) * self.h[1],
        ]
    }

    /// `(psi, d psi/dx1, d psi/dx2)` of every local function at `x`.
    fn basis(&self, k: usize, x: [f64; 2]) -> Vec<(f64, f64, f64)> {
        let xi = self.xi(x);
        let scale = 2.0 / (self.h[0] * self.h[1]).sqrt();
        let mut out = Vec::with_capacity((k + 1) * (k + 1));
        for b in 0..=k {
            for a in 0..=k {
                let (la, da) = legendre_on(a, xi[0]);
                let (lb, db) = legendre_on(b, xi[1]);
                out.push((
                    scale * la * lb,
                    scale * da * lb * 2.0 / self.h[0],
                    scale * la * db * 2.0 / self.h[1],
                ));
            }
        }
        out
    }
}

impl DenseOracle {
    pub fn assemble(
        model: &dyn CoefficientModel,
        domain: Rect,
        nx: usize,
        ny: usize,
        k: usize,
        order: usize,
        flux: FluxConvention,
    ) -> Self {
        let y_nodes = 20;
        let m = index_set(order).len();
        let nl = (k + 1) * (k + 1);
        let h = [domain.width(0) / nx as f64, domain.width(1) / ny as f64];
        let cells: Vec<Cell> = (0..nx * ny)
            .map(|c| {
                let lo = [
                    domain.lo[0] + (c % nx) as f64 * h[0],
                    domain.lo[1] + (c / nx) as f64 * h[1],
                ];
                let center = [lo[0] + 0.5 * h[0], lo[1] + 0.5 * h[1]];
                Cell {
                    lo,
                    h,
                    region: model.region_of(center),
                }
            })
            .collect();
        let n = cells.len() * m * nl;
        let dof = |cell: usize, mode: usize, j: usize| (cell * m + mode) * nl + j;
        let a_at =
            |cell: &Cell, x: [f64; 2]| galerkin(order, y_nodes, |y| model.a(cell.region, x, &y));
        let grad_at = |cell: &Cell, x: [f64; 2], axis: usize| {
            galerkin(order, y_nodes, |y| model.grad_a(cell.region, x, &y)[axis])
        };
        let (gx, gw) = gauss(k + 3);
        let jac = 0.25 * h[0] * h[1];

        let mut mass = DMatrix::zeros(n, n);
        let mut s_raw = [DMatrix::zeros(n, n), DMatrix::zeros(n, n)];
        let mut acc_raw = [DMatrix::zeros(n, n), DMatrix::zeros(n, n)];
        let mut boundary_points = Vec::new();
        let mut bc_entries: [Vec<(usize, usize, f64)>; 2] = [Vec::new(), Vec::new()];

        for (c, cell) in cells.iter().enumerate() {
            // volume terms
            for (i, &xi) in gx.iter().enumerate() {
                for (j, &eta) in gx.iter().enumerate() {
                    let x = cell.x([xi, eta]);
                    let w = jac * gw[i] * gw[j];
                    let psi = cell.basis(k, x);
                    let a = a_at(cell, x);
                    let grads = [grad_at(cell, x, 0), grad_at(cell, x, 1)];
                    for p in 0..nl {
                        for l in 0..nl {
                            for r in 0..m {
                                mass[(dof(c, r, p), dof(c, r, l))] += w * psi[p].0 * psi[l].0;
                                for col in 0..m {
                                    let row = dof(c, r, p);
                                    let cc = dof(c, col, l);
                                    let dpsi = [psi[p].1, psi[p].2];
                                    for axis in 0..2 {
                                        let v = -w * a[(r, col)] * psi[l].0 * dpsi[axis]
                                            - w * grads[axis][(r, col)] * psi[l].0 * psi[p].0;
                                        s_raw[axis][(row, cc)] += v;
                                        acc_raw[axis][(row, cc)] -=
                                            w * a[(r, col)] * psi[l].0 * dpsi[axis];
                                    }
                                }
                            }
                        }
                    }
                }
            }
            // faces: (axis, upper side?)
            let (ci, cj) = (c % nx, c / nx);
            for axis in 0..2 {
                for upper in [false, true] {
                    let normal = if upper { 1.0 } else { -1.0 };
                    let nb = match (axis, upper) {
                        (0, false) => (ci > 0).then(|| c - 1),
                        (0, true) => (ci + 1 < nx).then(|| c + 1),
                        (1, false) => (cj > 0).then(|| c - nx),
                        _ => (cj + 1 < ny).then(|| c + nx),
                    };
                    let choice = if axis == 0 { flux.x } else { flux.y };
                    // the '+' cell of an edge is the upper one
                    let neighbor_is_plus = upper;
                    let (v_from_nb, flux_from_nb) = match choice {
                        FluxChoice::MinusPlus => (neighbor_is_plus, !neighbor_is_plus),
                        FluxChoice::PlusMinus => (!neighbor_is_plus, neighbor_is_plus),
                    };
                    let len = h[1 - axis];
                    for (s, &t) in gx.iter().enumerate() {
                        let mut xi = [0.0; 2];
                        xi[axis] = normal;
                        xi[1 - axis] = t;
                        let x = cell.x(xi);
                        let w = 0.5 * len * gw[s];
                        let psi = cell.basis(k, x);
                        let a_own = a_at(cell, x);
                        match nb {
                            Some(nbc) => {
                                let nb_cell = &cells[nbc];
                                let psi_nb = nb_cell.basis(k, x);
                                let vsrc = if v_from_nb { (nbc, &psi_nb) } else { (c, &psi) };
                                let a_nb = a_at(nb_cell, x);
                                let (fsrc, a_src) = if flux_from_nb {
                                    ((nbc, &psi_nb), &a_nb)
                                } else {
                                    ((c, &psi), &a_own)
                                };
                                for p in 0..nl {
                                    for l in 0..nl {
                                        for r in 0..m {
                                            for col in 0..m {
                                                let row = dof(c, r, p);
                                                s_raw[axis][(row, dof(vsrc.0, col, l))] += normal
                                                    * w
                                                    * a_own[(r, col)]
                                                    * vsrc.1[l].0
                                                    * psi[p].0;
                                                acc_raw[axis][(row, dof(fsrc.0, col, l))] += normal
                                                    * w
                                                    * a_src[(r, col)]
                                                    * fsrc.1[l].0
                                                    * psi[p].0;
                                            }
                                        }
                                    }
                                }
                            }
                            None => {
                                let sample = boundary_points.len();
                                boundary_points.push((c, x));
                                for p in 0..nl {
                                    for r in 0..m {
                                        for col in 0..m {
                                            bc_entries[axis].push((
                                                dof(c, r, p),
                                                sample * m + col,
                                                normal * w * a_own[(r, col)] * psi[p].0,
                                            ));
                                        }
                                        for l in 0..nl {
                                            for col in 0..m {
                                                acc_raw[axis][(dof(c, r, p), dof(c, col, l))] +=
                                                    normal
                                                        * w
                                                        * a_own[(r, col)]
                                                        * psi[l].0
                                                        * psi[p].0;
                                            }
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        let inv = mass
            .clone()
            .try_inverse()
            .expect("mass matrix is invertible");
        let nb = boundary_points.len() * m;
        let mut s_bc = [DMatrix::zeros(n, nb), DMatrix::zeros(n, nb)];
        for axis in 0..2 {
            for &(r, c, v) in &bc_entries[axis] {
                s_bc[axis][(r, c)] += v;
            }
            s_bc[axis] = &inv * &s_bc[axis];
        }
        Self {
            n_dofs: n,
            s_op: [&inv * &s_raw[0], &inv * &s_raw[1]],
            acc_op: [&inv * &acc_raw[0], &inv * &acc_raw[1]],
            s_bc,
            boundary_points,
        }
    }
}

/// The library operator for the same configuration, using `20` Gauss
/// nodes per random variable so both sides integrate `y` alike.
pub fn library_operator(
    model: &dyn CoefficientModel,
    domain: Rect,
    nx: usize,
    ny: usize,
    k: usize,
    order: usize,
    flux: FluxConvention,
) -> LdgOperator {
    let gpc = GpcBasis::with_nodes(2, order, 20).unwrap();
    let mesh = Mesh2D::new(domain, nx, ny, &model.interfaces()).unwrap();
    let basis = LocalBasis::new(k).unwrap();
    let coeffs = GalerkinCoeffField::assemble(model, &gpc, &mesh, basis.rule()).unwrap();
    LdgOperator::new(mesh, basis, Arc::new(coeffs), flux).unwrap()
}

pub fn random_field(op: &LdgOperator, rng: &mut StdRng) -> DgScalarField {
    let mut f = op.zero_scalar();
    f.as_mut_slice()
        .iter_mut()
        .for_each(|v| *v = rng.gen_range(-1.0..1.0));
    f
}

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn to_vec(f: &DgScalarField) -> DVector<f64> {
    DVector::from_column_slice(f.as_slice())
}

pub fn rel_gap(a: &[f64], b: &[f64]) -> f64 {
    let scale = b.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    a.iter()
        .zip(b)
        .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
        / scale
}

/// Largest scaled discrepancy between the library and the oracle on one
/// configuration: `S` with and without boundary data, the acceleration,
/// and the adjoint identity `<div(A S v), w> = -<S v, S w>`.
pub fn oracle_gap(
    model: &dyn CoefficientModel,
    domain: Rect,
    nx: usize,
    ny: usize,
    k: usize,
    order: usize,
    flux: FluxConvention,
    seed: u64,
) -> [f64; 3] {
    let oracle = DenseOracle::assemble(model, domain, nx, ny, k, order, flux);
    let op = library_operator(model, domain, nx, ny, k, order, flux);
    let mut rng = rng(seed);
    let v = random_field(&op, &mut rng);
    let w = random_field(&op, &mut rng);
    let m = op.modes();

    // boundary data: linear per mode, so both face rules integrate it exactly
    let g = |x: [f64; 2], out: &mut [f64]| {
        for (mode, o) in out.iter_mut().enumerate() {
            *o = (1.0 + mode as f64) * (x[0] - 0.7 * x[1]) + 0.3;
        }
    };
    let table = op.tabulate_boundary(|_, x, out| g(x, out));
    let mut gvec = DVector::zeros(oracle.boundary_points.len() * m);
    for (i, &(_, x)) in oracle.boundary_points.iter().enumerate() {
        let mut out = vec![0.0; m];
        g(x, &mut out);
        for mode in 0..m {
            gvec[i * m + mode] = out[mode];
        }
    }

    let vv = to_vec(&v);
    let mut s_gap = 0.0f64;
    let lib_h = op.compute_s(&v, None).unwrap();
    let lib_g = op.compute_s(&v, Some(&table)).unwrap();
    for axis in 0..2 {
        let dense_h = &oracle.s_op[axis] * &vv;
        let dense_g = &dense_h + &oracle.s_bc[axis] * &gvec;
        s_gap = s_gap.max(rel_gap(
            lib_h.components[axis].as_slice(),
            dense_h.as_slice(),
        ));
        s_gap = s_gap.max(rel_gap(
            lib_g.components[axis].as_slice(),
            dense_g.as_slice(),
        ));
    }

    // acceleration of an arbitrary vector field
    let s = DgVectorField::new(random_field(&op, &mut rng), random_field(&op, &mut rng)).unwrap();
    let lib_acc = op.compute_acceleration(&s).unwrap();
    let dense_acc =
        &oracle.acc_op[0] * to_vec(&s.components[0]) + &oracle.acc_op[1] * to_vec(&s.components[1]);
    let acc_gap = rel_gap(lib_acc.as_slice(), dense_acc.as_slice());

    let sv = op.compute_s(&v, None).unwrap();
    let sw = op.compute_s(&w, None).unwrap();
    let lhs = op.compute_acceleration(&sv).unwrap().dot(&w);
    let rhs = -sv.dot(&sw);
    let adjoint = (lhs - rhs).abs() / (sv.norm_sq() * sw.norm_sq()).sqrt().max(1.0);
    [s_gap, acc_gap, adjoint]
}

/// Modal values of `field` at reference point `xi` of `cell`, evaluated with
/// the test's own Legendre recursion.
pub fn modal_values(
    field: &DgScalarField,
    mesh: &Mesh2D,
    k: usize,
    cell: usize,
    xi: [f64; 2],
) -> Vec<f64> {
    let [hx, hy] = mesh.h();
    let scale = 2.0 / (hx * hy).sqrt();
    let nl = (k + 1) * (k + 1);
    let block = field.cell(cell);
    (0..field.modes())
        .map(|mode| {
            let mut v = 0.0;
            for b in 0..=k {
                for a in 0..=k {
                    let psi = scale * legendre_on(a, xi[0]).0 * legendre_on(b, xi[1]).0;
                    v += block[mode * nl + a + (k + 1) * b] * psi;
                }
            }
            v
        })
        .collect()
}

/// `A(x)` seen from `cell`, with the same 20-node random rule as
/// [`library_operator`].
pub fn galerkin_at(
    model: &dyn CoefficientModel,
    mesh: &Mesh2D,
    order: usize,
    cell: usize,
    x: [f64; 2],
) -> DMatrix<f64> {
    let region = model.region_of(mesh.cell_center(cell));
    galerkin(order, 20, |y| model.a(region, x, &y))
}

// ---- projection checks ----

pub const ORDER: usize = 1;

pub fn all_conventions() -> Vec<FluxConvention> {
    let c = [FluxChoice::MinusPlus, FluxChoice::PlusMinus];
    c.iter()
        .flat_map(|&x| c.iter().map(move |&y| FluxConvention { x, y }))
        .collect()
}

pub fn q_k(k: usize) -> impl Fn(usize, [f64; 2], &mut [f64]) + Sync {
    move |_, x, out: &mut [f64]| {
        for (m, o) in out.iter_mut().enumerate() {
            let mut v = 0.0;
            for a in 0..=k {
                for b in 0..=k {
                    v += (0.3 + 0.1 * (a + 2 * b + m) as f64)
                        * x[0].powi(a as i32)
                        * x[1].powi(b as i32);
                }
            }
            *o = v;
        }
    }
}

pub fn smooth(_: usize, x: [f64; 2], out: &mut [f64]) {
    for (m, o) in out.iter_mut().enumerate() {
        *o = (1.0 + 0.5 * m as f64) * (2.0 * x[0] + 0.3 * m as f64).sin() * x[1].exp();
    }
}

/// An `x`-dependent coefficient and the interface coefficient.
pub fn models() -> Vec<(Arc<dyn CoefficientModel>, Rect, usize)> {
    let t2 = build_preset("test2", 0.2).unwrap();
    vec![
        (Arc::new(polynomial_model()), Rect::square(0.0, 1.0), 3),
        (t2.model, t2.domain, 4),
    ]
}

pub fn reference_nodes(op: &LdgOperator) -> (Vec<f64>, Vec<f64>) {
    let r = op.basis().rule();
    (r.nodes.clone(), r.weights.clone())
}

/// Largest violation of the defining conditions of the flux-adapted
/// projection of `u` in `field`.
pub fn vplus_residual(
    op: &LdgOperator,
    model: &dyn CoefficientModel,
    field: &DgScalarField,
    u: &dyn Fn(usize, [f64; 2], &mut [f64]),
) -> f64 {
    let mesh = op.mesh();
    let k = op.basis().degree();
    let m = op.modes();
    let (nodes, weights) = reference_nodes(op);
    let flux = op.flux();
    let fx = if flux.x == FluxChoice::MinusPlus {
        -1.0
    } else {
        1.0
    };
    let fy = if flux.y == FluxChoice::MinusPlus {
        -1.0
    } else {
        1.0
    };
    let mut worst = 0.0f64;
    let mut want = vec![0.0; m];
    for cell in 0..mesh.n_cells() {
        // A-weighted moments against x^a y^b, a, b < k
        for a in 0..k {
            for b in 0..k {
                let mut acc = DVector::zeros(m);
                for (i, &xi) in nodes.iter().enumerate() {
                    for (j, &eta) in nodes.iter().enumerate() {
                        let x = mesh.to_physical(cell, [xi, eta]);
                        u(cell, x, &mut want);
                        let got = modal_values(field, mesh, k, cell, [xi, eta]);
                        let diff =
                            DVector::from_iterator(m, got.iter().zip(&want).map(|(g, w)| g - w));
                        let amat = galerkin_at(model, mesh, ORDER, cell, x);
                        acc += weights[i]
                            * weights[j]
                            * xi.powi(a as i32)
                            * eta.powi(b as i32)
                            * (amat * diff);
                    }
                }
                worst = worst.max(acc.amax());
            }
        }
        // moments against s^b, b < k, on the two faces the scheme reads from inside
        for b in 0..k {
            for face in 0..2 {
                let mut acc = vec![0.0; m];
                for (s, &t) in nodes.iter().enumerate() {
                    let xi = if face == 0 { [fx, t] } else { [t, fy] };
                    u(cell, mesh.to_physical(cell, xi), &mut want);
                    let got = modal_values(field, mesh, k, cell, xi);
                    for mode in 0..m {
                        acc[mode] += weights[s] * t.powi(b as i32) * (got[mode] - want[mode]);
                    }
                }
                worst = acc.iter().fold(worst, |w, v| w.max(v.abs()));
            }
        }
        // corner value
        let xi = [fx, fy];
        u(cell, mesh.to_physical(cell, xi), &mut want);
        let got = modal_values(field, mesh, k, cell, xi);
        worst = got
            .iter()
            .zip(&want)
            .fold(worst, |w, (g, v)| w.max((g - v).abs()));
    }
    worst
}

/// Largest violation of `int A (P u - u) x^a y^b = 0`, `a, b <= k`.
pub fn plain_residual(
    op: &LdgOperator,
    model: &dyn CoefficientModel,
    field: &DgScalarField,
    u: &dyn Fn(usize, [f64; 2], &mut [f64]),
) -> f64 {
    let mesh = op.mesh();
    let k = op.basis().degree();
    let m = op.modes();
    let (nodes, weights) = reference_nodes(op);
    let mut worst = 0.0f64;
    let mut want = vec![0.0; m];
    for cell in 0..mesh.n_cells() {
        for a in 0..=k {
            for b in 0..=k {
                let mut acc = DVector::zeros(m);
                for (i, &xi) in nodes.iter().enumerate() {
                    for (j, &eta) in nodes.iter().enumerate() {
                        let x = mesh.to_physical(cell, [xi, eta]);
                        u(cell, x, &mut want);
                        let got = modal_values(field, mesh, k, cell, [xi, eta]);
                        let diff =
                            DVector::from_iterator(m, got.iter().zip(&want).map(|(g, w)| g - w));
                        let amat = galerkin_at(model, mesh, ORDER, cell, x);
                        acc += weights[i]
                            * weights[j]
                            * xi.powi(a as i32)
                            * eta.powi(b as i32)
                            * (amat * diff);
                    }
                }
                worst = worst.max(acc.amax());
            }
        }
    }
    worst
}

/// Largest pointwise gap between `field` and `u` over an off-grid sample.
pub fn pointwise_gap(
    op: &LdgOperator,
    field: &DgScalarField,
    u: &dyn Fn(usize, [f64; 2], &mut [f64]),
) -> f64 {
    let mesh = op.mesh();
    let k = op.basis().degree();
    let mut want = vec![0.0; op.modes()];
    let mut worst = 0.0f64;
    for cell in 0..mesh.n_cells() {
        for xi in [
            [-0.9, 0.3],
            [0.1, -0.7],
            [0.77, 0.77],
            [-1.0, 1.0],
            [1.0, -1.0],
        ] {
            u(cell, mesh.to_physical(cell, xi), &mut want);
            let got = modal_values(field, mesh, k, cell, xi);
            worst = got
                .iter()
                .zip(&want)
                .fold(worst, |w, (g, v)| w.max((g - v).abs()));
        }
    }
    worst
}

/// `sqrt(sum_m int (P u - u)_m^2)` with a finer rule than the projection's.
pub fn l2_error(op: &LdgOperator, field: &DgScalarField) -> f64 {
    let mesh = op.mesh();
    let k = op.basis().degree();
    let (x, w) = gauss(k + 4);
    let [hx, hy] = mesh.h();
    let mut want = vec![0.0; op.modes()];
    let mut sum = 0.0;
    for cell in 0..mesh.n_cells() {
        for (i, &xi) in x.iter().enumerate() {
            for (j, &eta) in x.iter().enumerate() {
                smooth(cell, mesh.to_physical(cell, [xi, eta]), &mut want);
                let got = modal_values(field, mesh, k, cell, [xi, eta]);
                let e: f64 = got.iter().zip(&want).map(|(g, v)| (g - v).powi(2)).sum();
                sum += 0.25 * hx * hy * w[i] * w[j] * e;
            }
        }
    }
    sum.sqrt()
}

/// Worst pointwise gap when projecting `Q^k` data, over both coefficient
/// models, `k <= 3` and every flux convention.
pub fn reproduction_gap() -> f64 {
    let mut worst = 0.0f64;
    for (model, domain, n) in models() {
        for k in 0..=3 {
            for flux in all_conventions() {
                let op = library_operator(model.as_ref(), domain, n, n, k, ORDER, flux);
                let u = q_k(k);
                worst = worst.max(pointwise_gap(
                    &op,
                    &project_initial_vplus(&op, &u).unwrap(),
                    &u,
                ));
                worst = worst.max(pointwise_gap(
                    &op,
                    &project_initial_plain(&op, &u).unwrap(),
                    &u,
                ));
            }
        }
    }
    worst
}

/// Worst residual of the defining conditions for smooth data.
pub fn condition_residual() -> f64 {
    let mut worst = 0.0f64;
    for (model, domain, n) in models() {
        for k in 0..=3 {
            for flux in all_conventions() {
                let op = library_operator(model.as_ref(), domain, n, n, k, ORDER, flux);
                let p = project_initial_vplus(&op, smooth).unwrap();
                worst = worst.max(vplus_residual(&op, model.as_ref(), &p, &smooth));
                let p = project_initial_plain(&op, smooth).unwrap();
                worst = worst.max(plain_residual(&op, model.as_ref(), &p, &smooth));
            }
        }
    }
    worst
}

/// `(k, flux-adapted?, e(h) / e(h/2))` for `h = 1/8`, `k = 1..3`.
pub fn decay_ratios() -> Vec<(usize, bool, f64)> {
    let model = polynomial_model();
    let mut out = Vec::new();
    for k in 1..=3 {
        for flux in [
            FluxConvention::default(),
            FluxConvention::uniform(FluxChoice::PlusMinus),
        ] {
            let e: Vec<[f64; 2]> = [8, 16]
                .iter()
                .map(|&n| {
                    let op = library_operator(&model, Rect::square(0.0, 1.0), n, n, k, ORDER, flux);
                    [
                        l2_error(&op, &project_initial_vplus(&op, smooth).unwrap()),
                        l2_error(&op, &project_initial_plain(&op, smooth).unwrap()),
                    ]
                })
                .collect();
            out.push((k, true, e[0][0] / e[1][0]));
            out.push((k, false, e[0][1] / e[1][1]));
        }
    }
    out
}

/// Worst oracle discrepancy over every mesh up to `4 x 4` (even `nx` when
/// the model has an interface at the domain's centre), `k <= 2`, `M <= 3`
/// and all flux conventions.
pub fn oracle_sweep(model: &dyn CoefficientModel, domain: Rect, even_nx: bool) -> f64 {
    let mut worst = 0.0f64;
    let mut seed = 0;
    for nx in (1..=4).filter(|n| !even_nx || n % 2 == 0) {
        for ny in 1..=4 {
            for k in 0..=2 {
                for order in [0, 1] {
                    for flux in all_conventions() {
                        seed += 1;
                        let gaps = oracle_gap(model, domain, nx, ny, k, order, flux, seed);
                        worst = gaps.iter().fold(worst, |w, g| w.max(*g));
                    }
                }
            }
        }
    }
    worst
}

/// The three oracle models: smooth, interface, `x`-dependent.
pub fn oracle_models() -> Vec<(&'static str, Arc<dyn CoefficientModel>, Rect, bool)> {
    let t1 = build_preset("test1", 0.3).unwrap();
    let t2 = build_preset("test2", 0.3).unwrap();
    vec![
        ("smooth", t1.model, t1.domain, false),
        ("interface", t2.model, t2.domain, true),
        (
            "x-dependent",
            Arc::new(polynomial_model()),
            Rect::square(0.0, 1.0),
            false,
        ),
    ]
}
