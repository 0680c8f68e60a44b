//! Projections of initial data into the DG space.
//!
//! [`project_initial_vplus`] is the flux-adapted projection used for the
//! initial displacement: on each cell it matches `A`-weighted moments against
//! `Q^{k-1}`, moments against `P^{k-1}` on the two faces where the scheme
//! reads the cell's own trace, and the value at the corner they share. For a
//! tensor-product function and uniform `A` this is the tensor product of the
//! one-dimensional flux projections.
//!
//! [`project_initial_plain`] is the `A`-weighted `L^2` projection used for the
//! initial velocity.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::coeff::{face_reference_point, CellCoefficients};
use crate::dg::DgScalarField;
use crate::error::{Error, Result};
use crate::ldg::{FluxChoice, LdgOperator};
use crate::mesh::Face;

/// Modal values of a function at `x` as seen from inside `cell`, written
/// into the output slice (length `M`). The cell disambiguates points on
/// interfaces.
pub trait ModalFn: Fn(usize, [f64; 2], &mut [f64]) + Sync {}
impl<T: Fn(usize, [f64; 2], &mut [f64]) + Sync> ModalFn for T {}

struct FluxFaces {
    x: Face,
    y: Face,
}

fn flux_faces(op: &LdgOperator) -> FluxFaces {
    let flux = op.flux();
    FluxFaces {
        x: match flux.x {
            FluxChoice::MinusPlus => Face::Left,
            FluxChoice::PlusMinus => Face::Right,
        },
        y: match flux.y {
            FluxChoice::MinusPlus => Face::Bottom,
            FluxChoice::PlusMinus => Face::Top,
        },
    }
}

/// Rows of the per-mode constraint system that do not involve `A`:
/// face moments and the corner value, `(k+1)^2 - k^2` rows by `n_local`.
struct TraceRows {
    /// Row-major `rows x n_local`.
    matrix: Vec<f64>,
    rows: usize,
}

fn trace_rows(op: &LdgOperator, faces: &FluxFaces) -> TraceRows {
    let basis = op.basis();
    let t = op.tables();
    let k = basis.degree();
    let nl = basis.len();
    let nq = t.nq;
    let rule = basis.rule();
    let rows = 2 * k + 1;
    let mut matrix = vec![0.0; rows * nl];
    for (slot, face) in [faces.x, faces.y].into_iter().enumerate() {
        let fi = face.slot();
        for b in 0..k {
            let r = slot * k + b;
            for s in 0..nq {
                let (lb, _) = basis.line_values(rule.nodes[s]);
                let w = rule.weights[s] * lb[b];
                for j in 0..nl {
                    matrix[r * nl + j] += w * t.face_phi[fi][j * nq + s];
                }
            }
        }
    }
    let corner = corner_reference(faces);
    let phys = crate::dg::physical_values(basis, op.mesh(), corner);
    matrix[(rows - 1) * nl..].copy_from_slice(&phys);
    TraceRows { matrix, rows }
}

fn corner_reference(faces: &FluxFaces) -> [f64; 2] {
    [
        if faces.x == Face::Left { -1.0 } else { 1.0 },
        if faces.y == Face::Bottom { -1.0 } else { 1.0 },
    ]
}

/// Right-hand sides of the trace rows for every mode, `[row][m]`.
fn trace_rhs(op: &LdgOperator, faces: &FluxFaces, cell: usize, u: &impl ModalFn) -> Vec<f64> {
    let basis = op.basis();
    let k = basis.degree();
    let m = op.modes();
    let rule = basis.rule();
    let rows = 2 * k + 1;
    let mut rhs = vec![0.0; rows * m];
    let mut vals = vec![0.0; m];
    for (slot, face) in [faces.x, faces.y].into_iter().enumerate() {
        for (s, &node) in rule.nodes.iter().enumerate() {
            let x = op
                .mesh()
                .to_physical(cell, face_reference_point(face, node));
            u(cell, x, &mut vals);
            let (lb, _) = basis.line_values(node);
            for b in 0..k {
                let w = rule.weights[s] * lb[b];
                for (mode, v) in vals.iter().enumerate() {
                    rhs[(slot * k + b) * m + mode] += w * v;
                }
            }
        }
    }
    u(
        cell,
        op.mesh().to_physical(cell, corner_reference(faces)),
        &mut vals,
    );
    rhs[(rows - 1) * m..].copy_from_slice(&vals);
    rhs
}

fn volume_points(op: &LdgOperator, cell: usize) -> Vec<[f64; 2]> {
    let nodes = &op.basis().rule().nodes;
    let nq = nodes.len();
    (0..nq * nq)
        .map(|q| op.mesh().to_physical(cell, [nodes[q % nq], nodes[q / nq]]))
        .collect()
}

fn lower_indices(op: &LdgOperator) -> Vec<usize> {
    let basis = op.basis();
    let k = basis.degree();
    (0..basis.len())
        .filter(|&j| {
            let (a, b) = basis.degrees(j);
            a < k && b < k
        })
        .collect()
}

fn uniform(c: &CellCoefficients) -> bool {
    c.volume.is_uniform()
}

/// Flux-adapted projection of the initial displacement with modal values `u`.
pub fn project_initial_vplus(op: &LdgOperator, u: impl ModalFn) -> Result<DgScalarField> {
    let m = op.modes();
    let mm = m * m;
    let nl = op.basis().len();
    let nq2 = op.tables().n_volume_points();
    let faces = flux_faces(op);
    let trace = trace_rows(op, &faces);
    let lower = lower_indices(op);
    debug_assert_eq!(lower.len() + trace.rows, nl);

    // with uniform A the volume rows reduce to plain moments, so every mode
    // shares one small matrix
    let mut shared = DMatrix::zeros(nl, nl);
    for (r, &p) in lower.iter().enumerate() {
        shared[(r, p)] = 1.0;
    }
    for r in 0..trace.rows {
        for j in 0..nl {
            shared[(lower.len() + r, j)] = trace.matrix[r * nl + j];
        }
    }
    let shared_lu = shared.lu();

    let mut out = op.zero_scalar();
    let t = op.tables();
    out.as_mut_slice()
        .par_chunks_mut(m * nl)
        .enumerate()
        .try_for_each(|(cell, block)| -> Result<()> {
            let coeffs = op.coefficients().cell(cell);
            let points = volume_points(op, cell);
            let mut uq = vec![0.0; nq2 * m];
            for (q, x) in points.iter().enumerate() {
                u(cell, *x, &mut uq[q * m..(q + 1) * m]);
            }
            let trhs = trace_rhs(op, &faces, cell, &u);
            if uniform(coeffs) {
                let mut rhs = DVector::zeros(nl);
                for mode in 0..m {
                    for (r, &p) in lower.iter().enumerate() {
                        rhs[r] = (0..nq2)
                            .map(|q| t.w_phi[p * nq2 + q] * uq[q * m + mode])
                            .sum();
                    }
                    for r in 0..trace.rows {
                        rhs[lower.len() + r] = trhs[r * m + mode];
                    }
                    let sol = shared_lu
                        .solve(&rhs)
                        .ok_or(Error::SingularLocalSystem { cell })?;
                    block[mode * nl..(mode + 1) * nl].copy_from_slice(sol.as_slice());
                }
                return Ok(());
            }
            let n = m * nl;
            let mut mat = DMatrix::zeros(n, n);
            let mut rhs = DVector::zeros(n);
            let mut row = 0;
            for k in 0..m {
                for &p in &lower {
                    for q in 0..nq2 {
                        let a = coeffs.volume.get(q, mm);
                        let wp = t.w_phi[p * nq2 + q];
                        for mode in 0..m {
                            let akm = a[k * m + mode] * wp;
                            rhs[row] += akm * uq[q * m + mode];
                            for j in 0..nl {
                                mat[(row, mode * nl + j)] += akm * t.phi[j * nq2 + q];
                            }
                        }
                    }
                    row += 1;
                }
            }
            for mode in 0..m {
                for r in 0..trace.rows {
                    for j in 0..nl {
                        mat[(row, mode * nl + j)] = trace.matrix[r * nl + j];
                    }
                    rhs[row] = trhs[r * m + mode];
                    row += 1;
                }
            }
            let sol = mat
                .lu()
                .solve(&rhs)
                .ok_or(Error::SingularLocalSystem { cell })?;
            block.copy_from_slice(sol.as_slice());
            Ok(())
        })?;
    Ok(out)
}

/// `A`-weighted `L^2` projection: `int A (P u - u) psi = 0` for all `psi` in `Q^k`.
pub fn project_initial_plain(op: &LdgOperator, u: impl ModalFn) -> Result<DgScalarField> {
    let m = op.modes();
    let mm = m * m;
    let nl = op.basis().len();
    let nq2 = op.tables().n_volume_points();
    let t = op.tables();
    let mut out = op.zero_scalar();
    out.as_mut_slice()
        .par_chunks_mut(m * nl)
        .enumerate()
        .try_for_each(|(cell, block)| -> Result<()> {
            let coeffs = op.coefficients().cell(cell);
            let points = volume_points(op, cell);
            let mut uq = vec![0.0; nq2 * m];
            for (q, x) in points.iter().enumerate() {
                u(cell, *x, &mut uq[q * m..(q + 1) * m]);
            }
            if uniform(coeffs) {
                for mode in 0..m {
                    for p in 0..nl {
                        block[mode * nl + p] = (0..nq2)
                            .map(|q| t.w_phi[p * nq2 + q] * uq[q * m + mode])
                            .sum();
                    }
                }
                return Ok(());
            }
            let n = m * nl;
            let mut mat = DMatrix::zeros(n, n);
            let mut rhs = DVector::zeros(n);
            for q in 0..nq2 {
                let a = coeffs.volume.get(q, mm);
                for k in 0..m {
                    for p in 0..nl {
                        let wp = t.w_phi[p * nq2 + q];
                        let row = k * nl + p;
                        for mode in 0..m {
                            let akm = a[k * m + mode] * wp;
                            rhs[row] += akm * uq[q * m + mode];
                            for j in 0..nl {
                                mat[(row, mode * nl + j)] += akm * t.phi[j * nq2 + q];
                            }
                        }
                    }
                }
            }
            let sol = mat
                .cholesky()
                .ok_or(Error::SingularLocalSystem { cell })?
                .solve(&rhs);
            block.copy_from_slice(sol.as_slice());
            Ok(())
        })?;
    Ok(out)
}
