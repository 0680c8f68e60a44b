//! LDG discretisation of the stochastic Galerkin system
//! `v_tt = div(A S)`, `S = A grad v - (grad A) v` in weak form.
//!
//! The auxiliary field `S` and the acceleration are computed cell by cell;
//! one-sided traces are tabulated first so each cell only reads its
//! neighbours' face data.

use std::sync::Arc;

use rayon::prelude::*;

use crate::coeff::{face_reference_point, GalerkinCoeffField};
use crate::dg::{DgScalarField, DgVectorField, ElementTables, LocalBasis};
use crate::error::{Error, Result};
use crate::mesh::{Face, Mesh2D};

/// Which side each numerical flux takes along one direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FluxChoice {
    /// `v^ = v+`, `(A S)^ = A- S-`.
    #[default]
    MinusPlus,
    /// `v^ = v-`, `(A S)^ = A+ S+`.
    PlusMinus,
}

/// Flux choice per coordinate direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
pub struct FluxConvention {
    pub x: FluxChoice,
    pub y: FluxChoice,
}

impl FluxConvention {
    pub fn uniform(choice: FluxChoice) -> Self {
        Self {
            x: choice,
            y: choice,
        }
    }

    fn along(&self, axis: usize) -> FluxChoice {
        if axis == 0 {
            self.x
        } else {
            self.y
        }
    }
}

/// Where a face flux is read from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Source {
    Own,
    Neighbor(usize),
    Boundary,
}

fn opposite(face: Face) -> Face {
    match face {
        Face::Left => Face::Right,
        Face::Right => Face::Left,
        Face::Bottom => Face::Top,
        Face::Top => Face::Bottom,
    }
}

/// Dirichlet data for the scalar unknown, as gPC modal values on the
/// boundary.
#[derive(Clone, Default)]
pub enum BoundaryData {
    #[default]
    Homogeneous,
    /// `g(x, t) = tau(t) g(x)` with `g` tabulated by [`BoundaryData::separable`].
    Separable {
        time: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
        table: Vec<f64>,
    },
    /// Modal values `g_m(x, t)` seen from boundary cell `cell`, written into
    /// the output slice.
    Function(Arc<dyn Fn(usize, [f64; 2], f64, &mut [f64]) + Send + Sync>),
}

impl std::fmt::Debug for BoundaryData {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Homogeneous => write!(f, "Homogeneous"),
            Self::Separable { .. } => write!(f, "Separable"),
            Self::Function(_) => write!(f, "Function"),
        }
    }
}

impl BoundaryData {
    /// Tabulate the spatial factor of a separable boundary condition on the
    /// boundary faces of `op`'s mesh.
    pub fn separable(
        op: &LdgOperator,
        time: impl Fn(f64) -> f64 + Send + Sync + 'static,
        spatial: impl Fn(usize, [f64; 2], &mut [f64]),
    ) -> Self {
        let table = op.tabulate_boundary(spatial);
        Self::Separable {
            time: Arc::new(time),
            table,
        }
    }

    pub fn is_homogeneous(&self) -> bool {
        matches!(self, Self::Homogeneous)
    }
}

/// The discrete LDG operators on a fixed mesh and coefficient field.
#[derive(Debug, Clone)]
pub struct LdgOperator {
    mesh: Mesh2D,
    basis: LocalBasis,
    tables: ElementTables,
    coeffs: Arc<GalerkinCoeffField>,
    flux: FluxConvention,
    /// Neighbour of every `(cell, face)`, `4 * cell + face.slot()`.
    neighbors: Vec<Option<usize>>,
}

impl LdgOperator {
    pub fn new(
        mesh: Mesh2D,
        basis: LocalBasis,
        coeffs: Arc<GalerkinCoeffField>,
        flux: FluxConvention,
    ) -> Result<Self> {
        if coeffs.n_cells() != mesh.n_cells() || coeffs.points_per_dim() != basis.points_per_dim() {
            return Err(Error::ShapeMismatch(
                "coefficient field was assembled on a different mesh or rule".into(),
            ));
        }
        let tables = ElementTables::new(&basis, &mesh);
        let neighbors = (0..mesh.n_cells())
            .flat_map(|c| Face::ALL.map(|f| mesh.neighbor(c, f)))
            .collect();
        Ok(Self {
            mesh,
            basis,
            tables,
            coeffs,
            flux,
            neighbors,
        })
    }

    pub fn mesh(&self) -> &Mesh2D {
        &self.mesh
    }

    pub fn basis(&self) -> &LocalBasis {
        &self.basis
    }

    pub fn tables(&self) -> &ElementTables {
        &self.tables
    }

    pub fn coefficients(&self) -> &GalerkinCoeffField {
        &self.coeffs
    }

    pub fn flux(&self) -> FluxConvention {
        self.flux
    }

    pub fn modes(&self) -> usize {
        self.coeffs.modes()
    }

    pub fn zero_scalar(&self) -> DgScalarField {
        DgScalarField::zeros(self.mesh.n_cells(), self.modes(), self.basis.len())
    }

    pub fn zero_vector(&self) -> DgVectorField {
        DgVectorField::zeros(self.mesh.n_cells(), self.modes(), self.basis.len())
    }

    fn check(&self, field: &DgScalarField) -> Result<()> {
        if field.shape() != (self.mesh.n_cells(), self.modes(), self.basis.len()) {
            return Err(Error::ShapeMismatch(format!(
                "field shape {:?} does not match operator ({}, {}, {})",
                field.shape(),
                self.mesh.n_cells(),
                self.modes(),
                self.basis.len()
            )));
        }
        Ok(())
    }

    #[inline]
    fn neighbor(&self, cell: usize, face: Face) -> Option<usize> {
        self.neighbors[4 * cell + face.slot()]
    }

    /// Source of `v^` on `face` of `cell`.
    fn v_source(&self, cell: usize, face: Face) -> Source {
        let Some(nb) = self.neighbor(cell, face) else {
            return Source::Boundary;
        };
        let upper = face.normal_sign() > 0.0;
        match (self.flux.along(face.axis()), upper) {
            (FluxChoice::MinusPlus, true) | (FluxChoice::PlusMinus, false) => Source::Neighbor(nb),
            _ => Source::Own,
        }
    }

    /// Source of `(A S)^` on `face` of `cell`; boundary faces use the interior trace.
    fn flux_source(&self, cell: usize, face: Face) -> Source {
        let Some(nb) = self.neighbor(cell, face) else {
            return Source::Own;
        };
        let upper = face.normal_sign() > 0.0;
        match (self.flux.along(face.axis()), upper) {
            (FluxChoice::MinusPlus, true) | (FluxChoice::PlusMinus, false) => Source::Own,
            _ => Source::Neighbor(nb),
        }
    }

    #[inline]
    fn trace_offset(&self, cell: usize, face: Face) -> usize {
        (4 * cell + face.slot()) * self.tables.nq * self.modes()
    }

    /// Modal values of `g` at the edge points of every boundary face, laid
    /// out like the trace tables (zero on interior faces).
    pub fn tabulate_boundary(&self, mut g: impl FnMut(usize, [f64; 2], &mut [f64])) -> Vec<f64> {
        let m = self.modes();
        let nq = self.tables.nq;
        let mut table = vec![0.0; self.mesh.n_cells() * 4 * nq * m];
        for cell in 0..self.mesh.n_cells() {
            for face in Face::ALL {
                if self.neighbor(cell, face).is_some() {
                    continue;
                }
                let off = self.trace_offset(cell, face);
                for (s, &node) in self.basis.rule().nodes.iter().enumerate() {
                    let x = self
                        .mesh
                        .to_physical(cell, face_reference_point(face, node));
                    g(cell, x, &mut table[off + s * m..off + (s + 1) * m]);
                }
            }
        }
        table
    }

    /// Boundary table at time `t`, `None` for homogeneous data.
    pub fn boundary_values(&self, data: &BoundaryData, t: f64) -> Option<Vec<f64>> {
        match data {
            BoundaryData::Homogeneous => None,
            BoundaryData::Separable { time, table } => {
                let tau = time(t);
                Some(table.iter().map(|g| tau * g).collect())
            }
            BoundaryData::Function(f) => Some(self.tabulate_boundary(|c, x, out| f(c, x, t, out))),
        }
    }

    /// One-sided traces of every cell on every face: `[(cell, face)][s][m]`.
    fn face_traces(&self, field: &DgScalarField) -> Vec<f64> {
        let m = self.modes();
        let nq = self.tables.nq;
        let nl = self.basis.len();
        let per_cell = 4 * nq * m;
        let mut out = vec![0.0; self.mesh.n_cells() * per_cell];
        out.par_chunks_mut(per_cell)
            .enumerate()
            .for_each(|(cell, chunk)| {
                let block = field.cell(cell);
                for (f, table) in self.tables.face_phi.iter().enumerate() {
                    for s in 0..nq {
                        let dst = &mut chunk[(f * nq + s) * m..(f * nq + s + 1) * m];
                        for (mode, d) in dst.iter_mut().enumerate() {
                            let row = &block[mode * nl..(mode + 1) * nl];
                            *d = (0..nl).map(|j| row[j] * table[j * nq + s]).sum();
                        }
                    }
                }
            });
        out
    }

    /// Values of a cell's modes at every volume point: `[q][m]`.
    fn volume_values(&self, block: &[f64], out: &mut [f64]) {
        let m = self.modes();
        let nl = self.basis.len();
        let nq2 = self.tables.n_volume_points();
        out.iter_mut().for_each(|v| *v = 0.0);
        for mode in 0..m {
            let row = &block[mode * nl..(mode + 1) * nl];
            for (j, c) in row.iter().enumerate() {
                if *c == 0.0 {
                    continue;
                }
                let phi = &self.tables.phi[j * nq2..(j + 1) * nq2];
                for q in 0..nq2 {
                    out[q * m + mode] += c * phi[q];
                }
            }
        }
    }

    /// The auxiliary variable `S = (S^1, S^2)` for `v` with Dirichlet values
    /// `boundary` (from [`LdgOperator::boundary_values`]; `None` is zero data).
    pub fn compute_s(&self, v: &DgScalarField, boundary: Option<&[f64]>) -> Result<DgVectorField> {
        self.check(v)?;
        let m = self.modes();
        let mm = m * m;
        let nl = self.basis.len();
        let nq = self.tables.nq;
        let nq2 = nq * nq;
        let traces = self.face_traces(v);
        let mut s1 = self.zero_scalar();
        let mut s2 = self.zero_scalar();
        let block = m * nl;
        s1.as_mut_slice()
            .par_chunks_mut(block)
            .zip(s2.as_mut_slice().par_chunks_mut(block))
            .enumerate()
            .for_each(|(cell, (out1, out2))| {
                let coeffs = self.coeffs.cell(cell);
                let mut vals = vec![0.0; nq2 * m];
                self.volume_values(v.cell(cell), &mut vals);
                let mut av = vec![0.0; m];
                let mut gv = [vec![0.0; m], vec![0.0; m]];
                for q in 0..nq2 {
                    let vq = &vals[q * m..(q + 1) * m];
                    matvec(coeffs.volume.get(q, mm), vq, &mut av);
                    if let Some(grad) = &coeffs.gradient {
                        matvec(grad[0].get(q, mm), vq, &mut gv[0]);
                        matvec(grad[1].get(q, mm), vq, &mut gv[1]);
                    }
                    for p in 0..nl {
                        let wdx = self.tables.w_dx[p * nq2 + q];
                        let wdy = self.tables.w_dy[p * nq2 + q];
                        let wphi = self.tables.w_phi[p * nq2 + q];
                        for k in 0..m {
                            out1[k * nl + p] -= wdx * av[k];
                            out2[k * nl + p] -= wdy * av[k];
                        }
                        if coeffs.gradient.is_some() {
                            for k in 0..m {
                                out1[k * nl + p] -= wphi * gv[0][k];
                                out2[k * nl + p] -= wphi * gv[1][k];
                            }
                        }
                    }
                }
                let mut vhat = vec![0.0; m];
                for face in Face::ALL {
                    let f = face.slot();
                    let sign = face.normal_sign();
                    let out: &mut [f64] = if face.axis() == 0 { out1 } else { out2 };
                    for s in 0..nq {
                        match self.v_source(cell, face) {
                            Source::Own => {
                                let o = self.trace_offset(cell, face) + s * m;
                                vhat.copy_from_slice(&traces[o..o + m]);
                            }
                            Source::Neighbor(nb) => {
                                let o = self.trace_offset(nb, opposite(face)) + s * m;
                                vhat.copy_from_slice(&traces[o..o + m]);
                            }
                            Source::Boundary => match boundary {
                                Some(g) => {
                                    let o = self.trace_offset(cell, face) + s * m;
                                    vhat.copy_from_slice(&g[o..o + m]);
                                }
                                None => vhat.iter_mut().for_each(|x| *x = 0.0),
                            },
                        }
                        matvec(coeffs.faces[f].get(s, mm), &vhat, &mut av);
                        for p in 0..nl {
                            let w = sign * self.tables.face_w_phi[f][p * nq + s];
                            for k in 0..m {
                                out[k * nl + p] += w * av[k];
                            }
                        }
                    }
                }
            });
        DgVectorField::new(s1, s2)
    }

    /// The acceleration `div(A S)` in weak form (the mass matrix is the identity).
    pub fn compute_acceleration(&self, s: &DgVectorField) -> Result<DgScalarField> {
        self.check(&s.components[0])?;
        self.check(&s.components[1])?;
        let m = self.modes();
        let mm = m * m;
        let nl = self.basis.len();
        let nq = self.tables.nq;
        let nq2 = nq * nq;
        // A_K S_K on every face, component normal to the face
        let raw = [
            self.face_traces(&s.components[0]),
            self.face_traces(&s.components[1]),
        ];
        let per_cell = 4 * nq * m;
        let mut flux = vec![0.0; self.mesh.n_cells() * per_cell];
        flux.par_chunks_mut(per_cell)
            .enumerate()
            .for_each(|(cell, chunk)| {
                let coeffs = self.coeffs.cell(cell);
                for face in Face::ALL {
                    let f = face.slot();
                    let src = &raw[face.axis()];
                    for q in 0..nq {
                        let o = self.trace_offset(cell, face) + q * m;
                        matvec(
                            coeffs.faces[f].get(q, mm),
                            &src[o..o + m],
                            &mut chunk[(f * nq + q) * m..(f * nq + q + 1) * m],
                        );
                    }
                }
            });
        let mut acc = self.zero_scalar();
        acc.as_mut_slice()
            .par_chunks_mut(m * nl)
            .enumerate()
            .for_each(|(cell, out)| {
                let coeffs = self.coeffs.cell(cell);
                let mut vals = [vec![0.0; nq2 * m], vec![0.0; nq2 * m]];
                self.volume_values(s.components[0].cell(cell), &mut vals[0]);
                self.volume_values(s.components[1].cell(cell), &mut vals[1]);
                let mut a1 = vec![0.0; m];
                let mut a2 = vec![0.0; m];
                for q in 0..nq2 {
                    let a = coeffs.volume.get(q, mm);
                    matvec(a, &vals[0][q * m..(q + 1) * m], &mut a1);
                    matvec(a, &vals[1][q * m..(q + 1) * m], &mut a2);
                    for p in 0..nl {
                        let wdx = self.tables.w_dx[p * nq2 + q];
                        let wdy = self.tables.w_dy[p * nq2 + q];
                        for k in 0..m {
                            out[k * nl + p] -= wdx * a1[k] + wdy * a2[k];
                        }
                    }
                }
                for face in Face::ALL {
                    let f = face.slot();
                    let sign = face.normal_sign();
                    let off = match self.flux_source(cell, face) {
                        Source::Neighbor(nb) => self.trace_offset(nb, opposite(face)),
                        _ => self.trace_offset(cell, face),
                    };
                    for s in 0..nq {
                        let fl = &flux[off + s * m..off + (s + 1) * m];
                        for p in 0..nl {
                            let w = sign * self.tables.face_w_phi[f][p * nq + s];
                            for k in 0..m {
                                out[k * nl + p] += w * fl[k];
                            }
                        }
                    }
                }
            });
        Ok(acc)
    }

    /// `div(A S(v))` for Dirichlet values `boundary`.
    pub fn apply(&self, v: &DgScalarField, boundary: Option<&[f64]>) -> Result<DgScalarField> {
        let s = self.compute_s(v, boundary)?;
        self.compute_acceleration(&s)
    }
}

#[inline]
fn matvec(a: &[f64], x: &[f64], out: &mut [f64]) {
    let m = x.len();
    for (k, o) in out.iter_mut().enumerate() {
        let row = &a[k * m..(k + 1) * m];
        *o = row.iter().zip(x).map(|(r, v)| r * v).sum();
    }
}
