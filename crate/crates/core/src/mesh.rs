//! Uniform rectangular meshes of the physical domain.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Axis-aligned rectangle `[lo[0], hi[0]] x [lo[1], hi[1]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub lo: [f64; 2],
    pub hi: [f64; 2],
}

impl Rect {
    pub fn new(lo: [f64; 2], hi: [f64; 2]) -> Self {
        Self { lo, hi }
    }

    pub fn square(lo: f64, hi: f64) -> Self {
        Self::new([lo, lo], [hi, hi])
    }

    pub fn width(&self, axis: usize) -> f64 {
        self.hi[axis] - self.lo[axis]
    }

    pub fn area(&self) -> f64 {
        self.width(0) * self.width(1)
    }

    pub fn contains(&self, x: [f64; 2]) -> bool {
        let tol = 1e-12 * self.width(0).max(self.width(1));
        (0..2).all(|a| x[a] >= self.lo[a] - tol && x[a] <= self.hi[a] + tol)
    }
}

/// A straight line across the domain on which the coefficient may jump.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum InterfaceLine {
    /// The line `x1 = c`.
    Vertical(f64),
    /// The line `x2 = c`.
    Horizontal(f64),
}

impl InterfaceLine {
    /// Axis normal to the line.
    pub fn normal_axis(&self) -> usize {
        match self {
            InterfaceLine::Vertical(_) => 0,
            InterfaceLine::Horizontal(_) => 1,
        }
    }

    pub fn position(&self) -> f64 {
        match *self {
            InterfaceLine::Vertical(c) | InterfaceLine::Horizontal(c) => c,
        }
    }

    /// Whether `x` lies on the line, to a relative tolerance.
    pub fn contains(&self, x: [f64; 2]) -> bool {
        let c = self.position();
        (x[self.normal_axis()] - c).abs() <= 1e-12 * c.abs().max(1.0)
    }
}

impl std::fmt::Display for InterfaceLine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            InterfaceLine::Vertical(c) => write!(f, "x1 = {c}"),
            InterfaceLine::Horizontal(c) => write!(f, "x2 = {c}"),
        }
    }
}

/// The four faces of a cell or of the domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Face {
    Left,
    Right,
    Bottom,
    Top,
}

impl Face {
    pub const ALL: [Face; 4] = [Face::Left, Face::Right, Face::Bottom, Face::Top];

    /// Axis of the outward normal.
    pub fn axis(self) -> usize {
        match self {
            Face::Left | Face::Right => 0,
            Face::Bottom | Face::Top => 1,
        }
    }

    /// Sign of the outward normal along [`Face::axis`].
    pub fn normal_sign(self) -> f64 {
        match self {
            Face::Left | Face::Bottom => -1.0,
            Face::Right | Face::Top => 1.0,
        }
    }

    /// Position in `Face::ALL`.
    pub fn slot(self) -> usize {
        match self {
            Face::Left => 0,
            Face::Right => 1,
            Face::Bottom => 2,
            Face::Top => 3,
        }
    }
}

/// Which one-sided limit of a piecewise quantity is meant on an edge.
/// `Minus` is the side with the lower coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Minus,
    Plus,
}

/// An edge of the mesh. Interior edges have both incident cells; boundary
/// edges have exactly one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    /// Axis of the edge normal (0: vertical edge, 1: horizontal edge).
    pub normal_axis: usize,
    /// Cell on the lower-coordinate side.
    pub minus: Option<usize>,
    /// Cell on the higher-coordinate side.
    pub plus: Option<usize>,
    /// Coordinate of the edge along its normal axis.
    pub position: f64,
    /// Extent of the edge along the tangential axis.
    pub span: [f64; 2],
}

impl Edge {
    pub fn is_boundary(&self) -> bool {
        self.minus.is_none() || self.plus.is_none()
    }

    /// Outward unit normal for a boundary edge, `None` for interior edges.
    pub fn outward_normal(&self) -> Option<[f64; 2]> {
        let sign = match (self.minus, self.plus) {
            (Some(_), None) => 1.0,
            (None, Some(_)) => -1.0,
            _ => return None,
        };
        let mut n = [0.0; 2];
        n[self.normal_axis] = sign;
        Some(n)
    }
}

/// Uniform `nx x ny` partition of a rectangle. Cells are numbered
/// `i + nx * j` with `i` along `x1` and `j` along `x2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh2D {
    domain: Rect,
    cells: [usize; 2],
    h: [f64; 2],
    interfaces: Vec<InterfaceLine>,
}

impl Mesh2D {
    /// Build the mesh; every interface line must coincide with a mesh line.
    pub fn new(domain: Rect, nx: usize, ny: usize, interfaces: &[InterfaceLine]) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return Err(Error::InvalidArgument(
                "a mesh needs at least one cell per direction".into(),
            ));
        }
        if !(domain.width(0) > 0.0 && domain.width(1) > 0.0) {
            return Err(Error::InvalidArgument("degenerate domain".into()));
        }
        let counts = [nx, ny];
        let h = [domain.width(0) / nx as f64, domain.width(1) / ny as f64];
        for line in interfaces {
            let axis = line.normal_axis();
            let offset = (line.position() - domain.lo[axis]) / h[axis];
            let nearest = offset.round();
            if (offset - nearest).abs() > 1e-9 || nearest < 0.0 || nearest > counts[axis] as f64 {
                return Err(Error::MisalignedInterface(line.to_string()));
            }
        }
        Ok(Self {
            domain,
            cells: counts,
            h,
            interfaces: interfaces.to_vec(),
        })
    }

    pub fn domain(&self) -> Rect {
        self.domain
    }

    pub fn nx(&self) -> usize {
        self.cells[0]
    }

    pub fn ny(&self) -> usize {
        self.cells[1]
    }

    pub fn n_cells(&self) -> usize {
        self.cells[0] * self.cells[1]
    }

    /// Cell sizes `(h_x, h_y)`.
    pub fn h(&self) -> [f64; 2] {
        self.h
    }

    pub fn interfaces(&self) -> &[InterfaceLine] {
        &self.interfaces
    }

    pub fn cell_index(&self, i: usize, j: usize) -> usize {
        i + self.cells[0] * j
    }

    pub fn cell_ij(&self, cell: usize) -> (usize, usize) {
        (cell % self.cells[0], cell / self.cells[0])
    }

    /// Lower-left and upper-right corners of a cell.
    pub fn cell_bounds(&self, cell: usize) -> Rect {
        let (i, j) = self.cell_ij(cell);
        let lo = [
            self.domain.lo[0] + i as f64 * self.h[0],
            self.domain.lo[1] + j as f64 * self.h[1],
        ];
        Rect::new(lo, [lo[0] + self.h[0], lo[1] + self.h[1]])
    }

    pub fn cell_center(&self, cell: usize) -> [f64; 2] {
        let b = self.cell_bounds(cell);
        [0.5 * (b.lo[0] + b.hi[0]), 0.5 * (b.lo[1] + b.hi[1])]
    }

    /// Map reference coordinates in `[-1, 1]^2` to the physical cell.
    #[inline]
    pub fn to_physical(&self, cell: usize, xi: [f64; 2]) -> [f64; 2] {
        let c = self.cell_center(cell);
        [
            c[0] + 0.5 * self.h[0] * xi[0],
            c[1] + 0.5 * self.h[1] * xi[1],
        ]
    }

    /// Map a physical point to reference coordinates of `cell`.
    pub fn to_reference(&self, cell: usize, x: [f64; 2]) -> [f64; 2] {
        let c = self.cell_center(cell);
        [
            2.0 * (x[0] - c[0]) / self.h[0],
            2.0 * (x[1] - c[1]) / self.h[1],
        ]
    }

    /// Neighbor across `face`, `None` on the domain boundary.
    pub fn neighbor(&self, cell: usize, face: Face) -> Option<usize> {
        let (i, j) = self.cell_ij(cell);
        match face {
            Face::Left => (i > 0).then(|| self.cell_index(i - 1, j)),
            Face::Right => (i + 1 < self.cells[0]).then(|| self.cell_index(i + 1, j)),
            Face::Bottom => (j > 0).then(|| self.cell_index(i, j - 1)),
            Face::Top => (j + 1 < self.cells[1]).then(|| self.cell_index(i, j + 1)),
        }
    }

    /// Cell containing `x`. Points on a mesh line are attributed to the cell
    /// on the requested side (default: the `Plus` side, clamped at the boundary).
    pub fn locate(&self, x: [f64; 2], side: Option<Side>) -> Result<usize> {
        if !self.domain.contains(x) {
            return Err(Error::OutsideDomain { x: x[0], y: x[1] });
        }
        let mut idx = [0usize; 2];
        for a in 0..2 {
            let s = (x[a] - self.domain.lo[a]) / self.h[a];
            let nearest = s.round();
            let on_line = (s - nearest).abs() < 1e-12 * self.cells[a] as f64;
            let raw = if on_line {
                match side {
                    Some(Side::Minus) => nearest - 1.0,
                    _ => nearest,
                }
            } else {
                s.floor()
            };
            idx[a] = raw.clamp(0.0, (self.cells[a] - 1) as f64) as usize;
        }
        Ok(self.cell_index(idx[0], idx[1]))
    }

    /// Enumerate every edge: vertical edges first (by column, then row), then
    /// horizontal edges.
    pub fn edges(&self) -> Vec<Edge> {
        let [nx, ny] = self.cells;
        let mut edges = Vec::with_capacity((nx + 1) * ny + nx * (ny + 1));
        for i in 0..=nx {
            for j in 0..ny {
                let lo = self.domain.lo[1] + j as f64 * self.h[1];
                edges.push(Edge {
                    normal_axis: 0,
                    minus: (i > 0).then(|| self.cell_index(i - 1, j)),
                    plus: (i < nx).then(|| self.cell_index(i, j)),
                    position: self.domain.lo[0] + i as f64 * self.h[0],
                    span: [lo, lo + self.h[1]],
                });
            }
        }
        for j in 0..=ny {
            for i in 0..nx {
                let lo = self.domain.lo[0] + i as f64 * self.h[0];
                edges.push(Edge {
                    normal_axis: 1,
                    minus: (j > 0).then(|| self.cell_index(i, j - 1)),
                    plus: (j < ny).then(|| self.cell_index(i, j)),
                    position: self.domain.lo[1] + j as f64 * self.h[1],
                    span: [lo, lo + self.h[0]],
                });
            }
        }
        edges
    }
}
