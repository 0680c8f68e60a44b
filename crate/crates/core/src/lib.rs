//! Stochastic Galerkin / local discontinuous Galerkin solver for the
//! two-dimensional wave equation `u_tt = div(a^2 grad u)` with a random
//! wave speed `a(x, y)`.

pub mod coeff;
pub mod config;
pub mod dg;
pub mod diagnostics;
pub mod error;
pub mod gpc;
pub mod ldg;
pub mod leapfrog;
pub mod legendre;
pub mod mesh;
pub mod presets;
pub mod projection;
pub mod quadrature;
pub mod runner;
pub mod simulation;
pub mod studies;

pub use error::{Error, Result};
