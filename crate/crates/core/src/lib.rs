//! Mirror-descent solvers for interacting free energies on discrete densities.
//!
//! The objective is
//!
//! ```text
//! F(p) = D(p || mu) + sum_i V_i p_i + 1/2 sum_ij p_i W_ij p_j
//! ```
//!
//! over strictly positive probability vectors `p`, with `D` one of the
//! Kullback-Leibler, reverse Kullback-Leibler or Hellinger divergences and
//! `W` a symmetric interaction kernel. Each (divergence, metric) pair induces
//! a monotone componentwise reparameterization `g = phi(p)` whose derivative
//! is the diagonal metric; the descent takes explicit Euler steps in `g` and
//! restores the unit-mass constraint through a scalar Lagrange constant.

pub mod descent;
pub mod divergence;
mod error;
pub mod grid;
pub mod io;
pub mod kernel;
pub mod normalize;
pub mod oracle;
pub mod reparam;
pub mod roots;
mod sum;

pub use descent::{baseline_md, run, stationarity_residual, step, EnergyTrace, IterateState};
pub use divergence::{DivergenceKind, MetricMode, Problem};
pub use error::{Error, Result};
pub use grid::{Density, Grid, Potential, ReferenceMeasure};
pub use kernel::InteractionKernel;
pub use normalize::{normalize_state, solve_c, Normalization};
pub use reparam::Reparameterization;
