//! Numerical laboratory for the Dirichlet eigenvalue problem of the mixed
//! local/nonlocal p-Laplacian
//!
//! ```text
//!     -α Δ_p u - β Δ_{J,p} u = λ |u|^{p-2} u   in Ω,      u = 0 in ℝ^N \ Ω,
//! ```
//!
//! where `Δ_{J,p}` is the zero-order nonlocal operator built from a radial,
//! compactly supported kernel `J`.
//!
//! The crate computes the first eigenpair on uniform lattices (1D and 2D),
//! tracks `λ₁(p)^{1/p}` as `p` grows, evaluates the geometric limit value `Λ`
//! from the inradius of the domain and the support radius of the kernel, and
//! checks discrete residuals of the limit equation `max{M₁(u), M₂(u)} = 0`.
//!
//! Everything here is pure computation on in-memory data and only needs
//! `alloc`. File formats, configuration and the command line live in the
//! `plapmix` crate.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod discretize;
pub mod eigensolver;
mod error;
pub mod geometry;
pub mod kernel;
pub mod limit;
pub mod num;
pub mod viscosity;

pub use discretize::{EnergyModel, EnergyParts, Grid, NodeKind, ScalarField};
pub use eigensolver::{solve_first, solve_first_from, sweep_p, EigenReport, SolverOptions};
pub use error::{Error, Result};
pub use geometry::{decompose, Domain, InradiusData, Point};
pub use kernel::{Kernel, Profile, WeightTable};
pub use limit::{lambda_formula, CaseTag, InfQuotient, LambdaCase};
pub use num::LogValue;
