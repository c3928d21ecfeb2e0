//! Uniform lattices over `Ω_J`, nodal fields with zero exterior values, and
//! the discrete energy `H_{J,p}(u, u)` with its gradient.

mod energy;
mod grid;

pub use energy::{EnergyModel, EnergyParts};
pub use grid::{Grid, NodeKind, ScalarField, MIN_STEPS_PER_INRADIUS};
