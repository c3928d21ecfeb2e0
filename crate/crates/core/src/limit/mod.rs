//! The limit value `Λ = lim λ₁(p)^{1/p}`: its closed form in terms of the
//! inradius decomposition, the `∞`-quotient `max{‖∇u‖_∞, [u]_J} / ‖u‖_∞`,
//! and radial test functions that attain it.

mod extremal;
mod formula;
mod quotient;

pub use extremal::{
    build_cone, build_profile_z, build_staircase, cone_profile, sawtooth_profile, staircase_profile, ExtremalField,
};
pub use formula::{lambda_formula, CaseTag, LambdaCase};
pub use quotient::{inf_quotient, j_seminorm, sup_grad, verify_lower_bounds, InfQuotient, LowerBoundCheck};
