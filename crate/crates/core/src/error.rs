use alloc::boxed::Box;
use alloc::string::String;

use crate::eigensolver::EigenReport;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("invalid kernel: {0}")]
    InvalidKernel(String),

    /// Grid spacing too large for the kernel support or the inradius.
    #[error("grid spacing h = {h} exceeds the limit {limit} ({what})")]
    ResolutionTooCoarse { h: f64, limit: f64, what: &'static str },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("field does not match the grid: {0}")]
    InvalidField(String),

    /// Quotient of a field that vanishes on the whole domain.
    #[error("quotient undefined for a field that vanishes in the domain")]
    UndefinedQuotient,

    #[error("exponent p = {0} is not supported (need p >= 2)")]
    UnsupportedExponent(f64),

    /// The solver hit its iteration budget; the best iterate is attached.
    #[error(
        "solver did not converge after {} iterations (lambda = {:e}, gradient norm = {:e})",
        .0.iters, .0.lambda1, .0.grad_norm
    )]
    NotConverged(Box<EigenReport>),
}
