use crate::discretize::{Grid, ScalarField};
use crate::num::{abs, sqrt};
use crate::{Error, Result};

use super::formula::LambdaCase;

/// Components of `max{‖∇u‖_∞, [u]_J} / ‖u‖_∞`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InfQuotient {
    pub sup_grad: f64,
    pub j_seminorm: f64,
    pub sup_norm: f64,
    pub quotient: f64,
}

/// `[u]_J`: the largest `|u(x) - u(y)|` over node pairs of `Ω_J` with
/// `|x - y| <= R_J`. Pairs reaching into the band, where `u = 0`, count.
pub fn j_seminorm(field: &ScalarField, grid: &Grid) -> f64 {
    let u = field.values();
    let shifts = grid.support_offsets();
    let mut m = 0.0f64;
    // every admissible pair has at least one endpoint in Ω unless both vanish
    for &x in grid.interior() {
        for &(_, _, s) in &shifts {
            let y = (x as isize + s) as usize;
            m = m.max(abs(u[x] - u[y]));
        }
    }
    m
}

/// `‖∇u‖_∞` by forward differences over every cell touching `Ω`.
pub fn sup_grad(field: &ScalarField, grid: &Grid) -> f64 {
    let u = field.values();
    let h = grid.h();
    let nx = grid.shape().0;
    let two_d = grid.dim() == 2;
    grid.cells().iter().fold(0.0f64, |m, &c| {
        let gx = (u[c + 1] - u[c]) / h;
        let gy = if two_d { (u[c + nx] - u[c]) / h } else { 0.0 };
        m.max(sqrt(gx * gx + gy * gy))
    })
}

pub fn inf_quotient(field: &ScalarField, grid: &Grid) -> Result<InfQuotient> {
    let sup_norm = field.sup_norm();
    if sup_norm == 0.0 {
        return Err(Error::UndefinedQuotient);
    }
    let sup_grad = sup_grad(field, grid);
    let j_seminorm = j_seminorm(field, grid);
    Ok(InfQuotient { sup_grad, j_seminorm, sup_norm, quotient: sup_grad.max(j_seminorm) / sup_norm })
}

/// Outcome of comparing a field's quotient with `Λ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LowerBoundCheck {
    pub quotient: InfQuotient,
    pub lambda: f64,
    /// `quotient - Λ`
    pub margin: f64,
    /// `ε_grid = 2·Lip·h / ‖u‖_∞`
    pub tolerance: f64,
    pub passed: bool,
}

/// Checks `quotient(u) >= Λ - ε_grid`. `lipschitz` is the analytic
/// Lipschitz constant of `u` when known; otherwise the discrete sup of the
/// gradient stands in.
pub fn verify_lower_bounds(
    field: &ScalarField,
    grid: &Grid,
    case: &LambdaCase,
    lipschitz: Option<f64>,
) -> Result<LowerBoundCheck> {
    let q = inf_quotient(field, grid)?;
    let lip = lipschitz.unwrap_or(q.sup_grad);
    let tolerance = 2.0 * lip * grid.h() / q.sup_norm;
    let margin = q.quotient - case.lambda;
    Ok(LowerBoundCheck { quotient: q, lambda: case.lambda, margin, tolerance, passed: margin >= -tolerance })
}
