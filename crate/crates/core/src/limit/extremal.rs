use alloc::format;

use crate::discretize::{Grid, ScalarField};
use crate::geometry::{dist, Point};
use crate::num::{abs, floor};
use crate::{Error, Result};

/// A radial test function sampled on a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtremalField {
    pub field: ScalarField,
    /// Analytic Lipschitz constant of the profile.
    pub lipschitz: f64,
    /// `x₀` is not at distance `R_Ω` from `∂Ω`; the closed-form quotients
    /// then need not hold.
    pub off_center: bool,
}

/// `(R_Ω - t)₊ / R_Ω`
pub fn cone_profile(t: f64, r_omega: f64) -> f64 {
    ((r_omega - t) / r_omega).max(0.0)
}

/// Steps down by `1/(K+1)` over each `[iR_J, iR_J + b]` and stays flat on
/// `[iR_J + b, (i+1)R_J]`; zero from `R_Ω` on.
pub fn staircase_profile(t: f64, r_j: f64, k_omega: u32, b: f64) -> f64 {
    let k = k_omega as f64;
    let r_omega = k * r_j + b;
    if t >= r_omega {
        return 0.0;
    }
    let t = t.max(0.0);
    let i = floor(t / r_j).min(k);
    let s = t - i * r_j;
    let step = 1.0 / (k + 1.0);
    if s <= b {
        1.0 - i * step - s * step / b
    } else {
        1.0 - (i + 1.0) * step
    }
}

/// Drops by `b/(K+b)` with slope `1/(K+b)` on each `[iR_J, iR_J + b]` and by
/// the remaining `(1-b)/(K+b)` across `[iR_J + b, (i+1)R_J]`.
pub fn sawtooth_profile(t: f64, r_j: f64, k_omega: u32, b: f64) -> f64 {
    let k = k_omega as f64;
    let r_omega = k * r_j + b;
    if t >= r_omega {
        return 0.0;
    }
    let t = t.max(0.0);
    let i = floor(t / r_j).min(k);
    let s = t - i * r_j;
    let y_i = 1.0 - i / (k + b);
    if s <= b {
        y_i - s / (k + b)
    } else {
        y_i - b / (k + b) - (1.0 - b) * (s - b) / ((k + b) * (r_j - b))
    }
}

fn sample(grid: &Grid, x0: Point, r_omega: f64, profile: impl Fn(f64) -> f64) -> (ScalarField, bool) {
    let field = ScalarField::from_fn(grid, |x| profile(dist(x, x0)));
    let depth = grid.domain().boundary_distance(x0);
    let off_center = !grid.domain().contains(x0) || abs(depth - r_omega) > 1e-6 * r_omega.max(grid.h());
    (field, off_center)
}

fn check_radius(r_omega: f64) -> Result<()> {
    if !(r_omega > 0.0 && r_omega.is_finite()) {
        return Err(Error::InvalidParameter(format!("R_Ω must be positive, got {r_omega}")));
    }
    Ok(())
}

/// `v(x) = (R_Ω - |x - x₀|)₊ / R_Ω`
pub fn build_cone(grid: &Grid, x0: Point, r_omega: f64) -> Result<ExtremalField> {
    check_radius(r_omega)?;
    let (field, off_center) = sample(grid, x0, r_omega, |t| cone_profile(t, r_omega));
    Ok(ExtremalField { field, lipschitz: 1.0 / r_omega, off_center })
}

/// `w(x) = staircase(|x - x₀|)`; needs `K > 0` and `b > 0`.
pub fn build_staircase(grid: &Grid, x0: Point, r_omega: f64, r_j: f64, k_omega: u32, b: f64) -> Result<ExtremalField> {
    check_radius(r_omega)?;
    if k_omega == 0 || !(b > 0.0 && b < r_j) {
        return Err(Error::InvalidParameter(format!(
            "staircase needs K > 0 and 0 < b < R_J, got K = {k_omega}, b = {b}"
        )));
    }
    check_decomposition(r_omega, r_j, k_omega, b)?;
    let (field, off_center) = sample(grid, x0, r_omega, |t| staircase_profile(t, r_j, k_omega, b));
    let lipschitz = 1.0 / ((k_omega as f64 + 1.0) * b);
    Ok(ExtremalField { field, lipschitz, off_center })
}

/// `z(x) = sawtooth(|x - x₀|)`; needs `K > 0` and `0 < b < 1 < R_J`.
pub fn build_profile_z(grid: &Grid, x0: Point, r_omega: f64, r_j: f64, k_omega: u32, b: f64) -> Result<ExtremalField> {
    check_radius(r_omega)?;
    if k_omega == 0 || !(b > 0.0 && b < 1.0 && r_j > 1.0) {
        return Err(Error::InvalidParameter(format!(
            "profile z needs K > 0 and 0 < b < 1 < R_J, got K = {k_omega}, b = {b}, R_J = {r_j}"
        )));
    }
    check_decomposition(r_omega, r_j, k_omega, b)?;
    let (field, off_center) = sample(grid, x0, r_omega, |t| sawtooth_profile(t, r_j, k_omega, b));
    let lipschitz = 1.0 / (k_omega as f64 + b);
    Ok(ExtremalField { field, lipschitz, off_center })
}

fn check_decomposition(r_omega: f64, r_j: f64, k_omega: u32, b: f64) -> Result<()> {
    if abs(k_omega as f64 * r_j + b - r_omega) > 1e-9 * r_omega.max(r_j) {
        return Err(Error::InvalidParameter(format!("{k_omega}·{r_j} + {b} does not reconstruct R_Ω = {r_omega}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{decompose, Domain};
    use crate::limit::{inf_quotient, verify_lower_bounds, LambdaCase};

    fn lip_estimate(f: impl Fn(f64) -> f64, end: f64) -> f64 {
        let n = 200_000;
        let dt = end / n as f64;
        (0..n).map(|i| ((f((i + 1) as f64 * dt) - f(i as f64 * dt)) / dt).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn profiles_are_continuous_and_start_at_one() {
        for (r_j, r_omega) in [(1.0, 3.5), (2.0, 4.6), (1.5, 2.0), (2.0, 5.5)] {
            let (k, b) = decompose(r_omega, r_j).unwrap();
            let w = |t| staircase_profile(t, r_j, k, b);
            assert_eq!(w(0.0), 1.0);
            assert!(w(r_omega - 1e-12).abs() < 1e-9);
            let lip = lip_estimate(w, r_omega + 0.1);
            assert!((lip - 1.0 / ((k as f64 + 1.0) * b)).abs() < 1e-6 * lip);
            if b < 1.0 && r_j > 1.0 {
                let z = |t| sawtooth_profile(t, r_j, k, b);
                assert_eq!(z(0.0), 1.0);
                assert!(z(r_omega - 1e-12).abs() < 1e-9);
                let lip = lip_estimate(z, r_omega + 0.1);
                assert!((lip - 1.0 / (k as f64 + b)).abs() < 1e-6 * lip);
            }
        }
    }

    #[test]
    fn cone_seminorm_both_regimes() {
        let d = Domain::interval(-2.0, 2.0).unwrap();
        for (r_j, expected) in [(1.0f64, 0.5), (0.5, 0.25), (3.0, 1.0)] {
            let g = Grid::new(&d, r_j.min(2.0) / 32.0, r_j).unwrap();
            let v = build_cone(&g, [0.0, 0.0], 2.0).unwrap();
            assert!(!v.off_center);
            let q = inf_quotient(&v.field, &g).unwrap();
            assert!((q.sup_norm - 1.0).abs() < 1e-15);
            assert!((q.j_seminorm - expected).abs() <= 2.0 * v.lipschitz * g.h());
            assert!((q.sup_grad - 0.5).abs() <= 2.0 * v.lipschitz * g.h());
        }
    }

    #[test]
    fn staircase_and_z_attain_lambda() {
        for (r_omega, r_j) in [(5.5, 2.0), (4.6, 2.0), (3.5, 1.0)] {
            let case = LambdaCase::from_radii(r_omega, r_j).unwrap();
            let d = Domain::interval(-r_omega, r_omega).unwrap();
            let g = Grid::new(&d, r_j / 32.0, r_j).unwrap();
            let w = build_staircase(&g, [0.0, 0.0], r_omega, r_j, case.k_omega, case.b).unwrap();
            let q = inf_quotient(&w.field, &g).unwrap();
            let eps = 2.0 * w.lipschitz * g.h();
            assert!((q.j_seminorm - 1.0 / (case.k_omega as f64 + 1.0)).abs() <= eps);
            assert!((q.sup_grad - w.lipschitz).abs() <= eps);
            assert!(verify_lower_bounds(&w.field, &g, &case, Some(w.lipschitz)).unwrap().passed);
            if case.b < 1.0 && r_j > 1.0 {
                let z = build_profile_z(&g, [0.0, 0.0], r_omega, r_j, case.k_omega, case.b).unwrap();
                let q = inf_quotient(&z.field, &g).unwrap();
                let eps = 2.0 * z.lipschitz * g.h();
                assert!((q.quotient - case.lambda).abs() <= eps, "{q:?} vs {}", case.lambda);
            }
        }
    }

    #[test]
    fn invalid_parameters() {
        let d = Domain::interval(-2.0, 2.0).unwrap();
        let g = Grid::new(&d, 1.0 / 32.0, 1.0).unwrap();
        assert!(build_staircase(&g, [0.0, 0.0], 2.0, 1.0, 2, 0.0).is_err());
        assert!(build_profile_z(&g, [0.0, 0.0], 2.0, 1.0, 2, 0.0).is_err());
        assert!(build_cone(&g, [0.0, 0.0], -1.0).is_err());
        assert!(build_cone(&g, [1.0, 0.0], 2.0).unwrap().off_center);
    }
}
