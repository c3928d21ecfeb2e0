use alloc::format;

use crate::geometry::decompose;
use crate::num::abs;
use crate::{Error, Result};

/// Which closed form gives `Λ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CaseTag {
    /// `b = 0`: `Λ = max{1/R_Ω, 1/K}`
    BZero,
    /// `K = 0`, or `b ≠ 0` with `R_J <= 1`: `Λ = max{1/R_Ω, 1/(K+1)}`
    SmallRjOrK0,
    /// `K > 0`, `R_J > 1`, `b >= 1`: `Λ = 1/(K+1)`
    BigRjBGe1,
    /// `K > 0`, `R_J > 1`, `0 < b < 1`: `Λ = 1/(K+b)`
    BigRjBLt1,
}

impl CaseTag {
    pub const ALL: [CaseTag; 4] = [CaseTag::BZero, CaseTag::SmallRjOrK0, CaseTag::BigRjBGe1, CaseTag::BigRjBLt1];

    pub fn name(self) -> &'static str {
        match self {
            CaseTag::BZero => "B_ZERO",
            CaseTag::SmallRjOrK0 => "SMALL_RJ_OR_K0",
            CaseTag::BigRjBGe1 => "BIG_RJ_B_GE_1",
            CaseTag::BigRjBLt1 => "BIG_RJ_B_LT_1",
        }
    }

    /// Tag selected by `(R_J, K, b)`; the four predicates partition the
    /// admissible inputs.
    pub fn select(r_j: f64, k_omega: u32, b: f64) -> CaseTag {
        if b == 0.0 {
            CaseTag::BZero
        } else if k_omega == 0 || r_j <= 1.0 {
            CaseTag::SmallRjOrK0
        } else if b >= 1.0 {
            CaseTag::BigRjBGe1
        } else {
            CaseTag::BigRjBLt1
        }
    }
}

impl core::fmt::Display for CaseTag {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LambdaCase {
    pub tag: CaseTag,
    pub lambda: f64,
    pub r_omega: f64,
    pub r_j: f64,
    pub k_omega: u32,
    pub b: f64,
}

impl LambdaCase {
    /// Decomposes `R_Ω` and evaluates the formula.
    pub fn from_radii(r_omega: f64, r_j: f64) -> Result<LambdaCase> {
        let (k, b) = decompose(r_omega, r_j)?;
        lambda_formula(r_omega, r_j, k, b)
    }
}

/// `Λ` from the inradius decomposition `R_Ω = K·R_J + b`.
pub fn lambda_formula(r_omega: f64, r_j: f64, k_omega: u32, b: f64) -> Result<LambdaCase> {
    let invalid = |msg: alloc::string::String| Err(Error::InvalidParameter(msg));
    if !(r_omega > 0.0 && r_omega.is_finite() && r_j > 0.0 && r_j.is_finite()) {
        return invalid(format!("need R_Ω, R_J > 0, got ({r_omega}, {r_j})"));
    }
    if !(b >= 0.0 && b < r_j) {
        return invalid(format!("remainder b = {b} outside [0, R_J = {r_j})"));
    }
    let k = k_omega as f64;
    if abs(k * r_j + b - r_omega) > 1e-9 * r_omega.max(r_j) {
        return invalid(format!("{k_omega}·{r_j} + {b} does not reconstruct R_Ω = {r_omega}"));
    }
    if k_omega == 0 && b == 0.0 {
        return invalid("K = 0 and b = 0 would give R_Ω = 0".into());
    }
    let tag = CaseTag::select(r_j, k_omega, b);
    let lambda = match tag {
        CaseTag::BZero => (1.0 / r_omega).max(1.0 / k),
        CaseTag::SmallRjOrK0 => (1.0 / r_omega).max(1.0 / (k + 1.0)),
        CaseTag::BigRjBGe1 => 1.0 / (k + 1.0),
        CaseTag::BigRjBLt1 => 1.0 / (k + b),
    };
    Ok(LambdaCase { tag, lambda, r_omega, r_j, k_omega, b })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ulps(a: f64, b: f64) -> u64 {
        (a.to_bits() as i64 - b.to_bits() as i64).unsigned_abs()
    }

    #[test]
    fn canonical_tuples() {
        let cases = [
            (3.0, 1.0, CaseTag::BZero, 1.0 / 3.0),
            (0.5, 1.0, CaseTag::SmallRjOrK0, 2.0),
            (5.5, 2.0, CaseTag::BigRjBGe1, 1.0 / 3.0),
            (4.6, 2.0, CaseTag::BigRjBLt1, 1.0 / 2.6),
        ];
        for (r_omega, r_j, tag, expected) in cases {
            let c = LambdaCase::from_radii(r_omega, r_j).unwrap();
            assert_eq!(c.tag, tag);
            assert!(ulps(c.lambda, expected) <= 4, "{r_omega}, {r_j}: {} vs {expected}", c.lambda);
        }
    }

    #[test]
    fn rejects_inconsistent_input() {
        assert!(lambda_formula(3.0, 1.0, 2, 0.5).is_err());
        assert!(lambda_formula(3.0, 1.0, 2, 1.0).is_err());
        assert!(lambda_formula(3.0, 1.0, 3, -0.0 - 1e-3).is_err());
        assert!(lambda_formula(0.0, 1.0, 0, 0.0).is_err());
    }

    #[test]
    fn lambda_dominates_both_classical_bounds() {
        for i in 1..400 {
            let r_omega = 0.037 * i as f64;
            for r_j in [0.3, 0.9, 1.0, 1.7, 2.5] {
                let c = LambdaCase::from_radii(r_omega, r_j).unwrap();
                assert!(c.lambda >= 1.0 / (c.k_omega as f64 + 1.0) * (1.0 - 1e-15));
                assert!(c.lambda >= 1.0 / r_omega * (1.0 - 1e-15));
            }
        }
    }
}
