//! Closed-form checks of `Λ` and of the radial test functions for one
//! `(R_Ω, R_J)` pair, on the interval `(-R_Ω, R_Ω)`.

use plapmix_core::limit::{
    build_cone, build_profile_z, build_staircase, inf_quotient, verify_lower_bounds, ExtremalField,
};
use plapmix_core::{Domain, Grid, LambdaCase};
use serde::Serialize;

use crate::config::CANONICAL_TUPLES;

/// Largest distance in ulps between `Λ` and the exact value of a canonical tuple.
pub const CANONICAL_ULPS: u64 = 4;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComponentCheck {
    pub quantity: &'static str,
    pub value: f64,
    pub expected: f64,
    pub error: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FieldCheck {
    pub name: &'static str,
    pub lipschitz: f64,
    pub sup_grad: f64,
    pub j_seminorm: f64,
    pub sup_norm: f64,
    pub quotient: f64,
    pub components: Vec<ComponentCheck>,
    /// `quotient - Λ`
    pub lower_bound_margin: f64,
    pub lower_bound_tolerance: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TupleCheck {
    pub source: &'static str,
    pub r_omega: f64,
    pub r_j: f64,
    pub k_omega: u32,
    pub b: f64,
    pub case: &'static str,
    #[serde(rename = "Lambda")]
    pub lambda: f64,
    /// Exact value for the canonical tuples.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ulps: Option<u64>,
    pub h: f64,
    pub fields: Vec<FieldCheck>,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FormulaReport {
    pub tuples: Vec<TupleCheck>,
    pub passed: bool,
}

impl FormulaReport {
    pub fn new(tuples: Vec<TupleCheck>) -> Self {
        let passed = tuples.iter().all(|t| t.passed);
        FormulaReport { tuples, passed }
    }
}

fn canonical_value(r_omega: f64, r_j: f64) -> Option<f64> {
    let exact = [1.0 / 3.0, 2.0, 1.0 / 3.0, 1.0 / 2.6];
    CANONICAL_TUPLES.iter().position(|t| *t == [r_omega, r_j]).map(|i| exact[i])
}

fn ulps(a: f64, b: f64) -> u64 {
    (a.to_bits() as i64 - b.to_bits() as i64).unsigned_abs()
}

fn component(quantity: &'static str, value: f64, expected: f64, tolerance: f64) -> ComponentCheck {
    let error = (value - expected).abs();
    ComponentCheck { quantity, value, expected, error, tolerance, passed: error <= tolerance }
}

fn check_field(
    name: &'static str,
    ext: &ExtremalField,
    grid: &Grid,
    case: &LambdaCase,
    expected: &[(&'static str, f64)],
) -> Result<FieldCheck, String> {
    let q = inf_quotient(&ext.field, grid).map_err(|e| e.to_string())?;
    let bound = verify_lower_bounds(&ext.field, grid, case, Some(ext.lipschitz)).map_err(|e| e.to_string())?;
    let eps = 2.0 * ext.lipschitz * grid.h();
    let components: Vec<ComponentCheck> = expected
        .iter()
        .map(|&(quantity, want)| {
            let got = match quantity {
                "sup_grad" => q.sup_grad,
                "j_seminorm" => q.j_seminorm,
                _ => q.quotient,
            };
            component(quantity, got, want, eps)
        })
        .collect();
    let passed = bound.passed && components.iter().all(|c| c.passed);
    Ok(FieldCheck {
        name,
        lipschitz: ext.lipschitz,
        sup_grad: q.sup_grad,
        j_seminorm: q.j_seminorm,
        sup_norm: q.sup_norm,
        quotient: q.quotient,
        components,
        lower_bound_margin: bound.margin,
        lower_bound_tolerance: bound.tolerance,
        passed,
    })
}

/// Evaluates `Λ` and samples the cone, the staircase `w` and the profile
/// `z` where they apply, with `h = min(R_J/32, R_Ω/16)`.
pub fn check_tuple(r_omega: f64, r_j: f64, source: &'static str) -> Result<TupleCheck, String> {
    let case = LambdaCase::from_radii(r_omega, r_j).map_err(|e| e.to_string())?;
    let h = (r_j / 32.0).min(r_omega / 16.0);
    let domain = Domain::interval(-r_omega, r_omega).map_err(|e| e.to_string())?;
    let grid = Grid::new(&domain, h, r_j).map_err(|e| e.to_string())?;
    let x0 = [0.0, 0.0];
    let (k, b) = (case.k_omega, case.b);
    let kf = k as f64;

    let mut fields = Vec::new();
    let cone = build_cone(&grid, x0, r_omega).map_err(|e| e.to_string())?;
    let cone_seminorm = r_j.min(r_omega) / r_omega;
    fields.push(check_field(
        "cone",
        &cone,
        &grid,
        &case,
        &[("sup_grad", 1.0 / r_omega), ("j_seminorm", cone_seminorm), ("quotient", (1.0 / r_omega).max(cone_seminorm))],
    )?);
    if k > 0 && b > 0.0 {
        let w = build_staircase(&grid, x0, r_omega, r_j, k, b).map_err(|e| e.to_string())?;
        let mut expected = vec![("sup_grad", w.lipschitz), ("j_seminorm", 1.0 / (kf + 1.0))];
        if r_j > 1.0 && b >= 1.0 {
            expected.push(("quotient", case.lambda));
        }
        fields.push(check_field("staircase", &w, &grid, &case, &expected)?);
    }
    if k > 0 && b > 0.0 && b < 1.0 && r_j > 1.0 {
        let z = build_profile_z(&grid, x0, r_omega, r_j, k, b).map_err(|e| e.to_string())?;
        let v = 1.0 / (kf + b);
        let expected = [("sup_grad", v), ("j_seminorm", v), ("quotient", case.lambda)];
        fields.push(check_field("profile_z", &z, &grid, &case, &expected)?);
    }

    let expected = canonical_value(r_omega, r_j);
    let ulps = expected.map(|e| ulps(case.lambda, e));
    let passed = fields.iter().all(|f| f.passed) && ulps.map_or(true, |u| u <= CANONICAL_ULPS);
    Ok(TupleCheck {
        source,
        r_omega,
        r_j,
        k_omega: k,
        b,
        case: case.tag.name(),
        lambda: case.lambda,
        expected,
        ulps,
        h,
        fields,
        passed,
    })
}
