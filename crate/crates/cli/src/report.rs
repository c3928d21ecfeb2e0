//! The JSON run report. Field-level documentation lives in
//! `docs/report_schema.md`.

use plapmix_core::viscosity::ViscosityResidual;
use plapmix_core::{EigenReport, LambdaCase};
use serde::Serialize;

use crate::config::{RunConfig, Setup};
use crate::verify::FormulaReport;

pub const SCHEMA: &str = "plapmix-report/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Ok,
    VerificationFailed,
    NotConverged,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::VerificationFailed => 1,
            Status::NotConverged => 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunReport {
    pub schema: &'static str,
    pub status: Status,
    pub exit_code: i32,
    pub config: RunConfig,
    pub setup: SetupSummary,
    pub limit: CaseSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solve: Option<Vec<EigenSummary>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verify_formulas: Option<FormulaReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub viscosity_check: Option<ViscositySummary>,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes to JSON")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SetupSummary {
    pub dim: usize,
    pub h: f64,
    pub lattice_nodes: usize,
    pub interior_nodes: usize,
    pub r_omega: f64,
    pub center: [f64; 2],
    pub r_j: f64,
    pub kernel_profile: &'static str,
    pub kernel_norm_const: f64,
    pub weight_offsets: usize,
}

impl SetupSummary {
    pub fn new(s: &Setup) -> Self {
        let (r_omega, center) = s.grid.inradius();
        SetupSummary {
            dim: s.grid.dim(),
            h: s.grid.h(),
            lattice_nodes: s.grid.len(),
            interior_nodes: s.grid.interior().len(),
            r_omega,
            center,
            r_j: s.grid.r_j(),
            kernel_profile: s.kernel.profile().name(),
            kernel_norm_const: s.kernel.norm_const(),
            weight_offsets: s.weights.len(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CaseSummary {
    pub case: &'static str,
    #[serde(rename = "Lambda")]
    pub lambda: f64,
    pub r_omega: f64,
    pub r_j: f64,
    pub k_omega: u32,
    pub b: f64,
}

impl From<&LambdaCase> for CaseSummary {
    fn from(c: &LambdaCase) -> Self {
        CaseSummary { case: c.tag.name(), lambda: c.lambda, r_omega: c.r_omega, r_j: c.r_j, k_omega: c.k_omega, b: c.b }
    }
}

/// `None` for values that do not fit in a JSON number.
fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EigenSummary {
    pub p: f64,
    pub alpha: f64,
    pub beta: f64,
    pub status: &'static str,
    pub converged: bool,
    /// `null` when `λ₁` under- or overflows; `log_lambda1` stays finite.
    pub lambda1: Option<f64>,
    pub log_lambda1: Option<f64>,
    pub lambda1_root: Option<f64>,
    pub iters: usize,
    pub grad_norm: Option<f64>,
    pub rel_lambda_change: Option<f64>,
    pub interior_min: f64,
}

impl EigenSummary {
    pub fn new(r: &EigenReport, setup: &Setup) -> Self {
        let lambda1 = finite(r.lambda1).filter(|&l| l > 0.0);
        EigenSummary {
            p: r.p,
            alpha: r.alpha,
            beta: r.beta,
            status: if r.converged { "converged" } else { "not-converged" },
            converged: r.converged,
            lambda1,
            log_lambda1: finite(r.log_lambda1),
            lambda1_root: finite(r.lambda1_root),
            iters: r.iters,
            grad_norm: finite(r.grad_norm),
            rel_lambda_change: finite(r.rel_lambda_change),
            interior_min: r.interior_min(&setup.grid),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepEntry {
    pub p: f64,
    pub lambda_root: Option<f64>,
    #[serde(rename = "Lambda")]
    pub lambda: f64,
    pub rel_gap: Option<f64>,
    pub converged: bool,
    pub iters: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepSummary {
    pub entries: Vec<SweepEntry>,
    pub solves: Vec<EigenSummary>,
    pub final_rel_gap: Option<f64>,
    pub max_rel_gap: f64,
    pub gap_monotone: bool,
    pub require_monotone: bool,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NodeSummary {
    pub point: [f64; 2],
    pub value: f64,
    pub residual: f64,
    pub m1: f64,
    pub m2: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ViscositySummary {
    pub p: f64,
    /// Where the eigenfield came from: `solve`, `sweep` or `own`.
    pub field_source: &'static str,
    pub eigen: EigenSummary,
    #[serde(rename = "Lambda")]
    pub lambda: f64,
    pub sup_residual: f64,
    pub mean_abs_residual: f64,
    pub robust_nodes: usize,
    pub degenerate_nodes: usize,
    pub skipped_nodes: usize,
    pub threshold: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub worst: Option<NodeSummary>,
    pub passed: bool,
}

impl ViscositySummary {
    pub fn new(eigen: EigenSummary, field_source: &'static str, res: &ViscosityResidual, threshold: f64) -> Self {
        let worst = res.worst().map(|n| NodeSummary {
            point: n.point,
            value: n.value,
            residual: n.residual,
            m1: n.m1,
            m2: n.m2,
        });
        ViscositySummary {
            p: eigen.p,
            field_source,
            eigen,
            lambda: res.lambda,
            sup_residual: res.sup_residual,
            mean_abs_residual: res.mean_abs_residual,
            robust_nodes: res.robust_count,
            degenerate_nodes: res.degenerate_count,
            skipped_nodes: res.skipped,
            threshold,
            worst,
            passed: res.robust_count > 0 && res.sup_residual < threshold,
        }
    }
}
