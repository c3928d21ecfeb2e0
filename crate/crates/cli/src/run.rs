//! Task orchestration: solve, sweep, verify-formulas, viscosity-check.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use log::{error, info, warn};
use plapmix_core::eigensolver::{distance_initializer, TraceEntry};
use plapmix_core::viscosity::{residual_report, ViscosityResidual};
use plapmix_core::{solve_first_from, sweep_p, EigenReport, Error, ScalarField};

use crate::config::{ConfigError, RunConfig, Setup, Task, CANONICAL_TUPLES};
use crate::plotdata::emit_plotdata;
use crate::report::{
    CaseSummary, EigenSummary, RunReport, SetupSummary, Status, SweepEntry, SweepSummary, ViscositySummary, SCHEMA,
};
use crate::verify::{check_tuple, FormulaReport};

/// Exit code for a config that does not parse or validate.
pub const EXIT_CONFIG: i32 = 2;
/// Exit code for a report or CSV file that cannot be written.
pub const EXIT_IO: i32 = 4;

/// Where an eigenpair was computed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Source {
    Solve,
    Sweep,
    Own,
}

impl Source {
    pub fn name(self) -> &'static str {
        match self {
            Source::Solve => "solve",
            Source::Sweep => "sweep",
            Source::Own => "own",
        }
    }
}

/// A finished run: the report plus the fields behind the CSV files.
pub struct RunOutput {
    pub setup: Setup,
    pub report: RunReport,
    /// Every eigenpair computed, in order.
    pub eigenpairs: Vec<(Source, EigenReport)>,
    pub residual: Option<ViscosityResidual>,
}

impl RunOutput {
    /// The eigenpair with the largest `p`; later entries win ties.
    pub fn top_eigenpair(&self) -> Option<&EigenReport> {
        self.eigenpairs.iter().map(|(_, r)| r).fold(None, |best: Option<&EigenReport>, r| match best {
            Some(b) if b.p > r.p => Some(b),
            _ => Some(r),
        })
    }

    pub fn traces(&self) -> Vec<(Source, f64, &[TraceEntry])> {
        self.eigenpairs.iter().map(|(s, r)| (*s, r.p, r.trace.as_slice())).collect()
    }
}

fn unpack(result: plapmix_core::Result<EigenReport>) -> Result<EigenReport, ConfigError> {
    match result {
        Ok(r) => Ok(r),
        Err(Error::NotConverged(r)) => {
            warn!("p = {}: {}", r.p, Error::NotConverged(r.clone()));
            Ok(*r)
        }
        Err(e) => Err(ConfigError::new("solver", e)),
    }
}

fn log_pair(source: Source, r: &EigenReport) {
    info!(
        "{} p = {}: lambda1 = {:e}, lambda1^(1/p) = {:.6}, {} iterations{}",
        source.name(),
        r.p,
        r.lambda1,
        r.lambda1_root,
        r.iters,
        if r.converged { "" } else { " (not converged)" }
    );
}

fn sweep_summary(cfg: &RunConfig, setup: &Setup, reports: &[EigenReport]) -> SweepSummary {
    let lambda = setup.case.lambda;
    let entries: Vec<SweepEntry> = reports
        .iter()
        .map(|r| {
            let root = r.lambda1_root.is_finite().then_some(r.lambda1_root);
            SweepEntry {
                p: r.p,
                lambda_root: root,
                lambda,
                rel_gap: root.map(|x| (x - lambda).abs() / lambda),
                converged: r.converged,
                iters: r.iters,
            }
        })
        .collect();
    let gaps: Option<Vec<f64>> = entries.iter().map(|e| e.rel_gap).collect();
    let gap_monotone = gaps.as_ref().is_some_and(|g| g.windows(2).all(|w| w[1] < w[0]));
    let final_rel_gap = entries.last().and_then(|e| e.rel_gap);
    let within = final_rel_gap.is_some_and(|g| g < cfg.sweep.max_rel_gap);
    SweepSummary {
        solves: reports.iter().map(|r| EigenSummary::new(r, setup)).collect(),
        entries,
        final_rel_gap,
        max_rel_gap: cfg.sweep.max_rel_gap,
        gap_monotone,
        require_monotone: cfg.sweep.require_monotone,
        passed: within && (gap_monotone || !cfg.sweep.require_monotone),
    }
}

fn formula_checks(cfg: &RunConfig, setup: &Setup) -> Result<FormulaReport, ConfigError> {
    let mut tuples = Vec::new();
    for (i, t) in cfg.verify.tuples.iter().enumerate() {
        let source = if CANONICAL_TUPLES.contains(t) { "canonical" } else { "config" };
        let check = check_tuple(t[0], t[1], source).map_err(|e| ConfigError::new(format!("verify.tuples[{i}]"), e))?;
        tuples.push(check);
    }
    if cfg.verify.include_domain {
        let check =
            check_tuple(setup.case.r_omega, setup.case.r_j, "domain").map_err(|e| ConfigError::new("domain", e))?;
        tuples.push(check);
    }
    for t in &tuples {
        info!(
            "({}, {}) {}: Lambda = {} [{}]",
            t.r_omega,
            t.r_j,
            t.case,
            t.lambda,
            if t.passed { "pass" } else { "FAIL" }
        );
    }
    Ok(FormulaReport::new(tuples))
}

/// Runs every requested task in order. Solver non-convergence is recorded
/// in the report, not returned as an error.
pub fn execute(cfg: &RunConfig) -> Result<RunOutput, ConfigError> {
    cfg.validate()?;
    let setup = Setup::new(cfg)?;
    let (alpha, beta) = (cfg.solver.alpha, cfg.solver.beta);
    let mut eigenpairs: Vec<(Source, EigenReport)> = Vec::new();
    let mut solve = None;
    let mut sweep = None;
    let mut verify_formulas = None;
    let mut viscosity_check = None;
    let mut residual = None;

    for task in cfg.ordered_tasks() {
        let start = Instant::now();
        match task {
            Task::Solve => {
                let init = distance_initializer(&setup.grid);
                let mut out = Vec::new();
                for &p in &cfg.solver.p {
                    let r =
                        unpack(solve_first_from(&setup.grid, &setup.weights, p, alpha, beta, &setup.options, &init))?;
                    log_pair(Source::Solve, &r);
                    out.push(EigenSummary::new(&r, &setup));
                    eigenpairs.push((Source::Solve, r));
                }
                solve = Some(out);
            }
            Task::Sweep => {
                let results = sweep_p(&setup.grid, &setup.weights, &cfg.solver.p, alpha, beta, &setup.options)
                    .map_err(|e| ConfigError::new("solver.p", e))?;
                let mut reports = Vec::new();
                for r in results {
                    let r = unpack(r)?;
                    log_pair(Source::Sweep, &r);
                    reports.push(r);
                }
                let summary = sweep_summary(cfg, &setup, &reports);
                info!("sweep: final relative gap {:?}, monotone {}", summary.final_rel_gap, summary.gap_monotone);
                sweep = Some(summary);
                eigenpairs.extend(reports.into_iter().map(|r| (Source::Sweep, r)));
            }
            Task::VerifyFormulas => verify_formulas = Some(formula_checks(cfg, &setup)?),
            Task::ViscosityCheck => {
                let p = cfg.viscosity.p.unwrap_or_else(|| cfg.solver.p.iter().copied().fold(2.0, f64::max));
                let found = eigenpairs
                    .iter()
                    .rev()
                    .find(|(s, r)| r.p == p && *s == Source::Sweep)
                    .or_else(|| eigenpairs.iter().rev().find(|(_, r)| r.p == p))
                    .cloned();
                let (source, pair) = match found {
                    Some(found) => found,
                    None => {
                        // warm start from the closest smaller exponent
                        let init = eigenpairs
                            .iter()
                            .filter(|(_, r)| r.p < p)
                            .max_by(|a, b| a.1.p.total_cmp(&b.1.p))
                            .map(|(_, r)| r.field.clone())
                            .unwrap_or_else(|| distance_initializer(&setup.grid));
                        let r = unpack(solve_first_from(
                            &setup.grid,
                            &setup.weights,
                            p,
                            alpha,
                            beta,
                            &setup.options,
                            &init,
                        ))?;
                        log_pair(Source::Own, &r);
                        eigenpairs.push((Source::Own, r.clone()));
                        (Source::Own, r)
                    }
                };
                let u: ScalarField = pair.field.sup_normalized();
                let res = residual_report(&u, &setup.grid, setup.case.lambda);
                let summary = ViscositySummary::new(
                    EigenSummary::new(&pair, &setup),
                    source.name(),
                    &res,
                    cfg.viscosity.threshold,
                );
                info!(
                    "viscosity: sup residual {:.4} over {} robust nodes (threshold {})",
                    summary.sup_residual, summary.robust_nodes, summary.threshold
                );
                viscosity_check = Some(summary);
                residual = Some(res);
            }
        }
        info!("{task:?} took {:.3} s", start.elapsed().as_secs_f64());
    }

    let not_converged = eigenpairs.iter().any(|(_, r)| !r.converged);
    let verified = sweep.as_ref().map_or(true, |s: &SweepSummary| s.passed)
        && verify_formulas.as_ref().map_or(true, |v: &FormulaReport| v.passed)
        && viscosity_check.as_ref().map_or(true, |v: &ViscositySummary| v.passed);
    let status = if not_converged {
        Status::NotConverged
    } else if !verified {
        Status::VerificationFailed
    } else {
        Status::Ok
    };
    let report = RunReport {
        schema: SCHEMA,
        status,
        exit_code: status.exit_code(),
        config: cfg.clone(),
        setup: SetupSummary::new(&setup),
        limit: CaseSummary::from(&setup.case),
        solve,
        sweep,
        verify_formulas,
        viscosity_check,
    };
    Ok(RunOutput { setup, report, eigenpairs, residual })
}

#[derive(Clone, Debug)]
pub struct RunArgs {
    pub config: PathBuf,
    pub out_dir: Option<PathBuf>,
    pub verbose: bool,
}

fn write_outputs(out: &RunOutput, dir: &Path, verbose: bool) -> Result<PathBuf, String> {
    fs::create_dir_all(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
    let cfg = &out.report.config;
    let path = dir.join(&cfg.output.report);
    fs::write(&path, out.report.to_json() + "\n").map_err(|e| format!("{}: {e}", path.display()))?;
    if cfg.output.plots {
        for written in emit_plotdata(out, dir, verbose).map_err(|e| e.to_string())? {
            info!("wrote {}", written.display());
        }
    }
    Ok(path)
}

/// `plapmix run`; returns the process exit code.
pub fn run(args: &RunArgs) -> i32 {
    let cfg = match RunConfig::load(&args.config) {
        Ok(cfg) => cfg,
        Err(e) => {
            error!("{e}");
            return EXIT_CONFIG;
        }
    };
    let out = match execute(&cfg) {
        Ok(out) => out,
        Err(e) => {
            error!("{}: {e}", args.config.display());
            return EXIT_CONFIG;
        }
    };
    let dir = args.out_dir.clone().unwrap_or_else(|| cfg.output.dir.clone());
    match write_outputs(&out, &dir, args.verbose) {
        Ok(path) => info!("report written to {}", path.display()),
        Err(e) => {
            error!("{e}");
            return EXIT_IO;
        }
    }
    let status = out.report.status;
    match status {
        Status::Ok => {}
        Status::VerificationFailed => error!("verification failed; margins are in the report"),
        Status::NotConverged => error!("solver did not converge; the report is partial"),
    }
    status.exit_code()
}

/// `plapmix verify-formulas`; prints the JSON check for one tuple.
pub fn verify_formulas(r_omega: f64, r_j: f64) -> i32 {
    match check_tuple(r_omega, r_j, "cli") {
        Ok(check) => {
            let report = FormulaReport::new(vec![check]);
            println!("{}", serde_json::to_string_pretty(&report).expect("report serializes to JSON"));
            if report.passed {
                0
            } else {
                1
            }
        }
        Err(e) => {
            error!("({r_omega}, {r_j}): {e}");
            EXIT_CONFIG
        }
    }
}
