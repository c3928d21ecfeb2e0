//! First eigenpair by projected descent on the Rayleigh quotient.
//!
//! The iterate lives on the positive part of the sphere `‖u‖_p = 1`. Each
//! step moves along a descent direction of `ln R(u)`, clamps negative
//! interior values to zero, renormalizes, and accepts the step by an Armijo
//! backtracking test. Working with `ln R` instead of `R` keeps the gradient
//! well scaled for large `p`, where `λ₁(p)` itself spans hundreds of orders
//! of magnitude; the quotient is 0-homogeneous so the renormalization never
//! changes the objective.

use alloc::boxed::Box;
use alloc::collections::VecDeque;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::discretize::{EnergyModel, Grid, ScalarField};
use crate::kernel::WeightTable;
use crate::num::{abs, exp, sqrt};
use crate::{Error, Result};

/// Largest increase of `ln R` tolerated by a step that reduces the gradient.
pub const FLAT_LOG_TOL: f64 = 1e-13;

/// How the search direction is built from the gradient.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// Plain projected gradient.
    Steepest,
    /// Limited-memory BFGS on the last `memory` accepted steps.
    Lbfgs { memory: usize },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverOptions {
    /// Iteration budget; `None` means `200 · (number of interior nodes)`.
    pub max_iters: Option<usize>,
    /// Relative change of `λ` between accepted iterates.
    pub tol_lambda: f64,
    /// `L²` norm of the projected gradient of `ln R`, as a function on `Ω`.
    pub tol_grad: f64,
    /// First trial step, relative to the natural step of the direction.
    pub initial_step: f64,
    /// Backtracking factor in `(0, 1)`.
    pub shrink: f64,
    /// Armijo constant in `(0, 1)`.
    pub sufficient_decrease: f64,
    pub direction: Direction,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            max_iters: None,
            tol_lambda: 1e-10,
            tol_grad: 1e-8,
            initial_step: 1.0,
            shrink: 0.5,
            sufficient_decrease: 1e-4,
            direction: Direction::Lbfgs { memory: 12 },
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidParameter(format!("solver options: {msg}")));
        if !(self.tol_lambda > 0.0) || !(self.tol_grad > 0.0) {
            return bad("tolerances must be positive");
        }
        if !(self.shrink > 0.0 && self.shrink < 1.0) {
            return bad("shrink factor must lie in (0, 1)");
        }
        if !(self.sufficient_decrease > 0.0 && self.sufficient_decrease < 1.0) {
            return bad("sufficient-decrease constant must lie in (0, 1)");
        }
        if !(self.initial_step > 0.0) {
            return bad("initial step must be positive");
        }
        if let Direction::Lbfgs { memory: 0 } = self.direction {
            return bad("L-BFGS memory must be positive");
        }
        if self.max_iters == Some(0) {
            return bad("max_iters must be positive");
        }
        Ok(())
    }
}

/// One accepted iterate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceEntry {
    pub iter: usize,
    pub log_lambda: f64,
    pub grad_norm: f64,
}

impl TraceEntry {
    pub fn lambda(&self) -> f64 {
        exp(self.log_lambda)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EigenReport {
    pub p: f64,
    pub alpha: f64,
    pub beta: f64,
    pub lambda1: f64,
    pub log_lambda1: f64,
    /// `λ₁^{1/p}`, computed from `ln λ₁`.
    pub lambda1_root: f64,
    /// Nonnegative eigenfield with `‖u‖_p = 1`.
    pub field: ScalarField,
    pub iters: usize,
    pub converged: bool,
    /// Relative change of `λ` over the last accepted step.
    pub rel_lambda_change: f64,
    pub grad_norm: f64,
    pub trace: Vec<TraceEntry>,
}

impl EigenReport {
    /// Smallest interior value of the eigenfield.
    pub fn interior_min(&self, grid: &Grid) -> f64 {
        grid.interior().iter().map(|&i| self.field.get(i)).fold(f64::INFINITY, f64::min)
    }
}

/// The distance to `∂Ω`, the default positive initializer.
pub fn distance_initializer(grid: &Grid) -> ScalarField {
    let domain = grid.domain();
    ScalarField::from_fn(grid, |x| domain.boundary_distance(x))
}

/// Solves from the distance-to-boundary initializer.
pub fn solve_first(
    grid: &Grid,
    weights: &WeightTable,
    p: f64,
    alpha: f64,
    beta: f64,
    opts: &SolverOptions,
) -> Result<EigenReport> {
    solve_first_from(grid, weights, p, alpha, beta, opts, &distance_initializer(grid))
}

/// Solves from a given initial field; negative values are clamped to zero.
pub fn solve_first_from(
    grid: &Grid,
    weights: &WeightTable,
    p: f64,
    alpha: f64,
    beta: f64,
    opts: &SolverOptions,
    init: &ScalarField,
) -> Result<EigenReport> {
    if !(p >= 2.0) {
        return Err(Error::UnsupportedExponent(p));
    }
    opts.validate()?;
    if init.len() != grid.len() {
        return Err(Error::InvalidField(format!(
            "initial field has {} values, grid has {} nodes",
            init.len(),
            grid.len()
        )));
    }
    let model = EnergyModel::new(grid, weights, p, alpha, beta)?;
    Solver::new(&model, opts).run(init)
}

/// Solves for each `p` in ascending order, starting every solve from the
/// previous eigenfield. A failed entry does not stop the sweep; its best
/// iterate seeds the next one.
pub fn sweep_p(
    grid: &Grid,
    weights: &WeightTable,
    p_list: &[f64],
    alpha: f64,
    beta: f64,
    opts: &SolverOptions,
) -> Result<Vec<Result<EigenReport>>> {
    if p_list.is_empty() {
        return Err(Error::InvalidParameter("empty p list".into()));
    }
    if let Some(&bad) = p_list.iter().find(|&&p| !(p >= 2.0 && p.is_finite())) {
        return Err(Error::UnsupportedExponent(bad));
    }
    if p_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("p list must be strictly ascending".into()));
    }
    let mut seed = distance_initializer(grid);
    let mut out = Vec::with_capacity(p_list.len());
    for &p in p_list {
        let result = solve_first_from(grid, weights, p, alpha, beta, opts, &seed);
        match &result {
            Ok(report) => seed = report.field.clone(),
            Err(Error::NotConverged(report)) => seed = report.field.clone(),
            Err(_) => {}
        }
        out.push(result);
    }
    Ok(out)
}

struct Solver<'m, 'g> {
    model: &'m EnergyModel<'g>,
    opts: &'m SolverOptions,
    /// full nodal buffer used for energy evaluations
    full: Vec<f64>,
    full_grad: Vec<f64>,
}

/// Result of one objective evaluation on the interior vector.
struct Eval {
    f: f64,
    grad: Vec<f64>,
}

impl<'m, 'g> Solver<'m, 'g> {
    fn new(model: &'m EnergyModel<'g>, opts: &'m SolverOptions) -> Self {
        let n = model.grid().len();
        Solver { model, opts, full: vec![0.0; n], full_grad: vec![0.0; n] }
    }

    fn interior(&self) -> &[usize] {
        self.model.grid().interior()
    }

    fn scatter(&mut self, x: &[f64]) {
        let grid = self.model.grid();
        for (&idx, &v) in grid.interior().iter().zip(x) {
            self.full[idx] = v;
        }
    }

    fn evaluate(&mut self, x: &[f64]) -> Option<Eval> {
        self.scatter(x);
        let f = self.model.log_rayleigh_gradient(&self.full, &mut self.full_grad)?;
        let grad = self.interior().iter().map(|&i| self.full_grad[i]).collect();
        Some(Eval { f, grad })
    }

    fn objective(&mut self, x: &[f64]) -> Option<f64> {
        self.scatter(x);
        self.model.log_rayleigh_raw(&self.full)
    }

    /// Rescales `x` to `‖x‖_p = 1`.
    fn normalize(&mut self, x: &mut [f64]) -> bool {
        self.scatter(x);
        let field = ScalarField::from_values(self.model.grid(), self.full.clone())
            .expect("interior scatter keeps the exterior at zero");
        let norm = self.model.norm_pow(&field);
        if norm.is_zero() {
            return false;
        }
        let factor = exp(-norm.ln() / self.model.p());
        x.iter_mut().for_each(|v| *v *= factor);
        true
    }

    /// `L²(Ω)` norm of the projected gradient.
    fn projected_norm(&self, x: &[f64], g: &[f64]) -> f64 {
        let sq: f64 = x.iter().zip(g).map(|(&xi, &gi)| if xi <= 0.0 && gi > 0.0 { 0.0 } else { gi * gi }).sum();
        sqrt(sq / self.model.grid().cell_volume())
    }

    fn run(mut self, init: &ScalarField) -> Result<EigenReport> {
        let n = self.interior().len();
        let max_iters = self.opts.max_iters.unwrap_or(200 * n);
        let memory = match self.opts.direction {
            Direction::Lbfgs { memory } => memory,
            Direction::Steepest => 0,
        };

        let mut x: Vec<f64> = self.interior().iter().map(|&i| init.get(i).max(0.0)).collect();
        if !self.normalize(&mut x) {
            return Err(Error::InvalidField("initial field vanishes in the domain".into()));
        }
        let mut cur = self.evaluate(&x).ok_or(Error::UndefinedQuotient)?;
        let mut grad_norm = self.projected_norm(&x, &cur.grad);
        let mut rel_change = f64::INFINITY;
        let mut trace = vec![TraceEntry { iter: 0, log_lambda: cur.f, grad_norm }];
        let mut history: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::with_capacity(memory);
        let mut steepest_step = f64::NAN;
        let mut converged = false;
        let mut iters = 0;

        while iters < max_iters {
            if rel_change < self.opts.tol_lambda && grad_norm < self.opts.tol_grad {
                converged = true;
                break;
            }
            iters += 1;

            let mut used_memory = !history.is_empty();
            let mut dir = self.direction(&cur.grad, &history, &x);
            let mut accepted = None;
            for attempt in 0..2 {
                let base = if used_memory {
                    1.0
                } else if steepest_step.is_finite() {
                    2.0 * steepest_step
                } else {
                    1.0
                };
                accepted = self.line_search(&x, &cur, grad_norm, &dir, base * self.opts.initial_step);
                if accepted.is_some() || attempt == 1 || !used_memory {
                    break;
                }
                // quasi-Newton direction failed: drop memory, fall back
                history.clear();
                used_memory = false;
                dir = self.direction(&cur.grad, &history, &x);
            }
            let Some((next_x, next, step)) = accepted else {
                // no decrease available at floating-point resolution
                break;
            };
            if !used_memory {
                steepest_step = step;
            }

            if memory > 0 {
                let s: Vec<f64> = next_x.iter().zip(&x).map(|(a, b)| a - b).collect();
                let y: Vec<f64> = next.grad.iter().zip(&cur.grad).map(|(a, b)| a - b).collect();
                let sy = dot(&s, &y);
                if sy > 1e-12 * sqrt(dot(&s, &s) * dot(&y, &y)) {
                    if history.len() == memory {
                        history.pop_front();
                    }
                    history.push_back((s, y, 1.0 / sy));
                }
            }

            rel_change = abs(libm::expm1(next.f - cur.f));
            x = next_x;
            cur = next;
            grad_norm = self.projected_norm(&x, &cur.grad);
            trace.push(TraceEntry { iter: iters, log_lambda: cur.f, grad_norm });
        }
        if !converged && rel_change < self.opts.tol_lambda && grad_norm < self.opts.tol_grad {
            converged = true;
        }

        let grid = self.model.grid();
        let field = ScalarField::from_interior(grid, &x)?;
        let log_lambda1 = self.model.log_rayleigh(&field)?;
        let p = self.model.p();
        let report = EigenReport {
            p,
            alpha: self.model.alpha(),
            beta: self.model.beta(),
            lambda1: exp(log_lambda1),
            log_lambda1,
            lambda1_root: exp(log_lambda1 / p),
            field,
            iters,
            converged,
            rel_lambda_change: rel_change,
            grad_norm,
            trace,
        };
        if converged {
            Ok(report)
        } else {
            Err(Error::NotConverged(Box::new(report)))
        }
    }

    /// Descent direction `d`; the step is `x - τ d`.
    fn direction(&self, g: &[f64], history: &VecDeque<(Vec<f64>, Vec<f64>, f64)>, x: &[f64]) -> Vec<f64> {
        // variables pinned at zero with an outward gradient stay put
        let free = |i: usize| !(x[i] <= 0.0 && g[i] > 0.0);
        let mut q: Vec<f64> = (0..g.len()).map(|i| if free(i) { g[i] } else { 0.0 }).collect();
        if history.is_empty() {
            // natural scale: a unit step changes the largest entry by ~10% of max |x|
            let gmax = q.iter().fold(0.0f64, |m, v| m.max(abs(*v)));
            let xmax = x.iter().fold(0.0f64, |m, v| m.max(abs(*v)));
            if gmax > 0.0 {
                let scale = 0.1 * xmax / gmax;
                q.iter_mut().for_each(|v| *v *= scale);
            }
            return q;
        }
        let mut alphas = Vec::with_capacity(history.len());
        for (s, y, rho) in history.iter().rev() {
            let a = rho * dot(s, &q);
            for (qi, yi) in q.iter_mut().zip(y) {
                *qi -= a * yi;
            }
            alphas.push(a);
        }
        let (s, y, _) = history.back().expect("nonempty history");
        let gamma = dot(s, y) / dot(y, y);
        q.iter_mut().for_each(|v| *v *= gamma);
        for ((s, y, rho), a) in history.iter().zip(alphas.into_iter().rev()) {
            let b = rho * dot(y, &q);
            for (qi, si) in q.iter_mut().zip(s) {
                *qi += (a - b) * si;
            }
        }
        for (i, qi) in q.iter_mut().enumerate() {
            if !free(i) {
                *qi = 0.0;
            }
        }
        q
    }

    /// Armijo backtracking along the projected path; returns the accepted
    /// normalized iterate, its evaluation and the step length.
    ///
    /// Once `ln R` is flat to rounding, a step is also accepted when it keeps
    /// `ln R` within [`FLAT_LOG_TOL`] and shrinks the projected gradient.
    fn line_search(
        &mut self,
        x: &[f64],
        cur: &Eval,
        cur_norm: f64,
        dir: &[f64],
        first: f64,
    ) -> Option<(Vec<f64>, Eval, f64)> {
        let mut tau = first;
        let mut trial = vec![0.0; x.len()];
        for _ in 0..80 {
            for i in 0..x.len() {
                trial[i] = (x[i] - tau * dir[i]).max(0.0);
            }
            let predicted: f64 = cur.grad.iter().zip(trial.iter().zip(x)).map(|(g, (t, xi))| g * (t - xi)).sum();
            if predicted == 0.0 {
                return None;
            }
            if predicted < 0.0 {
                if let Some(f) = self.objective(&trial) {
                    let armijo = f <= cur.f + self.opts.sufficient_decrease * predicted;
                    let flat = f <= cur.f + FLAT_LOG_TOL;
                    if armijo || flat {
                        let mut next_x = trial.clone();
                        if self.normalize(&mut next_x) {
                            if let Some(next) = self.evaluate(&next_x) {
                                if (armijo && next.f <= cur.f)
                                    || (next.f <= cur.f + FLAT_LOG_TOL
                                        && self.projected_norm(&next_x, &next.grad) < cur_norm)
                                {
                                    return Some((next_x, next, tau));
                                }
                            }
                        }
                    }
                }
            }
            tau *= self.opts.shrink;
        }
        None
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
