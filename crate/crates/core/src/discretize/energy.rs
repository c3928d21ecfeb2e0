use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::grid::{Grid, ScalarField};
use crate::kernel::WeightTable;
use crate::num::{abs, exp, ln, log_add_exp, sqrt, Exponent, LogValue};
use crate::{Error, Result};

/// Local and nonlocal parts of `H_{J,p}(u, u)`, each in the log domain.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergyParts {
    /// `Σ_cells |∇_h u|^p h^N`
    pub local: LogValue,
    /// `Σ_x Σ_k w_k |u(x) - u(x + d_k)|^p h^N` over `x ∈ Ω_J`
    pub nonlocal: LogValue,
}

impl EnergyParts {
    /// `α·local + β·nonlocal`.
    pub fn total(&self, alpha: f64, beta: f64) -> LogValue {
        self.local.scale(alpha).plus(self.nonlocal.scale(beta))
    }
}

/// The discrete energy `α ∫|∇u|^p + β ∫∫ J(x-y)|u(x)-u(y)|^p` on a grid,
/// together with `‖u‖_p^p` and their derivatives.
///
/// The nonlocal double sum runs over interior nodes only: a pair with one
/// endpoint in the band appears once from the interior side and is counted
/// twice, which reproduces the full symmetric sum over `Ω_J × Ω_J`.
#[derive(Clone, Debug)]
pub struct EnergyModel<'a> {
    grid: &'a Grid,
    exponent: Exponent,
    alpha: f64,
    beta: f64,
    /// (flat offset, weight) for offsets with nonzero weight
    pairs: Vec<(isize, f64)>,
}

impl<'a> EnergyModel<'a> {
    pub fn new(grid: &'a Grid, weights: &WeightTable, p: f64, alpha: f64, beta: f64) -> Result<Self> {
        if !(p >= 2.0 && p.is_finite()) {
            return Err(Error::UnsupportedExponent(p));
        }
        if !(alpha >= 0.0 && beta >= 0.0 && alpha + beta > 0.0) || !(alpha.is_finite() && beta.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "need alpha, beta >= 0 with alpha + beta > 0, got ({alpha}, {beta})"
            )));
        }
        grid.check_weights(weights)?;
        let pairs = weights
            .offsets()
            .iter()
            .filter(|o| o.weight > 0.0 && (o.di, o.dj) != (0, 0))
            .map(|o| (grid.linear_offset(o.di, o.dj), o.weight))
            .collect();
        Ok(EnergyModel { grid, exponent: Exponent::new(p), alpha, beta, pairs })
    }

    pub fn grid(&self) -> &Grid {
        self.grid
    }

    pub fn p(&self) -> f64 {
        self.exponent.value()
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Same model with a different exponent.
    pub fn with_p(&self, p: f64) -> Result<Self> {
        if !(p >= 2.0 && p.is_finite()) {
            return Err(Error::UnsupportedExponent(p));
        }
        Ok(EnergyModel { exponent: Exponent::new(p), ..self.clone() })
    }

    #[inline]
    fn neighbor(idx: usize, shift: isize) -> usize {
        (idx as isize + shift) as usize
    }

    /// Forward-difference gradient of the cell based at `idx`.
    #[inline]
    fn cell_gradient(&self, u: &[f64], idx: usize) -> (f64, f64) {
        let h = self.grid.h();
        let gx = (u[idx + 1] - u[idx]) / h;
        let gy = if self.grid.dim() == 2 {
            let nx = self.grid.shape().0;
            (u[idx + nx] - u[idx]) / h
        } else {
            0.0
        };
        (gx, gy)
    }

    fn local_scale(&self, u: &[f64]) -> f64 {
        if !self.exponent.uses_log_domain() {
            return 1.0;
        }
        self.grid.cells().iter().fold(0.0, |m, &c| {
            let (gx, gy) = self.cell_gradient(u, c);
            m.max(sqrt(gx * gx + gy * gy))
        })
    }

    fn local_sum(&self, u: &[f64], scale: f64) -> f64 {
        let mut acc = 0.0;
        for &c in self.grid.cells() {
            let (gx, gy) = self.cell_gradient(u, c);
            let t = sqrt(gx * gx + gy * gy) / scale;
            acc += self.exponent.pow(t);
        }
        acc
    }

    /// `out += coef · ∂/∂u Σ (|∇_h u| / scale)^p`
    fn local_sum_gradient(&self, u: &[f64], scale: f64, coef: f64, out: &mut [f64]) {
        let h = self.grid.h();
        let nx = self.grid.shape().0;
        for &c in self.grid.cells() {
            let (gx, gy) = self.cell_gradient(u, c);
            let t = sqrt(gx * gx + gy * gy) / scale;
            if t == 0.0 {
                continue;
            }
            // ∂ t^p / ∂g = p t^{p-2} (g / scale) / scale
            let m = coef * self.exponent.dpow(t) / (t * scale * scale * h);
            let (ax, ay) = (m * gx, m * gy);
            out[c + 1] += ax;
            out[c] -= ax;
            if self.grid.dim() == 2 {
                out[c + nx] += ay;
                out[c] -= ay;
            }
        }
    }

    fn nonlocal_scale(&self, u: &[f64]) -> f64 {
        if !self.exponent.uses_log_domain() {
            return 1.0;
        }
        let mut m = 0.0f64;
        for &x in self.grid.interior() {
            for &(shift, _) in &self.pairs {
                m = m.max(abs(u[x] - u[Self::neighbor(x, shift)]));
            }
        }
        m
    }

    fn nonlocal_sum(&self, u: &[f64], scale: f64) -> f64 {
        let mut acc = 0.0;
        for &x in self.grid.interior() {
            for &(shift, w) in &self.pairs {
                let y = Self::neighbor(x, shift);
                let mult = if self.grid.is_interior(y) { 1.0 } else { 2.0 };
                acc += mult * w * self.exponent.pow((u[x] - u[y]) / scale);
            }
        }
        acc
    }

    fn nonlocal_sum_gradient(&self, u: &[f64], scale: f64, coef: f64, out: &mut [f64]) {
        for &x in self.grid.interior() {
            let mut acc = 0.0;
            for &(shift, w) in &self.pairs {
                let y = Self::neighbor(x, shift);
                acc += w * self.exponent.dpow((u[x] - u[y]) / scale);
            }
            out[x] += 2.0 * coef * acc / scale;
        }
    }

    fn norm_scale(&self, u: &[f64]) -> f64 {
        if !self.exponent.uses_log_domain() {
            return 1.0;
        }
        self.grid.interior().iter().fold(0.0, |m, &x| m.max(abs(u[x])))
    }

    fn norm_sum(&self, u: &[f64], scale: f64) -> f64 {
        self.grid.interior().iter().map(|&x| self.exponent.pow(u[x] / scale)).sum()
    }

    fn finish(&self, sum: f64, scale: f64) -> LogValue {
        LogValue::from_scaled(sum, scale, self.p()).scale(self.grid.cell_volume())
    }

    /// `∫|∇u|^p` with forward differences on every cell touching `Ω`.
    pub fn local_energy(&self, field: &ScalarField) -> LogValue {
        let u = field.values();
        let s = self.local_scale(u);
        self.finish(self.local_sum(u, s), s)
    }

    /// `∫∫ J(x - y) |u(x) - u(y)|^p dx dy`.
    pub fn nonlocal_energy(&self, field: &ScalarField) -> LogValue {
        let u = field.values();
        let s = self.nonlocal_scale(u);
        self.finish(self.nonlocal_sum(u, s), s)
    }

    /// `‖u‖_p^p` over the interior nodes.
    pub fn norm_pow(&self, field: &ScalarField) -> LogValue {
        let u = field.values();
        let s = self.norm_scale(u);
        self.finish(self.norm_sum(u, s), s)
    }

    pub fn parts(&self, field: &ScalarField) -> EnergyParts {
        EnergyParts {
            local: if self.alpha > 0.0 { self.local_energy(field) } else { LogValue::ZERO },
            nonlocal: if self.beta > 0.0 { self.nonlocal_energy(field) } else { LogValue::ZERO },
        }
    }

    /// `H(u, u) = α·local + β·nonlocal`.
    pub fn energy(&self, field: &ScalarField) -> LogValue {
        self.parts(field).total(self.alpha, self.beta)
    }

    /// `ln (H(u, u) / ‖u‖_p^p)`.
    pub fn log_rayleigh(&self, field: &ScalarField) -> Result<f64> {
        let norm = self.norm_pow(field);
        if norm.is_zero() {
            return Err(Error::UndefinedQuotient);
        }
        Ok(self.energy(field).ln() - norm.ln())
    }

    pub fn rayleigh(&self, field: &ScalarField) -> Result<f64> {
        self.log_rayleigh(field).map(exp)
    }

    /// Nodal partial derivatives of `H(u, u)`; zero outside `Ω`.
    pub fn energy_gradient(&self, field: &ScalarField) -> Vec<f64> {
        let mut grad = vec![0.0; field.len()];
        let energy = self.log_energy_gradient(field.values(), &mut grad);
        let factor = energy.value();
        for g in &mut grad {
            *g *= factor;
        }
        grad
    }

    /// Writes `∇ ln H` into `out` and returns `H`.
    fn log_energy_gradient(&self, u: &[f64], out: &mut [f64]) -> LogValue {
        out.iter_mut().for_each(|g| *g = 0.0);
        let p = self.p();
        let vol = self.grid.cell_volume();

        let (mut ln_local, mut ln_nonlocal) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
        let (mut s_local, mut sum_local) = (1.0, 0.0);
        let (mut s_nonlocal, mut sum_nonlocal) = (1.0, 0.0);
        if self.alpha > 0.0 {
            s_local = self.local_scale(u);
            sum_local = self.local_sum(u, s_local);
            ln_local = LogValue::from_scaled(sum_local, s_local, p).ln() + ln(self.alpha * vol);
        }
        if self.beta > 0.0 {
            s_nonlocal = self.nonlocal_scale(u);
            sum_nonlocal = self.nonlocal_sum(u, s_nonlocal);
            ln_nonlocal = LogValue::from_scaled(sum_nonlocal, s_nonlocal, p).ln() + ln(self.beta * vol);
        }
        let ln_total = log_add_exp(ln_local, ln_nonlocal);
        if ln_total == f64::NEG_INFINITY {
            return LogValue::ZERO;
        }
        // ∇ ln H = Σ_t (H_t / H) ∇ ln H_t
        if sum_local > 0.0 {
            let share = exp(ln_local - ln_total);
            self.local_sum_gradient(u, s_local, share / sum_local, out);
        }
        if sum_nonlocal > 0.0 {
            let share = exp(ln_nonlocal - ln_total);
            self.nonlocal_sum_gradient(u, s_nonlocal, share / sum_nonlocal, out);
        }
        for (i, g) in out.iter_mut().enumerate() {
            if !self.grid.is_interior(i) {
                *g = 0.0;
            }
        }
        LogValue::from_ln(ln_total)
    }

    /// `f = ln R(u)` and `∇f`, the objective of the eigensolver.
    ///
    /// Returns `None` when `u` vanishes on `Ω`.
    pub(crate) fn log_rayleigh_gradient(&self, u: &[f64], out: &mut [f64]) -> Option<f64> {
        let energy = self.log_energy_gradient(u, out);
        let s = self.norm_scale(u);
        let sum = self.norm_sum(u, s);
        if sum <= 0.0 || energy.is_zero() {
            return None;
        }
        let norm = self.finish(sum, s);
        let coef = 1.0 / (sum * s);
        for &x in self.grid.interior() {
            out[x] -= coef * self.exponent.dpow(u[x] / s);
        }
        Some(energy.ln() - norm.ln())
    }

    /// `ln R(u)` without the gradient.
    pub(crate) fn log_rayleigh_raw(&self, u: &[f64]) -> Option<f64> {
        let p = self.p();
        let vol = self.grid.cell_volume();
        let mut total = f64::NEG_INFINITY;
        if self.alpha > 0.0 {
            let s = self.local_scale(u);
            let l = LogValue::from_scaled(self.local_sum(u, s), s, p).ln() + ln(self.alpha * vol);
            total = log_add_exp(total, l);
        }
        if self.beta > 0.0 {
            let s = self.nonlocal_scale(u);
            let l = LogValue::from_scaled(self.nonlocal_sum(u, s), s, p).ln() + ln(self.beta * vol);
            total = log_add_exp(total, l);
        }
        let s = self.norm_scale(u);
        let norm = self.finish(self.norm_sum(u, s), s);
        if norm.is_zero() || total == f64::NEG_INFINITY {
            return None;
        }
        Some(total - norm.ln())
    }
}
