//! Scalar helpers: exponent handling for `|x|^p` and nonnegative values kept
//! in the log domain.

/// Above this exponent the energies factor out the largest difference before
/// raising to the power `p`; below it plain accumulation is exact enough.
pub const LOG_DOMAIN_THRESHOLD: f64 = 64.0;

#[inline]
pub(crate) fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub(crate) fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub(crate) fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline]
pub(crate) fn floor(x: f64) -> f64 {
    libm::floor(x)
}

#[inline]
pub(crate) fn ceil(x: f64) -> f64 {
    libm::ceil(x)
}

#[inline]
pub(crate) fn abs(x: f64) -> f64 {
    libm::fabs(x)
}

#[inline]
pub(crate) fn hypot(x: f64, y: f64) -> f64 {
    libm::hypot(x, y)
}

/// `ln(e^a + e^b)` without overflow; `-inf` acts as the additive zero.
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + libm::log1p(exp(lo - hi))
}

/// `x^n` for `x >= 0` by binary exponentiation.
#[inline]
fn powu(mut x: f64, mut n: u32) -> f64 {
    let mut acc = 1.0;
    while n > 0 {
        if n & 1 == 1 {
            acc *= x;
        }
        x *= x;
        n >>= 1;
    }
    acc
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct Power {
    exp: f64,
    int: Option<u32>,
}

impl Power {
    fn new(exp: f64) -> Self {
        let int = if (0.0..=4096.0).contains(&exp) && floor(exp) == exp { Some(exp as u32) } else { None };
        Power { exp, int }
    }

    #[inline]
    fn apply(&self, x: f64) -> f64 {
        match self.int {
            Some(n) => powu(x, n),
            None => libm::pow(x, self.exp),
        }
    }
}

/// An exponent `p >= 1` with fast paths for integer values.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Exponent {
    p: f64,
    full: Power,
    less_one: Power,
}

impl Exponent {
    pub fn new(p: f64) -> Self {
        Exponent { p, full: Power::new(p), less_one: Power::new(p - 1.0) }
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.p
    }

    /// `|x|^p`.
    #[inline]
    pub fn pow(&self, x: f64) -> f64 {
        self.full.apply(abs(x))
    }

    /// Derivative of `|x|^p`, i.e. `p |x|^{p-2} x`.
    #[inline]
    pub fn dpow(&self, x: f64) -> f64 {
        let m = self.p * self.less_one.apply(abs(x));
        if x < 0.0 {
            -m
        } else {
            m
        }
    }

    /// Whether sums of `|x|^p` are accumulated with a factored-out scale.
    #[inline]
    pub fn uses_log_domain(&self) -> bool {
        self.p > LOG_DOMAIN_THRESHOLD
    }
}

/// A nonnegative quantity stored as its natural logarithm. Zero is `ln = -inf`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogValue {
    ln: f64,
}

impl LogValue {
    pub const ZERO: LogValue = LogValue { ln: f64::NEG_INFINITY };

    pub fn from_ln(ln: f64) -> Self {
        LogValue { ln }
    }

    /// Panics in debug builds when `v` is negative.
    pub fn from_value(v: f64) -> Self {
        debug_assert!(v >= 0.0);
        LogValue { ln: ln(v) }
    }

    /// `scale^p * sum`, the result of a scaled power accumulation.
    pub fn from_scaled(sum: f64, scale: f64, p: f64) -> Self {
        if sum <= 0.0 || scale <= 0.0 {
            return LogValue::ZERO;
        }
        LogValue { ln: p * ln(scale) + ln(sum) }
    }

    #[inline]
    pub fn ln(&self) -> f64 {
        self.ln
    }

    /// The linear value; may underflow to 0 for very large `p`.
    #[inline]
    pub fn value(&self) -> f64 {
        exp(self.ln)
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.ln == f64::NEG_INFINITY
    }

    pub fn plus(self, other: LogValue) -> LogValue {
        LogValue { ln: log_add_exp(self.ln, other.ln) }
    }

    /// Multiplies by a nonnegative factor.
    pub fn scale(self, factor: f64) -> LogValue {
        if factor <= 0.0 {
            LogValue::ZERO
        } else {
            LogValue { ln: self.ln + ln(factor) }
        }
    }

    /// `self^{1/p}` as a linear value.
    pub fn root(&self, p: f64) -> f64 {
        exp(self.ln / p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_and_fractional_powers_agree_with_libm() {
        for &p in &[2.0, 3.0, 6.0, 64.0, 2.5, 7.25] {
            let e = Exponent::new(p);
            for &x in &[0.0, 0.3, -0.7, 1.0, 2.5] {
                let want = libm::pow(libm::fabs(x), p);
                assert!((e.pow(x) - want).abs() <= 1e-14 * want.max(1e-300));
            }
        }
    }

    #[test]
    fn dpow_matches_central_difference() {
        let e = Exponent::new(3.0);
        let x = -0.8;
        let eps = 1e-6;
        let fd = (e.pow(x + eps) - e.pow(x - eps)) / (2.0 * eps);
        assert!((e.dpow(x) - fd).abs() < 1e-8);
        assert_eq!(Exponent::new(2.0).dpow(0.0), 0.0);
    }

    #[test]
    fn log_add_exp_handles_zero() {
        assert_eq!(log_add_exp(f64::NEG_INFINITY, 1.5), 1.5);
        let s = log_add_exp(ln(2.0), ln(3.0));
        assert!((exp(s) - 5.0).abs() < 1e-14);
        assert!(LogValue::ZERO.plus(LogValue::ZERO).is_zero());
    }

    #[test]
    fn scaled_log_value_survives_underflow() {
        // 0.5^2000 underflows, its log does not.
        let v = LogValue::from_scaled(1.0, 0.5, 2000.0);
        assert_eq!(v.value(), 0.0);
        assert!((v.root(2000.0) - 0.5).abs() < 1e-15);
    }
}
