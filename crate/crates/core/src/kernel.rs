//! Radial, compactly supported kernels with unit mass and their lattice
//! quadrature weights.

use alloc::format;
use alloc::vec::Vec;

use crate::geometry::Point;
use crate::num::{abs, exp, floor, hypot};
use crate::{Error, Result};

/// Smallest number of lattice steps across the kernel radius.
pub const MIN_STEPS_PER_RADIUS: f64 = 4.0;

/// Radial shape `φ(s)` on `s = |x| / R_J ∈ [0, 1]`, zero for `s >= 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Profile {
    /// `(1 - s)₊`
    Tent,
    /// `exp(1 - 1 / (1 - s²))`, smooth with `φ(0) = 1`.
    Bump,
    /// `(1 - s²)₊`
    TruncatedQuadratic,
}

impl Profile {
    pub fn eval(self, s: f64) -> f64 {
        if !(s < 1.0) {
            return 0.0;
        }
        let s = s.max(0.0);
        match self {
            Profile::Tent => 1.0 - s,
            Profile::Bump => exp(1.0 - 1.0 / (1.0 - s * s)),
            Profile::TruncatedQuadratic => 1.0 - s * s,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Profile::Tent => "tent",
            Profile::Bump => "bump",
            Profile::TruncatedQuadratic => "truncated-quadratic",
        }
    }

    /// `∫_{ℝ^N} φ(|x|) dx` with unit support radius.
    fn unit_mass(self, dim: usize) -> f64 {
        match (self, dim) {
            (Profile::Tent, 1) => 1.0,
            (Profile::Tent, _) => core::f64::consts::PI / 3.0,
            (Profile::TruncatedQuadratic, 1) => 4.0 / 3.0,
            (Profile::TruncatedQuadratic, _) => core::f64::consts::FRAC_PI_2,
            (Profile::Bump, 1) => 2.0 * simpson(|s| self.eval(s), 0.0, 1.0, 4096),
            (Profile::Bump, _) => 2.0 * core::f64::consts::PI * simpson(|s| s * self.eval(s), 0.0, 1.0, 4096),
        }
    }
}

impl core::str::FromStr for Profile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tent" => Ok(Profile::Tent),
            "bump" => Ok(Profile::Bump),
            "truncated-quadratic" | "truncated_quadratic" => Ok(Profile::TruncatedQuadratic),
            other => Err(Error::InvalidKernel(format!("unknown profile {other:?}"))),
        }
    }
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, intervals: usize) -> f64 {
    let n = intervals + intervals % 2;
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + i as f64 * h);
    }
    acc * h / 3.0
}

/// `J(x) = c · φ(|x| / R_J)` with `c` fixed by `∫ J = 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Kernel {
    profile: Profile,
    r_j: f64,
    dim: usize,
    norm_const: f64,
}

impl Kernel {
    pub fn new(profile: Profile, r_j: f64, dim: usize) -> Result<Self> {
        if !(r_j.is_finite() && r_j > 0.0) {
            return Err(Error::InvalidKernel(format!("support radius must be positive, got {r_j}")));
        }
        if dim != 1 && dim != 2 {
            return Err(Error::InvalidKernel(format!("dimension must be 1 or 2, got {dim}")));
        }
        let scale = if dim == 1 { r_j } else { r_j * r_j };
        let norm_const = 1.0 / (profile.unit_mass(dim) * scale);
        Ok(Kernel { profile, r_j, dim, norm_const })
    }

    pub fn tent(r_j: f64, dim: usize) -> Result<Self> {
        Kernel::new(Profile::Tent, r_j, dim)
    }

    pub fn profile(&self) -> Profile {
        self.profile
    }

    pub fn r_j(&self) -> f64 {
        self.r_j
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn norm_const(&self) -> f64 {
        self.norm_const
    }

    pub fn evaluate_radius(&self, r: f64) -> f64 {
        self.norm_const * self.profile.eval(r / self.r_j)
    }

    pub fn evaluate(&self, displacement: Point) -> f64 {
        let r = if self.dim == 1 { abs(displacement[0]) } else { hypot(displacement[0], displacement[1]) };
        self.evaluate_radius(r)
    }
}

/// A lattice displacement inside the closed support of `J`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Offset {
    pub di: i32,
    pub dj: i32,
    /// `|d|` in spatial units.
    pub distance: f64,
    /// Renormalized quadrature weight; the weights sum to one.
    pub weight: f64,
}

/// Midpoint quadrature of `J` on the lattice `hℤ^N`, rescaled to unit mass.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightTable {
    h: f64,
    r_j: f64,
    offsets: Vec<Offset>,
    raw_sum: f64,
}

impl WeightTable {
    /// Fails with [`Error::ResolutionTooCoarse`] when `h > R_J / 4`.
    pub fn new(kernel: &Kernel, h: f64) -> Result<Self> {
        let r_j = kernel.r_j();
        let limit = r_j / MIN_STEPS_PER_RADIUS;
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidParameter(format!("grid spacing must be positive, got {h}")));
        }
        if h > limit * (1.0 + 1e-12) {
            return Err(Error::ResolutionTooCoarse { h, limit, what: "kernel radius / 4" });
        }
        let cell = if kernel.dim() == 1 { h } else { h * h };
        let reach = floor(r_j / h + 1e-9) as i32;
        let rows = if kernel.dim() == 1 { 0 } else { reach };
        let mut offsets = Vec::new();
        for dj in -rows..=rows {
            for di in -reach..=reach {
                let distance = h * hypot(di as f64, dj as f64);
                if distance > r_j * (1.0 + 1e-12) {
                    continue;
                }
                let weight = kernel.evaluate_radius(distance) * cell;
                offsets.push(Offset { di, dj, distance, weight });
            }
        }
        let raw_sum: f64 = offsets.iter().map(|o| o.weight).sum();
        for o in &mut offsets {
            o.weight /= raw_sum;
        }
        Ok(WeightTable { h, r_j, offsets, raw_sum })
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn r_j(&self) -> f64 {
        self.r_j
    }

    /// All offsets with `|d| <= R_J`, including zero-weight ones on the rim.
    pub fn offsets(&self) -> &[Offset] {
        &self.offsets
    }

    /// `Σ J(d_k) h^N` before rescaling.
    pub fn raw_sum(&self) -> f64 {
        self.raw_sum
    }

    pub fn len(&self) -> usize {
        self.offsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offsets.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tent_1d_values() {
        let k = Kernel::tent(1.0, 1).unwrap();
        assert_eq!(k.norm_const(), 1.0);
        assert_eq!(k.evaluate([0.5, 0.0]), 0.5);
        assert_eq!(k.evaluate([1.0, 0.0]), 0.0);
        assert_eq!(k.evaluate([-1.0, 0.0]), 0.0);
        assert_eq!(k.evaluate([1.5, 0.0]), 0.0);
        assert!(k.evaluate([0.0, 0.0]) > 0.0);
    }

    #[test]
    fn every_profile_is_positive_at_origin_and_continuous_at_rim() {
        for profile in [Profile::Tent, Profile::Bump, Profile::TruncatedQuadratic] {
            for dim in [1, 2] {
                let k = Kernel::new(profile, 0.7, dim).unwrap();
                assert!(k.evaluate([0.0, 0.0]) > 0.0);
                assert!(k.evaluate_radius(0.7 * (1.0 - 1e-9)) < 1e-6);
                assert_eq!(k.evaluate_radius(0.7), 0.0);
            }
        }
    }

    #[test]
    fn normalization_matches_fine_quadrature() {
        // Independent check of ∫J = 1 by a fine 2D midpoint rule.
        for profile in [Profile::Tent, Profile::Bump, Profile::TruncatedQuadratic] {
            let k = Kernel::new(profile, 1.3, 2).unwrap();
            let n = 800;
            let h = 2.0 * 1.3 / n as f64;
            let mut acc = 0.0;
            for j in 0..n {
                for i in 0..n {
                    let x = -1.3 + (i as f64 + 0.5) * h;
                    let y = -1.3 + (j as f64 + 0.5) * h;
                    acc += k.evaluate([x, y]) * h * h;
                }
            }
            assert!((acc - 1.0).abs() < 1e-4, "{profile:?}: {acc}");
        }
    }

    #[test]
    fn tent_weights_enumerated_by_hand() {
        let k = Kernel::tent(1.0, 1).unwrap();
        let w = WeightTable::new(&k, 0.25).unwrap();
        assert_eq!(w.len(), 9);
        // raw weights (1 - |d|)·h: 0, .0625, .125, .1875, .25, .1875, .125, .0625, 0
        assert!((w.raw_sum() - 1.0).abs() < 1e-15);
        let total: f64 = w.offsets().iter().map(|o| o.weight).sum();
        assert!((total - 1.0).abs() < 1e-15);
        assert_eq!(w.offsets()[0].weight, 0.0);
        assert!((w.offsets()[4].weight - 0.25).abs() < 1e-15);
    }

    #[test]
    fn weights_are_symmetric_and_supported() {
        let k = Kernel::new(Profile::Bump, 1.0, 2).unwrap();
        let w = WeightTable::new(&k, 0.125).unwrap();
        for o in w.offsets() {
            assert!(o.distance <= 1.0 + 1e-12);
            let mirror = w.offsets().iter().find(|m| m.di == -o.di && m.dj == -o.dj).expect("mirror offset");
            assert_eq!(mirror.weight, o.weight);
        }
        let total: f64 = w.offsets().iter().map(|o| o.weight).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn raw_mass_converges_under_refinement() {
        for profile in [Profile::Tent, Profile::Bump, Profile::TruncatedQuadratic] {
            for dim in [1, 2] {
                let k = Kernel::new(profile, 1.0, dim).unwrap();
                for n in [4.0, 8.0, 16.0, 32.0] {
                    let h = 1.0 / n;
                    let err = (WeightTable::new(&k, h).unwrap().raw_sum() - 1.0).abs();
                    assert!(err <= h * h, "{profile:?} dim {dim} h {h}: {err}");
                }
            }
        }
    }

    #[test]
    fn coarse_grid_rejected() {
        let k = Kernel::tent(1.0, 1).unwrap();
        assert!(matches!(WeightTable::new(&k, 0.3), Err(Error::ResolutionTooCoarse { .. })));
        assert!(WeightTable::new(&k, 0.25).is_ok());
    }
}
