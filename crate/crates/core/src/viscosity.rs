//! Discrete limit operators and the residual of `max{M₁(u), M₂(u)} = 0`.
//!
//! `L⁺u(x)` and `L⁻u(x)` are the largest and smallest `u(y) - u(x)` over
//! lattice nodes `y` with `|x - y| <= R_J`; their sum is `L_{J,∞}u(x)`.
//! Gradients and Hessians use centered differences, independent of the
//! forward differences in the energy.

use alloc::vec::Vec;

use crate::discretize::{Grid, ScalarField};
use crate::geometry::Point;
use crate::num::{abs, sqrt};

/// Relative gradient size below which a node is flagged degenerate.
pub const DEGENERATE_GRADIENT: f64 = 1e-6;

/// Distance to `∂Ω`, in grid steps, beyond which a node counts as robust.
pub const ROBUST_DEPTH: f64 = 2.0;

/// `(L⁺u(x), L⁻u(x))`; the pair `y = x` is admissible, so `L⁺ >= 0 >= L⁻`.
pub fn nonlocal_sup_inf(field: &ScalarField, grid: &Grid, x: usize) -> (f64, f64) {
    sup_inf_with(field.values(), &grid.support_offsets(), x)
}

fn sup_inf_with(u: &[f64], shifts: &[(i32, i32, isize)], x: usize) -> (f64, f64) {
    let (mut hi, mut lo) = (0.0f64, 0.0f64);
    for &(_, _, s) in shifts {
        let y = (x as isize + s) as usize;
        let d = u[y] - u[x];
        hi = hi.max(d);
        lo = lo.min(d);
    }
    (hi, lo)
}

/// Centered-difference gradient; `None` without a full stencil.
pub fn centered_gradient(field: &ScalarField, grid: &Grid, x: usize) -> Option<[f64; 2]> {
    let u = field.values();
    let h2 = 2.0 * grid.h();
    let gx = (u[grid.neighbor(x, 1, 0)?] - u[grid.neighbor(x, -1, 0)?]) / h2;
    let gy = if grid.dim() == 2 { (u[grid.neighbor(x, 0, 1)?] - u[grid.neighbor(x, 0, -1)?]) / h2 } else { 0.0 };
    Some([gx, gy])
}

/// `⟨D²u ∇u, ∇u⟩` from centered differences.
pub fn infinity_laplacian(field: &ScalarField, grid: &Grid, x: usize) -> Option<f64> {
    let u = field.values();
    let h = grid.h();
    let at = |di, dj| grid.neighbor(x, di, dj).map(|i| u[i]);
    let [gx, gy] = centered_gradient(field, grid, x)?;
    let uxx = (at(1, 0)? - 2.0 * u[x] + at(-1, 0)?) / (h * h);
    if grid.dim() == 1 {
        return Some(gx * gx * uxx);
    }
    let uyy = (at(0, 1)? - 2.0 * u[x] + at(0, -1)?) / (h * h);
    let uxy = (at(1, 1)? - at(1, -1)? - at(-1, 1)? + at(-1, -1)?) / (4.0 * h * h);
    Some(gx * gx * uxx + 2.0 * gx * gy * uxy + gy * gy * uyy)
}

/// `min{-Λu - L⁻u, -(L⁺u + L⁻u), -L⁻u - |∇u|}`
pub fn branch_m1(u: f64, sup_disp: f64, inf_disp: f64, grad_mag: f64, lambda: f64) -> f64 {
    (-lambda * u - inf_disp).min(-(sup_disp + inf_disp)).min(-inf_disp - grad_mag)
}

/// `min{|∇u| - Λu, -Δ_∞u, |∇u| - L⁺u, |∇u| + L⁻u}`
pub fn branch_m2(u: f64, sup_disp: f64, inf_disp: f64, grad_mag: f64, inf_lap: f64, lambda: f64) -> f64 {
    (grad_mag - lambda * u).min(-inf_lap).min(grad_mag - sup_disp).min(grad_mag + inf_disp)
}

/// Operator values at one interior node.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NodeResidual {
    pub index: usize,
    pub point: Point,
    pub value: f64,
    pub sup_disp: f64,
    pub inf_disp: f64,
    pub grad_mag: f64,
    pub inf_lap: f64,
    pub m1: f64,
    pub m2: f64,
    pub residual: f64,
    /// Farther than `2h` from `∂Ω`.
    pub robust: bool,
    /// `|∇u|` below `10⁻⁶ ‖u‖_∞ / R_Ω`.
    pub degenerate: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ViscosityResidual {
    pub lambda: f64,
    pub nodes: Vec<NodeResidual>,
    /// `max |residual|` over robust nodes.
    pub sup_residual: f64,
    /// Mean of `|residual|` over robust nodes.
    pub mean_abs_residual: f64,
    pub robust_count: usize,
    pub degenerate_count: usize,
    /// Interior nodes without a full stencil.
    pub skipped: usize,
}

impl ViscosityResidual {
    /// The robust node with the largest `|residual|`.
    pub fn worst(&self) -> Option<&NodeResidual> {
        self.nodes.iter().filter(|n| n.robust).max_by(|a, b| abs(a.residual).total_cmp(&abs(b.residual)))
    }
}

/// Evaluates `M₁`, `M₂` and `max{M₁, M₂}` at every interior node.
pub fn residual_report(field: &ScalarField, grid: &Grid, lambda: f64) -> ViscosityResidual {
    let u = field.values();
    let h = grid.h();
    let r_omega = grid.inradius().0;
    let flat = DEGENERATE_GRADIENT * field.sup_norm() / r_omega;
    let domain = grid.domain();
    let shifts = grid.support_offsets();
    let mut nodes = Vec::with_capacity(grid.interior().len());
    let mut skipped = 0;
    for &x in grid.interior() {
        let (Some(g), Some(inf_lap)) = (centered_gradient(field, grid, x), infinity_laplacian(field, grid, x)) else {
            skipped += 1;
            continue;
        };
        let grad_mag = sqrt(g[0] * g[0] + g[1] * g[1]);
        let (sup_disp, inf_disp) = sup_inf_with(u, &shifts, x);
        let m1 = branch_m1(u[x], sup_disp, inf_disp, grad_mag, lambda);
        let m2 = branch_m2(u[x], sup_disp, inf_disp, grad_mag, inf_lap, lambda);
        let point = grid.point(x);
        nodes.push(NodeResidual {
            index: x,
            point,
            value: u[x],
            sup_disp,
            inf_disp,
            grad_mag,
            inf_lap,
            m1,
            m2,
            residual: m1.max(m2),
            robust: domain.boundary_distance(point) > ROBUST_DEPTH * h,
            degenerate: grad_mag < flat,
        });
    }
    let robust: Vec<f64> = nodes.iter().filter(|n| n.robust).map(|n| abs(n.residual)).collect();
    let sup_residual = robust.iter().fold(0.0f64, |m, &r| m.max(r));
    let mean_abs_residual = if robust.is_empty() { 0.0 } else { robust.iter().sum::<f64>() / robust.len() as f64 };
    ViscosityResidual {
        lambda,
        sup_residual,
        mean_abs_residual,
        robust_count: robust.len(),
        degenerate_count: nodes.iter().filter(|n| n.degenerate).count(),
        skipped,
        nodes,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{dist, Domain};
    use crate::kernel::{Kernel, WeightTable};
    use crate::limit::build_cone;
    use rand::{Rng, SeedableRng};
    use std::vec;

    fn interval_grid(lo: f64, hi: f64, h: f64, r_j: f64) -> Grid {
        Grid::new(&Domain::interval(lo, hi).unwrap(), h, r_j).unwrap()
    }

    fn random_field(grid: &Grid, seed: u64) -> ScalarField {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let vals: Vec<f64> = grid.interior().iter().map(|_| rng.random_range(0.0..1.0)).collect();
        ScalarField::from_interior(grid, &vals).unwrap()
    }

    #[test]
    fn sup_inf_match_exhaustive_scan() {
        let d = Domain::ball([0.0, 0.0], 1.0).unwrap();
        let g = Grid::new(&d, 1.0 / 16.0, 0.5).unwrap();
        let f = random_field(&g, 3);
        for &x in g.interior() {
            let (mut hi, mut lo) = (f64::NEG_INFINITY, f64::INFINITY);
            for y in 0..g.len() {
                if dist(g.point(x), g.point(y)) <= 0.5 * (1.0 + 1e-12) {
                    hi = hi.max(f.get(y) - f.get(x));
                    lo = lo.min(f.get(y) - f.get(x));
                }
            }
            assert_eq!(nonlocal_sup_inf(&f, &g, x), (hi, lo));
        }
    }

    #[test]
    fn cone_peak_displacements() {
        let g = interval_grid(-2.0, 2.0, 1.0 / 32.0, 1.0);
        let v = build_cone(&g, [0.0, 0.0], 2.0).unwrap().field;
        let peak = g.nearest_node([0.0, 0.0]);
        let (hi, lo) = nonlocal_sup_inf(&v, &g, peak);
        assert_eq!(hi, 0.0);
        assert!((lo + 0.5).abs() < 1e-15);
    }

    #[test]
    fn infinity_laplacian_closed_forms() {
        let g = interval_grid(0.0, 1.0, 1.0 / 64.0, 0.25);
        let sq = ScalarField::from_fn(&g, |x| x[0] * x[0]);
        let at = g.nearest_node([0.5, 0.0]);
        assert!((infinity_laplacian(&sq, &g, at).unwrap() - 2.0).abs() < 1e-10);
        let affine = ScalarField::from_fn(&g, |x| 3.0 * x[0] + 0.25);
        for &x in g.interior() {
            let v = infinity_laplacian(&affine, &g, x).unwrap();
            // the boundary-adjacent stencils see the zero extension
            if g.domain().boundary_distance(g.point(x)) > 1.5 * g.h() {
                assert!(v.abs() < 1e-9, "{v}");
            }
        }

        let d = Domain::rect([0.0, -1.0], [2.0, 1.0]).unwrap();
        let g = Grid::new(&d, 1.0 / 32.0, 0.25).unwrap();
        let saddle = ScalarField::from_fn(&g, |x| x[0] * x[0] - x[1] * x[1]);
        let at = g.nearest_node([1.0, 0.0]);
        assert!((infinity_laplacian(&saddle, &g, at).unwrap() - 8.0).abs() < 1e-9);
        let mixed = ScalarField::from_fn(&g, |x| x[0] * x[1]);
        let at = g.nearest_node([1.0, 0.5]);
        // ∇u = (y, x) and u_xy = 1, so Δ_∞u = 2xy
        let expect = 2.0 * 0.5 * 1.0;
        assert!((infinity_laplacian(&mixed, &g, at).unwrap() - expect).abs() < 1e-9);
    }

    #[test]
    fn zero_field_has_zero_residual() {
        let g = interval_grid(-2.0, 2.0, 1.0 / 16.0, 1.0);
        let r = residual_report(&ScalarField::zeros(&g), &g, 0.5);
        assert!(r.nodes.iter().all(|n| n.m1 == 0.0 && n.m2 == 0.0 && n.residual == 0.0));
        assert_eq!(r.sup_residual, 0.0);
    }

    #[test]
    fn cone_on_interval_solves_limit_equation() {
        let g = interval_grid(-2.0, 2.0, 1.0 / 64.0, 1.0);
        let v = build_cone(&g, [0.0, 0.0], 2.0).unwrap().field;
        let r = residual_report(&v, &g, 0.5);
        assert!(r.sup_residual < 1e-12, "{:?}", r.worst());
        assert_eq!(r.degenerate_count, 1);
    }

    #[test]
    fn m1_is_positively_homogeneous() {
        let g = interval_grid(0.0, 1.0, 1.0 / 32.0, 0.25);
        let f = random_field(&g, 11);
        for k in [0.25, 2.0, 8.0] {
            let a = residual_report(&f, &g, 1.3);
            let b = residual_report(&f.scaled(k), &g, 1.3);
            for (na, nb) in a.nodes.iter().zip(&b.nodes) {
                assert_eq!(nb.m1, k * na.m1);
            }
        }
    }

    #[test]
    fn plus_part_integral_tends_to_sup_displacement() {
        // p-th root of Σ w_k (φ(y) - φ(x))₊^{p-1} against L⁺φ(x) off the peak
        let g = interval_grid(-2.0, 2.0, 1.0 / 64.0, 1.0);
        let w = WeightTable::new(&Kernel::tent(1.0, 1).unwrap(), g.h()).unwrap();
        let phi = build_cone(&g, [0.0, 0.0], 2.0).unwrap().field;
        let x = g.nearest_node([1.5, 0.0]);
        let (target, _) = nonlocal_sup_inf(&phi, &g, x);
        let mut gaps = vec![];
        for p in [8.0f64, 16.0, 32.0, 64.0] {
            let s: f64 = w
                .offsets()
                .iter()
                .map(|o| {
                    let y = (x as isize + g.linear_offset(o.di, o.dj)) as usize;
                    o.weight * (phi.get(y) - phi.get(x)).max(0.0).powf(p - 1.0)
                })
                .sum();
            gaps.push((target - s.powf(1.0 / p)).abs());
        }
        assert!(gaps.windows(2).all(|t| t[1] < t[0]), "{gaps:?}");
        assert!(gaps[3] < 0.1);
    }
}
