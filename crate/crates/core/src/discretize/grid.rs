use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::geometry::{Domain, Point};
use crate::kernel::{WeightTable, MIN_STEPS_PER_RADIUS};
use crate::num::{abs, ceil};
use crate::{Error, Result};

/// Smallest number of lattice steps across the inradius.
pub const MIN_STEPS_PER_INRADIUS: f64 = 16.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeKind {
    /// `x ∈ Ω`
    Interior,
    /// `x ∈ Ω_J \ Ω`
    Band,
    /// Outside `Ω_J`.
    Exterior,
}

/// Uniform lattice of spacing `h` covering `Ω_J`, centered on the bounding
/// box of `Ω`.
///
/// Nodes are stored row-major (`index = i + nx·j`); in 1D `ny = 1`. The box
/// extends `R_J + 2h` beyond `Ω` on every side, so every interior node has
/// all its kernel and finite-difference neighbors in the index set.
#[derive(Clone, Debug)]
pub struct Grid {
    domain: Domain,
    h: f64,
    r_j: f64,
    nx: usize,
    ny: usize,
    center: Point,
    half: [usize; 2],
    kinds: Vec<NodeKind>,
    interior: Vec<usize>,
    cells: Vec<usize>,
    inradius: (f64, Point),
}

impl Grid {
    pub fn new(domain: &Domain, h: f64, r_j: f64) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidParameter(format!("grid spacing must be positive, got {h}")));
        }
        if !(r_j > 0.0 && r_j.is_finite()) {
            return Err(Error::InvalidParameter(format!("kernel radius must be positive, got {r_j}")));
        }
        let kernel_limit = r_j / MIN_STEPS_PER_RADIUS;
        if h > kernel_limit * (1.0 + 1e-12) {
            return Err(Error::ResolutionTooCoarse { h, limit: kernel_limit, what: "kernel radius / 4" });
        }
        let inradius = domain.inradius()?;
        let inradius_limit = inradius.0 / MIN_STEPS_PER_INRADIUS;
        if h > inradius_limit * (1.0 + 1e-12) {
            return Err(Error::ResolutionTooCoarse { h, limit: inradius_limit, what: "inradius / 16" });
        }

        let dim = domain.dim();
        let (lo, hi) = domain.bounding_box();
        let center = [0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1])];
        let margin = r_j + 2.0 * h;
        let half_x = ceil((0.5 * (hi[0] - lo[0]) + margin) / h - 1e-9) as usize;
        let half_y = if dim == 1 { 0 } else { ceil((0.5 * (hi[1] - lo[1]) + margin) / h - 1e-9) as usize };
        let (nx, ny) = (2 * half_x + 1, 2 * half_y + 1);

        let mut grid = Grid {
            domain: domain.clone(),
            h,
            r_j,
            nx,
            ny,
            center,
            half: [half_x, half_y],
            kinds: vec![NodeKind::Exterior; nx * ny],
            interior: Vec::new(),
            cells: Vec::new(),
            inradius,
        };

        let dilated = domain.dilate(r_j);
        for idx in 0..nx * ny {
            let p = grid.point(idx);
            grid.kinds[idx] = if domain.contains(p) && domain.boundary_distance(p) > 1e-9 * h {
                NodeKind::Interior
            } else if dilated.contains(p) {
                NodeKind::Band
            } else {
                NodeKind::Exterior
            };
        }
        grid.interior = (0..nx * ny).filter(|&i| grid.kinds[i] == NodeKind::Interior).collect();
        if grid.interior.is_empty() {
            return Err(Error::InvalidDomain("no lattice node falls inside the domain".into()));
        }

        let is_int = |i: usize| grid.kinds[i] == NodeKind::Interior;
        let mut cells = Vec::new();
        for j in 0..ny.saturating_sub(if dim == 1 { 0 } else { 1 }) {
            for i in 0..nx - 1 {
                let idx = i + nx * j;
                let active = if dim == 1 {
                    is_int(idx) || is_int(idx + 1)
                } else {
                    is_int(idx) || is_int(idx + 1) || is_int(idx + nx)
                };
                if active {
                    cells.push(idx);
                }
            }
        }
        grid.cells = cells;
        Ok(grid)
    }

    /// Spacing giving `nodes` interior nodes across the widest extent of `Ω`.
    pub fn spacing_for_nodes(domain: &Domain, nodes: usize) -> f64 {
        let (lo, hi) = domain.bounding_box();
        let width = (hi[0] - lo[0]).max(hi[1] - lo[1]);
        width / (nodes as f64 + 1.0)
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn r_j(&self) -> f64 {
        self.r_j
    }

    /// `h^N`, the measure attached to one node.
    pub fn cell_volume(&self) -> f64 {
        if self.dim() == 1 {
            self.h
        } else {
            self.h * self.h
        }
    }

    /// `(R_Ω, x₀)` of the underlying domain.
    pub fn inradius(&self) -> (f64, Point) {
        self.inradius
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }

    pub fn len(&self) -> usize {
        self.kinds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kinds.is_empty()
    }

    pub fn kind(&self, idx: usize) -> NodeKind {
        self.kinds[idx]
    }

    #[inline]
    pub fn is_interior(&self, idx: usize) -> bool {
        self.kinds[idx] == NodeKind::Interior
    }

    /// Indices of nodes inside `Ω`, ascending.
    pub fn interior(&self) -> &[usize] {
        &self.interior
    }

    /// Base nodes of the forward-difference cells touching `Ω`.
    pub fn cells(&self) -> &[usize] {
        &self.cells
    }

    pub fn coords(&self, idx: usize) -> (usize, usize) {
        (idx % self.nx, idx / self.nx)
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i + self.nx * j
    }

    pub fn point(&self, idx: usize) -> Point {
        let (i, j) = self.coords(idx);
        [
            self.center[0] + (i as f64 - self.half[0] as f64) * self.h,
            self.center[1] + (j as f64 - self.half[1] as f64) * self.h,
        ]
    }

    /// The node `(i + di, j + dj)`, if it lies on the lattice.
    pub fn neighbor(&self, idx: usize, di: i32, dj: i32) -> Option<usize> {
        let (i, j) = self.coords(idx);
        let ni = i as i64 + di as i64;
        let nj = j as i64 + dj as i64;
        if ni < 0 || nj < 0 || ni >= self.nx as i64 || nj >= self.ny as i64 {
            return None;
        }
        Some(ni as usize + self.nx * nj as usize)
    }

    /// Flat index shift of the lattice displacement `(di, dj)`.
    #[inline]
    pub fn linear_offset(&self, di: i32, dj: i32) -> isize {
        di as isize + self.nx as isize * dj as isize
    }

    /// Nonzero lattice displacements `(di, dj, shift)` with `h·|d| <= R_J`.
    pub(crate) fn support_offsets(&self) -> Vec<(i32, i32, isize)> {
        let reach = libm::floor(self.r_j / self.h + 1e-9) as i32;
        let rows = if self.dim() == 1 { 0 } else { reach };
        let mut out = Vec::new();
        for dj in -rows..=rows {
            for di in -reach..=reach {
                if (di, dj) == (0, 0) {
                    continue;
                }
                let d = self.h * libm::hypot(di as f64, dj as f64);
                if d <= self.r_j * (1.0 + 1e-12) {
                    out.push((di, dj, self.linear_offset(di, dj)));
                }
            }
        }
        out
    }

    /// The node closest to `p`.
    pub fn nearest_node(&self, p: Point) -> usize {
        let to_index = |x: f64, c: f64, half: usize, n: usize| {
            let k = libm::round((x - c) / self.h) + half as f64;
            k.clamp(0.0, (n - 1) as f64) as usize
        };
        let i = to_index(p[0], self.center[0], self.half[0], self.nx);
        let j = if self.dim() == 1 { 0 } else { to_index(p[1], self.center[1], self.half[1], self.ny) };
        self.index(i, j)
    }

    /// Checks that `table` was built for this lattice.
    pub fn check_weights(&self, table: &WeightTable) -> Result<()> {
        if abs(table.h() - self.h) > 1e-12 * self.h || abs(table.r_j() - self.r_j) > 1e-12 * self.r_j {
            return Err(Error::InvalidParameter(format!(
                "weight table (h = {}, R_J = {}) does not match grid (h = {}, R_J = {})",
                table.h(),
                table.r_j(),
                self.h,
                self.r_j
            )));
        }
        Ok(())
    }
}

/// Nodal values of `u` on a [`Grid`], zero outside `Ω`.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField {
    values: Vec<f64>,
}

impl ScalarField {
    pub fn zeros(grid: &Grid) -> Self {
        ScalarField { values: vec![0.0; grid.len()] }
    }

    /// Samples `f` at interior nodes; band and exterior nodes stay zero.
    pub fn from_fn(grid: &Grid, mut f: impl FnMut(Point) -> f64) -> Self {
        let mut field = ScalarField::zeros(grid);
        for &idx in grid.interior() {
            field.values[idx] = f(grid.point(idx));
        }
        field
    }

    /// Takes one value per interior node, in the order of [`Grid::interior`].
    pub fn from_interior(grid: &Grid, interior_values: &[f64]) -> Result<Self> {
        if interior_values.len() != grid.interior().len() {
            return Err(Error::InvalidField(format!(
                "expected {} interior values, got {}",
                grid.interior().len(),
                interior_values.len()
            )));
        }
        let mut field = ScalarField::zeros(grid);
        for (&idx, &v) in grid.interior().iter().zip(interior_values) {
            field.values[idx] = v;
        }
        Ok(field)
    }

    /// Takes a full nodal vector; rejects nonzero values outside `Ω`.
    pub fn from_values(grid: &Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidField(format!("expected {} values, got {}", grid.len(), values.len())));
        }
        if let Some(idx) = (0..values.len()).find(|&i| !grid.is_interior(i) && values[i] != 0.0) {
            return Err(Error::InvalidField(format!("nonzero value at node {idx} outside the domain")));
        }
        Ok(ScalarField { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn get(&self, idx: usize) -> f64 {
        self.values[idx]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn interior_values(&self, grid: &Grid) -> Vec<f64> {
        grid.interior().iter().map(|&i| self.values[i]).collect()
    }

    /// `max |u|` over the nodes.
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(abs(*v)))
    }

    pub fn scaled(&self, k: f64) -> Self {
        ScalarField { values: self.values.iter().map(|v| k * v).collect() }
    }

    /// Rescaled so that `‖u‖_∞ = 1`; the zero field is returned unchanged.
    pub fn sup_normalized(&self) -> Self {
        let m = self.sup_norm();
        if m > 0.0 {
            self.scaled(1.0 / m)
        } else {
            self.clone()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_interval_nodes_hit_the_boundary() {
        let d = Domain::interval(0.0, 1.0).unwrap();
        let g = Grid::new(&d, 1.0 / 128.0, 0.25).unwrap();
        assert_eq!(g.interior().len(), 127);
        let first = g.interior()[0];
        assert_eq!(g.point(first)[0], 1.0 / 128.0);
        assert_eq!(g.kind(first - 1), NodeKind::Band);
        assert_eq!(g.point(first - 1)[0], 0.0);
        // band reaches R_J = 0.25 beyond each end
        let band = (0..g.len()).filter(|&i| g.kind(i) == NodeKind::Band).count();
        assert_eq!(band, 2 * 33);
    }

    #[test]
    fn interior_nodes_have_all_neighbors() {
        let d = Domain::ball([0.0, 0.0], 1.0).unwrap();
        let g = Grid::new(&d, 1.0 / 16.0, 0.25).unwrap();
        let reach = 4;
        for &idx in g.interior() {
            for dj in -reach..=reach {
                for di in -reach..=reach {
                    let n = g.neighbor(idx, di, dj).expect("neighbor on lattice");
                    if (di * di + dj * dj) as f64 <= 16.0 {
                        assert_ne!(g.kind(n), NodeKind::Exterior);
                    }
                }
            }
        }
    }

    #[test]
    fn spacing_constraints_enforced() {
        let d = Domain::interval(0.0, 1.0).unwrap();
        assert!(matches!(Grid::new(&d, 0.1, 1.0), Err(Error::ResolutionTooCoarse { .. })));
        assert!(matches!(Grid::new(&d, 0.05, 0.1), Err(Error::ResolutionTooCoarse { .. })));
        assert!(Grid::new(&d, 1.0 / 32.0, 0.125).is_ok());
    }

    #[test]
    fn field_rejects_values_outside_domain() {
        let d = Domain::interval(-1.0, 1.0).unwrap();
        let g = Grid::new(&d, 0.0625, 0.25).unwrap();
        let mut v = vec![0.0; g.len()];
        v[0] = 1.0;
        assert!(ScalarField::from_values(&g, v).is_err());
        let f = ScalarField::from_fn(&g, |p| 1.0 - p[0].abs());
        assert_eq!(f.sup_norm(), 1.0);
        for i in 0..g.len() {
            if !g.is_interior(i) {
                assert_eq!(f.get(i), 0.0);
            }
        }
    }
}
