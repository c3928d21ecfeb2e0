//! Computational domains, their inradius and the dilated region `Ω_J`.
//!
//! Points are `[x, y]`; one-dimensional domains use the first coordinate and
//! ignore the second.

use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;

use crate::num::{abs, floor, hypot};
use crate::{Error, Result};

pub type Point = [f64; 2];

/// Relative tolerance on the remainder `b` of `R_Ω / R_J`; values within
/// `REMAINDER_TOL * R_J` of `0` or `R_J` snap to an exact multiple.
pub const REMAINDER_TOL: f64 = 1e-9;

/// Bounded connected domain in ℝ¹ or ℝ².
#[derive(Clone, Debug, PartialEq)]
pub enum Domain {
    Interval { lo: f64, hi: f64 },
    Rect { lo: Point, hi: Point },
    Ball { center: Point, radius: f64 },
    Polygon(Polygon),
}

/// Simple polygon with counterclockwise vertices.
#[derive(Clone, Debug, PartialEq)]
pub struct Polygon {
    vertices: Vec<Point>,
}

/// `R_Ω = K_Ω·R_J + b` together with the center realizing the inradius.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InradiusData {
    pub r_omega: f64,
    pub center: Point,
    pub k_omega: u32,
    pub b: f64,
}

impl InradiusData {
    pub fn new(domain: &Domain, r_j: f64) -> Result<Self> {
        let (r_omega, center) = domain.inradius()?;
        let (k_omega, b) = decompose(r_omega, r_j)?;
        Ok(InradiusData { r_omega, center, k_omega, b })
    }
}

impl Domain {
    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) || lo >= hi {
            return Err(Error::InvalidDomain(format!("interval needs lo < hi, got ({lo}, {hi})")));
        }
        Ok(Domain::Interval { lo, hi })
    }

    pub fn rect(lo: Point, hi: Point) -> Result<Self> {
        let finite = lo.iter().chain(hi.iter()).all(|v| v.is_finite());
        if !finite || lo[0] >= hi[0] || lo[1] >= hi[1] {
            return Err(Error::InvalidDomain(format!("box needs lo < hi componentwise, got {lo:?} .. {hi:?}")));
        }
        Ok(Domain::Rect { lo, hi })
    }

    pub fn ball(center: Point, radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) || !center.iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidDomain(format!("ball needs a positive radius, got {radius}")));
        }
        Ok(Domain::Ball { center, radius })
    }

    pub fn polygon(vertices: Vec<Point>) -> Result<Self> {
        Polygon::new(vertices).map(Domain::Polygon)
    }

    pub fn dim(&self) -> usize {
        match self {
            Domain::Interval { .. } => 1,
            _ => 2,
        }
    }

    pub fn bounding_box(&self) -> (Point, Point) {
        match self {
            Domain::Interval { lo, hi } => ([*lo, 0.0], [*hi, 0.0]),
            Domain::Rect { lo, hi } => (*lo, *hi),
            Domain::Ball { center, radius } => {
                ([center[0] - radius, center[1] - radius], [center[0] + radius, center[1] + radius])
            }
            Domain::Polygon(poly) => poly.bounding_box(),
        }
    }

    pub fn diameter(&self) -> f64 {
        let (lo, hi) = self.bounding_box();
        hypot(hi[0] - lo[0], hi[1] - lo[1])
    }

    /// Open-set membership.
    pub fn contains(&self, p: Point) -> bool {
        match self {
            Domain::Interval { lo, hi } => p[0] > *lo && p[0] < *hi,
            Domain::Rect { lo, hi } => p[0] > lo[0] && p[0] < hi[0] && p[1] > lo[1] && p[1] < hi[1],
            Domain::Ball { center, radius } => dist(p, *center) < *radius,
            Domain::Polygon(poly) => poly.contains(p) && poly.boundary_distance(p) > 0.0,
        }
    }

    /// Distance from `p` to `∂Ω`, wherever `p` is.
    pub fn boundary_distance(&self, p: Point) -> f64 {
        match self {
            Domain::Interval { lo, hi } => abs(p[0] - lo).min(abs(p[0] - hi)),
            Domain::Rect { lo, hi } => {
                if self.contains(p) {
                    (p[0] - lo[0]).min(hi[0] - p[0]).min(p[1] - lo[1]).min(hi[1] - p[1])
                } else {
                    rect_exterior_distance(*lo, *hi, p)
                }
            }
            Domain::Ball { center, radius } => abs(dist(p, *center) - radius),
            Domain::Polygon(poly) => poly.boundary_distance(p),
        }
    }

    /// Distance from `p` to the closed domain: zero inside, `dist(p, ∂Ω)` outside.
    pub fn exterior_distance(&self, p: Point) -> f64 {
        if self.contains(p) {
            return 0.0;
        }
        match self {
            Domain::Interval { lo, hi } => (lo - p[0]).max(p[0] - hi).max(0.0),
            Domain::Rect { lo, hi } => rect_exterior_distance(*lo, *hi, p),
            Domain::Ball { center, radius } => (dist(p, *center) - radius).max(0.0),
            Domain::Polygon(poly) => {
                if poly.contains(p) {
                    0.0
                } else {
                    poly.boundary_distance(p)
                }
            }
        }
    }

    /// `(R_Ω, x₀)` with `dist(x₀, ∂Ω) = R_Ω` maximal.
    pub fn inradius(&self) -> Result<(f64, Point)> {
        match self {
            Domain::Interval { lo, hi } => Ok((0.5 * (hi - lo), [0.5 * (lo + hi), 0.0])),
            Domain::Rect { lo, hi } => {
                let r = 0.5 * (hi[0] - lo[0]).min(hi[1] - lo[1]);
                Ok((r, [0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1])]))
            }
            Domain::Ball { center, radius } => Ok((*radius, *center)),
            Domain::Polygon(poly) => poly.inradius(),
        }
    }

    /// The dilated region `Ω_J = Ω + supp(J)` for a kernel supported on the
    /// closed ball of radius `r_j`.
    pub fn dilate(&self, r_j: f64) -> Dilated<'_> {
        Dilated { domain: self, r_j }
    }
}

/// Membership predicate for `Ω_J`.
#[derive(Clone, Copy, Debug)]
pub struct Dilated<'a> {
    domain: &'a Domain,
    r_j: f64,
}

impl Dilated<'_> {
    pub fn r_j(&self) -> f64 {
        self.r_j
    }

    /// `dist(y, Ω) <= R_J`, boundary included.
    pub fn contains(&self, y: Point) -> bool {
        self.domain.exterior_distance(y) <= self.r_j * (1.0 + 1e-12)
    }
}

/// Splits `r_omega` into `K·r_j + b` with `0 <= b < r_j`.
pub fn decompose(r_omega: f64, r_j: f64) -> Result<(u32, f64)> {
    if !(r_omega > 0.0 && r_omega.is_finite()) || !(r_j > 0.0 && r_j.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "decompose needs positive lengths, got R_Ω = {r_omega}, R_J = {r_j}"
        )));
    }
    let tol = REMAINDER_TOL * r_j;
    let mut k = floor(r_omega / r_j);
    let mut b = r_omega - k * r_j;
    if b >= r_j - tol {
        k += 1.0;
        b = 0.0;
    } else if b < tol {
        b = 0.0;
    }
    Ok((k as u32, b))
}

#[inline]
pub(crate) fn dist(a: Point, b: Point) -> f64 {
    hypot(a[0] - b[0], a[1] - b[1])
}

fn rect_exterior_distance(lo: Point, hi: Point, p: Point) -> f64 {
    let dx = (lo[0] - p[0]).max(p[0] - hi[0]).max(0.0);
    let dy = (lo[1] - p[1]).max(p[1] - hi[1]).max(0.0);
    if dx == 0.0 && dy == 0.0 {
        // on the boundary or inside the closed box
        0.0
    } else {
        hypot(dx, dy)
    }
}

fn segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let ab = [b[0] - a[0], b[1] - a[1]];
    let ap = [p[0] - a[0], p[1] - a[1]];
    let len2 = ab[0] * ab[0] + ab[1] * ab[1];
    let t = ((ap[0] * ab[0] + ap[1] * ab[1]) / len2).clamp(0.0, 1.0);
    hypot(ap[0] - t * ab[0], ap[1] - t * ab[1])
}

fn cross(o: Point, a: Point, b: Point) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

fn segments_intersect(p1: Point, p2: Point, q1: Point, q2: Point) -> bool {
    let d1 = cross(q1, q2, p1);
    let d2 = cross(q1, q2, p2);
    let d3 = cross(p1, p2, q1);
    let d4 = cross(p1, p2, q2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    let on = |a: Point, b: Point, c: Point, d: f64| {
        d == 0.0 && c[0] >= a[0].min(b[0]) && c[0] <= a[0].max(b[0]) && c[1] >= a[1].min(b[1]) && c[1] <= a[1].max(b[1])
    };
    on(q1, q2, p1, d1) || on(q1, q2, p2, d2) || on(p1, p2, q1, d3) || on(p1, p2, q2, d4)
}

impl Polygon {
    pub fn new(vertices: Vec<Point>) -> Result<Self> {
        let n = vertices.len();
        if n < 3 {
            return Err(Error::InvalidDomain("polygon needs at least 3 vertices".to_string()));
        }
        if !vertices.iter().flatten().all(|v| v.is_finite()) {
            return Err(Error::InvalidDomain("polygon vertex is not finite".to_string()));
        }
        let poly = Polygon { vertices };
        let area = poly.signed_area();
        let scale = poly.bounding_box_diagonal();
        if abs(area) <= 1e-14 * scale * scale {
            return Err(Error::InvalidDomain("polygon has zero area".to_string()));
        }
        if area < 0.0 {
            return Err(Error::InvalidDomain("polygon vertices must be counterclockwise".to_string()));
        }
        for i in 0..n {
            let (a, b) = (poly.vertices[i], poly.vertices[(i + 1) % n]);
            if a == b {
                return Err(Error::InvalidDomain("polygon has repeated vertices".to_string()));
            }
            for j in (i + 1)..n {
                // adjacent edges share a vertex
                if j == i + 1 || (i == 0 && j == n - 1) {
                    continue;
                }
                let (c, d) = (poly.vertices[j], poly.vertices[(j + 1) % n]);
                if segments_intersect(a, b, c, d) {
                    return Err(Error::InvalidDomain(format!("polygon is self-intersecting (edges {i} and {j})")));
                }
            }
        }
        Ok(poly)
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn signed_area(&self) -> f64 {
        let n = self.vertices.len();
        let mut twice = 0.0;
        for i in 0..n {
            let (a, b) = (self.vertices[i], self.vertices[(i + 1) % n]);
            twice += a[0] * b[1] - b[0] * a[1];
        }
        0.5 * twice
    }

    fn edges(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    fn bounding_box(&self) -> (Point, Point) {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for v in &self.vertices {
            for k in 0..2 {
                lo[k] = lo[k].min(v[k]);
                hi[k] = hi[k].max(v[k]);
            }
        }
        (lo, hi)
    }

    fn bounding_box_diagonal(&self) -> f64 {
        let (lo, hi) = self.bounding_box();
        dist(lo, hi)
    }

    /// Crossing-number test; boundary points may land on either side.
    pub fn contains(&self, p: Point) -> bool {
        let mut inside = false;
        for (a, b) in self.edges() {
            if (a[1] > p[1]) != (b[1] > p[1]) {
                let x = a[0] + (p[1] - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
                if p[0] < x {
                    inside = !inside;
                }
            }
        }
        inside
    }

    pub fn boundary_distance(&self, p: Point) -> f64 {
        self.edges().map(|(a, b)| segment_distance(p, a, b)).fold(f64::INFINITY, f64::min)
    }

    /// Signed clearance: positive inside, negative outside.
    fn clearance(&self, p: Point) -> f64 {
        let d = self.boundary_distance(p);
        if self.contains(p) {
            d
        } else {
            -d
        }
    }

    /// Grid-sampled maximum of the boundary distance, then Nelder–Mead
    /// refinement from the best samples.
    pub fn inradius(&self) -> Result<(f64, Point)> {
        const SAMPLES: usize = 200;
        const STARTS: usize = 8;

        let (lo, hi) = self.bounding_box();
        let diameter = dist(lo, hi);
        let step = [(hi[0] - lo[0]) / SAMPLES as f64, (hi[1] - lo[1]) / SAMPLES as f64];

        let mut best: Vec<(f64, Point)> = Vec::with_capacity(STARTS + 1);
        for j in 0..=SAMPLES {
            for i in 0..=SAMPLES {
                let p = [lo[0] + i as f64 * step[0], lo[1] + j as f64 * step[1]];
                let c = self.clearance(p);
                if c <= 0.0 {
                    continue;
                }
                if best.len() < STARTS || c > best[best.len() - 1].0 {
                    let at = best.iter().position(|(v, _)| c > *v).unwrap_or(best.len());
                    best.insert(at, (c, p));
                    best.truncate(STARTS);
                }
            }
        }
        if best.is_empty() {
            return Err(Error::InvalidDomain("polygon interior too thin to sample".to_string()));
        }

        let tol = 1e-6 * diameter;
        let initial = step[0].max(step[1]);
        let mut result = best[0];
        for &(_, start) in &best {
            let (p, c) = nelder_mead_max(|q| self.clearance(q), start, initial, tol);
            if c > result.0 {
                result = (c, p);
            }
        }
        Ok(result)
    }
}

/// Maximizes `f` over ℝ² from `start` with an initial simplex of size `size`,
/// stopping once the simplex diameter falls below `tol`.
fn nelder_mead_max(f: impl Fn(Point) -> f64, start: Point, size: f64, tol: f64) -> (Point, f64) {
    let mut simplex = [start, [start[0] + size, start[1]], [start[0], start[1] + size]];
    let mut values = simplex.map(&f);

    for _ in 0..2000 {
        // sort descending: simplex[0] best
        let mut idx = [0usize, 1, 2];
        idx.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
        simplex = idx.map(|i| simplex[i]);
        values = idx.map(|i| values[i]);

        let spread = dist(simplex[0], simplex[1]).max(dist(simplex[0], simplex[2]));
        if spread < tol {
            break;
        }

        let centroid = [0.5 * (simplex[0][0] + simplex[1][0]), 0.5 * (simplex[0][1] + simplex[1][1])];
        let along =
            |t: f64| [centroid[0] + t * (simplex[2][0] - centroid[0]), centroid[1] + t * (simplex[2][1] - centroid[1])];

        let reflected = along(-1.0);
        let fr = f(reflected);
        if fr > values[0] {
            let expanded = along(-2.0);
            let fe = f(expanded);
            if fe > fr {
                simplex[2] = expanded;
                values[2] = fe;
            } else {
                simplex[2] = reflected;
                values[2] = fr;
            }
            continue;
        }
        if fr > values[1] {
            simplex[2] = reflected;
            values[2] = fr;
            continue;
        }
        let contracted = if fr > values[2] { along(-0.5) } else { along(0.5) };
        let fc = f(contracted);
        if fc > values[2].max(fr) {
            simplex[2] = contracted;
            values[2] = fc;
            continue;
        }
        // shrink toward the best vertex
        for k in 1..3 {
            simplex[k] = [0.5 * (simplex[0][0] + simplex[k][0]), 0.5 * (simplex[0][1] + simplex[k][1])];
            values[k] = f(simplex[k]);
        }
    }
    let best = (0..3).max_by(|&a, &b| values[a].total_cmp(&values[b])).unwrap_or(0);
    (simplex[best], values[best])
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn closed_form_inradii() {
        let (r, c) = Domain::interval(-2.0, 2.0).unwrap().inradius().unwrap();
        assert_eq!((r, c[0]), (2.0, 0.0));
        let (r, c) = Domain::ball([1.0, 1.0], 3.0).unwrap().inradius().unwrap();
        assert_eq!((r, c), (3.0, [1.0, 1.0]));
        let (r, c) = Domain::rect([0.0, 0.0], [1.0, 1.0]).unwrap().inradius().unwrap();
        assert_eq!((r, c), (0.5, [0.5, 0.5]));
    }

    /// Brute-force maximum of the boundary distance over a 10⁻³ lattice.
    fn brute_force_square_inradius() -> f64 {
        let sq = Domain::rect([0.0, 0.0], [1.0, 1.0]).unwrap();
        let mut best = 0.0f64;
        for j in 0..=1000 {
            for i in 0..=1000 {
                let p = [i as f64 * 1e-3, j as f64 * 1e-3];
                if sq.contains(p) {
                    best = best.max(sq.boundary_distance(p));
                }
            }
        }
        best
    }

    #[test]
    fn square_polygon_inradius_matches_brute_force() {
        let expected = brute_force_square_inradius();
        assert!((expected - 0.5).abs() < 1e-4);
        let sq = Domain::polygon(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap();
        let (r, c) = sq.inradius().unwrap();
        assert!((r - expected).abs() < 1e-4, "r = {r}");
        assert!((c[0] - 0.5).abs() < 1e-3 && (c[1] - 0.5).abs() < 1e-3, "c = {c:?}");
    }

    #[test]
    fn triangle_inradius_is_twice_area_over_perimeter() {
        // 3-4-5 right triangle: r = 2A / P = 12 / 12 = 1, incenter (1, 1)
        let tri = Domain::polygon(vec![[0.0, 0.0], [4.0, 0.0], [0.0, 3.0]]).unwrap();
        let (r, c) = tri.inradius().unwrap();
        assert!((r - 1.0).abs() < 1e-5, "r = {r}");
        assert!(dist(c, [1.0, 1.0]) < 1e-3);
    }

    #[test]
    fn l_shape_inradius() {
        // L made of three unit squares. The best disk sits on the diagonal
        // of the corner square at (t, t), touching the two outer walls and
        // the reentrant vertex (1, 1): t = √2 (1 - t).
        let l = Domain::polygon(vec![[0.0, 0.0], [2.0, 0.0], [2.0, 1.0], [1.0, 1.0], [1.0, 2.0], [0.0, 2.0]]).unwrap();
        let (r, c) = l.inradius().unwrap();
        let t = 2.0_f64.sqrt() / (1.0 + 2.0_f64.sqrt());
        assert!((r - t).abs() < 1e-5, "r = {r}, expected {t}");
        assert!(l.contains(c));
    }

    #[test]
    fn degenerate_polygons_rejected() {
        assert!(Domain::polygon(vec![[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]]).is_err());
        assert!(Domain::polygon(vec![[0.0, 0.0], [0.0, 1.0], [1.0, 0.0]]).is_err()); // clockwise
        let bowtie = vec![[0.0, 0.0], [1.0, 1.0], [1.0, 0.0], [0.0, 1.0]];
        assert!(Domain::polygon(bowtie).is_err());
        assert!(Domain::interval(1.0, 1.0).is_err());
        assert!(Domain::ball([0.0, 0.0], 0.0).is_err());
    }

    #[test]
    fn decompose_examples() {
        assert_eq!(decompose(2.5, 1.0).unwrap(), (2, 0.5));
        assert_eq!(decompose(3.0, 1.0).unwrap(), (3, 0.0));
        let (k, b) = decompose(4.6, 2.0).unwrap();
        assert_eq!(k, 2);
        assert!((b - 0.6).abs() < 1e-12);
        // 0.3 / 0.1 rounds below 3 in binary floating point
        assert_eq!(decompose(0.3, 0.1).unwrap(), (3, 0.0));
        assert!(decompose(0.0, 1.0).is_err());
    }

    #[test]
    fn dilation_examples() {
        let unit = Domain::interval(0.0, 1.0).unwrap();
        let d = unit.dilate(0.5);
        assert!(d.contains([-0.5, 0.0]) && d.contains([1.5, 0.0]));
        assert!(!d.contains([-0.5001, 0.0]) && !d.contains([1.5001, 0.0]));
        let ball = Domain::ball([0.0, 0.0], 1.0).unwrap();
        let d = ball.dilate(1.0);
        assert!(d.contains([2.0, 0.0]) && d.contains([0.0, -1.99]));
        assert!(!d.contains([1.5, 1.5]));
    }

    #[test]
    fn rect_boundary_distance_outside_corner() {
        let r = Domain::rect([0.0, 0.0], [1.0, 1.0]).unwrap();
        assert!((r.boundary_distance([2.0, 2.0]) - 2.0_f64.sqrt()).abs() < 1e-15);
        assert_eq!(r.exterior_distance([0.5, 0.5]), 0.0);
        assert_eq!(r.exterior_distance([1.0, 0.5]), 0.0);
    }
}
