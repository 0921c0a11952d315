use serde::Serialize;

use crate::assembly::CoefficientField;

/// Widening applied by [`sampled_bounds`] to compensate for sampling error.
pub const SAFETY_FACTOR: f64 = 1.1;

/// A closed cell or union of cells over which coefficient bounds are
/// needed. In 1D the y extent is degenerate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Region {
    pub lo: [f64; 2],
    pub hi: [f64; 2],
    /// Grid index of the point the region belongs to.
    pub center: usize,
    /// Grid indices of every grid point inside the region.
    pub samples: Vec<usize>,
}

impl Region {
    pub fn is_1d(&self) -> bool {
        self.lo[1] == self.hi[1]
    }
}

/// Bounds of `a` over a region. Treated as exact by the checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CellBounds {
    pub min_a: f64,
    pub max_a: f64,
    /// `max |a'|` in 1D, `max |∇a|` in 2D.
    pub max_grad: Option<f64>,
    /// `max a''` (1D only).
    pub max_second: Option<f64>,
    pub concave: bool,
}

impl CellBounds {
    pub fn constant(a: f64) -> Self {
        CellBounds {
            min_a: a,
            max_a: a,
            max_grad: Some(0.0),
            max_second: Some(0.0),
            concave: true,
        }
    }
}

/// Bounds taken from the grid samples inside each region, without
/// derivative information. Exact for piecewise data given only at grid
/// points, such as random coefficient fields.
pub fn bounds_from_samples(coeff: &CoefficientField) -> impl Fn(&Region) -> CellBounds + '_ {
    move |r: &Region| {
        let (lo, hi) = r
            .samples
            .iter()
            .map(|&k| coeff.a[k])
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
        CellBounds {
            min_a: lo,
            max_a: hi,
            max_grad: None,
            max_second: None,
            concave: false,
        }
    }
}

/// Approximate bounds from dense sampling of `a` on a `(m + 1)²` lattice
/// (`m + 1` points in 1D) per region, with finite-difference derivatives.
///
/// Not a certificate: sup-norms are estimated, then widened by
/// [`SAFETY_FACTOR`]. Prefer analytic bounds when they are available.
pub fn sampled_bounds<F>(a: F, m: usize) -> impl Fn(&Region) -> CellBounds
where
    F: Fn(f64, f64) -> f64,
{
    let m = m.max(4);
    move |r: &Region| {
        let one_d = r.is_1d();
        let my = if one_d { 0 } else { m };
        let dx = (r.hi[0] - r.lo[0]) / m as f64;
        let dy = if one_d { 0.0 } else { (r.hi[1] - r.lo[1]) / m as f64 };
        let mut vals = vec![vec![0.0; m + 1]; my + 1];
        for (q, row) in vals.iter_mut().enumerate() {
            for (p, v) in row.iter_mut().enumerate() {
                *v = a(r.lo[0] + p as f64 * dx, r.lo[1] + q as f64 * dy);
            }
        }
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in vals.iter().flatten() {
            lo = lo.min(*v);
            hi = hi.max(*v);
        }
        let mut grad: f64 = 0.0;
        let mut second = f64::NEG_INFINITY;
        for q in 0..=my {
            for p in 0..=m {
                let gx = if p < m { (vals[q][p + 1] - vals[q][p]) / dx } else { 0.0 };
                let gy = if !one_d && q < my {
                    (vals[q + 1][p] - vals[q][p]) / dy
                } else {
                    0.0
                };
                grad = grad.max((gx * gx + gy * gy).sqrt());
                if p > 0 && p < m {
                    second = second.max((vals[q][p + 1] - 2.0 * vals[q][p] + vals[q][p - 1]) / (dx * dx));
                }
                if !one_d && q > 0 && q < my {
                    second = second.max((vals[q + 1][p] - 2.0 * vals[q][p] + vals[q - 1][p]) / (dy * dy));
                }
            }
        }
        let widen = (SAFETY_FACTOR - 1.0) * (hi - lo);
        let min_a = if lo - widen > 0.0 {
            lo - widen
        } else {
            lo / SAFETY_FACTOR
        };
        CellBounds {
            min_a,
            max_a: hi + widen,
            max_grad: Some(grad * SAFETY_FACTOR),
            max_second: Some(if second >= 0.0 {
                second * SAFETY_FACTOR
            } else {
                second / SAFETY_FACTOR
            }),
            concave: false,
        }
    }
}
