//! Sample-based inequalities, one per positive off-diagonal entry of the
//! operator.
//!
//! A positive entry sits in a wide-stencil row `r` at column `r ∓ 2` along
//! some axis. It is dominated by the product term through the narrow-axis
//! point `k = r ∓ 1` between them iff
//!
//! ```text
//! (3a_l + a_r)(a_l + 4a_k + 9a_r) > 4 (3a_l - 4a_k + 3a_r) h² d_k
//! ```
//!
//! where `a_l` is the sample on the far side, `a_r` the one on the side of
//! `r`, and `h² d_k` the scaled diagonal at `k`. When `3a_l - 4a_k + 3a_r
//! <= 0` the entry is not positive and the check passes trivially.

use crate::assembly::CoefficientField;
use crate::error::Result;
use crate::grid::{Grid1D, Grid2D, PointClass};

use super::{margin, worst_of, ConstraintReport, PointMargin};

fn entry_margin(a_far: f64, a_mid: f64, a_near: f64, scaled_diag: f64) -> f64 {
    let g = 3.0 * a_far - 4.0 * a_mid + 3.0 * a_near;
    if g <= 0.0 {
        return f64::INFINITY;
    }
    let big = (3.0 * a_far + a_near) * (a_far + 4.0 * a_mid + 9.0 * a_near);
    margin(big, 4.0 * g * scaled_diag)
}

fn wide_diag(a: [f64; 5]) -> f64 {
    (a[0] + 4.0 * a[1] + 18.0 * a[2] + 4.0 * a[3] + a[4]) / 8.0
}

/// Checks every cell center of a 1D grid, in both directions.
pub fn check_1d_samples(coeff: &CoefficientField, grid: &Grid1D) -> Result<ConstraintReport> {
    coeff.check_len(grid.len())?;
    let h2 = grid.h() * grid.h();
    let n = grid.n();
    let a = &coeff.a;
    let mut points = Vec::new();
    for i in (1..=n).step_by(2) {
        let d = a[i - 1] + a[i + 1] + h2 * coeff.c[i];
        let mut best: Option<PointMargin> = None;
        // entry (i+1, i-1), present when i+1 is an interior cell end
        if i < n {
            let m = entry_margin(a[i - 1], a[i], a[i + 1], d);
            best = Some(pm(i, "cell-center:right-end", m));
        }
        if i > 1 {
            let m = entry_margin(a[i + 1], a[i], a[i - 1], d);
            let p = pm(i, "cell-center:left-end", m);
            best = Some(best.map_or(p.clone(), |b| worst_of(b, p)));
        }
        if let Some(p) = best {
            points.push(p);
        }
    }
    Ok(ConstraintReport::from_points("1d-samples", points))
}

fn pm(index: usize, label: &'static str, margin: f64) -> PointMargin {
    PointMargin { index, label, margin }
}

/// Checks every cell center (both axes) and every edge center (along its
/// narrow axis) of a 2D grid, in both directions.
pub fn check_2d_samples(coeff: &CoefficientField, grid: &Grid2D) -> Result<ConstraintReport> {
    coeff.check_len(grid.len())?;
    let h2 = grid.h() * grid.h();
    let (nx, ny) = (grid.nx(), grid.ny());
    let at = |i: usize, j: usize| coeff.a[grid.index(i, j)];
    let mut points = Vec::new();

    for j in 1..=ny {
        for i in 1..=nx {
            let k = grid.index(i, j);
            let c = h2 * coeff.c[k];
            let class = grid.class_of(i, j);
            // (label, a_far, a_mid, a_near, partner row interior)
            let mut cases: Vec<(&'static str, f64, f64, f64, bool)> = Vec::new();
            let d = match class {
                PointClass::CellCenter => {
                    cases.push(("cell-center:x+", at(i - 1, j), at(i, j), at(i + 1, j), i < nx));
                    cases.push(("cell-center:x-", at(i + 1, j), at(i, j), at(i - 1, j), i > 1));
                    cases.push(("cell-center:y+", at(i, j - 1), at(i, j), at(i, j + 1), j < ny));
                    cases.push(("cell-center:y-", at(i, j + 1), at(i, j), at(i, j - 1), j > 1));
                    at(i - 1, j) + at(i + 1, j) + at(i, j - 1) + at(i, j + 1) + c
                }
                PointClass::EdgeCenterY => {
                    // narrow in x, wide in y; protects the knots at i ± 1
                    cases.push(("edge-center-y:x+", at(i - 1, j), at(i, j), at(i + 1, j), i < nx));
                    cases.push(("edge-center-y:x-", at(i + 1, j), at(i, j), at(i - 1, j), i > 1));
                    let w = [at(i, j - 2), at(i, j - 1), at(i, j), at(i, j + 1), at(i, j + 2)];
                    wide_diag(w) + at(i - 1, j) + at(i + 1, j) + c
                }
                PointClass::EdgeCenterX => {
                    cases.push(("edge-center-x:y+", at(i, j - 1), at(i, j), at(i, j + 1), j < ny));
                    cases.push(("edge-center-x:y-", at(i, j + 1), at(i, j), at(i, j - 1), j > 1));
                    let w = [at(i - 2, j), at(i - 1, j), at(i, j), at(i + 1, j), at(i + 2, j)];
                    wide_diag(w) + at(i, j - 1) + at(i, j + 1) + c
                }
                _ => continue,
            };
            let worst = cases
                .into_iter()
                .filter(|case| case.4)
                .map(|(label, far, mid, near, _)| pm(k, label, entry_margin(far, mid, near, d)))
                .reduce(worst_of);
            if let Some(p) = worst {
                points.push(p);
            }
        }
    }
    Ok(ConstraintReport::from_points("2d-samples", points))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_coefficient_1d_margin() {
        let g = Grid1D::unit(7).unwrap();
        let r = check_1d_samples(&CoefficientField::constant(g.len(), 1.0, 0.0), &g).unwrap();
        assert!(r.pass);
        assert_eq!(r.worst_margin(), 2.5);
        assert_eq!(r.checked, 4);
    }

    #[test]
    fn constant_threshold_1d() {
        // h = 1/8: h²c = 5a exactly at c = 320
        let g = Grid1D::unit(7).unwrap();
        let at = check_1d_samples(&CoefficientField::constant(g.len(), 1.0, 320.0), &g).unwrap();
        assert!(!at.pass);
        assert_eq!(at.worst_margin(), 0.0);
        let below = check_1d_samples(&CoefficientField::constant(g.len(), 1.0, 0.999 * 320.0), &g).unwrap();
        assert!(below.pass);
    }

    #[test]
    fn dip_fails_1d() {
        let g = Grid1D::unit(7).unwrap();
        let mut a = vec![1.0; g.len()];
        a[3] = 0.01;
        let r = check_1d_samples(&CoefficientField::new(a, vec![0.0; g.len()]).unwrap(), &g).unwrap();
        assert!(!r.pass);
        assert_eq!(r.failing[0].index, 3);
    }

    #[test]
    fn unit_coefficient_2d() {
        let g = Grid2D::new(7, 15, (0.0, 1.0), (0.0, 2.0)).unwrap();
        let r = check_2d_samples(&CoefficientField::constant(g.len(), 1.0, 0.0), &g).unwrap();
        assert!(r.pass);
        // cell center: 56 vs 4 * 2 * 4 = 32; edge center: 56 vs 4 * 2 * 5.5 = 44
        assert!((r.worst_margin() - 12.0 / 44.0).abs() < 1e-15);
    }

    #[test]
    fn constant_threshold_2d() {
        // h = 1/8: h²c = 3/2 at c = 96
        let g = Grid2D::new(7, 7, (0.0, 1.0), (0.0, 1.0)).unwrap();
        let at = check_2d_samples(&CoefficientField::constant(g.len(), 1.0, 96.0), &g).unwrap();
        assert!(!at.pass);
        assert_eq!(at.worst_margin(), 0.0);
        assert!(at.failing.iter().all(|p| p.label.starts_with("edge")));
        let below = check_2d_samples(&CoefficientField::constant(g.len(), 1.0, 0.999 * 96.0), &g).unwrap();
        assert!(below.pass);
    }
}
