//! Stencil assembly of the Q2 finite difference schemes.
//!
//! Every coefficient is formed as a dimensionless combination of samples and
//! multiplied by `1/h^2` once; in 2D the x and y parts of the diagonal are
//! summed before scaling. With `a = 1, c = 0` the variable-coefficient rows
//! therefore reproduce the Laplacian rows bit for bit.

use crate::error::Result;
use crate::grid::{axis_kind_1d, AxisKind, Grid1D, Grid2D};
use crate::sparse::CsrMatrix;

use super::{CoefficientField, GridRef, Layout, Scheme, SparseOperator};

const NARROW_LAPLACIAN: [f64; 3] = [-1.0, 2.0, -1.0];
const WIDE_LAPLACIAN: [f64; 5] = [0.25, -2.0, 3.5, -2.0, 0.25];

/// Three-point row through an element midpoint: `[west, diag, east]`.
fn narrow(am: f64, ap: f64) -> [f64; 3] {
    [-(3.0 * am + ap) / 4.0, 4.0 * (am + ap) / 4.0, -(am + 3.0 * ap) / 4.0]
}

/// Five-point row through an element end, samples at offsets -2..=2.
fn wide(a: [f64; 5]) -> [f64; 5] {
    let [amm, am, a0, ap, app] = a;
    [
        (3.0 * amm - 4.0 * am + 3.0 * a0) / 8.0,
        -(4.0 * amm + 12.0 * a0) / 8.0,
        (amm + 4.0 * am + 18.0 * a0 + 4.0 * ap + app) / 8.0,
        -(12.0 * a0 + 4.0 * app) / 8.0,
        (3.0 * app - 4.0 * ap + 3.0 * a0) / 8.0,
    ]
}

/// Axis contribution at one point: off-diagonal `(offset, value)` pairs and
/// the diagonal part, all dimensionless.
fn axis_part(kind: AxisKind, sample: impl Fn(isize) -> f64, laplacian: bool) -> ([(isize, f64); 4], usize, f64) {
    match kind {
        AxisKind::Narrow => {
            let s = if laplacian {
                NARROW_LAPLACIAN
            } else {
                narrow(sample(-1), sample(1))
            };
            ([(-1, s[0]), (1, s[2]), (0, 0.0), (0, 0.0)], 2, s[1])
        }
        AxisKind::Wide => {
            let s = if laplacian {
                WIDE_LAPLACIAN
            } else {
                wide([sample(-2), sample(-1), sample(0), sample(1), sample(2)])
            };
            ([(-2, s[0]), (-1, s[1]), (1, s[3]), (2, s[4])], 4, s[2])
        }
    }
}

fn assemble_1d(grid: &Grid1D, coeff: Option<&CoefficientField>) -> SparseOperator {
    let n = grid.len();
    let inv_h2 = grid.inv_h2();
    let laplacian = coeff.is_none();
    let rows = (0..n)
        .map(|i| {
            if grid.is_boundary(i) {
                return vec![(i, 1.0)];
            }
            let sample = |o: isize| coeff.map_or(1.0, |c| c.a[(i as isize + o) as usize]);
            let (offs, count, d) = axis_part(axis_kind_1d(i), sample, laplacian);
            let mut row = Vec::with_capacity(count + 1);
            for &(o, v) in &offs[..count] {
                row.push(((i as isize + o) as usize, v * inv_h2));
            }
            let c = coeff.map_or(0.0, |c| c.c[i]);
            row.push((i, d * inv_h2 + c));
            row
        })
        .collect();
    let layout = Layout {
        grid: GridRef::OneD(grid.clone()),
        scheme: if laplacian { Scheme::Laplacian } else { Scheme::Variable },
        c: coeff.map_or_else(|| vec![0.0; n], |c| c.c.clone()),
    };
    SparseOperator::assembled(CsrMatrix::from_rows(n, rows), layout)
}

fn assemble_2d(grid: &Grid2D, coeff: Option<&CoefficientField>) -> SparseOperator {
    let n = grid.len();
    let inv_h2 = grid.inv_h2();
    let laplacian = coeff.is_none();
    let stride = grid.row_len() as isize;
    let rows = (0..n)
        .map(|k| {
            let (i, j) = grid.coords(k);
            if grid.is_boundary(i, j) {
                return vec![(k, 1.0)];
            }
            let (kx, ky) = grid.axis_kinds(i, j);
            let at = |o: isize| coeff.map_or(1.0, |c| c.a[(k as isize + o) as usize]);
            let (xo, xn, xd) = axis_part(kx, at, laplacian);
            let (yo, yn, yd) = axis_part(ky, |o| at(o * stride), laplacian);
            let mut row = Vec::with_capacity(xn + yn + 1);
            for &(o, v) in &xo[..xn] {
                row.push(((k as isize + o) as usize, v * inv_h2));
            }
            for &(o, v) in &yo[..yn] {
                row.push(((k as isize + o * stride) as usize, v * inv_h2));
            }
            let c = coeff.map_or(0.0, |c| c.c[k]);
            row.push((k, (xd + yd) * inv_h2 + c));
            row
        })
        .collect();
    let layout = Layout {
        grid: GridRef::TwoD(grid.clone()),
        scheme: if laplacian { Scheme::Laplacian } else { Scheme::Variable },
        c: coeff.map_or_else(|| vec![0.0; n], |c| c.c.clone()),
    };
    SparseOperator::assembled(CsrMatrix::from_rows(n, rows), layout)
}

/// `-u''` on a 1D grid.
pub fn assemble_1d_laplacian(grid: &Grid1D) -> SparseOperator {
    assemble_1d(grid, None)
}

/// `-(a u')' + c u` on a 1D grid.
pub fn assemble_1d_variable(grid: &Grid1D, coeff: &CoefficientField) -> Result<SparseOperator> {
    coeff.check_len(grid.len())?;
    coeff.validate()?;
    Ok(assemble_1d(grid, Some(coeff)))
}

/// `-Δu` on a 2D grid.
pub fn assemble_2d_laplacian(grid: &Grid2D) -> SparseOperator {
    assemble_2d(grid, None)
}

/// `-∇·(a∇u) + c u` on a 2D grid.
pub fn assemble_2d_variable(grid: &Grid2D, coeff: &CoefficientField) -> Result<SparseOperator> {
    coeff.check_len(grid.len())?;
    coeff.validate()?;
    Ok(assemble_2d(grid, Some(coeff)))
}
