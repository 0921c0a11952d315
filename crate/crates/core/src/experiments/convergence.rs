use std::f64::consts::PI;

use serde::Serialize;

use crate::assembly::{assemble_1d_variable, assemble_2d_variable, CoefficientField, SparseOperator};
use crate::error::{Error, Result};
use crate::grid::{Grid1D, Grid2D};
use crate::lu::BandedLu;

type Field = fn(f64, f64) -> f64;

fn quad_u(x: f64, y: f64) -> f64 {
    1.0 + x - 2.0 * y + x * x + 0.5 * x * y - y * y + x * x * y * y
}

/// Exact solution with coefficients and the matching right-hand side
/// `f = -∇·(a∇u) + cu` on the unit interval or square. 1D cases ignore `y`.
#[derive(Debug, Clone, Copy)]
pub struct Manufactured {
    pub name: &'static str,
    pub dim: usize,
    pub u: Field,
    pub a: Field,
    pub c: Field,
    pub f: Field,
}

impl Manufactured {
    /// `u = sin(πx) sin(πy)`, `a = 1`, `c = 0`.
    pub fn sine2d() -> Self {
        Manufactured {
            name: "sine2d",
            dim: 2,
            u: |x, y| (PI * x).sin() * (PI * y).sin(),
            a: |_, _| 1.0,
            c: |_, _| 0.0,
            f: |x, y| 2.0 * PI * PI * (PI * x).sin() * (PI * y).sin(),
        }
    }

    /// `u = sin(πx)`, `a = 1`, `c = 0`.
    pub fn sine1d() -> Self {
        Manufactured {
            name: "sine1d",
            dim: 1,
            u: |x, _| (PI * x).sin(),
            a: |_, _| 1.0,
            c: |_, _| 0.0,
            f: |x, _| PI * PI * (PI * x).sin(),
        }
    }

    /// A biquadratic `u` with linear `a` and variable `c`, which the scheme
    /// reproduces exactly.
    pub fn quadratic() -> Self {
        Manufactured {
            name: "quadratic",
            dim: 2,
            u: quad_u,
            a: |x, y| 1.0 + x / 2.0 + y / 4.0,
            c: |x, y| 1.0 + x + y * y,
            f: |x, y| {
                let ux = 1.0 + 2.0 * x + 0.5 * y + 2.0 * x * y * y;
                let uy = -2.0 + 0.5 * x - 2.0 * y + 2.0 * x * x * y;
                let lap = 2.0 * (x * x + y * y);
                let a = 1.0 + x / 2.0 + y / 4.0;
                -(a * lap + 0.5 * ux + 0.25 * uy) + (1.0 + x + y * y) * quad_u(x, y)
            },
        }
    }

    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "sine2d" => Ok(Self::sine2d()),
            "sine1d" => Ok(Self::sine1d()),
            "quadratic" => Ok(Self::quadratic()),
            _ => Err(Error::InvalidArgument(format!("unknown manufactured case {name:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    /// Elements per side.
    pub elements: usize,
    pub h: f64,
    /// Max error over every grid point.
    pub max_error: f64,
    /// `log₂(e_{2h} / e_h)` against the previous row; absent when either
    /// error is exactly zero.
    pub order: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceTable {
    pub case: String,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    pub fn last_order(&self) -> Option<f64> {
        self.rows.last().and_then(|r| r.order)
    }
}

/// Solves `L̄_h ū = f̄` (boundary rows scaled, boundary data from `u`) and
/// returns the max error and `h`.
fn solve_error(m: &Manufactured, elements: usize) -> Result<(f64, f64)> {
    let (op, points): (SparseOperator, Vec<(f64, f64)>) = if m.dim == 1 {
        let g = Grid1D::unit(2 * elements - 1)?;
        let coeff = CoefficientField::from_fn_1d(&g, |x| (m.a)(x, 0.0), |x| (m.c)(x, 0.0));
        (
            assemble_1d_variable(&g, &coeff)?,
            g.points().into_iter().map(|x| (x, 0.0)).collect(),
        )
    } else {
        let g = Grid2D::from_elements(elements, elements, 1.0)?;
        let coeff = CoefficientField::from_fn_2d(&g, m.a, m.c);
        let mut pts = Vec::with_capacity(g.len());
        for j in 0..g.ny() + 2 {
            for i in 0..g.nx() + 2 {
                pts.push((g.x(i), g.y(j)));
            }
        }
        (assemble_2d_variable(&g, &coeff)?, pts)
    };
    let op = op.scale_boundary_rows()?;
    let layout = op.layout().ok_or(Error::MissingLayout)?;
    let h = layout.h();
    let rhs: Vec<f64> = points
        .iter()
        .enumerate()
        .map(|(k, &(x, y))| {
            if layout.is_boundary(k) {
                (m.u)(x, y) / (h * h)
            } else {
                (m.f)(x, y)
            }
        })
        .collect();
    let sol = BandedLu::factor(op.matrix())?.solve(&rhs);
    let err = sol
        .iter()
        .zip(&points)
        .map(|(v, &(x, y))| (v - (m.u)(x, y)).abs())
        .fold(0.0, f64::max);
    Ok((err, h))
}

/// Max-norm errors on successive element meshes and observed orders.
pub fn convergence_study(m: &Manufactured, meshes: &[usize]) -> Result<ConvergenceTable> {
    if meshes.is_empty() || meshes.contains(&0) {
        return Err(Error::InvalidArgument("meshes must be nonempty element counts".into()));
    }
    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(meshes.len());
    for &e in meshes {
        let (max_error, h) = solve_error(m, e)?;
        let order = rows
            .last()
            .filter(|p| p.max_error > 0.0 && max_error > 0.0)
            .map(|p| (p.max_error / max_error).ln() / (p.h / h).ln());
        rows.push(ConvergenceRow {
            elements: e,
            h,
            max_error,
            order,
        });
    }
    Ok(ConvergenceTable {
        case: m.name.to_string(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_is_exact() {
        let t = convergence_study(&Manufactured::quadratic(), &[1, 2, 4]).unwrap();
        for r in &t.rows {
            assert!(r.max_error <= 1e-10, "{r:?}");
        }
    }

    #[test]
    fn sine1d_fourth_order() {
        let t = convergence_study(&Manufactured::sine1d(), &[4, 8, 16, 32]).unwrap();
        assert!(t.last_order().unwrap() >= 3.5, "{t:?}");
    }

    #[test]
    fn unknown_case() {
        assert!(Manufactured::by_name("cubic").is_err());
        assert!(convergence_study(&Manufactured::sine1d(), &[]).is_err());
    }
}
