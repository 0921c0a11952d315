//! Explicit factorizations of the discrete Laplacian into two nonsingular
//! M-matrices, `L̄_h = left · right`.
//!
//! In 1D `left = M₁` is dimensionless and `right = M₂` carries all of the
//! `1/h²`. In 2D `right = A₁` is applied first and `left = A₂` (carrying
//! `1/h²`) second. Boundary rows are identity rows in both factors.
//!
//! The 2D product reproduces the operator acting on interior unknowns only:
//! rows next to the boundary differ in their coupling to boundary values,
//! which enter as data. The 2D residual is therefore measured with those
//! couplings excluded.

use serde::Serialize;

use crate::analysis::{is_m_matrix_wcdd, MMatrixReport};
use crate::error::{Error, Result};
use crate::grid::{Grid1D, Grid2D, PointClass};
use crate::sparse::CsrMatrix;

type Row = Vec<(usize, f64)>;

pub const RESIDUAL_TOL: f64 = 1e-12;

/// Which entries of the product must match the target.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum ResidualScope {
    Full,
    /// Every entry except interior rows against boundary columns.
    InteriorAction {
        boundary: Vec<usize>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct FactorPair {
    pub left: CsrMatrix,
    pub right: CsrMatrix,
    pub scope: ResidualScope,
}

impl FactorPair {
    pub fn product(&self) -> Result<CsrMatrix> {
        self.left.matmul(&self.right)
    }

    /// Factorization of the operator with boundary rows scaled to `1/h²`:
    /// the boundary rows of `left` are scaled.
    pub fn with_scaled_boundary(&self, boundary: &[usize], h: f64) -> FactorPair {
        FactorPair {
            left: self.left.with_diagonal_rows(boundary, 1.0 / (h * h)),
            right: self.right.clone(),
            scope: self.scope.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FactorizationReport {
    /// `max |left · right - target| / max |target|` over the pair's scope.
    pub residual: f64,
    /// The same over every entry.
    pub full_residual: f64,
    pub left: MMatrixReport,
    pub right: MMatrixReport,
    pub pass: bool,
}

/// `M₁ M₂` for the 1D Laplacian.
pub fn factor_1d_laplacian(grid: &Grid1D) -> FactorPair {
    let n = grid.len();
    let inv_h2 = grid.inv_h2();
    let mut m1 = vec![Vec::new(); n];
    let mut m2 = vec![Vec::new(); n];
    for i in 0..n {
        match grid.class_of(i) {
            PointClass::Boundary => {
                m1[i].push((i, 1.0));
                m2[i].push((i, 1.0));
            }
            PointClass::CellCenter => {
                m1[i].push((i, 1.0));
                m2[i].extend([(i - 1, -inv_h2), (i, 2.0 * inv_h2), (i + 1, -inv_h2)]);
            }
            _ => {
                m1[i].extend([(i - 1, -0.25), (i, 1.0), (i + 1, -0.25)]);
                m2[i].extend([(i - 1, -1.5 * inv_h2), (i, 3.0 * inv_h2), (i + 1, -1.5 * inv_h2)]);
            }
        }
    }
    FactorPair {
        left: CsrMatrix::from_rows(n, m1),
        right: CsrMatrix::from_rows(n, m2),
        scope: ResidualScope::Full,
    }
}

/// `A₂ A₁` for the 2D Laplacian.
pub fn factor_2d_laplacian(grid: &Grid2D) -> FactorPair {
    let n = grid.len();
    let inv_h2 = grid.inv_h2();
    let mut a1 = vec![Vec::new(); n];
    let mut a2 = vec![Vec::new(); n];
    for j in 0..grid.ny() + 2 {
        for i in 0..grid.nx() + 2 {
            let k = grid.index(i, j);
            // offsets in (di, dj)
            let at = |di: isize, dj: isize| grid.index((i as isize + di) as usize, (j as isize + dj) as usize);
            let (r1, r2): (Row, Row) = match grid.class_of(i, j) {
                PointClass::Boundary => (vec![(k, 1.0)], vec![(k, 1.0)]),
                PointClass::Knot => (
                    vec![(k, 1.0)],
                    vec![
                        (k, 6.0),
                        (at(-1, 0), -1.5),
                        (at(1, 0), -1.5),
                        (at(0, -1), -1.5),
                        (at(0, 1), -1.5),
                    ],
                ),
                PointClass::CellCenter => {
                    let mut r2 = vec![(k, 2.0)];
                    for (di, dj) in [(-1, 0), (1, 0), (0, -1), (0, 1)] {
                        r2.push((at(di, dj), -3.0 / 8.0));
                    }
                    for (di, dj) in [(-1, -1), (1, -1), (-1, 1), (1, 1)] {
                        r2.push((at(di, dj), -1.0 / 8.0));
                    }
                    (
                        vec![
                            (k, 2.0),
                            (at(-1, 0), -0.25),
                            (at(1, 0), -0.25),
                            (at(0, -1), -0.25),
                            (at(0, 1), -0.25),
                        ],
                        r2,
                    )
                }
                class @ (PointClass::EdgeCenterY | PointClass::EdgeCenterX) => {
                    // (along, across): the first factor acts along the edge,
                    // the wide stencil runs across it
                    let swap = class == PointClass::EdgeCenterX;
                    let o = |along: isize, across: isize| if swap { at(across, along) } else { at(along, across) };
                    let r1 = vec![(o(-1, 0), -1.0 / 6.0), (k, 4.0 / 3.0), (o(1, 0), -1.0 / 6.0)];
                    let mut r2 = vec![(k, 15.0 / 4.0), (o(-1, 0), -7.0 / 16.0), (o(1, 0), -7.0 / 16.0)];
                    r2.extend([(o(0, -1), -1.0), (o(0, 1), -1.0)]);
                    for s in [-1, 1] {
                        for t in [-1, 1] {
                            r2.push((o(s, t), -3.0 / 16.0));
                            r2.push((o(s, 2 * t), -1.0 / 32.0));
                        }
                    }
                    (r1, r2)
                }
                PointClass::CellEnd => unreachable!("1D class on a 2D grid"),
            };
            a1[k] = r1;
            a2[k] = if grid.class_of(i, j) == PointClass::Boundary {
                r2
            } else {
                r2.into_iter().map(|(c, v)| (c, v * inv_h2)).collect()
            };
        }
    }
    FactorPair {
        left: CsrMatrix::from_rows(n, a2),
        right: CsrMatrix::from_rows(n, a1),
        scope: ResidualScope::InteriorAction {
            boundary: (0..n)
                .filter(|&k| grid.is_boundary(k % grid.row_len(), k / grid.row_len()))
                .collect(),
        },
    }
}

/// Checks `left · right = target` to `RESIDUAL_TOL` relative and that both
/// factors are nonsingular M-matrices.
pub fn verify_factorization(target: &CsrMatrix, pair: &FactorPair) -> Result<FactorizationReport> {
    if pair.left.dim() != target.dim() || pair.right.dim() != target.dim() {
        return Err(Error::DimensionMismatch(format!(
            "target {} vs factors {} and {}",
            target.dim(),
            pair.left.dim(),
            pair.right.dim()
        )));
    }
    let diff = pair.product()?.sub(target)?;
    let scale = target.max_abs();
    let full_residual = diff.max_abs() / scale;
    let residual = match &pair.scope {
        ResidualScope::Full => full_residual,
        ResidualScope::InteriorAction { boundary } => {
            let mut is_b = vec![false; target.dim()];
            for &b in boundary {
                is_b[b] = true;
            }
            diff.triplets()
                .filter(|&(r, c, _)| is_b[r] || !is_b[c])
                .fold(0.0f64, |m, (_, _, v)| m.max(v.abs()))
                / scale
        }
    };
    let left = is_m_matrix_wcdd(&pair.left);
    let right = is_m_matrix_wcdd(&pair.right);
    Ok(FactorizationReport {
        pass: residual <= RESIDUAL_TOL && left.pass && right.pass,
        residual,
        full_residual,
        left,
        right,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::{assemble_1d_laplacian, assemble_2d_laplacian};

    #[test]
    fn printed_factors_n7() {
        let g = Grid1D::unit(7).unwrap();
        let f = factor_1d_laplacian(&g);
        let m1 = f.left.to_dense();
        assert_eq!(m1[2][1..4], [-0.25, 1.0, -0.25]);
        assert_eq!(m1[3][3], 1.0);
        let m2 = f.right.to_dense();
        assert_eq!(m2[2][1..4], [-1.5 * 64.0, 3.0 * 64.0, -1.5 * 64.0]);
        assert_eq!(m2[3][2..5], [-64.0, 128.0, -64.0]);
        let r = verify_factorization(assemble_1d_laplacian(&g).matrix(), &f).unwrap();
        assert!(r.pass && r.residual <= 1e-14, "{r:?}");
    }

    #[test]
    fn n1_is_trivial() {
        let g = Grid1D::unit(1).unwrap();
        let f = factor_1d_laplacian(&g);
        assert_eq!(f.left, CsrMatrix::identity(3));
        assert!(
            verify_factorization(assemble_1d_laplacian(&g).matrix(), &f)
                .unwrap()
                .pass
        );
    }

    #[test]
    fn two_d_product_matches() {
        for (mx, my) in [(1, 1), (2, 2), (4, 8), (8, 8)] {
            let g = Grid2D::from_elements(mx, my, 1.0).unwrap();
            let f = factor_2d_laplacian(&g);
            let r = verify_factorization(assemble_2d_laplacian(&g).matrix(), &f).unwrap();
            assert!(r.pass, "{mx}x{my}: {r:?}");
        }
    }

    #[test]
    fn single_point_2d() {
        let g = Grid2D::new(1, 1, (0.0, 1.0), (0.0, 1.0)).unwrap();
        let f = factor_2d_laplacian(&g);
        let c = g.index(1, 1);
        assert_eq!(f.right.get(c, c), 2.0);
        assert_eq!(f.right.get(c, g.index(0, 1)), -0.25);
        let p = f.product().unwrap();
        assert_eq!(p.get(c, c), 16.0);
        // boundary coupling is not reproduced
        assert_eq!(p.get(c, g.index(1, 0)), -3.5);
        let r = verify_factorization(assemble_2d_laplacian(&g).matrix(), &f).unwrap();
        assert!(r.pass && r.full_residual > 0.01, "{r:?}");
    }

    #[test]
    fn identity_left_factor_fails() {
        let g = Grid1D::unit(7).unwrap();
        let l = assemble_1d_laplacian(&g).into_matrix();
        let pair = FactorPair {
            left: CsrMatrix::identity(l.dim()),
            right: l.clone(),
            scope: ResidualScope::Full,
        };
        let r = verify_factorization(&l, &pair).unwrap();
        assert_eq!(r.residual, 0.0);
        assert!(!r.right.z_pattern && !r.pass);
    }

    #[test]
    fn two_d_interior_stencil_centers() {
        let g = Grid2D::from_elements(8, 8, 1.0).unwrap();
        let p = factor_2d_laplacian(&g).product().unwrap();
        let s = g.inv_h2();
        for (i, j, v) in [(4, 4, 7.0), (3, 4, 5.5), (4, 3, 5.5), (3, 3, 4.0)] {
            let k = g.index(i, j);
            assert!((p.get(k, k) - v * s).abs() <= 1e-12 * s);
        }
    }

    #[test]
    fn scaled_boundary() {
        let g = Grid2D::new(7, 7, (0.0, 1.0), (0.0, 1.0)).unwrap();
        let op = assemble_2d_laplacian(&g).scale_boundary_rows().unwrap();
        let boundary = op.layout().unwrap().boundary_indices();
        let f = factor_2d_laplacian(&g).with_scaled_boundary(&boundary, g.h());
        assert!(verify_factorization(op.matrix(), &f).unwrap().pass);
    }
}
