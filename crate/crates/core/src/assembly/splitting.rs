//! The splitting `A = A_d + A_a⁺ + A^z + A^s` of an assembled operator.
//!
//! Along each axis an interior row has either the narrow stencil (offsets
//! ±1) or the wide stencil (offsets ±1, ±2):
//!
//! * narrow: the negative ±1 entries go `ε` to `A^z` and `1 - ε` to `A^s`;
//! * wide: a positive ±2 entry `p` goes to `A_a⁺`, a negative one to `A^z`;
//!   the ±1 entry on the same side is split into `A^s = -p⁺` and
//!   `A^z = entry + p⁺`.
//!
//! The 1D Laplacian instead uses `A^z = A^s = A_a⁻ / 2`. Boundary rows only
//! contribute to `A_d`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{axis_kind_1d, AxisKind};
use crate::sparse::CsrMatrix;

use super::{GridRef, Scheme, SparseOperator};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SplitRule {
    /// `A^z = A^s = A_a⁻ / 2`.
    Half,
    /// The ε-parameterized rule described in the module docs.
    Epsilon,
}

#[derive(Debug, Clone)]
pub struct Splitting {
    pub epsilon: f64,
    pub rule: SplitRule,
    /// Diagonal part `A_d`.
    pub diag: CsrMatrix,
    /// Positive off-diagonal part `A_a⁺`.
    pub positive: CsrMatrix,
    /// `A^z <= 0`.
    pub z: CsrMatrix,
    /// `A^s <= 0`.
    pub s: CsrMatrix,
}

impl Splitting {
    /// `A_a⁻ = A^z + A^s`.
    pub fn negative(&self) -> CsrMatrix {
        self.z.add(&self.s).expect("conformable parts")
    }

    /// `A_d + A_a⁺ + A^z + A^s`.
    pub fn reconstruct(&self) -> CsrMatrix {
        self.diag
            .add(&self.positive)
            .and_then(|m| m.add(&self.z))
            .and_then(|m| m.add(&self.s))
            .expect("conformable parts")
    }
}

struct Parts {
    d: Vec<Vec<(usize, f64)>>,
    p: Vec<Vec<(usize, f64)>>,
    z: Vec<Vec<(usize, f64)>>,
    s: Vec<Vec<(usize, f64)>>,
}

impl Parts {
    fn new(n: usize) -> Self {
        Parts {
            d: vec![Vec::new(); n],
            p: vec![Vec::new(); n],
            z: vec![Vec::new(); n],
            s: vec![Vec::new(); n],
        }
    }

    /// Distributes the entries of `row` at `col(±1)` (and `col(±2)` for
    /// wide stencils) among the parts.
    fn axis(&mut self, m: &CsrMatrix, row: usize, kind: AxisKind, eps: f64, col: impl Fn(isize) -> usize) {
        match kind {
            AxisKind::Narrow => {
                for o in [-1, 1] {
                    let c = col(o);
                    let v = m.get(row, c);
                    self.z[row].push((c, eps * v));
                    self.s[row].push((c, (1.0 - eps) * v));
                }
            }
            AxisKind::Wide => {
                for side in [-1, 1] {
                    let (near, far) = (col(side), col(2 * side));
                    let far_v = m.get(row, far);
                    let near_v = m.get(row, near);
                    let far_pos = far_v.max(0.0);
                    if far_v > 0.0 {
                        self.p[row].push((far, far_v));
                    } else {
                        self.z[row].push((far, far_v));
                    }
                    self.s[row].push((near, -far_pos));
                    self.z[row].push((near, near_v + far_pos));
                }
            }
        }
    }

    fn finish(self, n: usize, epsilon: f64, rule: SplitRule) -> Splitting {
        Splitting {
            epsilon,
            rule,
            diag: CsrMatrix::from_rows(n, self.d),
            positive: CsrMatrix::from_rows(n, self.p),
            z: CsrMatrix::from_rows(n, self.z),
            s: CsrMatrix::from_rows(n, self.s),
        }
    }
}

/// Splits an assembled operator for the given `ε ∈ (0, 1)`.
pub fn split_operator(op: &SparseOperator, epsilon: f64) -> Result<Splitting> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::EpsilonOutOfRange(epsilon));
    }
    let layout = op.layout().ok_or(Error::MissingLayout)?;
    let m = op.matrix();
    let n = m.dim();
    let mut parts = Parts::new(n);
    for k in 0..n {
        parts.d[k].push((k, m.get(k, k)));
    }

    if let (GridRef::OneD(_), Scheme::Laplacian) = (&layout.grid, layout.scheme) {
        for k in layout.interior_indices() {
            for (j, v) in m.row(k) {
                if j == k {
                    continue;
                }
                if v > 0.0 {
                    parts.p[k].push((j, v));
                } else {
                    parts.z[k].push((j, 0.5 * v));
                    parts.s[k].push((j, 0.5 * v));
                }
            }
        }
        return Ok(parts.finish(n, epsilon, SplitRule::Half));
    }

    match &layout.grid {
        GridRef::OneD(_) => {
            for k in layout.interior_indices() {
                let col = |o: isize| (k as isize + o) as usize;
                parts.axis(m, k, axis_kind_1d(k), epsilon, col);
            }
        }
        GridRef::TwoD(g) => {
            let stride = g.row_len() as isize;
            for k in layout.interior_indices() {
                let (i, j) = g.coords(k);
                let (kx, ky) = g.axis_kinds(i, j);
                parts.axis(m, k, kx, epsilon, |o| (k as isize + o) as usize);
                parts.axis(m, k, ky, epsilon, |o| (k as isize + o * stride) as usize);
            }
        }
    }
    Ok(parts.finish(n, epsilon, SplitRule::Epsilon))
}
