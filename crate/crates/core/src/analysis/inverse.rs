use serde::Serialize;

use crate::assembly::SparseOperator;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::lu::BandedLu;

use super::mmatrix::REL_TOL;

pub const DEFAULT_CAP: usize = 20_000;
pub const DEFAULT_REL_THRESHOLD: f64 = 1e-12;
const COLUMNS_PER_TASK: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InverseOptions {
    /// Absolute numerical-zero threshold. When `None`, `rel_threshold` times
    /// the largest inverse entry is used.
    pub threshold: Option<f64>,
    pub rel_threshold: f64,
    pub cap: usize,
    pub execution: Execution,
}

impl Default for InverseOptions {
    fn default() -> Self {
        InverseOptions {
            threshold: None,
            rel_threshold: DEFAULT_REL_THRESHOLD,
            cap: DEFAULT_CAP,
            execution: Execution::default(),
        }
    }
}

/// Sign of a value relative to a numerical-zero band.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn classify(value: f64, threshold: f64) -> Sign {
        if value < -threshold {
            Sign::Negative
        } else if value > threshold {
            Sign::Positive
        } else {
            Sign::Zero
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InverseReport {
    pub dim: usize,
    /// Smallest entry of the full inverse.
    pub min_bar: f64,
    pub min_bar_at: (usize, usize),
    /// Smallest entry of the interior block (rows and columns at interior
    /// points). Equals `min_bar` for operators without a layout.
    pub min_interior: f64,
    pub min_interior_at: (usize, usize),
    pub max_abs: f64,
    pub threshold: f64,
    /// `min_bar >= -threshold`.
    pub nonneg: bool,
    pub interior_nonneg: bool,
}

impl InverseReport {
    pub fn sign_bar(&self) -> Sign {
        Sign::classify(self.min_bar, self.threshold)
    }

    pub fn sign_interior(&self) -> Sign {
        Sign::classify(self.min_interior, self.threshold)
    }
}

#[derive(Debug, Clone, Copy)]
struct Min {
    value: f64,
    at: (usize, usize),
}

impl Min {
    const NONE: Min = Min {
        value: f64::INFINITY,
        at: (usize::MAX, usize::MAX),
    };

    /// Ties go to the lexicographically smallest `(row, col)`.
    fn offer(&mut self, value: f64, at: (usize, usize)) {
        if value < self.value || (value == self.value && at < self.at) {
            *self = Min { value, at };
        }
    }

    fn merge(&mut self, other: Min) {
        self.offer(other.value, other.at);
    }
}

#[derive(Clone, Copy)]
struct Stats {
    bar: Min,
    interior: Min,
    max_abs: f64,
}

/// Computes every column of `op⁻¹` from one banded LU factorization and
/// records the smallest entries of the full inverse and of its interior
/// block.
pub fn inverse_min_entries(op: &SparseOperator, options: &InverseOptions) -> Result<InverseReport> {
    let n = op.dim();
    if n > options.cap {
        return Err(Error::TooLarge {
            dim: n,
            cap: options.cap,
        });
    }
    let lu = BandedLu::factor(op.matrix())?;
    let mut interior = vec![false; n];
    for k in op.interior_indices() {
        interior[k] = true;
    }

    let chunks = options.execution.fold_chunks(n, COLUMNS_PER_TASK, |cols| {
        let mut col = vec![0.0; n];
        let mut st = Stats {
            bar: Min::NONE,
            interior: Min::NONE,
            max_abs: 0.0,
        };
        for c in cols {
            lu.inverse_column(c, &mut col);
            for (r, &v) in col.iter().enumerate() {
                st.bar.offer(v, (r, c));
                if interior[r] && interior[c] {
                    st.interior.offer(v, (r, c));
                }
                st.max_abs = st.max_abs.max(v.abs());
            }
        }
        st
    });

    let mut bar = Min::NONE;
    let mut inner = Min::NONE;
    let mut max_abs: f64 = 0.0;
    for st in chunks {
        bar.merge(st.bar);
        inner.merge(st.interior);
        max_abs = max_abs.max(st.max_abs);
    }
    if inner.at.0 == usize::MAX {
        inner = bar;
    }
    let threshold = options.threshold.unwrap_or(options.rel_threshold * max_abs);
    Ok(InverseReport {
        dim: n,
        min_bar: bar.value,
        min_bar_at: bar.at,
        min_interior: inner.value,
        min_interior_at: inner.at,
        max_abs,
        threshold,
        nonneg: bar.value >= -threshold,
        interior_nonneg: inner.value >= -threshold,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DmpReport {
    pub pass: bool,
    pub inverse: InverseReport,
    pub row_sums_nonneg: bool,
    pub negative_rows: Vec<usize>,
}

/// Discrete maximum principle certificate: nonnegative inverse and
/// nonnegative row sums.
pub fn dmp_certify(op: &SparseOperator, options: &InverseOptions) -> Result<DmpReport> {
    let inverse = inverse_min_entries(op, options)?;
    let m = op.matrix();
    let sums = m.row_sums();
    let scale = m.row_abs_sums();
    let negative_rows: Vec<usize> = (0..m.dim()).filter(|&i| sums[i] < -REL_TOL * scale[i]).collect();
    let row_sums_nonneg = negative_rows.is_empty();
    Ok(DmpReport {
        pass: inverse.nonneg && row_sums_nonneg,
        inverse,
        row_sums_nonneg,
        negative_rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sparse::CsrMatrix;

    #[test]
    fn identity_and_two_by_two() {
        let id = SparseOperator::from_matrix(CsrMatrix::identity(3));
        let r = inverse_min_entries(&id, &InverseOptions::default()).unwrap();
        assert_eq!(r.min_bar, 0.0);
        assert_eq!(r.min_bar_at, (0, 1));
        assert_eq!(r.min_interior, 0.0);
        assert!(r.nonneg);

        let a = SparseOperator::from_matrix(CsrMatrix::from_dense(&[vec![2.0, -1.0], vec![-1.0, 2.0]]));
        let r = inverse_min_entries(&a, &InverseOptions::default()).unwrap();
        assert!((r.min_bar - 1.0 / 3.0).abs() < 1e-15);
        assert!((r.max_abs - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn cap_and_singular() {
        let id = SparseOperator::from_matrix(CsrMatrix::identity(5));
        let opts = InverseOptions {
            cap: 4,
            ..Default::default()
        };
        assert!(matches!(
            inverse_min_entries(&id, &opts),
            Err(Error::TooLarge { dim: 5, cap: 4 })
        ));
        let s = SparseOperator::from_matrix(CsrMatrix::from_dense(&[vec![1.0, 1.0], vec![1.0, 1.0]]));
        assert!(matches!(
            inverse_min_entries(&s, &InverseOptions::default()),
            Err(Error::Singular { .. })
        ));
    }

    #[test]
    fn sequential_and_parallel_agree() {
        use crate::assembly::assemble_2d_laplacian;
        use crate::grid::Grid2D;
        let g = Grid2D::from_elements(4, 8, 1.0).unwrap();
        let op = assemble_2d_laplacian(&g).scale_boundary_rows().unwrap();
        let seq = inverse_min_entries(
            &op,
            &InverseOptions {
                execution: Execution::Sequential,
                ..Default::default()
            },
        )
        .unwrap();
        let par = inverse_min_entries(
            &op,
            &InverseOptions {
                execution: Execution::Parallel,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(seq, par);
        assert!(seq.nonneg && seq.min_interior > 0.0);
    }
}
