use serde::Serialize;

use crate::sparse::CsrMatrix;

use super::graph::{unconnected, ConnectivityGraph};

/// Relative tolerance for row sums and entrywise comparisons.
pub const REL_TOL: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZPatternReport {
    pub pass: bool,
    /// Up to 32 positive off-diagonal entries `(row, col, value)`.
    pub positive_entries: Vec<(usize, usize, f64)>,
    pub positive_count: usize,
}

/// Every off-diagonal entry is `<= 0`.
pub fn is_z_pattern(a: &CsrMatrix) -> ZPatternReport {
    let pos: Vec<_> = a.triplets().filter(|&(i, j, v)| i != j && v > 0.0).collect();
    ZPatternReport {
        pass: pos.is_empty(),
        positive_count: pos.len(),
        positive_entries: pos.into_iter().take(32).collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MMatrixReport {
    pub pass: bool,
    pub z_pattern: bool,
    /// Rows whose diagonal is not positive.
    pub nonpositive_diagonal: Vec<usize>,
    /// Rows with a negative row sum beyond tolerance.
    pub negative_row_sums: Vec<usize>,
    pub strictly_dominant_rows: usize,
    /// Zero-sum rows with no path to a strictly dominant row.
    pub unchained_rows: Vec<usize>,
}

/// Sufficient test for a nonsingular M-matrix: Z-pattern, positive
/// diagonal, nonnegative row sums, and weak chained diagonal dominance (every
/// row with a zero row sum reaches a row with a positive one).
///
/// Row sums are judged against `1e-13` times the row's absolute sum.
pub fn is_m_matrix_wcdd(a: &CsrMatrix) -> MMatrixReport {
    let z = is_z_pattern(a);
    let sums = a.row_sums();
    let scale = a.row_abs_sums();
    let n = a.dim();
    let nonpositive_diagonal: Vec<usize> = (0..n).filter(|&i| !(a.get(i, i) > 0.0)).collect();
    let mut negative = Vec::new();
    let mut zero = Vec::new();
    let mut positive = Vec::new();
    for i in 0..n {
        let tol = REL_TOL * scale[i];
        if sums[i] < -tol {
            negative.push(i);
        } else if sums[i] > tol {
            positive.push(i);
        } else {
            zero.push(i);
        }
    }
    let unchained = if positive.is_empty() {
        zero.clone()
    } else {
        unconnected(&ConnectivityGraph::from_matrix(a), &zero, &positive)
    };
    MMatrixReport {
        pass: z.pass
            && nonpositive_diagonal.is_empty()
            && negative.is_empty()
            && !positive.is_empty()
            && unchained.is_empty(),
        z_pattern: z.pass,
        nonpositive_diagonal,
        negative_row_sums: negative,
        strictly_dominant_rows: positive.len(),
        unchained_rows: unchained,
    }
}
