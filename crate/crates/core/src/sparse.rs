//! Compressed sparse row storage for square operators.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Square matrix in CSR form. Columns within a row are strictly increasing
/// and explicit zeros are never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl CsrMatrix {
    /// Builds from per-row `(column, value)` lists. Duplicates are summed,
    /// zeros dropped.
    pub fn from_rows(n: usize, rows: Vec<Vec<(usize, f64)>>) -> Self {
        assert_eq!(rows.len(), n, "row count");
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for mut row in rows {
            row.sort_by_key(|&(c, _)| c);
            let mut k = 0;
            while k < row.len() {
                let (c, mut v) = row[k];
                assert!(c < n, "column {c} out of range");
                k += 1;
                while k < row.len() && row[k].0 == c {
                    v += row[k].1;
                    k += 1;
                }
                if v != 0.0 {
                    cols.push(c);
                    vals.push(v);
                }
            }
            row_ptr.push(cols.len());
        }
        CsrMatrix { n, row_ptr, cols, vals }
    }

    /// Builds from `(row, column, value)` triplets.
    pub fn from_triplets(n: usize, triplets: impl IntoIterator<Item = (usize, usize, f64)>) -> Self {
        let mut rows = vec![Vec::new(); n];
        for (r, c, v) in triplets {
            rows[r].push((c, v));
        }
        Self::from_rows(n, rows)
    }

    pub fn identity(n: usize) -> Self {
        Self::from_rows(n, (0..n).map(|i| vec![(i, 1.0)]).collect())
    }

    pub fn diagonal(d: &[f64]) -> Self {
        Self::from_rows(d.len(), d.iter().enumerate().map(|(i, &v)| vec![(i, v)]).collect())
    }

    pub fn from_dense(a: &[Vec<f64>]) -> Self {
        let n = a.len();
        Self::from_rows(
            n,
            a.iter()
                .map(|r| {
                    assert_eq!(r.len(), n);
                    r.iter().enumerate().map(|(j, &v)| (j, v)).collect()
                })
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[r.clone()].iter().copied().zip(self.vals[r].iter().copied())
    }

    pub fn row_len(&self, i: usize) -> usize {
        self.row_ptr[i + 1] - self.row_ptr[i]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.cols[r.clone()].binary_search(&j) {
            Ok(k) => self.vals[r.start + k],
            Err(_) => 0.0,
        }
    }

    pub fn diag(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    /// All stored entries in row-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |i| self.row(i).map(move |(j, v)| (i, j, v)))
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        (0..self.n).map(|i| self.row(i).map(|(j, v)| v * x[j]).sum()).collect()
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.row(i).map(|(_, v)| v).sum()).collect()
    }

    /// Sum of absolute values per row.
    pub fn row_abs_sums(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.row(i).map(|(_, v)| v.abs()).sum()).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.vals.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest distance `|i - j|` over stored entries, split into
    /// (below diagonal, above diagonal).
    pub fn bandwidths(&self) -> (usize, usize) {
        let mut lower = 0;
        let mut upper = 0;
        for (i, j, _) in self.triplets() {
            if i > j {
                lower = lower.max(i - j);
            } else {
                upper = upper.max(j - i);
            }
        }
        (lower, upper)
    }

    fn check_dims(&self, other: &CsrMatrix, what: &str) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(format!("{what}: {} vs {}", self.n, other.n)));
        }
        Ok(())
    }

    pub fn add(&self, other: &CsrMatrix) -> Result<CsrMatrix> {
        self.check_dims(other, "add")?;
        let rows = (0..self.n).map(|i| self.row(i).chain(other.row(i)).collect()).collect();
        Ok(Self::from_rows(self.n, rows))
    }

    pub fn sub(&self, other: &CsrMatrix) -> Result<CsrMatrix> {
        self.check_dims(other, "sub")?;
        let rows = (0..self.n)
            .map(|i| self.row(i).chain(other.row(i).map(|(j, v)| (j, -v))).collect())
            .collect();
        Ok(Self::from_rows(self.n, rows))
    }

    /// Sparse product `self * other`.
    pub fn matmul(&self, other: &CsrMatrix) -> Result<CsrMatrix> {
        self.check_dims(other, "matmul")?;
        let rows = (0..self.n)
            .map(|i| {
                let mut acc: BTreeMap<usize, f64> = BTreeMap::new();
                for (k, a) in self.row(i) {
                    for (j, b) in other.row(k) {
                        *acc.entry(j).or_insert(0.0) += a * b;
                    }
                }
                acc.into_iter().collect()
            })
            .collect();
        Ok(Self::from_rows(self.n, rows))
    }

    /// `diag(d) * self`.
    pub fn scale_rows(&self, d: &[f64]) -> CsrMatrix {
        assert_eq!(d.len(), self.n);
        let rows = (0..self.n)
            .map(|i| self.row(i).map(|(j, v)| (j, v * d[i])).collect())
            .collect();
        Self::from_rows(self.n, rows)
    }

    /// Keeps entries for which `keep(i, j, v)` holds.
    pub fn filter(&self, keep: impl Fn(usize, usize, f64) -> bool) -> CsrMatrix {
        let rows = (0..self.n)
            .map(|i| self.row(i).filter(|&(j, v)| keep(i, j, v)).collect())
            .collect();
        Self::from_rows(self.n, rows)
    }

    /// Replaces row `i` with a single diagonal entry `value`.
    pub fn with_diagonal_rows(&self, rows_to_set: &[usize], value: f64) -> CsrMatrix {
        let mut set = vec![false; self.n];
        for &r in rows_to_set {
            set[r] = true;
        }
        let rows = (0..self.n)
            .map(|i| {
                if set[i] {
                    vec![(i, value)]
                } else {
                    self.row(i).collect()
                }
            })
            .collect();
        Self::from_rows(self.n, rows)
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.n]; self.n];
        for (i, j, v) in self.triplets() {
            d[i][j] = v;
        }
        d
    }

    /// Max entrywise `|self - other|`.
    pub fn max_abs_diff(&self, other: &CsrMatrix) -> Result<f64> {
        Ok(self.sub(other)?.max_abs())
    }
}
