//! Banded LU factorization with partial pivoting.
//!
//! Row-major grid ordering keeps every assembled operator inside a band of
//! half-width `2 (nx + 2)`, so a banded factorization is both exact and
//! cheap. Storage follows the LAPACK `gbtrf` layout: column-major with
//! leading dimension `2 kl + ku + 1`, entry `(i, j)` at
//! `j * ldab + kl + ku + i - j`. The extra `kl` rows hold pivoting fill-in.

use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;

#[derive(Debug, Clone)]
pub struct BandedLu {
    n: usize,
    kl: usize,
    ku: usize,
    ldab: usize,
    ab: Vec<f64>,
    ipiv: Vec<usize>,
}

impl BandedLu {
    /// Factorizes `a`. Fails on an exactly zero pivot.
    pub fn factor(a: &CsrMatrix) -> Result<Self> {
        let n = a.dim();
        let (kl, ku) = a.bandwidths();
        let ldab = 2 * kl + ku + 1;
        let kv = kl + ku;
        let mut ab = vec![0.0; ldab * n];
        for (i, j, v) in a.triplets() {
            ab[j * ldab + kv + i - j] = v;
        }
        let at = |i: usize, j: usize| j * ldab + kv + i - j;

        let mut ipiv = vec![0; n];
        // last column touched by the current U fill
        let mut ju = 0usize;
        for j in 0..n {
            let km = kl.min(n - 1 - j);
            let mut p = 0;
            let mut best = ab[at(j, j)].abs();
            for i in 1..=km {
                let v = ab[at(j + i, j)].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            ipiv[j] = j + p;
            if best == 0.0 {
                return Err(Error::Singular { column: j });
            }
            ju = ju.max((j + ku + p).min(n - 1));
            if p != 0 {
                for c in j..=ju {
                    ab.swap(at(j, c), at(j + p, c));
                }
            }
            let pivot = ab[at(j, j)];
            for i in 1..=km {
                ab[at(j + i, j)] /= pivot;
            }
            for c in j + 1..=ju {
                let u = ab[at(j, c)];
                if u == 0.0 {
                    continue;
                }
                for i in 1..=km {
                    let l = ab[at(j + i, j)];
                    ab[at(j + i, c)] -= l * u;
                }
            }
        }
        Ok(BandedLu {
            n,
            kl,
            ku,
            ldab,
            ab,
            ipiv,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// (lower, upper) bandwidth of the factored matrix.
    pub fn bandwidths(&self) -> (usize, usize) {
        (self.kl, self.ku)
    }

    #[inline]
    fn get(&self, i: usize, j: usize) -> f64 {
        self.ab[j * self.ldab + self.kl + self.ku + i - j]
    }

    /// Solves `A x = b` in place.
    pub fn solve_in_place(&self, b: &mut [f64]) {
        self.solve_from(b, 0);
    }

    /// Solves in place assuming `b[..start]` is zero, which lets unit-vector
    /// solves skip the leading part of the forward sweep.
    fn solve_from(&self, b: &mut [f64], start: usize) {
        assert_eq!(b.len(), self.n);
        let n = self.n;
        let kv = self.kl + self.ku;
        for j in start..n {
            let p = self.ipiv[j];
            if p != j {
                b.swap(j, p);
            }
            let bj = b[j];
            if bj != 0.0 {
                let km = self.kl.min(n - 1 - j);
                for i in 1..=km {
                    b[j + i] -= self.get(j + i, j) * bj;
                }
            }
        }
        for j in (0..n).rev() {
            b[j] /= self.get(j, j);
            let bj = b[j];
            if bj != 0.0 {
                for i in j.saturating_sub(kv)..j {
                    b[i] -= self.get(i, j) * bj;
                }
            }
        }
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }

    /// Column `c` of `A⁻¹`, written into `out`.
    pub fn inverse_column(&self, c: usize, out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        out[c] = 1.0;
        // swaps at step k stay within rows k..=k+kl, so rows below c-kl are
        // still zero when the sweep reaches them
        self.solve_from(out, c.saturating_sub(self.kl));
    }
}
