use serde::Serialize;

use crate::assembly::{split_operator, SparseOperator, SplitRule, Splitting};
use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;

use super::graph::{connects, ConnectivityGraph};
use super::mmatrix::{is_m_matrix_wcdd, MMatrixReport, REL_TOL};

const SEARCH_START: f64 = 0.5;
const SEARCH_STEPS: usize = 40;

/// How ε is chosen for the splitting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum EpsilonChoice {
    Fixed(f64),
    /// Start at 1/2 and bisect toward 0 until the entrywise product bound
    /// holds, keeping the largest admissible ε found.
    Search,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProductBound {
    pub pass: bool,
    /// Smallest `(P_ij - a⁺_ij) / a⁺_ij` over the positive entries, where
    /// `P = A^z A_d⁻¹ A^s`. Infinite when `A_a⁺` is empty.
    pub worst_margin: f64,
    pub worst_at: Option<(usize, usize)>,
    /// Up to 32 violations `(row, col, a⁺, P)`.
    pub failing: Vec<(usize, usize, f64, f64)>,
    pub failing_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Connectivity {
    pub pass: bool,
    /// Every interior reaction sample is positive, so `N⁰(A·1)` is empty.
    pub positive_reaction: bool,
    pub zero_rows: usize,
    pub positive_rows: usize,
    pub via_z: bool,
    pub via_s: bool,
    /// `A^z` has a nonzero wherever `A_a⁻` does.
    pub z_covers_negative_pattern: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LorenzReport {
    pub epsilon: f64,
    pub rule: SplitRule,
    pub searched: bool,
    /// `A_d + A^z` is a nonsingular M-matrix.
    pub cond1: MMatrixReport,
    /// `A_a⁺ <= A^z A_d⁻¹ A^s` entrywise.
    pub cond2: ProductBound,
    /// `A^z` or `A^s` connects `N⁰(A·1)` with `N⁺(A·1)`.
    pub cond3: Connectivity,
    pub pass: bool,
}

/// Entrywise `A_a⁺ <= A^z A_d⁻¹ A^s`, evaluated only on the pattern of
/// `A_a⁺` since the product is nonnegative everywhere.
pub fn product_bound(sp: &Splitting) -> ProductBound {
    let d = sp.diag.diag();
    let mut worst = f64::INFINITY;
    let mut worst_at = None;
    let mut failing = Vec::new();
    let mut failing_count = 0;
    for (i, j, ap) in sp.positive.triplets() {
        let mut p = 0.0;
        for (k, z) in sp.z.row(i) {
            let s = sp.s.get(k, j);
            if s != 0.0 {
                p += z * s / d[k];
            }
        }
        let margin = (p - ap) / ap;
        if margin < worst {
            worst = margin;
            worst_at = Some((i, j));
        }
        if ap > p + REL_TOL * ap.max(p) {
            failing_count += 1;
            if failing.len() < 32 {
                failing.push((i, j, ap, p));
            }
        }
    }
    ProductBound {
        pass: failing_count == 0,
        worst_margin: worst,
        worst_at,
        failing,
        failing_count,
    }
}

fn connectivity(op: &SparseOperator, sp: &Splitting) -> Connectivity {
    let m = op.matrix();
    let sums = m.row_sums();
    let scale = m.row_abs_sums();
    let mut zero = Vec::new();
    let mut positive = Vec::new();
    for i in 0..m.dim() {
        if sums[i] > REL_TOL * scale[i] {
            positive.push(i);
        } else if sums[i] >= -REL_TOL * scale[i] {
            zero.push(i);
        }
    }
    let positive_reaction = op
        .layout()
        .map(|l| l.interior_indices().iter().all(|&k| l.c[k] > 0.0))
        .unwrap_or(false);
    let negative = sp.negative();
    let z_covers = negative.triplets().all(|(i, j, _)| sp.z.get(i, j) != 0.0);
    let via_z = connects(&ConnectivityGraph::from_matrix(&sp.z), &zero, &positive);
    let via_s = via_z || connects(&ConnectivityGraph::from_matrix(&sp.s), &zero, &positive);
    Connectivity {
        pass: positive_reaction || via_z || via_s,
        positive_reaction,
        zero_rows: zero.len(),
        positive_rows: positive.len(),
        via_z,
        via_s,
        z_covers_negative_pattern: z_covers,
    }
}

fn report(op: &SparseOperator, sp: Splitting, searched: bool) -> LorenzReport {
    let dz: CsrMatrix = sp.diag.add(&sp.z).expect("conformable parts");
    let cond1 = is_m_matrix_wcdd(&dz);
    let cond2 = product_bound(&sp);
    let cond3 = connectivity(op, &sp);
    LorenzReport {
        epsilon: sp.epsilon,
        rule: sp.rule,
        searched,
        pass: cond1.pass && cond2.pass && cond3.pass,
        cond1,
        cond2,
        cond3,
    }
}

/// Checks the three Lorenz conditions for an assembled operator. A pass
/// certifies that the operator is a product of two nonsingular M-matrices,
/// hence has a nonnegative inverse.
pub fn lorenz_check(op: &SparseOperator, epsilon: EpsilonChoice) -> Result<LorenzReport> {
    if op.layout().is_none() {
        return Err(Error::MissingLayout);
    }
    let eps = match epsilon {
        EpsilonChoice::Fixed(e) => return Ok(report(op, split_operator(op, e)?, false)),
        EpsilonChoice::Search => search_epsilon(op)?,
    };
    Ok(report(op, split_operator(op, eps)?, true))
}

fn search_epsilon(op: &SparseOperator) -> Result<f64> {
    let start = split_operator(op, SEARCH_START)?;
    if start.rule == SplitRule::Half {
        return Ok(SEARCH_START);
    }
    let first = product_bound(&start);
    if first.pass {
        return Ok(SEARCH_START);
    }
    let (mut lo, mut hi) = (0.0, SEARCH_START);
    let mut best_pass: Option<f64> = None;
    let (mut best_eps, mut best_margin) = (SEARCH_START, first.worst_margin);
    for _ in 0..SEARCH_STEPS {
        let mid = 0.5 * (lo + hi);
        let pb = product_bound(&split_operator(op, mid)?);
        if pb.pass {
            best_pass = Some(best_pass.map_or(mid, |b: f64| b.max(mid)));
            lo = mid;
        } else {
            if pb.worst_margin > best_margin {
                best_margin = pb.worst_margin;
                best_eps = mid;
            }
            hi = mid;
        }
    }
    Ok(best_pass.unwrap_or(best_eps))
}
