use serde::Serialize;

use crate::analysis::{inverse_min_entries, InverseOptions, InverseReport, Sign};
use crate::error::{Error, Result};
use crate::exec::Execution;

use super::{heat_coefficient, table_grid};
use crate::assembly::assemble_2d_variable;

/// Width of the bracket returned for a sign change.
pub const SWEEP_TOL: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepPoint {
    pub ratio: f64,
    pub min_bar: f64,
    pub min_interior: f64,
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub mesh: (usize, usize),
    pub points: Vec<SweepPoint>,
    /// Bracket `(lo, hi)` of width at most `SWEEP_TOL` with `min L̄_h⁻¹`
    /// negative at `lo` and nonnegative at `hi`.
    pub sign_change_bar: Option<(f64, f64)>,
    /// The same for `min L_h⁻¹`.
    pub sign_change_interior: Option<(f64, f64)>,
}

impl SweepResult {
    /// Midpoint of the `L̄_h⁻¹` bracket.
    pub fn critical_ratio(&self) -> Option<f64> {
        self.sign_change_bar.map(|(lo, hi)| 0.5 * (lo + hi))
    }
}

fn evaluate(mesh: (usize, usize), ratio: f64, execution: Execution) -> Result<InverseReport> {
    let grid = table_grid(mesh)?;
    let op = assemble_2d_variable(&grid, &heat_coefficient(&grid, ratio))?.scale_boundary_rows()?;
    inverse_min_entries(
        &op,
        &InverseOptions {
            execution,
            ..Default::default()
        },
    )
}

fn negative(r: &InverseReport, interior: bool) -> bool {
    let v = if interior { r.min_interior } else { r.min_bar };
    Sign::classify(v, r.threshold) == Sign::Negative
}

/// Bisects a bracket with a negative minimum at `lo` and none at `hi`.
fn bisect(mesh: (usize, usize), mut lo: f64, mut hi: f64, interior: bool, execution: Execution) -> Result<(f64, f64)> {
    while hi - lo > SWEEP_TOL {
        let mid = 0.5 * (lo + hi);
        if negative(&evaluate(mesh, mid, execution)?, interior) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo, hi))
}

/// Minima of the heat-step inverses against `Δt / h²` on one mesh, and the
/// ratio where each minimum stops being negative.
pub fn sweep_dt_ratio(mesh: (usize, usize), ratios: &[f64], execution: Execution) -> Result<SweepResult> {
    if ratios.is_empty() || ratios.windows(2).any(|w| !(w[0] < w[1])) || !(ratios[0] > 0.0) {
        return Err(Error::InvalidArgument(
            "ratios must be positive and strictly increasing".into(),
        ));
    }
    let reports: Vec<InverseReport> = execution
        .map(ratios, |&r| evaluate(mesh, r, Execution::Sequential))
        .into_iter()
        .collect::<Result<_>>()?;
    let points = ratios
        .iter()
        .zip(&reports)
        .map(|(&ratio, r)| SweepPoint {
            ratio,
            min_bar: r.min_bar,
            min_interior: r.min_interior,
            threshold: r.threshold,
        })
        .collect();
    let mut changes = [None, None];
    for (slot, interior) in changes.iter_mut().zip([false, true]) {
        let k = (1..ratios.len()).find(|&k| negative(&reports[k - 1], interior) && !negative(&reports[k], interior));
        if let Some(k) = k {
            *slot = Some(bisect(mesh, ratios[k - 1], ratios[k], interior, execution)?);
        }
    }
    Ok(SweepResult {
        mesh,
        points,
        sign_change_bar: changes[0],
        sign_change_interior: changes[1],
    })
}

/// `n` evenly spaced values in `[lo, hi]`.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coarse_sign_change() {
        let s = sweep_dt_ratio((2, 4), &[0.2, 0.5, 1.0], Execution::default()).unwrap();
        let (lo, hi) = s.sign_change_bar.unwrap();
        assert!(hi - lo <= SWEEP_TOL && lo > 0.2 && hi < 0.5);
        assert!(s.points[0].min_bar < 0.0);
    }

    #[test]
    fn rejects_unsorted() {
        assert!(sweep_dt_ratio((2, 4), &[0.5, 0.2], Execution::Sequential).is_err());
        assert!(sweep_dt_ratio((2, 4), &[], Execution::Sequential).is_err());
    }

    #[test]
    fn linspace_ends() {
        assert_eq!(linspace(0.25, 0.5, 3), vec![0.25, 0.375, 0.5]);
    }
}
