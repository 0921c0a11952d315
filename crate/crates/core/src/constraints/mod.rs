//! Closed-form sufficient mesh constraints for inverse positivity.
//!
//! Every inequality is strict. A check compares a side that must be larger
//! (`big`) with one that must be smaller (`small`) and records the margin
//! `(big - small) / small`, which is infinite when `small <= 0 < big` and
//! exactly 0 at equality. A point passes iff its margin is positive.

mod bounds;
mod samples;
mod variants;

pub use bounds::{bounds_from_samples, sampled_bounds, CellBounds, Region, SAFETY_FACTOR};
pub use samples::{check_1d_samples, check_2d_samples};
pub use variants::{check_1d_theorem_variants, check_2d_theorem_variants, Variant1d, Variant2d};

use serde::Serialize;

/// Margin of `big > small`.
pub fn margin(big: f64, small: f64) -> f64 {
    if big == small {
        0.0
    } else if small > 0.0 {
        (big - small) / small
    } else if big > small {
        f64::INFINITY
    } else if small == 0.0 {
        f64::NEG_INFINITY
    } else {
        (big - small) / small.abs()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointMargin {
    /// Grid index of the point (cell center or edge center).
    pub index: usize,
    /// Which inequality produced the margin.
    pub label: &'static str,
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstraintReport {
    pub id: String,
    pub pass: bool,
    pub checked: usize,
    pub worst: Option<PointMargin>,
    /// Up to 64 failing points.
    pub failing: Vec<PointMargin>,
    pub failing_count: usize,
    /// Best λ of the scanned variants, at the worst point.
    pub lambda: Option<f64>,
    /// Worst margin of each checked point, in grid order.
    #[serde(skip)]
    pub points: Vec<PointMargin>,
}

impl ConstraintReport {
    pub(crate) fn from_points(id: impl Into<String>, points: Vec<PointMargin>) -> Self {
        let mut worst: Option<PointMargin> = None;
        let mut failing = Vec::new();
        let mut failing_count = 0;
        for p in &points {
            if worst.as_ref().is_none_or(|w| p.margin < w.margin) {
                worst = Some(p.clone());
            }
            if !(p.margin > 0.0) {
                failing_count += 1;
                if failing.len() < 64 {
                    failing.push(p.clone());
                }
            }
        }
        ConstraintReport {
            id: id.into(),
            pass: failing_count == 0,
            checked: points.len(),
            worst,
            failing,
            failing_count,
            lambda: None,
            points,
        }
    }

    pub fn worst_margin(&self) -> f64 {
        self.worst.as_ref().map_or(f64::INFINITY, |w| w.margin)
    }
}

/// Keeps the smaller margin per point.
pub(crate) fn worst_of(a: PointMargin, b: PointMargin) -> PointMargin {
    if b.margin < a.margin {
        b
    } else {
        a
    }
}
