//! Mesh constraints stated through bounds of `a` and its derivatives over a
//! cell (1D) or a union of two cells around an edge center (2D).

use serde::Serialize;

use crate::assembly::CoefficientField;
use crate::error::{Error, Result};
use crate::grid::{Grid1D, Grid2D, PointClass};

use super::{margin, CellBounds, ConstraintReport, PointMargin, Region};

const LAMBDA_POINTS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Variant1d {
    /// Some `λ ∈ (3/13, 1)` bounds both `h²c` and `h max|a'| / min a`.
    Lambda,
    /// Joint bound on `2h max|a'|` and `h²c`.
    Combined,
    /// `c ≡ 0`: `h max|a'| / min a < (√39 - 3) / 6`.
    GradientOnly,
    /// `a` constant: `h²c < 5a`.
    ConstantA,
    /// `h² (3c/2 + max a'') < 74/45 · min of the three samples`.
    SecondDerivative,
    /// `a` concave: `h²c < 3 · min of the three samples`.
    Concave,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Variant2d {
    /// `min a² > 49/61 max a² + 8/61 (3 max a - 2 min a) h²c`.
    TwoCellRatio,
    /// Some `λ ∈ (49/61, 1)` bounds both `h²c` and `h max|∇a| / min a`.
    Lambda,
    /// Joint bound on `h max|∇a|` and `h²c`.
    Combined,
    /// `c ≡ 0`: `h max|∇a| / min a < (√122 - 7√2) / 28`.
    GradientOnly,
    /// `a` constant: `h²c < 3a/2`.
    ConstantA,
}

impl Variant1d {
    pub fn id(self) -> &'static str {
        match self {
            Variant1d::Lambda => "1d-gradient-lambda",
            Variant1d::Combined => "1d-gradient-combined",
            Variant1d::GradientOnly => "1d-gradient-only",
            Variant1d::ConstantA => "1d-constant",
            Variant1d::SecondDerivative => "1d-second-derivative",
            Variant1d::Concave => "1d-concave",
        }
    }
}

impl Variant2d {
    pub fn id(self) -> &'static str {
        match self {
            Variant2d::TwoCellRatio => "2d-two-cell-ratio",
            Variant2d::Lambda => "2d-gradient-lambda",
            Variant2d::Combined => "2d-gradient-combined",
            Variant2d::GradientOnly => "2d-gradient-only",
            Variant2d::ConstantA => "2d-constant",
        }
    }
}

/// `LAMBDA_POINTS` interior points of `(lo, 1)`.
fn lambda_grid(lo: f64) -> impl Iterator<Item = f64> {
    (1..=LAMBDA_POINTS).map(move |k| lo + (1.0 - lo) * k as f64 / (LAMBDA_POINTS + 1) as f64)
}

/// Best margin over λ of `min(margin_c(λ), margin_grad(λ))`.
fn scan_lambda(lo: f64, f: impl Fn(f64) -> (f64, f64)) -> (f64, f64) {
    let mut best = (f64::NEG_INFINITY, lo);
    for lam in lambda_grid(lo) {
        let (m1, m2) = f(lam);
        let m = m1.min(m2);
        if m > best.0 {
            best = (m, lam);
        }
    }
    best
}

fn need(v: Option<f64>, what: &'static str) -> Result<f64> {
    v.ok_or(Error::MissingBounds(what))
}

fn require_constant(b: &CellBounds, index: usize) -> Result<f64> {
    if b.min_a != b.max_a {
        return Err(Error::NotApplicable(format!(
            "a is not constant near grid index {index} ({} .. {})",
            b.min_a, b.max_a
        )));
    }
    Ok(b.min_a)
}

fn require_no_reaction(c: f64, index: usize) -> Result<()> {
    if c != 0.0 {
        return Err(Error::NotApplicable(format!(
            "gradient-only variant needs c = 0, got {c} at grid index {index}"
        )));
    }
    Ok(())
}

fn finish(id: &str, points: Vec<(PointMargin, Option<f64>)>) -> ConstraintReport {
    let lambdas: Vec<Option<f64>> = points.iter().map(|p| p.1).collect();
    let worst_pos = points
        .iter()
        .enumerate()
        .min_by(|a, b| a.1 .0.margin.total_cmp(&b.1 .0.margin))
        .map(|(k, _)| k);
    let mut report = ConstraintReport::from_points(id, points.into_iter().map(|p| p.0).collect());
    report.lambda = worst_pos.and_then(|k| lambdas[k]);
    report
}

/// Evaluates one variant at every cell `[x_{i-1}, x_{i+1}]` of a 1D grid.
/// `bounds` must return valid bounds of `a` over each region.
pub fn check_1d_theorem_variants(
    coeff: &CoefficientField,
    grid: &Grid1D,
    variant: Variant1d,
    bounds: &dyn Fn(&Region) -> CellBounds,
) -> Result<ConstraintReport> {
    coeff.check_len(grid.len())?;
    let h = grid.h();
    let h2 = h * h;
    let mut points = Vec::new();
    for i in (1..=grid.n()).step_by(2) {
        let region = Region {
            lo: [grid.x(i - 1), 0.0],
            hi: [grid.x(i + 1), 0.0],
            center: i,
            samples: vec![i - 1, i, i + 1],
        };
        let b = bounds(&region);
        let c = coeff.c[i];
        let (mn, mx) = (b.min_a, b.max_a);
        let sample_min = coeff.a[i - 1].min(coeff.a[i]).min(coeff.a[i + 1]);
        let mut lambda = None;
        let m = match variant {
            Variant1d::Lambda => {
                let g = need(b.max_grad, "max |a'|")?;
                let (m, lam) = scan_lambda(3.0 / 13.0, |lam| {
                    (
                        margin(13.0 * (1.0 - lam) * mn * mn / (6.0 * mx - 4.0 * mn), h2 * c),
                        margin(((39.0 * lam).sqrt() - 3.0) / 6.0, h * g / mn),
                    )
                });
                lambda = Some(lam);
                m
            }
            Variant1d::Combined => {
                let g = need(b.max_grad, "max |a'|")?;
                margin(
                    5.0 / 3.0 * mn * mn / mx,
                    2.0 * h * g + h2 * c * (1.0 - 2.0 / 3.0 * mn / mx),
                )
            }
            Variant1d::GradientOnly => {
                require_no_reaction(c, i)?;
                let g = need(b.max_grad, "max |a'|")?;
                margin((39f64.sqrt() - 3.0) / 6.0, h * g / mn)
            }
            Variant1d::ConstantA => {
                let a = require_constant(&b, i)?;
                margin(5.0 * a, h2 * c)
            }
            Variant1d::SecondDerivative => {
                let s = need(b.max_second, "max a''")?;
                margin(74.0 / 45.0 * sample_min, h2 * (1.5 * c + s))
            }
            Variant1d::Concave => {
                if !b.concave {
                    return Err(Error::NotApplicable(format!(
                        "a is not declared concave near grid index {i}"
                    )));
                }
                margin(3.0 * sample_min, h2 * c)
            }
        };
        points.push((
            PointMargin {
                index: i,
                label: "cell",
                margin: m,
            },
            lambda,
        ));
    }
    Ok(finish(variant.id(), points))
}

/// Evaluates one variant at every edge center of a 2D grid, over the union
/// of the two cells sharing that edge.
pub fn check_2d_theorem_variants(
    coeff: &CoefficientField,
    grid: &Grid2D,
    variant: Variant2d,
    bounds: &dyn Fn(&Region) -> CellBounds,
) -> Result<ConstraintReport> {
    coeff.check_len(grid.len())?;
    let h = grid.h();
    let h2 = h * h;
    let mut points = Vec::new();
    for j in 1..=grid.ny() {
        for i in 1..=grid.nx() {
            let (di, dj, label) = match grid.class_of(i, j) {
                // edge parallel to the x-axis: cells above and below
                PointClass::EdgeCenterY => (1, 2, "edge-center-y"),
                PointClass::EdgeCenterX => (2, 1, "edge-center-x"),
                _ => continue,
            };
            let k = grid.index(i, j);
            let mut samples = Vec::with_capacity((2 * di + 1) * (2 * dj + 1));
            for q in j - dj..=j + dj {
                for p in i - di..=i + di {
                    samples.push(grid.index(p, q));
                }
            }
            let region = Region {
                lo: [grid.x(i - di), grid.y(j - dj)],
                hi: [grid.x(i + di), grid.y(j + dj)],
                center: k,
                samples,
            };
            let b = bounds(&region);
            let c = coeff.c[k];
            let (mn, mx) = (b.min_a, b.max_a);
            let mut lambda = None;
            let m = match variant {
                Variant2d::TwoCellRatio => {
                    margin(61.0 * mn * mn, 49.0 * mx * mx + 8.0 * (3.0 * mx - 2.0 * mn) * h2 * c)
                }
                Variant2d::Lambda => {
                    let g = need(b.max_grad, "max |∇a|")?;
                    let (m, lam) = scan_lambda(49.0 / 61.0, |lam| {
                        (
                            margin(61.0 * (1.0 - lam) * mn * mn / (8.0 * (3.0 * mx - 2.0 * mn)), h2 * c),
                            margin(((122.0 * lam).sqrt() - 7.0 * 2f64.sqrt()) / 28.0, h * g / mn),
                        )
                    });
                    lambda = Some(lam);
                    m
                }
                Variant2d::Combined => {
                    let g = need(b.max_grad, "max |∇a|")?;
                    margin(
                        mn * mn / mx,
                        49.0 * 2f64.sqrt() / 3.0 * h * g + 2.0 * h2 * c * (1.0 - 2.0 / 3.0 * mn / mx),
                    )
                }
                Variant2d::GradientOnly => {
                    require_no_reaction(c, k)?;
                    let g = need(b.max_grad, "max |∇a|")?;
                    margin((122f64.sqrt() - 7.0 * 2f64.sqrt()) / 28.0, h * g / mn)
                }
                Variant2d::ConstantA => {
                    let a = require_constant(&b, k)?;
                    margin(1.5 * a, h2 * c)
                }
            };
            points.push((
                PointMargin {
                    index: k,
                    label,
                    margin: m,
                },
                lambda,
            ));
        }
    }
    Ok(finish(variant.id(), points))
}
