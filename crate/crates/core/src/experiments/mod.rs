//! Inverse-positivity studies on `[0, 1] x [0, 2]` and a manufactured-solution
//! convergence study.
//!
//! Every table cell assembles a boundary-scaled operator, computes the
//! smallest entries of `L̄_h⁻¹` and `L_h⁻¹`, and records the verdicts of the
//! sufficient conditions that apply to its coefficient family.

mod convergence;
mod sweep;

pub use convergence::{convergence_study, ConvergenceRow, ConvergenceTable, Manufactured};
pub use sweep::{linspace, sweep_dt_ratio, SweepPoint, SweepResult, SWEEP_TOL};

use std::f64::consts::PI;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::analysis::{inverse_min_entries, lorenz_check, EpsilonChoice, InverseOptions, InverseReport};
use crate::assembly::{assemble_2d_variable, CoefficientField, SparseOperator};
use crate::constraints::{
    bounds_from_samples, check_2d_samples, check_2d_theorem_variants, CellBounds, ConstraintReport, Region, Variant2d,
};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::grid::{Grid1D, Grid2D};

/// Element meshes used by every table.
pub const TABLE_MESHES: [(usize, usize); 4] = [(2, 4), (4, 8), (8, 16), (16, 32)];

/// Domain extent in x; the y extent follows from the mesh aspect ratio.
pub const DOMAIN_WIDTH: f64 = 1.0;

/// Reaction coefficient of the smooth-coefficient family.
pub const SMOOTH_REACTION: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentId {
    /// `a = 1 + d cos(πx) cos(πy)`, `c = 10`; parameter `d`.
    Smooth,
    /// `a ~ U(d, d + 1)` i.i.d. per grid point, `c = 0`; parameter `d`.
    Random,
    /// `a = 1`, `c = 1 / Δt`; parameter `Δt / h²`.
    Heat,
}

impl ExperimentId {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentId::Smooth => "smooth",
            ExperimentId::Random => "random",
            ExperimentId::Heat => "heat",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentSpec {
    pub id: ExperimentId,
    /// Element meshes `(mx, my)`.
    pub meshes: Vec<(usize, usize)>,
    pub params: Vec<f64>,
    /// Seeds of the random family; ignored by the others.
    pub seeds: Vec<u64>,
    pub scale_boundary: bool,
    /// Also run the splitting-based factorization check.
    pub lorenz: bool,
    #[serde(skip)]
    pub execution: Execution,
}

impl ExperimentSpec {
    pub fn new(id: ExperimentId, params: Vec<f64>) -> Self {
        ExperimentSpec {
            id,
            meshes: TABLE_MESHES.to_vec(),
            params,
            seeds: if id == ExperimentId::Random {
                vec![0]
            } else {
                Vec::new()
            },
            scale_boundary: true,
            lorenz: true,
            execution: Execution::default(),
        }
    }

    /// Parameters and meshes of the reference tables.
    pub fn reference(id: ExperimentId) -> Self {
        let params = match id {
            ExperimentId::Smooth => vec![0.5, 0.9, 0.99],
            ExperimentId::Random => vec![0.1, 1.0, 10.0],
            ExperimentId::Heat => vec![1.5, 0.5, 0.25],
        };
        Self::new(id, params)
    }

    pub fn validate(&self) -> Result<()> {
        if self.meshes.iter().any(|&(mx, my)| mx == 0 || my == 0) {
            return Err(Error::InvalidArgument("element meshes must be nonempty".into()));
        }
        for &p in &self.params {
            let ok = match self.id {
                ExperimentId::Smooth => (0.0..1.0).contains(&p),
                ExperimentId::Random | ExperimentId::Heat => p > 0.0 && p.is_finite(),
            };
            if !ok {
                return Err(Error::InvalidArgument(format!(
                    "parameter {p} out of range for the {} family",
                    self.id.name()
                )));
            }
        }
        if self.id == ExperimentId::Random && self.seeds.is_empty() {
            return Err(Error::InvalidArgument(
                "the random family needs at least one seed".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub check: String,
    pub pass: bool,
    pub worst_margin: f64,
}

impl Verdict {
    fn from_report(check: &str, r: &ConstraintReport) -> Self {
        Verdict {
            check: check.to_string(),
            pass: r.pass,
            worst_margin: r.worst_margin(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableCell {
    pub mesh: (usize, usize),
    pub param: f64,
    pub seed: Option<u64>,
    pub scaled: bool,
    pub inverse: InverseReport,
    pub verdicts: Vec<Verdict>,
    pub seconds: f64,
}

impl TableCell {
    pub fn verdict(&self, check: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.check == check)
    }

    /// True when some sufficient condition passed.
    pub fn certified(&self) -> bool {
        self.verdicts.iter().any(|v| v.pass)
    }
}

/// One CSV record per table cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableRow {
    pub mesh: String,
    pub param: f64,
    pub min_bar: f64,
    pub min_interior: f64,
    pub verdicts: String,
    pub seed: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultTable {
    pub spec: ExperimentSpec,
    /// Cells in spec order: mesh, then parameter, then seed.
    pub cells: Vec<TableCell>,
}

impl ResultTable {
    pub fn rows(&self) -> Vec<TableRow> {
        self.cells
            .iter()
            .map(|c| TableRow {
                mesh: format!("{}x{}", c.mesh.0, c.mesh.1),
                param: c.param,
                min_bar: c.inverse.min_bar,
                min_interior: c.inverse.min_interior,
                verdicts: c
                    .verdicts
                    .iter()
                    .map(|v| format!("{}={}", v.check, if v.pass { "pass" } else { "fail" }))
                    .collect::<Vec<_>>()
                    .join(";"),
                seed: c.seed.map_or_else(String::new, |s| s.to_string()),
                seconds: c.seconds,
            })
            .collect()
    }

    pub fn cell(&self, mesh: (usize, usize), param: f64) -> Option<&TableCell> {
        self.cells.iter().find(|c| c.mesh == mesh && c.param == param)
    }
}

/// Grid for an element mesh on `[0, 1] x [0, my/mx]`.
pub fn table_grid(mesh: (usize, usize)) -> Result<Grid2D> {
    Grid2D::from_elements(mesh.0, mesh.1, DOMAIN_WIDTH)
}

pub fn smooth_coefficient(grid: &Grid2D, d: f64) -> CoefficientField {
    CoefficientField::from_fn_2d(
        grid,
        |x, y| 1.0 + d * (PI * x).cos() * (PI * y).cos(),
        |_, _| SMOOTH_REACTION,
    )
}

/// `len` i.i.d. `U(d, d + 1)` diffusion samples in grid index order, `c = 0`.
pub fn random_field(len: usize, d: f64, seed: u64) -> CoefficientField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = (0..len).map(|_| rng.gen_range(d..d + 1.0)).collect();
    CoefficientField { a, c: vec![0.0; len] }
}

/// I.i.d. `U(d, d + 1)` diffusion samples at every grid point, `c = 0`.
pub fn random_coefficient(grid: &Grid2D, d: f64, seed: u64) -> CoefficientField {
    random_field(grid.len(), d, seed)
}

/// `a = 1`, `c = 1 / Δt` with `Δt = ratio · h²`.
pub fn heat_coefficient(grid: &Grid2D, ratio: f64) -> CoefficientField {
    let h = grid.h();
    CoefficientField::constant(grid.len(), 1.0, 1.0 / (ratio * h * h))
}

/// Range of `cos(πt)` over `[lo, hi]`.
fn cos_range(lo: f64, hi: f64) -> (f64, f64) {
    let (a, b) = ((PI * lo).cos(), (PI * hi).cos());
    let (mut mn, mut mx) = (a.min(b), a.max(b));
    let mut k = lo.ceil();
    while k <= hi {
        let v = if (k as i64) % 2 == 0 { 1.0 } else { -1.0 };
        mn = mn.min(v);
        mx = mx.max(v);
        k += 1.0;
    }
    (mn, mx)
}

/// Largest `sin²(πt)` over `[lo, hi]`.
fn max_sin2(lo: f64, hi: f64) -> f64 {
    let half = (lo - 0.5).ceil() + 0.5;
    if half <= hi {
        1.0
    } else {
        (PI * lo).sin().powi(2).max((PI * hi).sin().powi(2))
    }
}

/// Largest `cos²(πt)` over `[lo, hi]`.
fn max_cos2(lo: f64, hi: f64) -> f64 {
    let (mn, mx) = cos_range(lo, hi);
    (mn * mn).max(mx * mx)
}

/// Exact bounds of `1 + d cos(πx) cos(πy)` and a bound of its gradient
/// over a rectangle.
pub fn smooth_bounds(d: f64) -> impl Fn(&Region) -> CellBounds {
    move |r: &Region| {
        let (x0, x1) = cos_range(r.lo[0], r.hi[0]);
        let (y0, y1) = cos_range(r.lo[1], r.hi[1]);
        let products = [x0 * y0, x0 * y1, x1 * y0, x1 * y1];
        let pmin = products.iter().copied().fold(f64::INFINITY, f64::min);
        let pmax = products.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let (amin, amax) = if d >= 0.0 {
            (1.0 + d * pmin, 1.0 + d * pmax)
        } else {
            (1.0 + d * pmax, 1.0 + d * pmin)
        };
        let g2 = max_sin2(r.lo[0], r.hi[0]) * max_cos2(r.lo[1], r.hi[1])
            + max_cos2(r.lo[0], r.hi[0]) * max_sin2(r.lo[1], r.hi[1]);
        CellBounds {
            min_a: amin,
            max_a: amax,
            max_grad: Some(d.abs() * PI * g2.sqrt()),
            max_second: None,
            concave: false,
        }
    }
}

/// `a = 1 + d cos(πx)`, `c = 10` on a 1D grid.
pub fn smooth_coefficient_1d(grid: &Grid1D, d: f64) -> CoefficientField {
    CoefficientField::from_fn_1d(grid, |x| 1.0 + d * (PI * x).cos(), |_| SMOOTH_REACTION)
}

/// Exact bounds of `1 + d cos(πx)` and its first two derivatives over an
/// interval.
pub fn smooth_bounds_1d(d: f64) -> impl Fn(&Region) -> CellBounds {
    move |r: &Region| {
        let (mn, mx) = cos_range(r.lo[0], r.hi[0]);
        let (amin, amax) = if d >= 0.0 {
            (1.0 + d * mn, 1.0 + d * mx)
        } else {
            (1.0 + d * mx, 1.0 + d * mn)
        };
        // a'' = -d π² cos(πx)
        let second = if d >= 0.0 { -d * PI * PI * mn } else { -d * PI * PI * mx };
        CellBounds {
            min_a: amin,
            max_a: amax,
            max_grad: Some(d.abs() * PI * max_sin2(r.lo[0], r.hi[0]).sqrt()),
            max_second: Some(second),
            concave: second <= 0.0,
        }
    }
}

fn assemble(grid: &Grid2D, coeff: &CoefficientField, scale: bool) -> Result<SparseOperator> {
    let op = assemble_2d_variable(grid, coeff)?;
    if scale {
        op.scale_boundary_rows()
    } else {
        Ok(op)
    }
}

/// Best of the gradient-bound variants that apply.
fn gradient_verdict(
    coeff: &CoefficientField,
    grid: &Grid2D,
    bounds: &dyn Fn(&Region) -> CellBounds,
) -> Result<Verdict> {
    let mut best: Option<Verdict> = None;
    for v in [Variant2d::Lambda, Variant2d::Combined, Variant2d::GradientOnly] {
        let r = match check_2d_theorem_variants(coeff, grid, v, bounds) {
            Ok(r) => r,
            Err(Error::NotApplicable(_)) => continue,
            Err(e) => return Err(e),
        };
        let cand = Verdict::from_report("derivative-bounds", &r);
        if best.as_ref().is_none_or(|b| cand.worst_margin > b.worst_margin) {
            best = Some(cand);
        }
    }
    best.ok_or_else(|| Error::NotApplicable("no gradient variant applies".into()))
}

fn run_cell(
    spec: &ExperimentSpec,
    mesh: (usize, usize),
    param: f64,
    seed: Option<u64>,
    inner: Execution,
) -> Result<TableCell> {
    let start = Instant::now();
    let grid = table_grid(mesh)?;
    let coeff = match spec.id {
        ExperimentId::Smooth => smooth_coefficient(&grid, param),
        ExperimentId::Random => random_coefficient(&grid, param, seed.unwrap_or(0)),
        ExperimentId::Heat => heat_coefficient(&grid, param),
    };
    let op = assemble(&grid, &coeff, spec.scale_boundary)?;
    let inverse = inverse_min_entries(
        &op,
        &InverseOptions {
            execution: inner,
            ..Default::default()
        },
    )?;

    let mut verdicts = vec![Verdict::from_report("samples", &check_2d_samples(&coeff, &grid)?)];
    match spec.id {
        ExperimentId::Smooth => {
            let b = smooth_bounds(param);
            let r = check_2d_theorem_variants(&coeff, &grid, Variant2d::TwoCellRatio, &b)?;
            verdicts.push(Verdict::from_report("two-cell-ratio", &r));
            verdicts.push(gradient_verdict(&coeff, &grid, &b)?);
        }
        ExperimentId::Random => {
            let b = bounds_from_samples(&coeff);
            let r = check_2d_theorem_variants(&coeff, &grid, Variant2d::TwoCellRatio, &b)?;
            verdicts.push(Verdict::from_report("two-cell-ratio", &r));
        }
        ExperimentId::Heat => {
            let b = |_: &Region| CellBounds::constant(1.0);
            let r = check_2d_theorem_variants(&coeff, &grid, Variant2d::TwoCellRatio, &b)?;
            verdicts.push(Verdict::from_report("two-cell-ratio", &r));
            let r = check_2d_theorem_variants(&coeff, &grid, Variant2d::ConstantA, &b)?;
            verdicts.push(Verdict::from_report("derivative-bounds", &r));
        }
    }
    if spec.lorenz {
        let l = lorenz_check(&op, EpsilonChoice::Search)?;
        verdicts.push(Verdict {
            check: "lorenz".into(),
            pass: l.pass,
            worst_margin: l.cond2.worst_margin,
        });
    }
    Ok(TableCell {
        mesh,
        param,
        seed,
        scaled: spec.scale_boundary,
        inverse,
        verdicts,
        seconds: start.elapsed().as_secs_f64(),
    })
}

/// Runs every (mesh, parameter, seed) cell of `spec`. Cells run
/// concurrently under a parallel execution; output is in spec order.
pub fn run(spec: &ExperimentSpec) -> Result<ResultTable> {
    spec.validate()?;
    let seeds: Vec<Option<u64>> = if spec.id == ExperimentId::Random {
        spec.seeds.iter().map(|&s| Some(s)).collect()
    } else {
        vec![None]
    };
    let mut jobs = Vec::new();
    for &mesh in &spec.meshes {
        for &param in &spec.params {
            for &seed in &seeds {
                jobs.push((mesh, param, seed));
            }
        }
    }
    let cells = spec.execution.map(&jobs, |&(mesh, param, seed)| {
        run_cell(spec, mesh, param, seed, spec.execution)
    });
    Ok(ResultTable {
        spec: spec.clone(),
        cells: cells.into_iter().collect::<Result<_>>()?,
    })
}

pub fn run_smooth_coefficient(d: f64, meshes: &[(usize, usize)]) -> Result<ResultTable> {
    let mut spec = ExperimentSpec::new(ExperimentId::Smooth, vec![d]);
    spec.meshes = meshes.to_vec();
    run(&spec)
}

pub fn run_random_coefficient(d: f64, meshes: &[(usize, usize)], seed: u64) -> Result<ResultTable> {
    let mut spec = ExperimentSpec::new(ExperimentId::Random, vec![d]);
    spec.meshes = meshes.to_vec();
    spec.seeds = vec![seed];
    run(&spec)
}

pub fn run_heat_backward_euler(ratios: &[f64], meshes: &[(usize, usize)]) -> Result<ResultTable> {
    let mut spec = ExperimentSpec::new(ExperimentId::Heat, ratios.to_vec());
    spec.meshes = meshes.to_vec();
    run(&spec)
}
