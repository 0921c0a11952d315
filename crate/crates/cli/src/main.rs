//! Command-line front end.
//!
//! Exit codes: 0 on success or a passing verdict, 2 when a verification
//! verdict is FAIL, 1 on usage or runtime errors.

// `!(x > 0.0)` is used on purpose so that NaN fails the test.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod problem;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use monotone_q2::analysis::{
    dmp_certify, inverse_min_entries, is_m_matrix_wcdd, lorenz_check, EpsilonChoice, InverseOptions,
};
use monotone_q2::constraints::{
    check_1d_samples, check_1d_theorem_variants, check_2d_samples, check_2d_theorem_variants, ConstraintReport,
    Variant1d, Variant2d,
};
use monotone_q2::experiments::{self, linspace, ExperimentId, ExperimentSpec, Manufactured};
use monotone_q2::factorization::{factor_1d_laplacian, factor_2d_laplacian, verify_factorization};
use monotone_q2::{io, Error, Execution, Grid1D, Grid2D, Result, SparseOperator};
use serde_json::json;

use problem::{parse_mesh_2d, CoefSpec, GridKind, Mesh, Problem};

const THREADS_ENV: &str = "MONOTONE_Q2_THREADS";

#[derive(Parser, Debug)]
#[command(
    name = "monotone-q2",
    version,
    about = "Assemble fourth-order Q2 finite difference operators and certify their monotonicity"
)]
struct Cli {
    /// Run every loop on the calling thread.
    #[arg(long, global = true)]
    sequential: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Assemble an operator and write it in Matrix Market format.
    Assemble {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run inverse-positivity checks on an assembled or stored operator.
    Verify {
        /// Matrix Market file to check instead of assembling.
        #[arg(long = "in", value_name = "FILE", conflicts_with_all = ["dim", "mesh", "coef"])]
        input: Option<PathBuf>,
        #[command(flatten)]
        problem: OptionalProblemArgs,
        /// Factorization check through the splitting conditions.
        #[arg(long)]
        lorenz: bool,
        /// Smallest entries of the inverse (the default check).
        #[arg(long)]
        inverse: bool,
        /// Nonnegative inverse plus nonnegative row sums.
        #[arg(long)]
        dmp: bool,
        /// Fixed ε for the splitting instead of searching.
        #[arg(long)]
        epsilon: Option<f64>,
    },
    /// Evaluate closed-form mesh constraints.
    Constraints {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long, value_enum, default_value = "samples")]
        which: Which,
    },
    /// Build and verify the M-matrix factorization of the Laplacian.
    Factorize {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        dim: u8,
        #[arg(long)]
        mesh: String,
        #[arg(long)]
        scale_boundary: bool,
    },
    /// Reproduce an inverse-positivity table.
    Table {
        #[arg(long, value_enum)]
        id: TableId,
        /// Comma-separated parameters (d or Δt/h²); defaults to the reference columns.
        #[arg(long, value_delimiter = ',')]
        params: Option<Vec<f64>>,
        /// Comma-separated element meshes, e.g. 2x4,4x8.
        #[arg(long, value_delimiter = ',')]
        meshes: Option<Vec<String>>,
        /// Comma-separated seeds for the random family.
        #[arg(long, value_delimiter = ',')]
        seeds: Option<Vec<u64>>,
        /// Skip the splitting-based factorization check.
        #[arg(long)]
        no_lorenz: bool,
        /// CSV output path.
        #[arg(long)]
        out: Option<PathBuf>,
        /// JSON-lines output path with full cell reports.
        #[arg(long)]
        jsonl: Option<PathBuf>,
    },
    /// Sweep Δt/h² for the backward Euler heat step and locate the sign change.
    Sweep {
        #[arg(long, default_value = "16x32")]
        mesh: String,
        /// lo:hi:n evenly spaced ratios.
        #[arg(long, default_value = "0.25:0.5:6")]
        ratios: String,
        /// Whitespace-separated data file for plotting.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Manufactured-solution convergence study.
    Converge {
        #[arg(long, value_enum)]
        case: Case,
        /// Comma-separated element counts per side.
        #[arg(long, value_delimiter = ',', default_values_t = [2usize, 4, 8, 16])]
        meshes: Vec<usize>,
    },
}

#[derive(Args, Debug)]
struct ProblemArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    dim: u8,
    /// Element counts: M in 1D, MxN in 2D.
    #[arg(long)]
    mesh: String,
    /// const:a,c | smooth:d | random:d,seed | file:PATH (JSON with arrays a and c).
    #[arg(long, default_value = "const:1,0")]
    coef: String,
    /// Write boundary rows as u/h² = g/h².
    #[arg(long)]
    scale_boundary: bool,
}

#[derive(Args, Debug)]
struct OptionalProblemArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    dim: Option<u8>,
    #[arg(long)]
    mesh: Option<String>,
    #[arg(long)]
    coef: Option<String>,
    #[arg(long)]
    scale_boundary: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Which {
    /// Sample inequalities at every point with a positive entry.
    Samples,
    /// 1D bounds on a, |a'| and c (best applicable variant).
    #[value(alias = "thm43")]
    Gradient1d,
    /// 1D bound on a'' or concavity (best applicable variant).
    #[value(alias = "thm44")]
    SecondDerivative1d,
    /// 2D ratio of max to min a over two-cell unions.
    #[value(alias = "thm46")]
    TwoCellRatio,
    /// 2D bounds on a, |∇a| and c (best applicable variant).
    #[value(alias = "thm47")]
    Gradient2d,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum TableId {
    Smooth,
    Random,
    Heat,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Case {
    Sine2d,
    Sine1d,
    Quadratic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Outcome {
    Pass,
    Fail,
}

impl Outcome {
    fn from(pass: bool) -> Self {
        if pass {
            Outcome::Pass
        } else {
            Outcome::Fail
        }
    }

    fn and(self, other: Outcome) -> Outcome {
        Outcome::from(self == Outcome::Pass && other == Outcome::Pass)
    }
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

fn config(value: serde_json::Value) {
    println!("config: {value}");
}

fn init_threads() -> Result<()> {
    let Ok(v) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::InvalidArgument(format!("{THREADS_ENV} must be a positive integer, got {v:?}")))?;
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    #[cfg(not(feature = "parallel"))]
    let _ = n;
    Ok(())
}

fn build_problem(dim: u8, mesh: &str, coef: &str, scale: bool) -> Result<(Problem, Mesh)> {
    let mesh = Mesh::parse(mesh, dim)?;
    let coef = CoefSpec::parse(coef)?;
    config(json!({
        "dim": dim,
        "mesh": mesh.label(dim),
        "coef": coef.describe(),
        "scale_boundary": scale,
    }));
    Ok((Problem::build(dim, mesh, coef, scale)?, mesh))
}

fn print_constraint(r: &ConstraintReport) {
    let worst = r.worst.as_ref().map_or("none".to_string(), |w| {
        format!("{:.6e} at index {} ({})", w.margin, w.index, w.label)
    });
    println!(
        "{}: {} checked={} failing={} worst_margin={}",
        r.id,
        verdict(r.pass),
        r.checked,
        r.failing_count,
        worst
    );
    if let Some(l) = r.lambda {
        println!("  lambda={l:.4}");
    }
}

/// Best applicable variant by worst margin.
fn best_variant(reports: Vec<Result<ConstraintReport>>) -> Result<ConstraintReport> {
    let mut best: Option<ConstraintReport> = None;
    let mut last_err = None;
    for r in reports {
        match r {
            Ok(r) => {
                if best.as_ref().is_none_or(|b| r.worst_margin() > b.worst_margin()) {
                    best = Some(r);
                }
            }
            Err(e @ (Error::NotApplicable(_) | Error::MissingBounds(_))) => {
                println!("  skipped: {e}");
                last_err = Some(e);
            }
            Err(e) => return Err(e),
        }
    }
    best.ok_or_else(|| last_err.unwrap_or_else(|| Error::NotApplicable("no variant".into())))
}

fn cmd_assemble(p: &ProblemArgs, out: &PathBuf) -> Result<Outcome> {
    let (prob, _) = build_problem(p.dim, &p.mesh, &p.coef, p.scale_boundary)?;
    io::write_matrix_market(prob.op.matrix(), out)?;
    println!(
        "wrote {} ({} x {}, {} nonzeros)",
        out.display(),
        prob.op.dim(),
        prob.op.dim(),
        prob.op.matrix().nnz()
    );
    Ok(Outcome::Pass)
}

#[allow(clippy::too_many_arguments)]
fn cmd_verify(
    input: &Option<PathBuf>,
    p: &OptionalProblemArgs,
    lorenz: bool,
    inverse: bool,
    dmp: bool,
    epsilon: Option<f64>,
    execution: Execution,
) -> Result<Outcome> {
    let op: SparseOperator = match input {
        Some(path) => {
            config(json!({ "in": path.display().to_string(), "lorenz": lorenz, "inverse": inverse, "dmp": dmp }));
            io::read_matrix_market(path)?
        }
        None => {
            let (Some(dim), Some(mesh)) = (p.dim, p.mesh.as_deref()) else {
                return Err(Error::InvalidArgument(
                    "verify needs --in FILE or --dim and --mesh".into(),
                ));
            };
            build_problem(dim, mesh, p.coef.as_deref().unwrap_or("const:1,0"), p.scale_boundary)?
                .0
                .op
        }
    };
    let inverse = inverse || !(lorenz || dmp);
    let options = InverseOptions {
        execution,
        ..Default::default()
    };
    let mut outcome = Outcome::Pass;

    let m = is_m_matrix_wcdd(op.matrix());
    println!(
        "m-matrix: {} (z-pattern {})",
        if m.pass { "yes" } else { "no" },
        m.z_pattern
    );

    if inverse {
        let r = inverse_min_entries(&op, &options)?;
        println!(
            "inverse: {} min_bar={:.6e} at {:?} min_interior={:.6e} at {:?} threshold={:.3e}",
            verdict(r.nonneg),
            r.min_bar,
            r.min_bar_at,
            r.min_interior,
            r.min_interior_at,
            r.threshold
        );
        outcome = outcome.and(Outcome::from(r.nonneg));
    }
    if dmp {
        let r = dmp_certify(&op, &options)?;
        println!(
            "dmp: {} inverse_nonneg={} row_sums_nonneg={}",
            verdict(r.pass),
            r.inverse.nonneg,
            r.row_sums_nonneg
        );
        outcome = outcome.and(Outcome::from(r.pass));
    }
    if lorenz {
        let choice = epsilon.map_or(EpsilonChoice::Search, EpsilonChoice::Fixed);
        let r = lorenz_check(&op, choice)?;
        println!(
            "lorenz: {} epsilon={:.4} cond1={} cond2={} (worst margin {:.3e}) cond3={}",
            verdict(r.pass),
            r.epsilon,
            r.cond1.pass,
            r.cond2.pass,
            r.cond2.worst_margin,
            r.cond3.pass
        );
        outcome = outcome.and(Outcome::from(r.pass));
    }
    Ok(outcome)
}

fn cmd_constraints(p: &ProblemArgs, which: Which) -> Result<Outcome> {
    let (prob, _) = build_problem(p.dim, &p.mesh, &p.coef, p.scale_boundary)?;
    let bounds = prob.bounds();
    let report = match (&prob.grid, which) {
        (GridKind::OneD(g), Which::Samples) => check_1d_samples(&prob.coeff, g)?,
        (GridKind::TwoD(g), Which::Samples) => check_2d_samples(&prob.coeff, g)?,
        (GridKind::OneD(g), Which::Gradient1d) => best_variant(
            [
                Variant1d::Lambda,
                Variant1d::Combined,
                Variant1d::GradientOnly,
                Variant1d::ConstantA,
            ]
            .into_iter()
            .map(|v| check_1d_theorem_variants(&prob.coeff, g, v, &*bounds))
            .collect(),
        )?,
        (GridKind::OneD(g), Which::SecondDerivative1d) => best_variant(
            [Variant1d::SecondDerivative, Variant1d::Concave]
                .into_iter()
                .map(|v| check_1d_theorem_variants(&prob.coeff, g, v, &*bounds))
                .collect(),
        )?,
        (GridKind::TwoD(g), Which::TwoCellRatio) => {
            check_2d_theorem_variants(&prob.coeff, g, Variant2d::TwoCellRatio, &*bounds)?
        }
        (GridKind::TwoD(g), Which::Gradient2d) => best_variant(
            [
                Variant2d::Lambda,
                Variant2d::Combined,
                Variant2d::GradientOnly,
                Variant2d::ConstantA,
            ]
            .into_iter()
            .map(|v| check_2d_theorem_variants(&prob.coeff, g, v, &*bounds))
            .collect(),
        )?,
        (_, w) => {
            return Err(Error::InvalidArgument(format!(
                "constraint {w:?} is not defined in {}D",
                p.dim
            )))
        }
    };
    print_constraint(&report);
    Ok(Outcome::from(report.pass))
}

fn cmd_factorize(dim: u8, mesh: &str, scale: bool) -> Result<Outcome> {
    let m = Mesh::parse(mesh, dim)?;
    config(json!({ "dim": dim, "mesh": m.label(dim), "scale_boundary": scale }));
    let (target, pair) = if dim == 1 {
        let g = Grid1D::new(2 * m.mx - 1, 0.0, experiments::DOMAIN_WIDTH)?;
        (monotone_q2::assemble_1d_laplacian(&g), factor_1d_laplacian(&g))
    } else {
        let g = Grid2D::from_elements(m.mx, m.my, experiments::DOMAIN_WIDTH)?;
        (monotone_q2::assemble_2d_laplacian(&g), factor_2d_laplacian(&g))
    };
    let (target, pair) = if scale {
        let scaled = target.scale_boundary_rows()?;
        let layout = scaled.layout().ok_or(Error::MissingLayout)?;
        let pair = pair.with_scaled_boundary(&layout.boundary_indices(), layout.h());
        (scaled, pair)
    } else {
        (target, pair)
    };
    let r = verify_factorization(target.matrix(), &pair)?;
    println!(
        "factorization: {} residual={:.3e} full_residual={:.3e} left_m_matrix={} right_m_matrix={}",
        verdict(r.pass),
        r.residual,
        r.full_residual,
        r.left.pass,
        r.right.pass
    );
    Ok(Outcome::from(r.pass))
}

#[allow(clippy::too_many_arguments)]
fn cmd_table(
    id: TableId,
    params: &Option<Vec<f64>>,
    meshes: &Option<Vec<String>>,
    seeds: &Option<Vec<u64>>,
    no_lorenz: bool,
    out: &Option<PathBuf>,
    jsonl: &Option<PathBuf>,
    execution: Execution,
) -> Result<Outcome> {
    let id = match id {
        TableId::Smooth => ExperimentId::Smooth,
        TableId::Random => ExperimentId::Random,
        TableId::Heat => ExperimentId::Heat,
    };
    let mut spec = ExperimentSpec::reference(id);
    if let Some(p) = params {
        spec.params = p.clone();
    }
    if let Some(m) = meshes {
        spec.meshes = m.iter().map(|s| parse_mesh_2d(s)).collect::<Result<_>>()?;
    }
    if let Some(s) = seeds {
        spec.seeds = s.clone();
    }
    spec.lorenz = !no_lorenz;
    spec.execution = execution;
    config(serde_json::to_value(&spec)?);
    let table = experiments::run(&spec)?;
    println!(
        "{:<8} {:>8} {:>6} {:>12} {:>12}  verdicts",
        "mesh", "param", "seed", "min_bar", "min_interior"
    );
    for r in table.rows() {
        println!(
            "{:<8} {:>8} {:>6} {:>12.3e} {:>12.3e}  {}",
            r.mesh, r.param, r.seed, r.min_bar, r.min_interior, r.verdicts
        );
    }
    if let Some(p) = out {
        io::write_csv(&table.rows(), p)?;
        println!("wrote {}", p.display());
    }
    if let Some(p) = jsonl {
        io::write_json_lines(&table.cells, p)?;
        println!("wrote {}", p.display());
    }
    Ok(Outcome::Pass)
}

fn parse_ratios(s: &str) -> Result<Vec<f64>> {
    let bad = || Error::InvalidArgument(format!("bad ratios {s:?}: expected lo:hi:n"));
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi, n] = parts[..] else {
        return Err(bad());
    };
    let lo: f64 = lo.parse().map_err(|_| bad())?;
    let hi: f64 = hi.parse().map_err(|_| bad())?;
    let n: usize = n.parse().map_err(|_| bad())?;
    if n == 0 || !(lo > 0.0) || (n > 1 && !(hi > lo)) {
        return Err(bad());
    }
    Ok(linspace(lo, hi, n))
}

fn cmd_sweep(mesh: &str, ratios: &str, out: &Option<PathBuf>, execution: Execution) -> Result<Outcome> {
    let mesh = parse_mesh_2d(mesh)?;
    let ratios = parse_ratios(ratios)?;
    config(json!({ "mesh": format!("{}x{}", mesh.0, mesh.1), "ratios": ratios }));
    let s = experiments::sweep_dt_ratio(mesh, &ratios, execution)?;
    println!("{:>10} {:>12} {:>12}", "ratio", "min_bar", "min_interior");
    for p in &s.points {
        println!("{:>10.4} {:>12.3e} {:>12.3e}", p.ratio, p.min_bar, p.min_interior);
    }
    let show = |b: Option<(f64, f64)>| b.map_or("not bracketed".to_string(), |(lo, hi)| format!("({lo:.4}, {hi:.4})"));
    println!("sign change (full inverse): {}", show(s.sign_change_bar));
    println!("sign change (interior block): {}", show(s.sign_change_interior));
    if let Some(p) = out {
        io::write_sweep_data(&s, p)?;
        println!("wrote {}", p.display());
    }
    Ok(Outcome::Pass)
}

fn cmd_converge(case: Case, meshes: &[usize]) -> Result<Outcome> {
    let m = match case {
        Case::Sine2d => Manufactured::sine2d(),
        Case::Sine1d => Manufactured::sine1d(),
        Case::Quadratic => Manufactured::quadratic(),
    };
    config(json!({ "case": m.name, "meshes": meshes }));
    let t = experiments::convergence_study(&m, meshes)?;
    println!("{:>8} {:>10} {:>12} {:>8}", "elements", "h", "max_error", "order");
    for r in &t.rows {
        let order = r.order.map_or("-".to_string(), |o| format!("{o:.3}"));
        println!("{:>8} {:>10.5} {:>12.3e} {:>8}", r.elements, r.h, r.max_error, order);
    }
    Ok(Outcome::Pass)
}

fn run(cli: &Cli) -> Result<Outcome> {
    init_threads()?;
    let execution = if cli.sequential {
        Execution::Sequential
    } else {
        Execution::default()
    };
    match &cli.command {
        Command::Assemble { problem, out } => cmd_assemble(problem, out),
        Command::Verify {
            input,
            problem,
            lorenz,
            inverse,
            dmp,
            epsilon,
        } => cmd_verify(input, problem, *lorenz, *inverse, *dmp, *epsilon, execution),
        Command::Constraints { problem, which } => cmd_constraints(problem, *which),
        Command::Factorize {
            dim,
            mesh,
            scale_boundary,
        } => cmd_factorize(*dim, mesh, *scale_boundary),
        Command::Table {
            id,
            params,
            meshes,
            seeds,
            no_lorenz,
            out,
            jsonl,
        } => cmd_table(*id, params, meshes, seeds, *no_lorenz, out, jsonl, execution),
        Command::Sweep { mesh, ratios, out } => cmd_sweep(mesh, ratios, out, execution),
        Command::Converge { case, meshes } => cmd_converge(*case, meshes),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail) => {
            println!("verdict: FAIL");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
