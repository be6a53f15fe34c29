//! Command-line front end.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::export::{tiling_doc, tiling_svg};
use crate::geometry::{DiskPoint, Model};
use crate::group::{BolzaGroup, GroupError, GENERATOR_COUNT};
use crate::partition::{default_triangulation, Partition};
use crate::poly::LineForm;
use crate::spline::{
    conformality_dim_formula, conformality_nullspace_with_tol, SplineBasis, SplineError, SplineSpace, DEFAULT_TOLERANCE,
    CONCURRENCY_TOLERANCE, ORACLE_TOLERANCE, RESIDUAL_BOUND,
};

pub const MAX_TILE_DEPTH: usize = 5;
pub const EXIT_IO: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "hyperspline", version, about = "Periodic splines on the Klein disk for the Bolza group")]
pub struct Cli {
    /// Seed for randomized inputs.
    #[arg(long, global = true, env = "HYPERSPLINE_SEED", default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the tiling by images of the fundamental octagon.
    Tile(TileArgs),
    /// Compare the conformality dimension formula with a nullspace computation.
    Dim(DimArgs),
    /// Build a basis of periodic splines.
    Basis(BasisArgs),
    /// Evaluate a spline basis at points.
    Eval(EvalArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Klein,
    Poincare,
}

impl From<ModelArg> for Model {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Klein => Model::Klein,
            ModelArg::Poincare => Model::Poincare,
        }
    }
}

#[derive(Debug, Args)]
pub struct TileArgs {
    /// Maximum word length.
    #[arg(long, default_value_t = 2)]
    pub depth: usize,
    #[arg(long, value_enum, default_value_t = ModelArg::Klein)]
    pub model: ModelArg,
    /// SVG output path; SVG goes to stdout when neither path is given.
    #[arg(long)]
    pub svg: Option<PathBuf>,
    /// JSON output path.
    #[arg(long)]
    pub json: Option<PathBuf>,
    /// Fill tiles by the first generator of their word.
    #[arg(long)]
    pub color: bool,
}

#[derive(Debug, Args)]
pub struct DimArgs {
    #[arg(long)]
    pub lines: usize,
    #[arg(long, default_value_t = 1)]
    pub degree: usize,
    #[arg(long, default_value_t = 0)]
    pub smooth: usize,
    /// Random concurrent line configurations to test.
    #[arg(long, default_value_t = 1)]
    pub trials: usize,
    /// Relative singular-value cutoff of the nullspace computation.
    #[arg(long, default_value_t = ORACLE_TOLERANCE)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct BasisArgs {
    #[arg(long, default_value_t = 1)]
    pub degree: usize,
    /// Smoothness order; -1 drops all continuity.
    #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
    pub smooth: i64,
    /// Partition JSON; the eight-triangle star is used otherwise.
    #[arg(long)]
    pub partition: Option<PathBuf>,
    /// Uniform refinements applied to the partition.
    #[arg(long, default_value_t = 0)]
    pub refine: usize,
    /// Relative singular-value cutoff.
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    pub tol: f64,
    /// Basis JSON output; written to stdout when absent.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Basis JSON written by `basis`.
    #[arg(long)]
    pub basis: PathBuf,
    /// JSON list of Klein points, as `[x, y]` or `{"x": .., "y": ..}`.
    #[arg(long, conflicts_with = "random")]
    pub points: Option<PathBuf>,
    /// Evaluate at this many seeded random points instead.
    #[arg(long)]
    pub random: Option<usize>,
    /// Also evaluate at g_k(p) and report the largest deviation.
    #[arg(long, value_name = "K")]
    pub check_periodic: Option<u8>,
    /// Largest accepted deviation for `--check-periodic`.
    #[arg(long, default_value_t = RESIDUAL_BOUND)]
    pub tol: f64,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Numerical(String),
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } => EXIT_IO,
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Numerical(_) => EXIT_NUMERICAL,
        }
    }
}

impl From<SplineError> for CliError {
    fn from(e: SplineError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<GroupError> for CliError {
    fn from(e: GroupError) -> Self {
        match e {
            GroupError::NoConvergence { .. } => CliError::Numerical(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

/// Writes through a temporary file in the target directory and renames it
/// into place.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let io_err = |source| CliError::Io { path: path.display().to_string(), source };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(io_err)?;
    tmp.write_all(contents.as_bytes()).map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

/// Runs one command. Text for stdout goes to `out`, notes to `err`.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let stdout_err = |source| CliError::Io { path: "<stdout>".into(), source };
    match cli.command {
        Command::Tile(a) => cmd_tile(a, out),
        Command::Dim(a) => cmd_dim(a, cli.seed, out),
        Command::Basis(a) => cmd_basis(a, out, err),
        Command::Eval(a) => cmd_eval(a, cli.seed, out),
    }
    .and_then(|_| out.flush().map_err(stdout_err))
}

fn cmd_tile(a: TileArgs, out: &mut dyn Write) -> Result<(), CliError> {
    if a.depth > MAX_TILE_DEPTH {
        return Err(CliError::Validation(format!("depth {} exceeds the maximum {MAX_TILE_DEPTH}", a.depth)));
    }
    let group = BolzaGroup::new();
    let doc = tiling_doc(&group, a.depth, a.model.into())?;
    let svg = tiling_svg(&doc, a.color);
    if let Some(p) = &a.json {
        write_atomic(p, &to_json(&doc))?;
    }
    match &a.svg {
        Some(p) => write_atomic(p, &svg)?,
        None if a.json.is_none() => out.write_all(svg.as_bytes()).map_err(|source| CliError::Io { path: "<stdout>".into(), source })?,
        None => {}
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct DimTrial {
    angles: Vec<f64>,
    center: [f64; 2],
    oracle: usize,
}

#[derive(Debug, Serialize)]
struct DimReport {
    lines: usize,
    degree: usize,
    smoothness: usize,
    seed: u64,
    tolerance: f64,
    concurrency_tolerance: f64,
    formula: usize,
    oracle: Vec<DimTrial>,
    agree: bool,
}

/// `count` lines through a random common point with random directions.
pub fn random_concurrent_lines(rng: &mut ChaCha8Rng, count: usize) -> (Vec<f64>, [f64; 2], Vec<LineForm>) {
    let center = [rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5)];
    let angles: Vec<f64> = (0..count).map(|_| rng.gen_range(0.0..std::f64::consts::PI)).collect();
    let lines = angles
        .iter()
        .map(|t| {
            let (a, b) = (t.cos(), t.sin());
            LineForm::new(a, b, -(a * center[0] + b * center[1])).expect("unit normal")
        })
        .collect();
    (angles, center, lines)
}

fn cmd_dim(a: DimArgs, seed: u64, out: &mut dyn Write) -> Result<(), CliError> {
    if a.lines < 2 {
        return Err(CliError::Validation(format!("--lines must be at least 2, got {}", a.lines)));
    }
    if a.trials == 0 {
        return Err(CliError::Validation("--trials must be at least 1".into()));
    }
    if !(a.tol > 0.0 && a.tol < 1.0) {
        return Err(CliError::Validation(format!("--tol must lie in (0, 1), got {}", a.tol)));
    }
    let formula = conformality_dim_formula(a.lines, a.degree, a.smooth)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut oracle = Vec::with_capacity(a.trials);
    for _ in 0..a.trials {
        let (angles, center, lines) = random_concurrent_lines(&mut rng, a.lines);
        let sol = conformality_nullspace_with_tol(&lines, a.degree, a.smooth, a.tol)?;
        oracle.push(DimTrial { angles, center, oracle: sol.dimension() });
    }
    let agree = oracle.iter().all(|t| t.oracle == formula);
    let report = DimReport {
        lines: a.lines,
        degree: a.degree,
        smoothness: a.smooth,
        seed,
        tolerance: a.tol,
        concurrency_tolerance: CONCURRENCY_TOLERANCE,
        formula,
        oracle,
        agree,
    };
    out.write_all(to_json(&report).as_bytes()).map_err(|source| CliError::Io { path: "<stdout>".into(), source })?;
    if !agree {
        return Err(CliError::Numerical(format!("formula gives {formula}, nullspace disagrees")));
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct BasisSummary {
    dimension: usize,
    max_residual: f64,
    residual_bound: f64,
    tolerance: f64,
    rows: usize,
    cols: usize,
    rank: usize,
    corner_spread: f64,
}

fn cmd_basis(a: BasisArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    if !(a.tol > 0.0 && a.tol < 1.0) {
        return Err(CliError::Validation(format!("--tol must lie in (0, 1), got {}", a.tol)));
    }
    let group = BolzaGroup::new();
    let mut partition = match &a.partition {
        Some(p) => Partition::from_json(&read(p)?, &group)
            .map_err(|e| CliError::Validation(format!("{}: {e}", p.display())))?,
        None => default_triangulation(&group),
    };
    for _ in 0..a.refine {
        partition = partition.refine(&group).map_err(|e| CliError::Validation(e.to_string()))?;
    }
    let space = SplineSpace::new(group, partition, a.degree, a.smooth)?;
    for w in space.warnings() {
        let _ = writeln!(err, "warning: {w}");
    }
    let system = space.assemble()?;
    let basis = space.solve_basis(&system, a.tol)?;
    let d = &basis.diagnostics;
    let summary = BasisSummary {
        dimension: basis.dimension(),
        max_residual: d.max_residual,
        residual_bound: d.residual_bound,
        tolerance: a.tol,
        rows: d.rows,
        cols: d.cols,
        rank: d.rank,
        corner_spread: d.corner_spread,
    };
    let summary = to_json(&summary);
    let json = basis.to_json() + "\n";
    match &a.output {
        Some(p) => {
            write_atomic(p, &json)?;
            out.write_all(summary.as_bytes())
        }
        None => {
            let _ = err.write_all(summary.as_bytes());
            out.write_all(json.as_bytes())
        }
    }
    .map_err(|source| CliError::Io { path: "<stdout>".into(), source })?;
    if !basis.residual_ok() {
        return Err(CliError::Numerical(format!(
            "max residual {:e} exceeds {:e}",
            d.max_residual, RESIDUAL_BOUND
        )));
    }
    Ok(())
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum PointInput {
    Pair([f64; 2]),
    Named { x: f64, y: f64 },
}

#[derive(Debug, Serialize)]
struct PeriodicCheck {
    generator: u8,
    max_deviation: f64,
    tolerance: f64,
}

#[derive(Debug, Serialize)]
struct EvalReport {
    dimension: usize,
    points: Vec<[f64; 2]>,
    /// `values[i][s]` is spline `s` at point `i`.
    values: Vec<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    check_periodic: Option<PeriodicCheck>,
}

fn cmd_eval(a: EvalArgs, seed: u64, out: &mut dyn Write) -> Result<(), CliError> {
    let group = BolzaGroup::new();
    if let Some(k) = a.check_periodic {
        if k >= GENERATOR_COUNT {
            return Err(CliError::Validation(format!("generator index {k} out of range 0..{GENERATOR_COUNT}")));
        }
    }
    let basis = SplineBasis::from_json(&read(&a.basis)?, group.clone())
        .map_err(|e| CliError::Validation(format!("{}: {e}", a.basis.display())))?;
    let points: Vec<[f64; 2]> = match (&a.points, a.random) {
        (Some(p), _) => {
            let raw: Vec<PointInput> = serde_json::from_str(&read(p)?)
                .map_err(|e| CliError::Validation(format!("{}: {e}", p.display())))?;
            raw.into_iter()
                .map(|q| match q {
                    PointInput::Pair(xy) => xy,
                    PointInput::Named { x, y } => [x, y],
                })
                .collect()
        }
        (None, Some(n)) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..n)
                .map(|_| {
                    let r = 0.95 * rng.gen::<f64>().sqrt();
                    let t = rng.gen_range(0.0..std::f64::consts::TAU);
                    [r * t.cos(), r * t.sin()]
                })
                .collect()
        }
        (None, None) => return Err(CliError::Validation("either --points or --random is required".into())),
    };
    for p in &points {
        let d = DiskPoint::klein(p[0], p[1]);
        if !(p[0].is_finite() && p[1].is_finite()) || !d.is_interior() {
            return Err(CliError::Validation(format!("point ({}, {}) is not inside the open unit disk", p[0], p[1])));
        }
    }
    let mut values = Vec::with_capacity(points.len());
    let mut deviation: f64 = 0.0;
    for p in &points {
        let d = DiskPoint::klein(p[0], p[1]);
        let v = basis.eval(&d)?;
        if let Some(k) = a.check_periodic {
            let gp = group.float_generator(k)?.apply(&d).map_err(|e| CliError::Numerical(e.to_string()))?;
            let w = basis.eval(&gp)?;
            deviation = v.iter().zip(&w).map(|(x, y)| (x - y).abs()).fold(deviation, f64::max);
        }
        values.push(v);
    }
    let check = a.check_periodic.map(|generator| PeriodicCheck { generator, max_deviation: deviation, tolerance: a.tol });
    let report = EvalReport { dimension: basis.dimension(), points, values, check_periodic: check };
    let json = to_json(&report);
    match &a.output {
        Some(p) => write_atomic(p, &json)?,
        None => out.write_all(json.as_bytes()).map_err(|source| CliError::Io { path: "<stdout>".into(), source })?,
    }
    if a.check_periodic.is_some() && (deviation.is_nan() || deviation >= a.tol) {
        return Err(CliError::Numerical(format!("periodicity deviation {deviation:e} exceeds {:e}", a.tol)));
    }
    Ok(())
}
