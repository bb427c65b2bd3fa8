//! `spiralsheet` command-line front end.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::conformal::{strip_membership, StripPoint, StripRegion};
use crate::error::{Result as SheetResult, SheetError};
use crate::family::{family_strip_velocity, family_velocity, slab_index, solve_family_matching};
use crate::geometry::{relative_sheet_distance, winding_number, PolarPoint, SpiralFamily, SpiralParams};
use crate::single_spiral::{
    matching_residual, profile_velocity, resonance_constant, solve_matching, strip_velocity,
};
use crate::verify::{family_suite, reports_to_json, single_spiral_suite, SuiteConfig};

/// Relative distance to `Σ(t)` below which a tracer is halted.
pub const ADVECT_EXCLUSION: f64 = 1e-6;

#[derive(Debug, Parser)]
#[command(name = "spiralsheet", version, about = "Logarithmic spiral vortex sheets")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the matching conditions for (mu, g) or a family (mu, g_0..g_{M-1}).
    Solve(SolveArgs),
    /// Evaluate the velocity at one point.
    Eval(EvalArgs),
    /// Sample the velocity on a rectangular grid.
    Grid(GridArgs),
    /// Run the residual suite and write a JSON report.
    Verify(VerifyArgs),
    /// Advect tracers in the self-similar flow with classical RK4.
    Advect(AdvectArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Frame {
    Spiral,
    Strip,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

fn positive(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(format!("must be a positive finite number, got {s}"))
    }
}

fn finite(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("must be finite, got {s}"))
    }
}

/// Spiral parameters; missing `mu`/`g` are taken from the matching solve.
#[derive(Debug, Clone, Args)]
pub struct FieldArgs {
    /// Spiral tightness a > 0.
    #[arg(long, value_parser = positive)]
    pub a: f64,
    #[arg(long, allow_hyphen_values = true, value_parser = finite)]
    pub mu: Option<f64>,
    /// Strength of a single spiral.
    #[arg(long, allow_hyphen_values = true, value_parser = finite)]
    pub g: Option<f64>,
    /// Base angles of a family, starting at 0.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, value_parser = finite)]
    pub thetas: Option<Vec<f64>>,
    /// Strengths of a family, one per angle.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, value_parser = finite)]
    pub gs: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    #[arg(long, value_parser = positive)]
    pub a: f64,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, value_parser = finite)]
    pub thetas: Option<Vec<f64>>,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub field: FieldArgs,
    /// Point `x,y` (Cartesian in the spiral frame, strip coordinates otherwise).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, num_args = 1, value_parser = finite)]
    pub point: Vec<f64>,
    #[arg(long, value_enum, default_value = "spiral")]
    pub frame: Frame,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    #[command(flatten)]
    pub field: FieldArgs,
    #[arg(long, value_enum, default_value = "spiral")]
    pub frame: Frame,
    /// `xmin,xmax,ymin,ymax`
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, value_parser = finite)]
    pub bounds: Vec<f64>,
    /// `NX,NY`, each at least 2.
    #[arg(long, value_delimiter = ',')]
    pub res: Vec<usize>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub field: FieldArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Random sample points for the potential and frame checks.
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
    /// Probe angles per spiral.
    #[arg(long, default_value_t = 50)]
    pub probes: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct AdvectArgs {
    #[command(flatten)]
    pub field: FieldArgs,
    /// Initial positions `x1,y1;x2,y2;…`.
    #[arg(long, allow_hyphen_values = true)]
    pub points: String,
    #[arg(long, value_parser = positive)]
    pub t0: f64,
    #[arg(long, value_parser = positive)]
    pub t1: f64,
    #[arg(long, value_parser = positive)]
    pub dt: f64,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

/// Errors reported by a command, with the process exit code they map to.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Sheet(SheetError),
    Io(std::io::Error),
    Csv(csv::Error),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Sheet(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "I/O error: {e}"),
            CliError::Csv(e) => write!(f, "CSV error: {e}"),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

impl From<SheetError> for CliError {
    fn from(e: SheetError) -> Self {
        CliError::Sheet(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Csv(e)
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// The field selected by the parameter flags.
#[derive(Debug, Clone)]
pub enum FieldSpec {
    Single(SpiralParams),
    Family(SpiralFamily),
}

impl FieldSpec {
    pub fn from_args(f: &FieldArgs) -> CliResult<Self> {
        match (&f.thetas, &f.gs) {
            (None, None) => {
                let (mu, g) = match (f.mu, f.g) {
                    (Some(mu), Some(g)) => (mu, g),
                    (mu, g) => {
                        let s = solve_matching(f.a)?;
                        (mu.unwrap_or(s.mu), g.unwrap_or(s.g))
                    }
                };
                Ok(FieldSpec::Single(SpiralParams::new(f.a, mu, g)?))
            }
            (Some(thetas), gs) => {
                if f.g.is_some() {
                    return Err(CliError::Usage("use --gs, not --g, with --thetas".into()));
                }
                let (mu, gs) = match (f.mu, gs) {
                    (Some(mu), Some(gs)) => (mu, gs.clone()),
                    (mu, gs) => {
                        let s = solve_family_matching(f.a, thetas)?;
                        (mu.unwrap_or(s.mu), gs.clone().unwrap_or(s.gs))
                    }
                };
                Ok(FieldSpec::Family(SpiralFamily::new(f.a, mu, thetas.clone(), gs)?))
            }
            (None, Some(_)) => Err(CliError::Usage("--gs requires --thetas".into())),
        }
    }

    pub fn a(&self) -> f64 {
        match self {
            FieldSpec::Single(p) => p.a,
            FieldSpec::Family(f) => f.a,
        }
    }

    pub fn mu(&self) -> f64 {
        match self {
            FieldSpec::Single(p) => p.mu,
            FieldSpec::Family(f) => f.mu,
        }
    }

    fn family(&self) -> SpiralFamily {
        match self {
            FieldSpec::Single(p) => SpiralFamily::single(p),
            FieldSpec::Family(f) => f.clone(),
        }
    }

    /// Spiral-frame velocity and the winding number with respect to spiral 0.
    pub fn spiral_sample(&self, z: Complex64) -> SheetResult<(Complex64, i64)> {
        if z == Complex64::new(0.0, 0.0) {
            return Err(SheetError::Origin);
        }
        let p = PolarPoint::from_complex(z);
        let w = match self {
            FieldSpec::Single(s) => profile_velocity(p, s)?,
            FieldSpec::Family(f) => family_velocity(p, f)?,
        };
        Ok((w, winding_number(p.r, p.theta, self.a())?))
    }

    /// Strip-frame velocity and the slab index. A single spiral uses the
    /// closed form off resonance and the slab coefficients at resonance.
    pub fn strip_sample(&self, z: StripPoint) -> SheetResult<(Complex64, i64)> {
        let fam = self.family();
        let region = strip_membership(z.to_complex(), fam.a, fam.thetas());
        match region {
            StripRegion::Outside => return Err(SheetError::OutsideStrip),
            StripRegion::OnLine(m) => return Err(SheetError::OnCutLine { line: m }),
            StripRegion::LeftBoundary => {
                return Err(SheetError::OnCutLine { line: fam.len() })
            }
            StripRegion::RightBoundary => return Err(SheetError::OnCutLine { line: 0 }),
            StripRegion::Interior => {}
        }
        let slab = slab_index(z, &fam)? as i64;
        let w = match self {
            FieldSpec::Single(p) if resonance_constant(p.a).is_ok() => {
                strip_velocity(z, p.a, p.mu)?
            }
            _ => family_strip_velocity(z, &fam)?,
        };
        Ok((w, slab))
    }

    /// Time-dependent velocity `t^μ w(z/t^μ)`.
    pub fn velocity_at(&self, z: Complex64, t: f64) -> SheetResult<Complex64> {
        let scale = t.powf(self.mu());
        Ok(scale * self.spiral_sample(z / scale)?.0)
    }

    /// Smallest relative distance from `z/t^μ` to any spiral.
    pub fn sheet_distance(&self, z: Complex64, t: f64) -> SheetResult<f64> {
        let p = PolarPoint::from_complex(z / t.powf(self.mu()));
        let fam = self.family();
        let mut best = f64::INFINITY;
        for &th in fam.thetas() {
            best = best.min(relative_sheet_distance(p.r, p.theta, fam.a, th)?);
        }
        Ok(best)
    }
}

/// Formats a float with 17 significant digits.
pub fn fmt_num(v: f64) -> String {
    format!("{v:.16e}")
}

/// One grid row; numeric fields are empty when `flag` is not `ok`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridRow {
    pub x: f64,
    pub y: f64,
    pub u: Option<f64>,
    pub v: Option<f64>,
    pub speed: Option<f64>,
    #[serde(rename = "J")]
    pub j: Option<i64>,
    pub flag: &'static str,
}

fn flag_for(e: &SheetError) -> Option<&'static str> {
    match e {
        SheetError::OnSpiral { .. } | SheetError::OnCutLine { .. } => Some("on_sheet"),
        SheetError::Origin => Some("origin"),
        SheetError::OutsideStrip => Some("outside"),
        _ => None,
    }
}

/// Samples the grid row-major from the minimum corner (`x` fastest).
pub fn grid_rows(
    spec: &FieldSpec,
    frame: Frame,
    bounds: [f64; 4],
    res: [usize; 2],
) -> CliResult<Vec<GridRow>> {
    let [x0, x1, y0, y1] = bounds;
    let [nx, ny] = res;
    let coord = |lo: f64, hi: f64, n: usize, i: usize| lo + (hi - lo) * i as f64 / (n - 1) as f64;
    (0..nx * ny)
        .into_par_iter()
        .map(|idx| {
            let (i, j) = (idx % nx, idx / nx);
            let (x, y) = (coord(x0, x1, nx, i), coord(y0, y1, ny, j));
            let sample = match frame {
                Frame::Spiral => spec.spiral_sample(Complex64::new(x, y)),
                Frame::Strip => spec.strip_sample(StripPoint::new(x, y)),
            };
            match sample {
                Ok((w, jw)) => Ok(GridRow {
                    x,
                    y,
                    u: Some(w.re),
                    v: Some(w.im),
                    speed: Some(w.norm()),
                    j: Some(jw),
                    flag: "ok",
                }),
                Err(e) => match flag_for(&e) {
                    Some(flag) => Ok(GridRow {
                        x,
                        y,
                        u: None,
                        v: None,
                        speed: None,
                        j: None,
                        flag,
                    }),
                    None => Err(CliError::Sheet(e)),
                },
            }
        })
        .collect()
}

fn opt_num(v: Option<f64>) -> String {
    v.map(fmt_num).unwrap_or_default()
}

fn grid_bytes(rows: &[GridRow], format: Format) -> CliResult<Vec<u8>> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["x", "y", "u", "v", "speed", "J", "flag"])?;
            for r in rows {
                w.write_record([
                    fmt_num(r.x),
                    fmt_num(r.y),
                    opt_num(r.u),
                    opt_num(r.v),
                    opt_num(r.speed),
                    r.j.map(|j| j.to_string()).unwrap_or_default(),
                    r.flag.to_string(),
                ])?;
            }
            w.into_inner().map_err(|e| CliError::Io(e.into_error()))
        }
        Format::Json => Ok(serde_json::to_vec_pretty(rows).expect("grid rows serialize")),
    }
}

/// Writes `bytes` to `path`, removing the file if the write fails midway.
fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let result = fs::File::create(path).and_then(|mut f| {
        f.write_all(bytes)?;
        f.sync_all()
    });
    if let Err(e) = result {
        let _ = fs::remove_file(path);
        return Err(CliError::Io(e));
    }
    Ok(())
}

fn cmd_solve(args: &SolveArgs, out: &mut dyn Write) -> CliResult<i32> {
    #[derive(Serialize)]
    struct Solution {
        a: f64,
        mu: f64,
        gs: Vec<f64>,
        residual_norm: f64,
    }
    let sol = match &args.thetas {
        None => {
            let s = solve_matching(args.a)?;
            Solution {
                a: args.a,
                mu: s.mu,
                gs: vec![s.g],
                residual_norm: matching_residual(args.a, s.mu, s.g).norm(),
            }
        }
        Some(thetas) => {
            let s = solve_family_matching(args.a, thetas)?;
            Solution {
                a: args.a,
                mu: s.mu,
                gs: s.gs,
                residual_norm: s.residual_norm,
            }
        }
    };
    let text = match args.format {
        Some(Format::Json) => serde_json::to_string_pretty(&sol).expect("solution serializes") + "\n",
        Some(Format::Csv) => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["a", "mu", "index", "g", "residual_norm"])?;
            for (i, g) in sol.gs.iter().enumerate() {
                w.write_record([
                    fmt_num(sol.a),
                    fmt_num(sol.mu),
                    i.to_string(),
                    fmt_num(*g),
                    fmt_num(sol.residual_norm),
                ])?;
            }
            String::from_utf8(w.into_inner().map_err(|e| CliError::Io(e.into_error()))?)
                .expect("csv output is utf-8")
        }
        None => {
            let mut s = format!("a = {}\nmu = {}\n", fmt_num(sol.a), fmt_num(sol.mu));
            for (i, g) in sol.gs.iter().enumerate() {
                s += &format!("g[{i}] = {}\n", fmt_num(*g));
            }
            s + &format!("residual_norm = {}\n", fmt_num(sol.residual_norm))
        }
    };
    match &args.out {
        Some(path) => write_atomic(path, text.as_bytes())?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(if sol.residual_norm < args.tol { 0 } else { 1 })
}

fn cmd_eval(args: &EvalArgs, out: &mut dyn Write) -> CliResult<i32> {
    if args.point.len() != 2 {
        return Err(CliError::Usage("--point expects x,y".into()));
    }
    let spec = FieldSpec::from_args(&args.field)?;
    let (x, y) = (args.point[0], args.point[1]);
    let (w, j) = match args.frame {
        Frame::Spiral => spec.spiral_sample(Complex64::new(x, y))?,
        Frame::Strip => spec.strip_sample(StripPoint::new(x, y))?,
    };
    let row = GridRow {
        x,
        y,
        u: Some(w.re),
        v: Some(w.im),
        speed: Some(w.norm()),
        j: Some(j),
        flag: "ok",
    };
    out.write_all(&grid_bytes(&[row], args.format)?)?;
    Ok(0)
}

fn cmd_grid(args: &GridArgs) -> CliResult<i32> {
    let bounds: [f64; 4] = args
        .bounds
        .clone()
        .try_into()
        .map_err(|_| CliError::Usage("--bounds expects xmin,xmax,ymin,ymax".into()))?;
    let res: [usize; 2] = args
        .res
        .clone()
        .try_into()
        .map_err(|_| CliError::Usage("--res expects NX,NY".into()))?;
    if res[0] < 2 || res[1] < 2 {
        return Err(CliError::Usage("grid resolution must be at least 2 per axis".into()));
    }
    if !(bounds[0] < bounds[1] && bounds[2] < bounds[3]) {
        return Err(CliError::Usage("bounds must satisfy xmin < xmax and ymin < ymax".into()));
    }
    let spec = FieldSpec::from_args(&args.field)?;
    let rows = grid_rows(&spec, args.frame, bounds, res)?;
    write_atomic(&args.out, &grid_bytes(&rows, args.format)?)?;
    Ok(0)
}

fn cmd_verify(args: &VerifyArgs, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<i32> {
    let spec = FieldSpec::from_args(&args.field)?;
    let cfg = SuiteConfig {
        seed: args.seed,
        samples: args.samples.max(1),
        probe_angles: args.probes.max(1),
    };
    let reports = match &spec {
        FieldSpec::Single(p) => single_spiral_suite(p, &cfg)?,
        FieldSpec::Family(f) => family_suite(f, &cfg)?,
    };
    let json = reports_to_json(&reports) + "\n";
    match &args.out {
        Some(path) => write_atomic(path, json.as_bytes())?,
        None => out.write_all(json.as_bytes())?,
    }
    let failing: Vec<&str> = reports
        .iter()
        .filter(|r| !r.pass)
        .map(|r| r.name.as_str())
        .collect();
    if failing.is_empty() {
        Ok(0)
    } else {
        writeln!(err, "failing reports: {}", failing.join(", "))?;
        Ok(1)
    }
}

/// Parses `x1,y1;x2,y2;…`.
pub fn parse_points(s: &str) -> CliResult<Vec<Complex64>> {
    s.split(';')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            let v: Vec<f64> = p
                .split(',')
                .map(|c| c.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| CliError::Usage(format!("bad point '{p}': {e}")))?;
            match v.as_slice() {
                [x, y] if x.is_finite() && y.is_finite() => Ok(Complex64::new(*x, *y)),
                _ => Err(CliError::Usage(format!("bad point '{p}': expected x,y"))),
            }
        })
        .collect()
}

/// One trajectory sample; `status` is `ok`, `halted` (entered the exclusion
/// zone of the sheet) or `failed` (the velocity could not be evaluated).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryRow {
    pub t: f64,
    pub particle: usize,
    pub x: f64,
    pub y: f64,
    pub status: &'static str,
}

fn rk4_step(spec: &FieldSpec, z: Complex64, t: f64, h: f64) -> SheetResult<Complex64> {
    let k1 = spec.velocity_at(z, t)?;
    let k2 = spec.velocity_at(z + 0.5 * h * k1, t + 0.5 * h)?;
    let k3 = spec.velocity_at(z + 0.5 * h * k2, t + 0.5 * h)?;
    let k4 = spec.velocity_at(z + h * k3, t + h)?;
    Ok(z + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4))
}

/// Integrates `ż = t^μ w(z/t^μ)` from `t0` to `t1` with steps of at most `dt`.
pub fn advect_particle(
    spec: &FieldSpec,
    id: usize,
    z0: Complex64,
    t0: f64,
    t1: f64,
    dt: f64,
) -> Vec<TrajectoryRow> {
    let steps = ((t1 - t0) / dt).ceil().max(1.0) as usize;
    let h = (t1 - t0) / steps as f64;
    let mut rows = Vec::with_capacity(steps + 1);
    let mut z = z0;
    let row = |t: f64, z: Complex64, status| TrajectoryRow {
        t,
        particle: id,
        x: z.re,
        y: z.im,
        status,
    };
    for n in 0..=steps {
        let t = t0 + h * n as f64;
        match spec.sheet_distance(z, t) {
            Ok(d) if d >= ADVECT_EXCLUSION => {}
            Ok(_) | Err(SheetError::OnSpiral { .. }) | Err(SheetError::Origin) => {
                rows.push(row(t, z, "halted"));
                return rows;
            }
            Err(_) => {
                rows.push(row(t, z, "failed"));
                return rows;
            }
        }
        rows.push(row(t, z, "ok"));
        if n == steps {
            break;
        }
        match rk4_step(spec, z, t, h) {
            Ok(next) if next.re.is_finite() && next.im.is_finite() => z = next,
            Ok(_) | Err(_) => {
                let status = match spec.sheet_distance(z, t + h) {
                    Ok(d) if d >= ADVECT_EXCLUSION => "failed",
                    _ => "halted",
                };
                rows.push(row(t + h, z, status));
                return rows;
            }
        }
    }
    rows
}

fn cmd_advect(args: &AdvectArgs) -> CliResult<i32> {
    if !(args.t1 > args.t0) {
        return Err(CliError::Usage("--t1 must exceed --t0".into()));
    }
    let spec = FieldSpec::from_args(&args.field)?;
    let points = parse_points(&args.points)?;
    if points.is_empty() {
        return Err(CliError::Usage("--points is empty".into()));
    }
    let trajectories: Vec<Vec<TrajectoryRow>> = points
        .par_iter()
        .enumerate()
        .map(|(id, &z)| advect_particle(&spec, id, z, args.t0, args.t1, args.dt))
        .collect();
    let rows: Vec<TrajectoryRow> = trajectories.into_iter().flatten().collect();
    let bytes = match args.format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["t", "particle", "x", "y", "status"])?;
            for r in &rows {
                w.write_record([
                    fmt_num(r.t),
                    r.particle.to_string(),
                    fmt_num(r.x),
                    fmt_num(r.y),
                    r.status.to_string(),
                ])?;
            }
            w.into_inner().map_err(|e| CliError::Io(e.into_error()))?
        }
        Format::Json => serde_json::to_vec_pretty(&rows).expect("trajectory serializes"),
    };
    write_atomic(&args.out, &bytes)?;
    Ok(0)
}

/// Runs a parsed command, writing human-readable output to `out`/`err`.
pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<i32> {
    match &cli.command {
        Command::Solve(a) => cmd_solve(a, out),
        Command::Eval(a) => cmd_eval(a, out),
        Command::Grid(a) => cmd_grid(a),
        Command::Verify(a) => cmd_verify(a, out, err),
        Command::Advect(a) => cmd_advect(a),
    }
}

/// Worker count from `SPIRALSHEET_THREADS`, if set to a positive integer.
pub fn thread_cap() -> Option<usize> {
    std::env::var("SPIRALSHEET_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
}

/// Process entry point: parses arguments, runs the command and returns the exit code.
pub fn main_entry() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_cap() {
        builder = builder.num_threads(n);
    }
    let pool = match builder.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("failed to start worker pool: {e}");
            return 1;
        }
    };
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let result = pool.install(|| run(&cli, &mut stdout.lock(), &mut stderr.lock()));
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
