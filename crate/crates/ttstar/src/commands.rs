//! Subcommands. Each returns an [`Outcome`]; the binary maps it to an exit code.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::Serialize;
use ttstar_core::canonical::{canonical_frame_with, check_euler_eta, FrameOptions};
use ttstar_core::cdv::{
    connection_gap_for, construct_canonical_cdv, harmonic_potential, pencil_curvature, verify_cv_axioms,
    verify_harmonic, CdvStructure, CheckConfig,
};
use ttstar_core::lowdim::{
    check_euler_weights_canonical, check_m2_relations, check_m3_relations, node_residuals, solve_tt2d, tt2d_residual,
    Boundary, Grid, LowDimRelationsInput, Tt2dOptions,
};
use ttstar_core::numerics::{CMatrix, FdConfig, DEFAULT_FD_STEP};
use ttstar_core::potential::{check_flat, check_homogeneity, check_wdvv, PotentialSpec};
use ttstar_core::{CheckEntry, VerificationReport};

use crate::catalog::{catalog, NAMES};
use crate::report::ReportFile;
use crate::sampling::{sample_points, Polydisk};
use crate::specfile::{load_spec, write_spec};
use crate::CliError;

const ALGEBRAIC_TOL: f64 = 1e-10;
const FD_TOL: f64 = 1e-5;

#[derive(Debug, Parser)]
#[command(name = "ttstar", version, about = "Canonical positive CDV-structures: construction and numerical checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// WDVV, homogeneity, flatness and the full structure axiom suite at sampled points.
    Verify(PointArgs),
    /// Construct the structure at one point and dump K, h, ω, P as JSON; checks the harmonic potential.
    Cdv(PointArgs),
    /// Compare the Chern, Levi-Civita and real-metric connections; torsion and dω̂.
    Connections(PointArgs),
    /// Curvature of the connection pencil at z ∈ {1, i, 2}.
    Pencil(PointArgs),
    /// Relation systems for m = 2, 3 and the Euler weights of h.
    Lowdim(PointArgs),
    /// Solve the two-dimensional positivity equation on a grid.
    Tt2d(Tt2dArgs),
    /// Write built-in specs as JSON.
    Catalog(CatalogArgs),
}

#[derive(Debug, Args)]
pub struct PointArgs {
    /// Spec file (JSON).
    #[arg(long)]
    pub spec: PathBuf,
    /// Number of sampled points.
    #[arg(long, default_value_t = 5)]
    pub points: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Tolerance for finite-difference backed entries (relation entries for `lowdim`).
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_FD_STEP)]
    pub fd_step: f64,
    /// Explicit point "re,im;re,im;…"; repeatable, replaces sampling.
    #[arg(long = "point")]
    pub point: Vec<String>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Centre of the sampling polydisk, "re,im;…" (default: origin).
    #[arg(long)]
    pub centre: Option<String>,
    #[arg(long, default_value_t = 1.0)]
    pub radius: f64,
    /// Sampled points whose eigenvalue gap of ℰ∘ is below this are redrawn.
    #[arg(long, default_value_t = 0.05)]
    pub min_gap: f64,
}

#[derive(Debug, Args)]
pub struct Tt2dArgs {
    #[arg(long)]
    pub spec: PathBuf,
    /// Nodes per side.
    #[arg(long, default_value_t = 64)]
    pub grid: usize,
    /// Rectangle "x0,y0,x1,y1" in the t²-plane.
    #[arg(long, default_value = "-1,-1,1,1")]
    pub rect: String,
    /// Constant Dirichlet value of h₁₁.
    #[arg(long, default_value_t = 1.0)]
    pub boundary: f64,
    #[arg(long, default_value_t = 50)]
    pub max_iter: usize,
    /// Newton tolerance on the max-norm residual.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Write the grid as CSV `x,y,h11,residual`.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CatalogArgs {
    /// One catalog name; all entries when omitted.
    #[arg(long)]
    pub name: Option<String>,
    /// Output file for one name, directory for all (default: stdout / current directory).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Result of a successful run: `pass` decides the exit code, `stdout` is printed as is,
/// `notes` go to stderr.
#[derive(Clone, Debug, Default)]
pub struct Outcome {
    pub pass: bool,
    pub stdout: String,
    pub notes: Vec<String>,
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Verify(a) => point_command(a, Kind::Verify),
        Command::Cdv(a) => cdv_command(a),
        Command::Connections(a) => point_command(a, Kind::Connections),
        Command::Pencil(a) => point_command(a, Kind::Pencil),
        Command::Lowdim(a) => point_command(a, Kind::Lowdim),
        Command::Tt2d(a) => tt2d_command(a),
        Command::Catalog(a) => catalog_command(a),
    }
}

fn parse_reals(s: &str, what: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|x| {
            x.trim().parse::<f64>().map_err(|_| CliError::Usage(format!("{what}: cannot parse {x:?} as a number")))
        })
        .collect()
}

/// "re,im;re,im;…" as a point of dimension `m`.
pub fn parse_point(s: &str, m: usize) -> Result<Vec<Complex64>, CliError> {
    let coords: Vec<Complex64> = s
        .split(';')
        .map(|pair| match parse_reals(pair, "point")?.as_slice() {
            [re, im] => Ok(Complex64::new(*re, *im)),
            _ => Err(CliError::Usage(format!("point coordinate {pair:?} is not \"re,im\""))),
        })
        .collect::<Result<_, _>>()?;
    if coords.len() != m {
        return Err(CliError::Usage(format!("point {s:?} has {} coordinates, expected {m}", coords.len())));
    }
    Ok(coords)
}

fn config(a: &PointArgs) -> Result<CheckConfig, CliError> {
    if !(a.fd_step > 0.0 && a.fd_step.is_finite()) {
        return Err(CliError::Usage("--fd-step must be positive".into()));
    }
    Ok(CheckConfig { fd_tol: a.tol.unwrap_or(FD_TOL), fd: FdConfig::with_step(a.fd_step), ..CheckConfig::default() })
}

fn structure(spec: &PotentialSpec, t: &[Complex64], cfg: &CheckConfig) -> Result<CdvStructure, CliError> {
    let opts = FrameOptions { eps_ss: cfg.eps_ss, ..FrameOptions::default() };
    Ok(construct_canonical_cdv(&canonical_frame_with(spec, t, &opts)?, spec.euler().d))
}

struct Points {
    /// Points where the canonical structure exists.
    generic: Vec<Vec<Complex64>>,
    /// Every point used, skipped ones included (flat-coordinate checks need no frame).
    all: Vec<Vec<Complex64>>,
    notes: Vec<String>,
}

fn fmt_point(p: &[Complex64]) -> String {
    p.iter().map(|z| format!("{},{}", z.re, z.im)).collect::<Vec<_>>().join(";")
}

fn points(spec: &PotentialSpec, a: &PointArgs, cfg: &CheckConfig) -> Result<Points, CliError> {
    let m = spec.dim();
    let opts = FrameOptions { eps_ss: cfg.eps_ss, ..FrameOptions::default() };
    let mut notes = Vec::new();
    if !a.point.is_empty() {
        let all: Vec<Vec<Complex64>> = a.point.iter().map(|s| parse_point(s, m)).collect::<Result<_, _>>()?;
        let mut generic = Vec::new();
        for p in &all {
            match canonical_frame_with(spec, p, &opts) {
                Ok(_) => generic.push(p.clone()),
                Err(e) => notes.push(format!("skipped point {}: {e}", fmt_point(p))),
            }
        }
        return Ok(Points { generic, all, notes });
    }
    let disk = match &a.centre {
        Some(c) => Polydisk { centre: parse_point(c, m)?, radius: a.radius },
        None => Polydisk { radius: a.radius, ..Polydisk::unit(m) },
    };
    if !(disk.radius > 0.0 && disk.radius.is_finite()) {
        return Err(CliError::Usage("--radius must be positive".into()));
    }
    let samples = sample_points(a.points, a.seed, &disk, |p| {
        canonical_frame_with(spec, p, &opts).map(|f| f.gap >= a.min_gap).unwrap_or(false)
    });
    for p in &samples.skipped {
        notes.push(format!("skipped point {} after {} draws: not generic", fmt_point(p), crate::sampling::MAX_DRAWS));
    }
    let mut all = samples.accepted.clone();
    all.extend(samples.skipped);
    Ok(Points { generic: samples.accepted, all, notes })
}

#[derive(Clone, Copy, PartialEq)]
enum Kind {
    Verify,
    Connections,
    Pencil,
    Lowdim,
}

fn finish(
    spec_path: &Path,
    points: &[Vec<Complex64>],
    report: &VerificationReport,
    (seed, fd_step): (u64, f64),
    out: Option<&Path>,
    mut notes: Vec<String>,
    mut stdout: String,
) -> Result<Outcome, CliError> {
    let file = ReportFile::new(&spec_path.display().to_string(), points, report, seed, fd_step);
    let json = file.to_json();
    match out {
        Some(path) => fs::write(path, json).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?,
        None => stdout.push_str(&json),
    }
    for c in file.checks.iter().filter(|c| !c.pass) {
        notes.push(format!("FAIL {}: residual {:e} vs tolerance {:e}", c.name, c.residual, c.tolerance));
    }
    Ok(Outcome { pass: file.summary.pass, stdout, notes })
}

fn point_command(a: &PointArgs, kind: Kind) -> Result<Outcome, CliError> {
    let spec = load_spec(&a.spec)?;
    let cfg = config(a)?;
    let pts = points(&spec, a, &cfg)?;
    let mut report = VerificationReport::new();
    match kind {
        Kind::Verify => {
            report.extend(check_wdvv(&spec, &pts.all, ALGEBRAIC_TOL)?);
            report.extend(check_homogeneity(&spec, &pts.all, ALGEBRAIC_TOL));
            report.extend(check_flat(&spec, &pts.all, ALGEBRAIC_TOL)?);
        }
        Kind::Lowdim if !(2..=3).contains(&spec.dim()) => {
            return Err(CliError::Usage(format!("lowdim needs m = 2 or 3, spec has m = {}", spec.dim())));
        }
        _ => {}
    }
    let z = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0), Complex64::new(2.0, 0.0)];
    for t in &pts.generic {
        let cdv = structure(&spec, t, &cfg)?;
        let r = match kind {
            Kind::Verify => {
                let mut r = verify_cv_axioms(&spec, &cdv, &cfg)?;
                r.extend(check_euler_eta(&spec, &cdv.frame, cfg.fd_tol));
                r
            }
            Kind::Connections => connection_gap_for(&spec, &cdv, &cfg)?.report(cfg.algebraic_tol, cfg.fd_tol),
            Kind::Pencil => pencil_curvature(&spec, &cdv, &z, &cfg)?,
            Kind::Lowdim => {
                let input = LowDimRelationsInput::from_structure(&spec, &cdv)?;
                let tol = a.tol.unwrap_or(ALGEBRAIC_TOL);
                let mut r =
                    if spec.dim() == 2 { check_m2_relations(&input, tol)? } else { check_m3_relations(&input, tol)? };
                r.extend(check_euler_weights_canonical(&spec, t, &CheckConfig { fd_tol: FD_TOL, ..cfg })?);
                r
            }
        };
        report.merge_max(&r);
    }
    let mut notes = pts.notes.clone();
    if pts.generic.is_empty() && kind != Kind::Verify {
        notes.push("no generic point: nothing to check".into());
        report.push(CheckEntry::exceeds("generic_points", 0.0, 0.0));
    }
    finish(&a.spec, &pts.generic_or_all(kind), &report, (a.seed, a.fd_step), a.report.as_deref(), notes, String::new())
}

impl Points {
    fn generic_or_all(&self, kind: Kind) -> Vec<Vec<Complex64>> {
        if kind == Kind::Verify {
            self.all.clone()
        } else {
            self.generic.clone()
        }
    }
}

fn matrix_json(m: &CMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.rows()).map(|i| (0..m.cols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect()
}

#[derive(Serialize)]
struct StructureDump {
    point: Vec<[f64; 2]>,
    u: Vec<[f64; 2]>,
    eta: Vec<[f64; 2]>,
    #[serde(rename = "K")]
    k: Vec<Vec<[f64; 2]>>,
    h: Vec<Vec<[f64; 2]>>,
    omega: Vec<Vec<Vec<[f64; 2]>>>,
    #[serde(rename = "P")]
    p: Vec<Vec<[f64; 2]>>,
    #[serde(rename = "P_dagger")]
    pdag: Vec<Vec<[f64; 2]>>,
}

fn cdv_command(a: &PointArgs) -> Result<Outcome, CliError> {
    let spec = load_spec(&a.spec)?;
    let cfg = config(a)?;
    let t = match a.point.first() {
        Some(s) => parse_point(s, spec.dim())?,
        None => {
            let pts = points(&spec, a, &cfg)?;
            pts.generic.into_iter().next().ok_or_else(|| CliError::Usage("no generic point found".into()))?
        }
    };
    let cdv = structure(&spec, &t, &cfg)?;
    let hd = harmonic_potential(&cdv.frame, cdv.d);
    let report = verify_harmonic(&spec, &cdv, &hd, &cfg)?;
    let vec_json = |v: &[Complex64]| v.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>();
    let dump = StructureDump {
        point: vec_json(&t),
        u: vec_json(&cdv.frame.u),
        eta: vec_json(&cdv.frame.eta),
        k: matrix_json(&cdv.k),
        h: matrix_json(&cdv.h),
        omega: cdv.omega.iter().map(matrix_json).collect(),
        p: matrix_json(&hd.p),
        pdag: matrix_json(&hd.pdag),
    };
    let mut stdout = serde_json::to_string_pretty(&dump).expect("dump serialises");
    stdout.push('\n');
    match &a.report {
        Some(path) => finish(&a.spec, &[t], &report, (a.seed, a.fd_step), Some(path), Vec::new(), stdout),
        None => Ok(Outcome { pass: report.pass(), stdout, notes: Vec::new() }),
    }
}

fn tt2d_command(a: &Tt2dArgs) -> Result<Outcome, CliError> {
    let spec = load_spec(&a.spec)?;
    let rect = match parse_reals(&a.rect, "rect")?.as_slice() {
        [x0, y0, x1, y1] => [*x0, *y0, *x1, *y1],
        _ => return Err(CliError::Usage("--rect needs x0,y0,x1,y1".into())),
    };
    let grid = Grid::new(rect[0], rect[1], rect[2], rect[3], a.grid)?;
    let opts = Tt2dOptions {
        boundary: Boundary::Constant(a.boundary),
        max_iter: a.max_iter,
        tol: a.tol,
        ..Tt2dOptions::default()
    };
    let sol = solve_tt2d(&spec, &grid, &opts)?;
    let (pde4, inv4) = tt2d_residual(&spec, &sol)?;
    let mut report = VerificationReport::new();
    report.check("tt2d_residual", sol.residual, a.tol);
    report.check("tt2d_order4_residual", pde4, 10.0 * sol.residual.max(a.tol));
    let min_h = sol.h11.iter().copied().fold(f64::INFINITY, f64::min);
    report.push(CheckEntry::exceeds("h11_positive", min_h, 0.0));
    let notes = vec![
        format!("newton iterations {}, converged {}", sol.iterations, sol.converged),
        format!(
            "euler invariance residual {:e} (order 4: {:e}), max |d h11 / d Im t2| {:e}",
            sol.invariance_residual, inv4, sol.im_derivative
        ),
    ];
    if let Some(path) = &a.csv {
        let res = node_residuals(&spec, &sol)?;
        let mut csv = String::from("x,y,h11,residual\n");
        for j in 0..grid.n {
            for i in 0..grid.n {
                let p = grid.idx(i, j);
                let _ = writeln!(csv, "{},{},{},{}", grid.x(i), grid.y(j), sol.h11[p], res[p]);
            }
        }
        fs::write(path, csv).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    }
    finish(&a.spec, &[], &report, (0, 0.0), a.report.as_deref(), notes, String::new())
}

fn catalog_command(a: &CatalogArgs) -> Result<Outcome, CliError> {
    let write =
        |path: &Path, text: &str| fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())));
    let mut stdout = String::new();
    match (&a.name, &a.out) {
        (Some(name), Some(out)) => write(out, &write_spec(&catalog(name)?))?,
        (Some(name), None) => stdout = write_spec(&catalog(name)?),
        (None, out) => {
            let dir = out.clone().unwrap_or_else(|| PathBuf::from("."));
            fs::create_dir_all(&dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
            for name in NAMES {
                write(&dir.join(format!("{name}.json")), &write_spec(&catalog(name)?))?;
            }
        }
    }
    Ok(Outcome { pass: true, stdout, notes: Vec::new() })
}
