//! Batch front end: scene files in, JSON reports out.
//!
//! Exit codes: 0 all verdicts pass, 1 some verdict fails, 2 scene parse or
//! validation error, 3 numerical failure (non-finite residual, elliptic
//! solver breakdown, degenerate frame).

mod commands;
pub mod report;
pub mod scene;

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use thiserror::Error;

use crate::exprlang::ExprError;
use crate::geometry::GeometryError;
use crate::initial_data::DataError;
use crate::killing_dev::KdError;
use crate::mesh::{MeshError, Scheme};
use crate::rigidity::RigidityError;

pub use report::{digest, Report, Rule, Verdict};
pub use scene::{DataSource, Scene, DEFAULT_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Constraints,
    Rigidity,
    KillingDev,
    PpWave,
    Convergence,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Constraints => "constraints",
            Command::Rigidity => "rigidity",
            Command::KillingDev => "killing-dev",
            Command::PpWave => "ppwave",
            Command::Convergence => "convergence",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "constraints" => Ok(Command::Constraints),
            "rigidity" => Ok(Command::Rigidity),
            "killing-dev" => Ok(Command::KillingDev),
            "ppwave" => Ok(Command::PpWave),
            "convergence" => Ok(Command::Convergence),
            other => Err(format!("unknown command '{other}'")),
        }
    }
}

/// Command-line flags shared by every command.
#[derive(Debug, Clone, Default)]
pub struct Options {
    /// Replaces the scene's default tolerance.
    pub tol: Option<f64>,
    /// `fd2`/`fd4` apply to every axis; `spectral` to the leaf axes only.
    pub scheme: Option<Scheme>,
    /// Report path; stdout when absent.
    pub out: Option<PathBuf>,
    /// Directory for CSV field dumps.
    pub dump_fields: Option<PathBuf>,
    /// Seed for the random TT self-test in `rigidity`.
    pub seed: Option<u64>,
    /// Residual name re-run by `convergence`.
    pub check: Option<String>,
    /// Sample count for DEC checks.
    pub samples: Option<usize>,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("scene error: {0}")]
    Scene(String),
    #[error("invalid data: {0}")]
    Invalid(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Numerical(_) => 3,
            _ => 2,
        }
    }
}

impl From<ExprError> for CliError {
    fn from(e: ExprError) -> Self {
        CliError::Invalid(e.to_string())
    }
}

impl From<MeshError> for CliError {
    fn from(e: MeshError) -> Self {
        match e {
            MeshError::NonFinite { .. } | MeshError::NonPositiveDensity(_) => {
                CliError::Numerical(e.to_string())
            }
            MeshError::Io(io) => CliError::Io(io),
            other => CliError::Invalid(other.to_string()),
        }
    }
}

impl From<GeometryError> for CliError {
    fn from(e: GeometryError) -> Self {
        match e {
            GeometryError::Mesh(m) => m.into(),
            GeometryError::NotPositiveDefinite { .. } | GeometryError::NotLorentzian { .. } => {
                CliError::Invalid(e.to_string())
            }
            other => CliError::Numerical(other.to_string()),
        }
    }
}

impl From<DataError> for CliError {
    fn from(e: DataError) -> Self {
        match e {
            DataError::Geometry(g) => g.into(),
            DataError::Mesh(m) => m.into(),
            DataError::Expr(x) => x.into(),
            DataError::StepUnderflow { .. } => CliError::Numerical(e.to_string()),
            other => CliError::Invalid(other.to_string()),
        }
    }
}

impl From<RigidityError> for CliError {
    fn from(e: RigidityError) -> Self {
        match e {
            RigidityError::Data(d) => d.into(),
            RigidityError::Geometry(g) => g.into(),
            RigidityError::Mesh(m) => m.into(),
            RigidityError::Expr(x) => x.into(),
            RigidityError::SolverZeroMode(_) => CliError::Numerical(e.to_string()),
            other => CliError::Invalid(other.to_string()),
        }
    }
}

impl From<KdError> for CliError {
    fn from(e: KdError) -> Self {
        match e {
            KdError::Data(d) => d.into(),
            KdError::Geometry(g) => g.into(),
            KdError::Mesh(m) => m.into(),
            KdError::Expr(x) => x.into(),
            KdError::Frame(_) => CliError::Numerical(e.to_string()),
            KdError::NotSpacelike { .. } => CliError::Invalid(e.to_string()),
        }
    }
}

/// Applies `--tol` and `--scheme` to a parsed scene.
pub fn apply_flags(mut scene: Scene, opts: &Options) -> Result<Scene, CliError> {
    if let Some(t) = opts.tol {
        scene.tolerances.insert("default".into(), t);
    }
    if let Some(s) = opts.scheme {
        let mut grid = (*scene.grid).clone();
        for axis in 0..grid.dim() {
            if s == Scheme::Spectral && axis == 0 {
                continue;
            }
            grid = grid.with_scheme(axis, s)?;
        }
        scene = scene.with_grid(grid);
    }
    Ok(scene)
}

/// Runs a command on scene text and returns the report. Verdict failures
/// are part of the report; only parse, validation and numerical errors are
/// returned as `Err`.
pub fn execute(command: Command, scene_text: &str, opts: &Options) -> Result<Report, CliError> {
    let start = Instant::now();
    let scene = apply_flags(Scene::parse(scene_text)?, opts)?;
    let mut report = Report {
        command: command.name().into(),
        digest: digest(scene_text.as_bytes()),
        grid: scene.grid.shape(),
        ..Default::default()
    };
    commands::dispatch(command, &scene, opts, &mut report)?;
    report.elapsed = start.elapsed();
    Ok(report)
}

/// Reads the scene, runs the command, writes the report and returns the
/// process exit code.
pub fn run(command: Command, scene_path: &std::path::Path, opts: &Options) -> i32 {
    let outcome = std::fs::read_to_string(scene_path)
        .map_err(CliError::from)
        .and_then(|text| execute(command, &text, opts));
    let mut report = match outcome {
        Ok(r) => r,
        Err(e) => {
            eprintln!("idrig {command}: {e}");
            return e.exit_code();
        }
    };
    report.scene = scene_path.display().to_string();
    let json = report.to_json();
    let written = match &opts.out {
        Some(path) => std::fs::write(path, &json),
        None => {
            print!("{json}");
            Ok(())
        }
    };
    if let Err(e) = written {
        eprintln!("idrig {command}: cannot write report: {e}");
        return 2;
    }
    let bad = report.non_finite();
    if !bad.is_empty() {
        eprintln!("idrig {command}: non-finite residuals: {}", bad.join(", "));
        return 3;
    }
    for (name, v) in report.verdicts.iter().filter(|(_, v)| !v.pass) {
        eprintln!(
            "idrig {command}: FAIL {name}: {} = {:e} (tolerance {:e})",
            v.residual, report.residuals[&v.residual], v.tolerance
        );
    }
    if report.passed() {
        0
    } else {
        1
    }
}

#[cfg(test)]
mod tests;
