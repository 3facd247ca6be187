//! Feasibility check, per-level solves and file emission for one problem.

use std::path::{Path, PathBuf};

use thiserror::Error;

use super::builtins::builtin;
use super::csv::emit_csv;
use super::file::{parse_problem, ProblemFile};
use super::svg::emit_svg;
use crate::bvp::{solve_problem, BvpError, SolutionBundle, SolveConfig};
use crate::fuzzy::{GhCase, LevelGrid};
use crate::pmp::{check_diameter_feasibility, FeasibilityVerdict};

pub const THREADS_ENV: &str = "FUZZY_PMP_THREADS";

#[derive(Debug, Error)]
pub enum RunError {
    #[error("{0}")]
    Input(String),
    #[error("cannot write {}: {message}", path.display())]
    Output { path: PathBuf, message: String },
    #[error("solve failed: {0}")]
    Solve(#[from] BvpError),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Input(_) | RunError::Output { .. } => 4,
            RunError::Solve(_) => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    Svg,
    Both,
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub config: SolveConfig,
    pub levels: LevelGrid,
    pub beta: Option<f64>,
    pub cases: Option<Vec<GhCase>>,
    /// Files are written only when set.
    pub out_dir: Option<PathBuf>,
    pub format: OutputFormat,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            config: SolveConfig::default(),
            levels: LevelGrid::default(),
            beta: None,
            cases: None,
            out_dir: None,
            format: OutputFormat::Csv,
        }
    }
}

/// Level parallelism from `FUZZY_PMP_THREADS`; unset, empty or invalid means sequential.
pub fn threads_from_env() -> usize {
    std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse().ok()).unwrap_or(0)
}

#[derive(Debug)]
pub enum RunOutcome {
    /// Refuted by the diameter test; nothing was solved.
    Infeasible { verdict: FeasibilityVerdict },
    Solved { verdict: FeasibilityVerdict, bundle: SolutionBundle, files: Vec<PathBuf> },
    /// At least one level missed the tolerance; the bundle is still returned.
    Failed { verdict: FeasibilityVerdict, bundle: SolutionBundle, files: Vec<PathBuf> },
}

impl RunOutcome {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunOutcome::Solved { .. } => 0,
            RunOutcome::Infeasible { .. } => 2,
            RunOutcome::Failed { .. } => 3,
        }
    }

    pub fn bundle(&self) -> Option<&SolutionBundle> {
        match self {
            RunOutcome::Solved { bundle, .. } | RunOutcome::Failed { bundle, .. } => Some(bundle),
            RunOutcome::Infeasible { .. } => None,
        }
    }
}

/// A builtin name or a path to a problem file.
pub fn load_problem(name_or_path: &str) -> Result<ProblemFile, RunError> {
    if let Some(p) = builtin(name_or_path) {
        return Ok(p);
    }
    let path = Path::new(name_or_path);
    let text = std::fs::read_to_string(path)
        .map_err(|e| RunError::Input(format!("`{name_or_path}` is neither a builtin nor a readable file: {e}")))?;
    parse_problem(&text).map_err(|e| RunError::Input(format!("{}: {e}", path.display())))
}

fn apply_overrides(problem: &ProblemFile, options: &RunOptions) -> Result<ProblemFile, RunError> {
    let mut p = problem.clone();
    if let Some(beta) = options.beta {
        if !(beta > 0.0 && beta <= 1.0) {
            return Err(RunError::Input(format!("beta = {beta} outside (0, 1]")));
        }
        p.beta = beta;
    }
    if let Some(cases) = &options.cases {
        if cases.len() != p.n_states() {
            return Err(RunError::Input(format!("{} cases given for {} states", cases.len(), p.n_states())));
        }
        p.cases = cases.clone();
    }
    Ok(p)
}

/// Runs the diameter test only.
pub fn check(problem: &ProblemFile, options: &RunOptions) -> Result<FeasibilityVerdict, RunError> {
    let p = apply_overrides(problem, options)?;
    let spec = p.to_spec(&options.levels).map_err(|e| RunError::Input(e.to_string()))?;
    check_diameter_feasibility(&spec).map_err(|e| RunError::Input(e.to_string()))
}

pub fn run(problem: &ProblemFile, options: &RunOptions) -> Result<RunOutcome, RunError> {
    let p = apply_overrides(problem, options)?;
    let spec = p.to_spec(&options.levels).map_err(|e| RunError::Input(e.to_string()))?;
    let verdict = check_diameter_feasibility(&spec).map_err(|e| RunError::Input(e.to_string()))?;
    if verdict.is_infeasible() {
        return Ok(RunOutcome::Infeasible { verdict });
    }
    options.config.validate().map_err(|e| RunError::Input(e.to_string()))?;
    let bundle = solve_problem(&spec, &options.config)?;

    let mut files = Vec::new();
    if let Some(dir) = &options.out_dir {
        let out_err = |path: &Path, e: std::io::Error| RunError::Output { path: path.to_owned(), message: e.to_string() };
        std::fs::create_dir_all(dir).map_err(|e| out_err(dir, e))?;
        if matches!(options.format, OutputFormat::Csv | OutputFormat::Both) {
            let path = dir.join(format!("{}.csv", p.name));
            emit_csv(&bundle, &path).map_err(|e| out_err(&path, e))?;
            files.push(path);
        }
        if matches!(options.format, OutputFormat::Svg | OutputFormat::Both) {
            files.extend(emit_svg(&bundle, dir, &p.name).map_err(|e| out_err(dir, e))?);
        }
    }
    Ok(if bundle.all_converged() {
        RunOutcome::Solved { verdict, bundle, files }
    } else {
        RunOutcome::Failed { verdict, bundle, files }
    })
}
