use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use fuzzy_pmp::fuzzy::{GhCase, LevelGrid};
use fuzzy_pmp::problems::{check, load_problem, run, OutputFormat, RunError, RunOptions, RunOutcome, BUILTINS};
use fuzzy_pmp::problems::run::threads_from_env;
use fuzzy_pmp::SolveConfig;

#[derive(Parser)]
#[command(name = "fuzzy-pmp", version, about = "Fuzzy fractional optimal control via Pontryagin conditions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a builtin or a problem file at every level.
    Solve {
        problem: String,
        #[command(flatten)]
        args: SolveArgs,
    },
    /// Run the diameter feasibility test only.
    Check {
        problem: String,
        #[command(flatten)]
        args: SolveArgs,
    },
    /// List builtin problems.
    List,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Svg,
    Both,
}

#[derive(clap::Args)]
struct SolveArgs {
    /// Fractional order in (0, 1].
    #[arg(long)]
    beta: Option<f64>,
    /// Number of uniformly spaced levels in [0, 1].
    #[arg(long, default_value_t = 11)]
    levels: usize,
    /// Number of time nodes.
    #[arg(long)]
    mesh: Option<usize>,
    /// Residual tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Comma-separated gH cases per state, e.g. `1,2`.
    #[arg(long)]
    case: Option<String>,
    /// Output directory; nothing is written without it.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

impl SolveArgs {
    fn options(&self) -> Result<RunOptions, RunError> {
        let mut config = SolveConfig { threads: threads_from_env(), ..SolveConfig::default() };
        if let Some(m) = self.mesh {
            config.mesh = m;
        }
        if let Some(t) = self.tol {
            config.tolerance = t;
        }
        let levels = LevelGrid::uniform(self.levels).map_err(|e| RunError::Input(e.to_string()))?;
        let cases = self
            .case
            .as_deref()
            .map(|s| {
                s.split(',')
                    .map(|c| GhCase::parse(c.trim()).ok_or_else(|| RunError::Input(format!("unknown case `{c}`"))))
                    .collect::<Result<Vec<_>, _>>()
            })
            .transpose()?;
        Ok(RunOptions {
            config,
            levels,
            beta: self.beta,
            cases,
            out_dir: self.out.clone(),
            format: match self.format {
                Format::Csv => OutputFormat::Csv,
                Format::Svg => OutputFormat::Svg,
                Format::Both => OutputFormat::Both,
            },
        })
    }
}

fn solve(problem: &str, args: &SolveArgs) -> Result<i32, RunError> {
    let options = args.options()?;
    let problem = load_problem(problem)?;
    let outcome = run(&problem, &options)?;
    match &outcome {
        RunOutcome::Infeasible { verdict } => eprintln!("{verdict}"),
        RunOutcome::Solved { bundle, files, .. } | RunOutcome::Failed { bundle, files, .. } => {
            for s in &bundle.solutions {
                let res = &s.residuals;
                let line = format!(
                    "r={:.4} converged={} state={:.3e} adjoint={:.3e} stationary={:.3e} boundary={:.3e}",
                    s.r, s.convergence.converged, res.state, res.adjoint, res.stationary, res.boundary
                );
                if s.convergence.converged {
                    println!("{line}");
                } else {
                    let why = s.convergence.message.as_deref().unwrap_or("residual above tolerance");
                    eprintln!("FAILED {line}: {why}");
                }
            }
            for f in files {
                println!("wrote {}", f.display());
            }
        }
    }
    Ok(outcome.exit_code())
}

fn check_only(problem: &str, args: &SolveArgs) -> Result<i32, RunError> {
    let options = args.options()?;
    let problem = load_problem(problem)?;
    let verdict = check(&problem, &options)?;
    println!("{verdict}");
    Ok(if verdict.is_infeasible() { 2 } else { 0 })
}

fn main() -> ExitCode {
    // usage errors share the input-error status instead of clap's default 2
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 4 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Solve { problem, args } => solve(problem, args),
        Command::Check { problem, args } => check_only(problem, args),
        Command::List => {
            for b in BUILTINS {
                println!("{:<22} {}", b.name, b.description);
            }
            Ok(0)
        }
    };
    let code = result.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        e.exit_code()
    });
    ExitCode::from(code as u8)
}
