mod checks;
mod commands;
mod input;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use convex_order::{FwVariant, GaussOptions, Solver, StepRule, WotConfig};
use thiserror::Error;

use crate::input::Problem;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("cannot write {0}: {1}")]
    Io(String, std::io::Error),
    #[error("solver failure: {0}")]
    Solver(#[from] convex_order::Error),
    #[error("{0} check(s) failed")]
    ChecksFailed(usize),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::ChecksFailed(_) => 1,
            CliError::Parse(_) => 2,
            CliError::Io(..) | CliError::Solver(_) => 3,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "convex-order", version, about = "W2 projections in the convex order")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, Default, ValueEnum)]
enum MethodArg {
    #[default]
    Auto,
    ClosedForm,
    Pgd,
}

#[derive(Debug, Args)]
struct Common {
    /// Problem file: {"mu": <measure>, "nu": <measure>}.
    input: PathBuf,
    /// Write the JSON report here instead of stdout.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct GaussArgs {
    #[arg(long, value_enum, default_value_t)]
    method: MethodArg,
    /// Constant step size for projected gradient descent.
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    /// Gradient-mapping stopping threshold for projected gradient descent.
    #[arg(long)]
    tol: Option<f64>,
    /// CSV of (iteration, objective, grad_norm) for the descent, if one runs.
    #[arg(long)]
    trace: Option<PathBuf>,
}

impl GaussArgs {
    fn options(&self) -> Result<GaussOptions, CliError> {
        let solver = match self.method {
            MethodArg::Auto => Solver::Auto,
            MethodArg::ClosedForm => Solver::ClosedForm,
            MethodArg::Pgd => Solver::Pgd,
        };
        let mut opts = GaussOptions::with_solver(solver);
        if let Some(eta) = self.eta {
            if !(eta > 0.0 && eta.is_finite()) {
                return Err(CliError::Parse(format!("--eta must be positive, got {eta}")));
            }
            opts.pgd.step = StepRule::Constant(eta);
        }
        if let Some(n) = self.max_iter {
            opts.pgd.max_iter = n;
        }
        if let Some(t) = self.tol {
            opts.pgd.tol = t;
        }
        opts.pgd.record_trace = self.trace.is_some();
        Ok(opts)
    }
}

#[derive(Debug, Args)]
struct WotArgs {
    /// Relative Frank-Wolfe duality-gap target.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    /// Largest accepted n·m.
    #[arg(long)]
    budget: Option<usize>,
    #[arg(long, value_enum, default_value_t)]
    variant: VariantArg,
}

#[derive(Clone, Copy, Debug, Default, ValueEnum)]
enum VariantArg {
    /// Minimum-norm-point method with full re-optimization over the active vertices.
    #[default]
    FullyCorrective,
    AwaySteps,
    Classic,
}

impl WotArgs {
    fn config(&self) -> WotConfig {
        let mut cfg = WotConfig::default();
        if let Some(t) = self.tol {
            cfg.fw_tol = t;
        }
        if let Some(n) = self.max_iter {
            cfg.max_iter = n;
        }
        if let Some(b) = self.budget {
            cfg.budget = b;
        }
        cfg.variant = match self.variant {
            VariantArg::FullyCorrective => FwVariant::FullyCorrective,
            VariantArg::AwaySteps => FwVariant::AwaySteps,
            VariantArg::Classic => FwVariant::Classic,
        };
        cfg
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Both projections of centered Gaussians, with the order transform.
    ProjectGaussian {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        gauss: GaussArgs,
    },
    /// Exact projections of finitely supported measures on the line.
    #[command(name = "project-1d")]
    Project1d {
        #[command(flatten)]
        common: Common,
    },
    /// I-projection of finitely supported measures by weak optimal transport.
    ProjectDiscrete {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        wot: WotArgs,
        /// Dense CSV dump of the optimal coupling.
        #[arg(long)]
        coupling: Option<PathBuf>,
    },
    /// W2 distance between the two measures.
    Distance {
        #[command(flatten)]
        common: Common,
    },
    /// Runs the invariant suite; exits 1 if any check fails.
    Check {
        #[command(flatten)]
        common: Common,
        /// Projections to test instead of the computed ones: {"sigma_i", "sigma_j"} or {"i", "j"}.
        #[arg(long)]
        assert_file: Option<PathBuf>,
        /// Relative tolerance of the checks.
        #[arg(long, default_value_t = 1e-8)]
        check_tol: f64,
        #[command(flatten)]
        wot: WotArgs,
    },
}

fn run(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::ProjectGaussian { common, gauss } => {
            let (mu, nu) = input::gaussian_pair(&common.input)?;
            let out = commands::project_gaussian(&mu, &nu, &gauss.options()?)?;
            if let Some(path) = &gauss.trace {
                commands::write_trace(out.trace.as_ref(), path)?;
            }
            report::emit(&out.report, common.output.as_deref())
        }
        Command::Project1d { common } => {
            let (mu, nu) = input::discrete_pair(&common.input)?;
            if mu.dim() != 1 {
                return Err(CliError::Parse(format!("project-1d needs 1-d measures, got dimension {}", mu.dim())));
            }
            report::emit(&commands::project_1d(&mu, &nu)?, common.output.as_deref())
        }
        Command::ProjectDiscrete { common, wot, coupling } => {
            let (mu, nu) = input::discrete_pair(&common.input)?;
            let out = commands::project_discrete(&mu, &nu, &wot.config())?;
            if let Some(path) = &coupling {
                commands::write_coupling(&out.coupling, path)?;
            }
            report::emit(&out.report, common.output.as_deref())
        }
        Command::Distance { common } => {
            let value = match input::read_problem(&common.input)? {
                Problem::Gaussian(mu, nu) => commands::gaussian_distance(&mu, &nu)?,
                Problem::Discrete(mu, nu) => commands::discrete_distance(&mu, &nu)?,
            };
            report::emit(&value, common.output.as_deref())
        }
        Command::Check {
            common,
            assert_file,
            check_tol,
            wot,
        } => {
            if !(check_tol > 0.0) {
                return Err(CliError::Parse("--check-tol must be positive".into()));
            }
            let asserted = checks::AssertSpec::load(assert_file.as_deref())?;
            let (mode, (list, extra)) = match input::read_problem(&common.input)? {
                Problem::Gaussian(mu, nu) => (
                    "gaussian",
                    checks::gaussian(&mu, &nu, &GaussOptions::default(), check_tol, asserted)?,
                ),
                Problem::Discrete(mu, nu) if mu.dim() == 1 => ("one_d", checks::one_dim(&mu, &nu, check_tol, asserted)?),
                Problem::Discrete(mu, nu) => (
                    "discrete",
                    checks::discrete(&mu, &nu, &wot.config(), check_tol, asserted)?,
                ),
            };
            report::emit(&checks::report(mode, &list, extra), common.output.as_deref())?;
            match list.iter().filter(|c| !c.pass()).count() {
                0 => Ok(()),
                n => Err(CliError::ChecksFailed(n)),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
