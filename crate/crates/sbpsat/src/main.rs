use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use sbpsat::analysis::STEP_BUDGET;
use sbpsat::cli::{self, CliError, CommandResult, ConfigSource};

#[derive(Parser)]
#[command(name = "sbpsat", version, about = "SBP-SAT wave solver on non-conforming curvilinear multiblock grids")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args)]
struct Source {
    /// Built-in experiment: extreme-interface-eig, extreme-interface-longtime,
    /// tjunction-converge, sat-compare, gentle-interface-longtime
    #[arg(long)]
    preset: Option<String>,
    /// TOML run configuration
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override the accuracy order (2, 4 or 6)
    #[arg(long)]
    order: Option<usize>,
    /// Override the interface scheme (new-split or legacy)
    #[arg(long)]
    scheme: Option<String>,
    /// Output directory
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

impl Source {
    fn resolve(&self, full: bool, dt: Option<f64>, t_end: Option<f64>) -> Result<sbpsat::assembly::RunConfig, CliError> {
        ConfigSource { preset: self.preset.clone(), config: self.config.clone(), order: self.order, scheme: self.scheme.clone(), full, dt, t_end }.resolve()
    }
}

#[derive(Subcommand)]
enum Command {
    /// Certify SBP and interpolation operators
    VerifyOps {
        #[arg(long, default_value_t = 4)]
        order: usize,
        /// Grid sizes to certify
        #[arg(long, value_delimiter = ',', default_value = "17,33")]
        n: Vec<usize>,
        /// Replace D1 with a triplet file before certifying
        #[arg(long)]
        d1_file: Option<PathBuf>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Dense eigenvalues of the semi-discrete operator
    Spectrum {
        #[command(flatten)]
        src: Source,
        /// Exit 1 unless all eigenvalues are real and non-positive
        #[arg(long)]
        expect_stable: bool,
    },
    /// Time integration with error and energy logs
    Run {
        #[command(flatten)]
        src: Source,
        /// Full-resolution long-time grids
        #[arg(long)]
        full: bool,
        /// Fixed time step instead of the CFL-based one
        #[arg(long)]
        dt: Option<f64>,
        /// Final time instead of the configured one
        #[arg(long)]
        t_end: Option<f64>,
        /// Refuse runs needing more RK4 steps than this
        #[arg(long, default_value_t = STEP_BUDGET)]
        max_steps: f64,
    },
    /// Convergence study under uniform refinement
    Converge {
        #[command(flatten)]
        src: Source,
        #[arg(long, default_value_t = 3)]
        levels: usize,
        /// Exit 1 if the observed rate misses this by more than 0.25
        #[arg(long)]
        expect_rate: Option<f64>,
    },
}

fn dispatch(cmd: Command) -> Result<CommandResult, CliError> {
    match cmd {
        Command::VerifyOps { order, n, d1_file, out } => cli::verify_ops(order, &n, d1_file.as_deref(), &out),
        Command::Spectrum { src, expect_stable } => cli::spectrum(&src.resolve(false, None, None)?, expect_stable, &src.out),
        Command::Run { src, full, dt, t_end, max_steps } => cli::run(&src.resolve(full, dt, t_end)?, &src.out, max_steps),
        Command::Converge { src, levels, expect_rate } => cli::converge(&src.resolve(false, None, None)?, levels, expect_rate, &src.out),
    }
}

fn main() -> ExitCode {
    let args = match Cli::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { cli::EXIT_CONFIG as u8 } else { 0 });
        }
    };
    match dispatch(args.cmd) {
        Ok(res) => {
            print!("{}", res.summary);
            ExitCode::from(res.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
