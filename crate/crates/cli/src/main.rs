use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod config;
mod failure;
mod output;
mod selectors;

use commands::{TensorChoice, DEFAULT_DFS_CLUSTER_TOL};
use config::{Format, RunConfig};
use failure::Failure;
use selectors::{KindSpec, OpSpec};

/// SU(d) generator algebra, collective-noise invariants and noiseless subsystems.
///
/// All generator, particle and matrix indices are 0-based.
/// Exit codes: 0 all checks passed, 1 a check failed, 2 invalid input, 3 numerical ambiguity.
#[derive(Parser)]
#[command(name = "casimir", version)]
struct Cli {
    /// Local dimension of each particle.
    #[arg(long, global = true)]
    d: Option<usize>,
    /// Number of particles.
    #[arg(long = "n", global = true, default_value_t = 1)]
    n: usize,
    /// Tolerance for every pass/fail check.
    #[arg(long, global = true, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Seed for randomized probes.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generalized Gell-Mann matrices in canonical order.
    Basis,
    /// Structure constants f and d.
    Structure {
        #[arg(long, value_enum, default_value_t = TensorChoice::Both)]
        tensor: TensorChoice,
        /// All index permutations instead of canonical representatives.
        #[arg(long)]
        full: bool,
    },
    /// The eleven structure-constant identities.
    Verify,
    /// Collective operators S_j and their Lie closure.
    Collective {
        /// Omit the operator matrices.
        #[arg(long)]
        summary: bool,
    },
    /// Invariant operators, their spectra and centrality residuals.
    Invariants {
        /// e.g. I2:0,1 I3:0,1,2 I4:0,1,2 J2 J3 C2 C3:1 Cn:4:0; default: every I2/I3/I4 and J2.
        #[arg(long, num_args = 1..)]
        kinds: Vec<KindSpec>,
        /// Also compare the commutant dimension with the algebra generated by the invariants (n = 3).
        #[arg(long)]
        completeness: bool,
    },
    /// Noiseless-subsystem decomposition; for n = 3 also logical operators and exchange phases.
    Dfs {
        /// Relative eigenvalue-gap tolerance for grouping Casimir eigenvalues.
        #[arg(long, default_value_t = DEFAULT_DFS_CLUSTER_TOL)]
        cluster_tol: f64,
    },
    /// Exchange gate exp(-i pi/4 I2) phase table.
    Exchange {
        #[arg(long, default_value_t = 0)]
        alpha: usize,
        #[arg(long, default_value_t = 1)]
        beta: usize,
    },
    /// Whether an operator commutes with the collective set and preserves every block.
    Compat {
        /// xbar | ybar | zbar | j2 | i2:a,b | i3:a,b,c | i4:a,b,c | s:j | local:j,alpha
        #[arg(long, default_value = "xbar")]
        op: OpSpec,
        #[arg(long, default_value_t = DEFAULT_DFS_CLUSTER_TOL)]
        cluster_tol: f64,
    },
}

fn run(cli: Cli) -> Result<(), Failure> {
    let cfg = RunConfig::new(cli.d, cli.n, cli.tol, cli.format, cli.seed, cli.out)?;
    let report = match &cli.command {
        Command::Basis => commands::basis(&cfg)?,
        Command::Structure { tensor, full } => commands::structure(&cfg, *tensor, *full)?,
        Command::Verify => commands::verify(&cfg)?,
        Command::Collective { summary } => commands::collective(&cfg, *summary)?,
        Command::Invariants { kinds, completeness } => commands::invariants(&cfg, kinds, *completeness)?,
        Command::Dfs { cluster_tol } => commands::dfs(&cfg, *cluster_tol)?,
        Command::Exchange { alpha, beta } => commands::exchange(&cfg, *alpha, *beta)?,
        Command::Compat { op, cluster_tol } => commands::compat(&cfg, op, *cluster_tol)?,
    };
    report.emit(cfg.format, cfg.output_path.as_deref())?;
    match report.failure {
        Some(f) => Err(f),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            f.exit_code()
        }
    }
}
