use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use idrig::cli::{run, Command, Options};
use idrig::mesh::Scheme;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Cmd {
    /// ρ, j and the DEC margin
    Constraints,
    /// Rigidity identities and the Hodge/TT pipeline
    Rigidity,
    /// Killing development Einstein table and DEC
    KillingDev,
    /// pp-wave Einstein formula and induction round trip
    Ppwave,
    /// Re-run one residual at N, 2N, 4N and fit the order
    Convergence,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SchemeArg {
    Fd2,
    Fd4,
    Spectral,
}

/// Numerical checks of rigidity identities for initial data sets.
#[derive(Debug, Parser)]
#[command(name = "idrig", version)]
struct Args {
    #[arg(value_enum)]
    command: Cmd,
    /// Scene file
    scene: PathBuf,
    /// Default tolerance for every verdict
    #[arg(long)]
    tol: Option<f64>,
    /// Derivative scheme (fd2/fd4: all axes, spectral: leaf axes)
    #[arg(long, value_enum)]
    scheme: Option<SchemeArg>,
    /// Report path (stdout if omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Directory for CSV field dumps
    #[arg(long)]
    dump_fields: Option<PathBuf>,
    /// Seed for the random TT self-test
    #[arg(long)]
    seed: Option<u64>,
    /// Residual re-run by `convergence`, e.g. rigidity.normal_parallel.max
    #[arg(long)]
    check: Option<String>,
    /// Causal directions sampled by DEC checks
    #[arg(long)]
    samples: Option<usize>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args = Args::parse();
    let command = match args.command {
        Cmd::Constraints => Command::Constraints,
        Cmd::Rigidity => Command::Rigidity,
        Cmd::KillingDev => Command::KillingDev,
        Cmd::Ppwave => Command::PpWave,
        Cmd::Convergence => Command::Convergence,
    };
    let opts = Options {
        tol: args.tol,
        scheme: args.scheme.map(|s| match s {
            SchemeArg::Fd2 => Scheme::Fd2,
            SchemeArg::Fd4 => Scheme::Fd4,
            SchemeArg::Spectral => Scheme::Spectral,
        }),
        out: args.out,
        dump_fields: args.dump_fields,
        seed: args.seed,
        check: args.check,
        samples: args.samples,
    };
    ExitCode::from(run(command, &args.scene, &opts) as u8)
}
