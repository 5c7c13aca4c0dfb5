use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use subdiffusion::cq::cq_weights;
use subdiffusion::error::Error;
use subdiffusion::exec::Execution;
use subdiffusion::harness::{
    run_experiment, run_oracle_check, selftest, ExperimentConfig, ExperimentReport, NormKind,
    OutputFormat, SpaceKind,
};

/// Second-order time stepping for subdiffusion with singular sources.
#[derive(Parser)]
#[command(name = "subdiffusion", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Self-convergence sweep for an experiment config.
    Run(RunArgs),
    /// Direct errors against the exact solution of a separable config.
    Oracle(RunArgs),
    /// Print the fractional BDF2 weights w_0..w_n.
    Weights { alpha: f64, n: usize },
    /// Run the quick invariant suite.
    Selftest,
}

#[derive(Args)]
struct RunArgs {
    config: PathBuf,
    /// Directory for CSV output.
    #[arg(long, default_value = "results")]
    out: PathBuf,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Apply the Corr-BDF2 correction at every step.
    #[arg(long)]
    corr_every_step: bool,
    /// Gauss-Jacobi nodes for the source integrals.
    #[arg(long)]
    nodes: Option<usize>,
    #[arg(long, value_enum)]
    space: Option<SpaceArg>,
    /// Chebyshev degree or finite-difference interior points.
    #[arg(long)]
    res: Option<usize>,
    #[arg(long, value_enum)]
    norm: Option<NormArg>,
    /// Run the sweep on one thread.
    #[arg(long)]
    sequential: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Table,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum NormArg {
    Nodal,
    L2,
}

#[derive(Clone, Copy, ValueEnum)]
enum SpaceArg {
    Fd,
    Cheb,
}

fn load(args: &RunArgs) -> Result<ExperimentConfig, Error> {
    let mut cfg = ExperimentConfig::from_path(&args.config)?;
    if let Some(f) = args.format {
        cfg.format = match f {
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::Table => OutputFormat::Table,
            FormatArg::Both => OutputFormat::Both,
        };
    }
    if args.corr_every_step {
        cfg.corr_every_step = true;
    }
    if let Some(m) = args.nodes {
        cfg.quadrature_nodes = m;
    }
    if let Some(s) = args.space {
        cfg.space = match s {
            SpaceArg::Fd => SpaceKind::Fd,
            SpaceArg::Cheb => SpaceKind::Cheb,
        };
    }
    if let Some(n) = args.norm {
        cfg.norm = match n {
            NormArg::Nodal => NormKind::Nodal,
            NormArg::L2 => NormKind::L2,
        };
    }
    if let Some(r) = args.res {
        cfg.resolution = r;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn emit(report: &ExperimentReport, format: OutputFormat, out: &Path) -> Result<(), Error> {
    if matches!(format, OutputFormat::Table | OutputFormat::Both) {
        print!("{}", report.to_table());
    }
    if matches!(format, OutputFormat::Csv | OutputFormat::Both) {
        let path = report.write_csv(out)?;
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config { .. }
        | Error::InvalidParameter { .. }
        | Error::IncompatibleScheme { .. }
        | Error::Io(_) => 2,
        _ => 3,
    }
}

/// Returns the process exit code on success paths.
fn run(cli: Cli) -> Result<u8, Error> {
    match cli.command {
        Command::Run(args) => {
            let cfg = load(&args)?;
            let exec = if args.sequential {
                Execution::Sequential
            } else {
                Execution::default()
            };
            let report = run_experiment(&cfg, exec)?;
            emit(&report, cfg.format, &args.out)?;
            Ok(0)
        }
        Command::Oracle(args) => {
            let cfg = load(&args)?;
            let exec = if args.sequential {
                Execution::Sequential
            } else {
                Execution::default()
            };
            let mut report = run_oracle_check(&cfg, exec)?;
            report.name = format!("{}-oracle", report.name);
            emit(&report, cfg.format, &args.out)?;
            Ok(0)
        }
        Command::Weights { alpha, n } => {
            if !alpha.is_finite() {
                return Err(Error::InvalidParameter {
                    name: "alpha",
                    reason: "must be finite".into(),
                });
            }
            for (j, w) in cq_weights(alpha, n).weights.iter().enumerate() {
                println!("{j} {w:.17e}");
            }
            Ok(0)
        }
        Command::Selftest => {
            let results = selftest();
            for r in &results {
                println!(
                    "{} {:<28} {}",
                    if r.passed { "PASS" } else { "FAIL" },
                    r.name,
                    r.detail
                );
            }
            Ok(if results.iter().all(|r| r.passed) {
                0
            } else {
                3
            })
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
