use std::process::ExitCode;

use ams_bench::config::{EstimatorKind, ExperimentConfig, ExperimentKind, Overrides};
use ams_bench::experiments;
use ams_bench::Result;
use clap::{Args, Parser, Subcommand};

/// Adaptive multilevel splitting experiments.
#[derive(Debug, Parser)]
#[command(name = "ams", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    #[command(flatten)]
    overrides: Overrides,
    /// Exit with status 4 if any statistical check fails.
    #[arg(long)]
    check: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// AMS ensemble: mean, standard error, n·Var per (n, k) cell.
    AmsRun(Common),
    /// Crude Monte Carlo ensemble.
    McRun(Common),
    /// Fixed-level splitting ensemble with N optimally placed levels.
    FixedRun(Common),
    /// Ensemble with the n·Var limit check.
    Clt(Common),
    /// Rate functions on a grid of y values.
    RateEval(Common),
    /// Tail frequencies and fitted decay rate along the n grid.
    LdpSlope(Common),
    /// Chi-square test of the AMS(n, 1) iteration count against its Poisson law.
    PoissonGof(Common),
    /// Law of p̂/p against its log-normal limit when −log p = σ² n.
    Lognormal(Common),
    /// AMS vs crude MC vs fixed levels on the same target.
    Compare(Common),
    /// Exponential vs shifted-Pareto AMS estimates at matched p.
    Reduction(Common),
    /// Characteristic-root solution of the Laplace transform and its limits.
    LaplaceVerify(Common),
}

fn resolve(command: &Command) -> Result<(ExperimentConfig, bool)> {
    let (kind, estimator, common) = match command {
        Command::AmsRun(c) => (ExperimentKind::Unbiasedness, Some(EstimatorKind::Ams), c),
        Command::McRun(c) => (ExperimentKind::Unbiasedness, Some(EstimatorKind::Crude), c),
        Command::FixedRun(c) => (ExperimentKind::Unbiasedness, Some(EstimatorKind::Fixed), c),
        Command::Clt(c) => (ExperimentKind::Clt, None, c),
        Command::RateEval(c) => (ExperimentKind::RateEval, None, c),
        Command::LdpSlope(c) => (ExperimentKind::LdpSlope, None, c),
        Command::PoissonGof(c) => (ExperimentKind::PoissonGof, None, c),
        Command::Lognormal(c) => (ExperimentKind::Lognormal, None, c),
        Command::Compare(c) => (ExperimentKind::Compare, None, c),
        Command::Reduction(c) => (ExperimentKind::Reduction, None, c),
        Command::LaplaceVerify(c) => (ExperimentKind::LaplaceVerify, None, c),
    };
    let mut overrides = common.overrides.clone();
    if let Some(e) = estimator {
        if overrides.estimator.is_some_and(|o| o != e) {
            return Err(ams_bench::BenchError::Config(format!(
                "this subcommand runs the {} estimator",
                e.name()
            )));
        }
        overrides.estimator = Some(e);
    }
    Ok((ExperimentConfig::resolve(kind, &overrides)?, common.check))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = resolve(&cli.command).and_then(|(config, check)| {
        let report = experiments::run(&config)?;
        report.emit(&config)?;
        eprint!("{}", report.describe());
        Ok(!check || report.all_passed())
    });
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(4),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
