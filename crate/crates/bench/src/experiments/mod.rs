//! The experiments behind the CLI subcommands. Each takes a resolved
//! [`ExperimentConfig`] and returns a [`Report`] whose checks use the
//! thresholds from the config.

mod compare;
mod ensemble;
mod laplace;
mod ldp;
mod lognormal;
mod poisson;
mod rates;
mod reduction;

use std::time::Instant;

use ams_core::stream::substream;

pub use compare::compare;
pub use ensemble::ensemble_summary;
pub use laplace::laplace_verify;
pub use ldp::ldp_slope;
pub use lognormal::lognormal;
pub use poisson::poisson_gof;
pub use rates::rate_eval;
pub use reduction::exponential_reduction;

use crate::config::{ExperimentConfig, ExperimentKind};
use crate::ensemble::replicate;
use crate::estimators::{Draw, Sampler};
use crate::error::Result;
use crate::report::Report;

pub fn run(config: &ExperimentConfig) -> Result<Report> {
    config.validate()?;
    let start = Instant::now();
    let mut report = match config.experiment {
        ExperimentKind::LdpSlope => ldp_slope(config)?,
        ExperimentKind::Unbiasedness | ExperimentKind::Clt => ensemble_summary(config)?,
        ExperimentKind::PoissonGof => poisson_gof(config)?,
        ExperimentKind::Lognormal => lognormal(config)?,
        ExperimentKind::LaplaceVerify => laplace_verify(config)?,
        ExperimentKind::Compare => compare(config)?,
        ExperimentKind::Reduction => exponential_reduction(config)?,
        ExperimentKind::RateEval => rate_eval(config)?,
    };
    report.metadata.wall_clock_seconds = start.elapsed().as_secs_f64();
    Ok(report)
}

/// `reps` draws, replication `i` on substream `i` of `seed`.
pub(crate) fn draws(config: &ExperimentConfig, sampler: &Sampler, seed: u64, reps: u64) -> Result<Vec<Draw>> {
    replicate(reps, config.workers(), |i| sampler.draw(&mut substream(seed, i)))
}

/// `p̂ ≥ p + ε` and `p̂ ≤ p − ε`, with a relative slack of `1e−12` so that
/// lattice values of the estimator landing on `p ± ε` count as in the tail.
pub(crate) fn tail_counts(draws: &[Draw], p: f64, eps: f64) -> (u64, u64) {
    let slack = 1e-12 * p.max(eps);
    let upper = draws.iter().filter(|d| d.estimate >= p + eps - slack).count() as u64;
    let lower = draws.iter().filter(|d| d.estimate <= p - eps + slack).count() as u64;
    (upper, lower)
}

pub(crate) fn mean_iterations(draws: &[Draw]) -> f64 {
    draws.iter().map(|d| d.iterations as f64).sum::<f64>() / draws.len() as f64
}
