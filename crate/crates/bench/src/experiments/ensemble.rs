use ams_core::math::{exp_m1, ln};
use ams_core::stream::derive_seed;

use super::{draws, mean_iterations};
use crate::config::{EstimatorKind, ExperimentConfig, ExperimentKind};
use crate::estimators::Sampler;
use crate::error::Result;
use crate::report::Report;
use crate::stats::Moments;

/// Limit of `n · Var(p̂)` as `n → ∞`: `−p² log p` (AMS), `p(1 − p)` (crude),
/// `p² N (p^{−1/N} − 1)` (fixed levels).
pub fn variance_limit(estimator: EstimatorKind, p: f64, levels: u32) -> f64 {
    match estimator {
        EstimatorKind::Ams => -p * p * ln(p),
        EstimatorKind::Crude => p * (1.0 - p),
        EstimatorKind::Fixed => p * p * levels as f64 * exp_m1(-ln(p) / levels as f64),
    }
}

/// Mean, standard error and `n · Var` of the configured estimator for every
/// `(n, k)` cell; checks unbiasedness, and for `clt` the variance limit.
pub fn ensemble_summary(config: &ExperimentConfig) -> Result<Report> {
    let (threshold, p) = config.target()?;
    let mut report = Report::new(
        config.experiment.name(),
        config.seed,
        &[
            "estimator", "dist", "n", "k", "levels", "p", "threshold", "reps", "mean", "std_error", "z_score",
            "n_variance", "variance_limit", "variance_rel_error", "mean_iterations", "expected_work",
        ],
    );
    let ks: Vec<u64> = if config.estimator == EstimatorKind::Ams { config.k.clone() } else { vec![0] };
    let limit = variance_limit(config.estimator, p, config.levels);
    let mut cell = 0u64;
    for &n in &config.n {
        for &k in &ks {
            let sampler = Sampler::new(config.estimator, config.engine, config.dist, n, k, config.levels, threshold, p)?;
            let out = draws(config, &sampler, derive_seed(config.seed, cell), config.reps)?;
            cell += 1;
            let values: Vec<f64> = out.iter().map(|d| d.estimate).collect();
            let m = Moments::of(&values);
            let se = m.std_error();
            let z = (m.mean - p) / se;
            let n_var = n as f64 * m.variance;
            let rel = (n_var - limit).abs() / limit;
            let levels = if config.estimator == EstimatorKind::Fixed { config.levels } else { 0 };
            report.push_row(vec![
                config.estimator.name().into(),
                config.dist.name().into(),
                n.into(),
                k.into(),
                levels.into(),
                p.into(),
                threshold.into(),
                config.reps.into(),
                m.mean.into(),
                se.into(),
                z.into(),
                n_var.into(),
                limit.into(),
                rel.into(),
                mean_iterations(&out).into(),
                sampler.expected_work().into(),
            ]);
            let label = format!("{} n={n} k={k}", config.estimator.name());
            report.check(
                format!("unbiased {label}"),
                z.abs() < config.se_multiplier || (se == 0.0 && m.mean == p),
                format!("mean {:.6e}, p {:.6e}, |z| = {:.3} (limit {})", m.mean, p, z.abs(), config.se_multiplier),
            );
            if config.experiment == ExperimentKind::Clt {
                report.check(
                    format!("variance {label}"),
                    rel < config.variance_tolerance,
                    format!("n·Var {n_var:.6e} vs limit {limit:.6e}: relative error {rel:.4} (limit {})", config.variance_tolerance),
                );
            }
        }
    }
    Ok(report)
}
