use ams_core::stream::derive_seed;

use super::ensemble::variance_limit;
use super::{draws, tail_counts};
use crate::config::{EstimatorKind, ExperimentConfig};
use crate::error::Result;
use crate::estimators::Sampler;
use crate::report::Report;
use crate::stats::Moments;

/// AMS, crude Monte Carlo and fixed-level splitting on the same target, for
/// every `n`: means, `n · Var`, tail frequencies at `±ε`, expected work.
pub fn compare(config: &ExperimentConfig) -> Result<Report> {
    let (threshold, p) = config.target()?;
    let k = config.k[0];
    let mut report = Report::new(
        "compare",
        config.seed,
        &[
            "estimator", "n", "k", "levels", "reps", "mean", "std_error", "n_variance", "variance_limit", "upper_count",
            "upper_freq", "lower_count", "lower_freq", "expected_work",
        ],
    );
    let estimators = [EstimatorKind::Ams, EstimatorKind::Crude, EstimatorKind::Fixed];
    for (i, &n) in config.n.iter().enumerate() {
        let mut upper_counts = [0u64; 3];
        let mut n_vars = [0f64; 3];
        for (j, &estimator) in estimators.iter().enumerate() {
            let kk = if estimator == EstimatorKind::Ams { k } else { 0 };
            let levels = if estimator == EstimatorKind::Fixed { config.levels } else { 0 };
            let sampler = Sampler::new(estimator, config.engine, config.dist, n, kk, config.levels, threshold, p)?;
            let seed = derive_seed(config.seed, (i * estimators.len() + j) as u64);
            let out = draws(config, &sampler, seed, config.reps)?;
            let values: Vec<f64> = out.iter().map(|d| d.estimate).collect();
            let m = Moments::of(&values);
            let (upper, lower) = tail_counts(&out, p, config.eps);
            upper_counts[j] = upper;
            n_vars[j] = n as f64 * m.variance;
            let reps = config.reps as f64;
            report.push_row(vec![
                estimator.name().into(),
                n.into(),
                kk.into(),
                levels.into(),
                config.reps.into(),
                m.mean.into(),
                m.std_error().into(),
                n_vars[j].into(),
                variance_limit(estimator, p, config.levels).into(),
                upper.into(),
                (upper as f64 / reps).into(),
                lower.into(),
                (lower as f64 / reps).into(),
                sampler.expected_work().into(),
            ]);
        }
        if n >= config.dominance_min_n {
            report.check(
                format!("tail dominance n={n}"),
                upper_counts[0] < upper_counts[1],
                format!("AMS upper-tail count {} vs crude {}", upper_counts[0], upper_counts[1]),
            );
        }
        let rel = (n_vars[2] - n_vars[0]).abs() / n_vars[0];
        report.check(
            format!("fixed vs AMS variance n={n}"),
            rel < config.variance_tolerance,
            format!(
                "n·Var fixed(N={}) {:.5e} vs AMS {:.5e}: relative gap {rel:.4} (limit {})",
                config.levels, n_vars[2], n_vars[0], config.variance_tolerance
            ),
        );
    }
    Ok(report)
}
