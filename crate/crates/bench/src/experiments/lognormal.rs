use ams_core::math::exp;
use statrs::distribution::{ContinuousCDF, LogNormal};

use super::draws;
use crate::config::{EstimatorKind, ExperimentConfig};
use crate::error::{config_error, BenchError, Result};
use crate::estimators::Sampler;
use crate::report::Report;
use crate::stats::{ks_one_sample, Moments};

/// Law of `p̂^{n,1} / p` when `−log p = σ² n`, against its log-normal limit
/// with log-mean `−σ²/2` and log-sd `σ`.
///
/// Every cell uses the same substreams (replication `i` on stream `i` of the
/// master seed), so the KS distances along the grid share their sampling
/// noise and their trend reflects the approach to the limit.
pub fn lognormal(config: &ExperimentConfig) -> Result<Report> {
    if config.estimator != EstimatorKind::Ams {
        return Err(config_error!("lognormal applies to the AMS estimator only"));
    }
    let sigma = config.sigma;
    let limit = LogNormal::new(-0.5 * sigma * sigma, sigma).map_err(|e| BenchError::Numerical(e.to_string()))?;
    let limit_tail = limit.sf(1.0 + config.eps) + if config.eps < 1.0 { limit.cdf(1.0 - config.eps) } else { 0.0 };
    let mut report = Report::new(
        "lognormal",
        config.seed,
        &[
            "n", "log_p", "reps", "engine", "mean_ratio", "std_error", "ks_distance", "ks_p_value", "tail_freq",
            "lognormal_tail",
        ],
    );
    let mut distances = vec![];
    for &n in &config.n {
        let log_p = -sigma * sigma * n as f64;
        let threshold = -log_p;
        let sampler = Sampler::new(EstimatorKind::Ams, config.engine, config.dist, n, 1, 0, threshold, exp(log_p))?;
        let out = draws(config, &sampler, config.seed, config.reps)?;
        let ratios: Vec<f64> = out.iter().map(|d| exp(d.log_estimate - log_p)).collect();
        let m = Moments::of(&ratios);
        let (d, pv) = ks_one_sample(&ratios, |x| limit.cdf(x));
        let tail = ratios.iter().filter(|r| (*r - 1.0).abs() >= config.eps).count() as f64 / ratios.len() as f64;
        distances.push(d);
        let engine = format!("{:?}", sampler.engine()).to_lowercase();
        report.push_row(vec![
            n.into(),
            log_p.into(),
            config.reps.into(),
            engine.as_str().into(),
            m.mean.into(),
            m.std_error().into(),
            d.into(),
            pv.into(),
            tail.into(),
            limit_tail.into(),
        ]);
        let z = (m.mean - 1.0) / m.std_error();
        report.check(
            format!("mean ratio n={n}"),
            z.abs() < config.se_multiplier,
            format!("mean p̂/p {:.5}, |z| = {:.3} (limit {})", m.mean, z.abs(), config.se_multiplier),
        );
    }
    let decreasing = distances.windows(2).all(|w| w[1] < w[0]);
    report.check("ks decreasing", decreasing, format!("KS distances {distances:.5?}"));
    let last = *distances.last().expect("n grid is non-empty");
    report.check(
        "ks final",
        last < config.ks_tolerance,
        format!("KS distance {last:.5} at n = {} (limit {})", config.n[config.n.len() - 1], config.ks_tolerance),
    );
    Ok(report)
}
