use ams_core::math::ln;
use ams_core::stream::derive_seed;

use super::{draws, mean_iterations};
use crate::config::{EstimatorKind, ExperimentConfig};
use crate::error::{config_error, Result};
use crate::estimators::Sampler;
use crate::report::Report;
use crate::stats::poisson_chi_square;

/// Expected count below which adjacent values are pooled.
const MIN_EXPECTED: f64 = 5.0;

/// Chi-square test of the iteration count of AMS(n, 1) against
/// `Poisson(−n log p)`, with the mean checked separately.
pub fn poisson_gof(config: &ExperimentConfig) -> Result<Report> {
    if config.estimator != EstimatorKind::Ams {
        return Err(config_error!("poisson-gof applies to the AMS estimator only"));
    }
    let (threshold, p) = config.target()?;
    let mut report = Report::new(
        "poisson-gof",
        config.seed,
        &["n", "p", "reps", "mean_iterations", "poisson_mean", "mean_z", "chi_square", "dof", "p_value", "bins"],
    );
    for (cell, &n) in config.n.iter().enumerate() {
        let sampler = Sampler::new(EstimatorKind::Ams, config.engine, config.dist, n, 1, 0, threshold, p)?;
        let out = draws(config, &sampler, derive_seed(config.seed, cell as u64), config.reps)?;
        let counts: Vec<u64> = out.iter().map(|d| d.iterations).collect();
        let lambda = -(n as f64) * ln(p);
        let mean = mean_iterations(&out);
        let z = (mean - lambda) / (lambda / config.reps as f64).sqrt();
        let test = poisson_chi_square(&counts, lambda, MIN_EXPECTED)?;
        report.push_row(vec![
            n.into(),
            p.into(),
            config.reps.into(),
            mean.into(),
            lambda.into(),
            z.into(),
            test.statistic.into(),
            test.dof.into(),
            test.p_value.into(),
            test.bin_edges.len().into(),
        ]);
        report.check(
            format!("poisson law n={n}"),
            test.p_value > config.alpha,
            format!("chi-square {:.2} on {} dof, p-value {:.4} (alpha {})", test.statistic, test.dof, test.p_value, config.alpha),
        );
        report.check(
            format!("poisson mean n={n}"),
            z.abs() < config.se_multiplier,
            format!("mean {mean:.4} vs {lambda:.4}, |z| = {:.3} (limit {})", z.abs(), config.se_multiplier),
        );
    }
    Ok(report)
}
