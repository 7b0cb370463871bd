use ams_core::rates::{ams_rate, crude_rate, fixed_level_upper_bound};
use ams_core::stream::derive_seed;

use super::{draws, mean_iterations, tail_counts};
use crate::config::{EstimatorKind, ExperimentConfig};
use crate::error::{config_error, Result};
use crate::estimators::Sampler;
use crate::report::{Cell, Report};
use crate::stats::{line_fit, weighted_line_fit, wilson_interval};

/// Normal quantile for the Wilson intervals (two-sided 95%).
const WILSON_Z: f64 = 1.959_963_984_540_054;

/// Upper and lower tail frequencies `P(p̂ − p ≥ ε)`, `P(p̂ − p ≤ −ε)` along the
/// `n` grid, and the decay rate of the upper tail fitted against `n`.
///
/// Two fits of the upper tail are reported. The raw slope regresses
/// `−log q_n` on `n`. The gated fit regresses `−log q_n − ½ log n` on `n`
/// with inverse-variance weights `M q_n / (1 − q_n)`: the tail of a lattice
/// estimator carries a `n^{−1/2}` prefactor, which at these `n` otherwise
/// biases the slope by 20% or more.
pub fn ldp_slope(config: &ExperimentConfig) -> Result<Report> {
    let (threshold, p) = config.target()?;
    let y = p + config.eps;
    if !(y < 1.0) {
        return Err(config_error!("p + eps must stay below 1"));
    }
    let k = config.k[0];
    let rate = match config.estimator {
        EstimatorKind::Ams => ams_rate(y, p)?,
        EstimatorKind::Crude => crude_rate(y, p)?,
        EstimatorKind::Fixed => fixed_level_upper_bound(y, p, config.levels)?,
    }
    .to_f64();
    let mut report = Report::new(
        "ldp-slope",
        config.seed,
        &[
            "estimator", "n", "k", "reps", "upper_count", "upper_freq", "upper_lo", "upper_hi", "upper_rate",
            "lower_count", "lower_freq", "lower_rate", "mean_iterations", "flagged",
        ],
    );
    let reps = config.reps as f64;
    let (mut xs, mut raw, mut corrected, mut weights) = (vec![], vec![], vec![], vec![]);
    for (cell, &n) in config.n.iter().enumerate() {
        let sampler = Sampler::new(config.estimator, config.engine, config.dist, n, k, config.levels, threshold, p)?;
        let out = draws(config, &sampler, derive_seed(config.seed, cell as u64), config.reps)?;
        let (upper, lower) = tail_counts(&out, p, config.eps);
        let q = upper as f64 / reps;
        let ql = lower as f64 / reps;
        let (lo, hi) = wilson_interval(upper, config.reps, WILSON_Z);
        let flagged = upper == 0 || upper == config.reps;
        if !flagged {
            xs.push(n as f64);
            raw.push(-q.ln());
            corrected.push(-q.ln() - 0.5 * (n as f64).ln());
            weights.push(reps * q / (1.0 - q));
        }
        report.push_row(vec![
            config.estimator.name().into(),
            n.into(),
            k.into(),
            config.reps.into(),
            upper.into(),
            q.into(),
            lo.into(),
            hi.into(),
            (-q.ln() / n as f64).into(),
            lower.into(),
            ql.into(),
            (-ql.ln() / n as f64).into(),
            mean_iterations(&out).into(),
            flagged.into(),
        ]);
    }
    report.push_summary("y", y);
    report.push_summary("target_rate", rate);
    if xs.len() < 2 {
        report.check("slope", false, "fewer than two cells with observed exceedances");
        return Ok(report);
    }
    let raw_fit = line_fit(&xs, &raw)?;
    let fit = weighted_line_fit(&xs, &corrected, &weights)?;
    let rel = (fit.slope - rate).abs() / rate;
    report.push_summary("raw_slope", raw_fit.slope);
    report.push_summary("fitted_slope", fit.slope);
    report.push_summary("fitted_slope_std_error", fit.slope_std_error);
    report.push_summary("fitted_slope_rel_error", rel);
    report.push_summary("fitted_cells", Cell::from(xs.len()));
    report.check(
        "slope",
        rel < config.slope_tolerance,
        format!(
            "fitted slope {:.5} (raw {:.5}) vs rate {:.5}: relative error {:.3} (limit {})",
            fit.slope, raw_fit.slope, rate, rel, config.slope_tolerance
        ),
    );
    Ok(report)
}
