use ams_core::rates::{ams_rate, crude_rate, fixed_level_upper_bound, log_estimator_rate, rate_gap, rate_gap_dp};

use crate::config::ExperimentConfig;
use crate::error::{config_error, Result};
use crate::report::{Cell, Report};

/// Rate functions on the `y` grid; the fixed-level upper bound when
/// `levels > 0`.
pub fn rate_eval(config: &ExperimentConfig) -> Result<Report> {
    let Some(p) = config.p else {
        return Err(config_error!("rate-eval needs p"));
    };
    let mut report = Report::new(
        "rate-eval",
        config.seed,
        &["y", "p", "ams_rate", "log_estimator_rate", "crude_rate", "rate_gap", "rate_gap_dp", "levels", "fixed_upper_bound"],
    );
    for &y in &config.y {
        let bound: Cell = if config.levels > 0 {
            fixed_level_upper_bound(y, p, config.levels)?.to_f64().into()
        } else {
            f64::NAN.into()
        };
        report.push_row(vec![
            y.into(),
            p.into(),
            ams_rate(y, p)?.to_f64().into(),
            log_estimator_rate(y.ln(), p)?.to_f64().into(),
            crude_rate(y, p)?.to_f64().into(),
            rate_gap(y, p)?.into(),
            rate_gap_dp(y, p)?.into(),
            config.levels.into(),
            bound,
        ]);
    }
    Ok(report)
}
