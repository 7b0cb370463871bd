use ams_core::stream::derive_seed;

use super::draws;
use crate::config::{DistKind, EstimatorKind, ExperimentConfig};
use crate::error::{config_error, Result};
use crate::estimators::Sampler;
use crate::report::Report;
use crate::stats::{ks_two_sample, Moments};

/// Replications used for the coupled comparison.
const COUPLED_REPS: u64 = 1000;

/// AMS estimates under the exponential and the shifted Pareto law at the same
/// target probability: independent samples compared by a two-sample KS test,
/// plus a coupled run (same substreams) whose estimates should coincide.
pub fn exponential_reduction(config: &ExperimentConfig) -> Result<Report> {
    let Some(p) = config.p else {
        return Err(config_error!("reduction needs the target probability p"));
    };
    let k = config.k[0];
    let n = config.n[0];
    let mut report = Report::new(
        "reduction",
        config.seed,
        &["dist", "n", "k", "p", "threshold", "reps", "mean", "std_error", "n_variance"],
    );
    let mut samples = vec![];
    let mut coupled = vec![];
    for (tag, dist) in [DistKind::Exponential, DistKind::Pareto].into_iter().enumerate() {
        let threshold = dist.law().inverse_log_survival(p.ln());
        let sampler = Sampler::new(EstimatorKind::Ams, crate::config::EngineKind::Replica, dist, n, k, 0, threshold, p)?;
        let out = draws(config, &sampler, derive_seed(config.seed, tag as u64), config.reps)?;
        let values: Vec<f64> = out.iter().map(|d| d.estimate).collect();
        let m = Moments::of(&values);
        report.push_row(vec![
            dist.name().into(),
            n.into(),
            k.into(),
            p.into(),
            threshold.into(),
            config.reps.into(),
            m.mean.into(),
            m.std_error().into(),
            (n as f64 * m.variance).into(),
        ]);
        samples.push(values);
        let same = draws(config, &sampler, derive_seed(config.seed, 99), COUPLED_REPS.min(config.reps))?;
        coupled.push(same);
    }
    let (d, pv) = ks_two_sample(&samples[0], &samples[1]);
    report.push_summary("ks_distance", d);
    report.push_summary("ks_p_value", pv);
    let agree = coupled[0]
        .iter()
        .zip(&coupled[1])
        .filter(|(a, b)| a.iterations == b.iterations && (a.estimate - b.estimate).abs() <= 1e-12 * a.estimate)
        .count();
    report.push_summary("coupled_agreement", agree as f64 / coupled[0].len() as f64);
    report.check(
        "same law",
        pv > config.alpha,
        format!("two-sample KS distance {d:.5}, p-value {pv:.4} (alpha {})", config.alpha),
    );
    Ok(report)
}
