//! One draw of each estimator for a configured cell.

use ams_core::baselines::{crude_mc, optimal_levels, run_fixed_splitting, FixedLevelPlan};
use ams_core::dist::ContinuousLaw;
use ams_core::math::{ln, ln_1p};
use ams_core::splitting::{run_ams, AmsConfig};
use ams_core::stream::{open_unit, Substream};
use statrs::distribution::{DiscreteCDF, Poisson};

use crate::config::{DistKind, EngineKind, EstimatorKind};
use crate::error::{config_error, BenchError, Result};

/// Smallest `j` with `P(J ≤ j) ≥ u`, searched inside `mean ± 12 sd` (the
/// library's generic search starts from `[0, 2^m]`, which costs twice as many
/// CDF evaluations at large means). The upper half is searched on the
/// survival function to keep its resolution.
pub fn poisson_quantile(law: &Poisson, u: f64) -> u64 {
    let mean = law.lambda();
    let spread = 12.0 * mean.sqrt() + 10.0;
    let mut lo = (mean - spread).max(0.0).floor() as u64;
    let mut hi = (mean + spread).ceil() as u64;
    let upper = u > 0.5;
    let reached = |j: u64| if upper { law.sf(j) <= 1.0 - u } else { law.cdf(j) >= u };
    if lo > 0 && reached(lo) || !reached(hi) {
        return law.inverse_cdf(u);
    }
    if reached(lo) {
        return lo;
    }
    // invariant: !reached(lo), reached(hi)
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if reached(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Draw {
    pub estimate: f64,
    pub log_estimate: f64,
    /// AMS iterations; zero for the other estimators.
    pub iterations: u64,
}

/// Everything needed to draw one estimate in a cell.
pub struct Sampler {
    estimator: EstimatorKind,
    engine: EngineKind,
    n: u64,
    k: u64,
    law: Box<dyn ContinuousLaw + Send + Sync>,
    threshold: f64,
    p: f64,
    plan: Option<FixedLevelPlan>,
    poisson: Option<Poisson>,
}

impl Sampler {
    pub fn new(
        estimator: EstimatorKind,
        engine: EngineKind,
        dist: DistKind,
        n: u64,
        k: u64,
        levels: u32,
        threshold: f64,
        p: f64,
    ) -> Result<Self> {
        let law = dist.law();
        let mut plan = None;
        let mut poisson = None;
        match estimator {
            EstimatorKind::Ams => {
                AmsConfig::new(n as usize, k as usize, threshold)?;
                if engine == EngineKind::Poisson {
                    if k != 1 || dist != DistKind::Exponential {
                        return Err(config_error!("the Poisson engine needs k = 1 and the exponential law"));
                    }
                    poisson = Some(
                        Poisson::new(n as f64 * threshold)
                            .map_err(|e| BenchError::Numerical(format!("Poisson law: {e}")))?,
                    );
                }
            }
            EstimatorKind::Crude => {
                if n == 0 {
                    return Err(config_error!("crude Monte Carlo needs n >= 1"));
                }
            }
            EstimatorKind::Fixed => plan = Some(optimal_levels(law.as_ref(), threshold, levels as usize)?),
        }
        Ok(Self { estimator, engine, n, k, law, threshold, p, plan, poisson })
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// Expected number of sampling calls per run: `n` for crude MC,
    /// `N n` for fixed levels, `n + k · (−n log p / k)` for AMS.
    pub fn expected_work(&self) -> f64 {
        let n = self.n as f64;
        match self.estimator {
            EstimatorKind::Crude => n,
            EstimatorKind::Fixed => n * self.plan.as_ref().map_or(0, |p| p.len()) as f64,
            EstimatorKind::Ams => n - n * ln(self.p),
        }
    }

    pub fn draw(&self, rng: &mut Substream) -> Result<Draw> {
        match self.estimator {
            EstimatorKind::Ams => match &self.poisson {
                Some(law) => {
                    let iterations = poisson_quantile(law, open_unit(rng));
                    let log_estimate = iterations as f64 * ln_1p(-1.0 / self.n as f64);
                    Ok(Draw { estimate: log_estimate.exp(), log_estimate, iterations })
                }
                None => {
                    let config = AmsConfig::new(self.n as usize, self.k as usize, self.threshold)?
                        .with_probability_guess(self.p);
                    let r = run_ams(&config, self.law.as_ref(), rng)?;
                    Ok(Draw { estimate: r.estimate, log_estimate: r.log_estimate, iterations: r.iterations })
                }
            },
            EstimatorKind::Crude => {
                let v = crude_mc(self.n as usize, self.law.as_ref(), self.threshold, rng)?;
                Ok(Draw { estimate: v, log_estimate: ln(v), iterations: 0 })
            }
            EstimatorKind::Fixed => {
                let plan = self.plan.as_ref().expect("fixed-level plan is built in new");
                let out = run_fixed_splitting(self.n as usize, plan, self.law.as_ref(), rng)?;
                Ok(Draw { estimate: out.estimate, log_estimate: ln(out.estimate), iterations: 0 })
            }
        }
    }

    pub fn engine(&self) -> EngineKind {
        self.engine
    }
}
