//! Comparison estimators: crude Monte Carlo and fixed-level splitting.

use alloc::vec::Vec;

use rand_core::RngCore;

use crate::dist::{sample_above, ContinuousLaw};
use crate::error::domain;
use crate::math::exp;
use crate::stream::open_unit;
use crate::Result;

/// `(1/n) #{X_m > a}` over `n` i.i.d. draws.
pub fn crude_mc<D, R>(n: usize, law: &D, threshold: f64, rng: &mut R) -> Result<f64>
where
    D: ContinuousLaw + ?Sized,
    R: RngCore + ?Sized,
{
    if n == 0 {
        return Err(domain!("crude Monte Carlo needs at least one sample"));
    }
    let hits = (0..n).filter(|_| law.quantile(open_unit(rng)) > threshold).count();
    Ok(hits as f64 / n as f64)
}

/// Levels `a_0 < a_1 < … < a_N = a` for the non-adaptive splitting estimator.
#[derive(Debug, Clone, PartialEq)]
pub struct FixedLevelPlan {
    start: f64,
    levels: Vec<f64>,
    per_level_target: Option<f64>,
}

impl FixedLevelPlan {
    /// `levels` are `a_1, …, a_N`; `start` is `a_0`.
    pub fn new(start: f64, levels: Vec<f64>) -> Result<Self> {
        if levels.is_empty() {
            return Err(domain!("a level plan needs at least one level"));
        }
        let mut previous = start;
        for &level in &levels {
            if !(level > previous) || !level.is_finite() {
                return Err(domain!("levels must be finite and strictly increasing from {start}"));
            }
            previous = level;
        }
        Ok(Self { start, levels, per_level_target: None })
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn threshold(&self) -> f64 {
        self.levels[self.levels.len() - 1]
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `p^{1/N}` for plans built by [`optimal_levels`].
    pub fn per_level_target(&self) -> Option<f64> {
        self.per_level_target
    }
}

/// The plan with equal conditional probabilities `p^{1/N}`:
/// `a_i = F⁻¹(1 − p^{i/N})`, with `a_N = a` exactly.
pub fn optimal_levels<D: ContinuousLaw + ?Sized>(law: &D, threshold: f64, stages: usize) -> Result<FixedLevelPlan> {
    if stages == 0 {
        return Err(domain!("need at least one stage"));
    }
    let log_p = law.log_survival(threshold);
    if !(log_p < 0.0 && log_p > f64::NEG_INFINITY) {
        return Err(domain!("P(X > {threshold}) must lie in (0, 1)"));
    }
    let mut levels = Vec::with_capacity(stages);
    for i in 1..stages {
        let level = law.inverse_log_survival(log_p * i as f64 / stages as f64);
        if !level.is_finite() {
            return Err(domain!("quantile solver failed at stage {i}"));
        }
        levels.push(level);
    }
    levels.push(threshold);
    let mut plan = FixedLevelPlan::new(0.0, levels)?;
    plan.per_level_target = Some(exp(log_p / stages as f64));
    Ok(plan)
}

/// One draw of the fixed-level estimator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedLevelOutcome {
    pub estimate: f64,
    /// First stage (1-based) with no success, if any. Later stages are not sampled.
    pub extinct_at: Option<usize>,
}

/// `∏_i p̄^{(i)}` where `p̄^{(i)}` is the fraction of `n` draws from
/// `L(X | X > a_{i−1})` that exceed `a_i`.
pub fn run_fixed_splitting<D, R>(n: usize, plan: &FixedLevelPlan, law: &D, rng: &mut R) -> Result<FixedLevelOutcome>
where
    D: ContinuousLaw + ?Sized,
    R: RngCore + ?Sized,
{
    if n == 0 {
        return Err(domain!("fixed-level splitting needs at least one sample per stage"));
    }
    let mut floor = plan.start;
    let mut estimate = 1.0;
    for (stage, &level) in plan.levels.iter().enumerate() {
        let mut hits = 0usize;
        for _ in 0..n {
            if sample_above(law, floor, rng)? > level {
                hits += 1;
            }
        }
        if hits == 0 {
            return Ok(FixedLevelOutcome { estimate: 0.0, extinct_at: Some(stage + 1) });
        }
        estimate *= hits as f64 / n as f64;
        floor = level;
    }
    Ok(FixedLevelOutcome { estimate, extinct_at: None })
}
