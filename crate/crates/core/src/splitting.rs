//! The AMS(n, k; a, x) algorithm and its estimator
//! `p̂ = C · (1 − k/n)^J`.
//!
//! Replicas live in an ordered set keyed by `(value, replica id)`, so each
//! iteration reads the k-th order statistic and swaps out the k lowest
//! replicas in `O(k log n)`. Ties in value (possible only through rounding)
//! are broken by replica id.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::cmp::Ordering;

use rand_core::RngCore;

use crate::dist::{sample_above, ConditionalLaw, ContinuousLaw};
use crate::error::domain;
use crate::math::{ceil, exp, ln, ln_1p, powf};
use crate::{Error, Result};

/// Iteration cap used when no guess of the target probability is available.
pub const DEFAULT_MAX_ITERATIONS: u64 = 100_000_000;

/// Parameters of one AMS run.
#[derive(Debug, Clone, PartialEq)]
pub struct AmsConfig {
    pub n: usize,
    pub k: usize,
    pub threshold: f64,
    pub initial_level: f64,
    pub max_iterations: u64,
    pub record_levels: bool,
}

impl AmsConfig {
    /// `n` replicas, `k` killed per iteration, threshold `a`, started from 0.
    pub fn new(n: usize, k: usize, threshold: f64) -> Result<Self> {
        let config = Self {
            n,
            k,
            threshold,
            initial_level: 0.0,
            max_iterations: DEFAULT_MAX_ITERATIONS,
            record_levels: false,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn with_initial_level(mut self, x: f64) -> Result<Self> {
        self.initial_level = x;
        self.validate()?;
        Ok(self)
    }

    pub fn with_max_iterations(mut self, cap: u64) -> Self {
        self.max_iterations = cap.max(1);
        self
    }

    /// Sets the cap to `100 · ceil(−n log(p) / k)`, a hundred times the
    /// typical iteration count for a target probability `p`.
    pub fn with_probability_guess(mut self, p: f64) -> Self {
        if p > 0.0 && p < 1.0 {
            let typical = ceil(-(self.n as f64) * ln(p) / self.k as f64).max(1.0);
            self.max_iterations = (100.0 * typical) as u64;
        }
        self
    }

    pub fn recording_levels(mut self) -> Self {
        self.record_levels = true;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(domain!("need at least 2 replicas, got n = {}", self.n));
        }
        if self.k < 1 || self.k >= self.n {
            return Err(domain!("k must lie in 1..={}, got {}", self.n - 1, self.k));
        }
        if !self.threshold.is_finite() || self.initial_level.is_nan() {
            return Err(domain!("threshold must be finite, got {}", self.threshold));
        }
        if !(self.initial_level < self.threshold) {
            return Err(domain!(
                "initial level {} must lie below the threshold {}",
                self.initial_level,
                self.threshold
            ));
        }
        Ok(())
    }
}

/// Outcome of one AMS run.
#[derive(Debug, Clone, PartialEq)]
pub struct AmsResult {
    pub n: usize,
    pub k: usize,
    /// Number of completed iterations `J`.
    pub iterations: u64,
    /// Number of terminal replicas at or above the threshold.
    pub surviving: usize,
    pub estimate: f64,
    pub log_estimate: f64,
    /// `Z^1, …, Z^{J+1}` when recording was requested.
    pub levels: Option<Vec<f64>>,
}

impl AmsResult {
    /// `C = surviving / n`.
    pub fn surviving_fraction(&self) -> f64 {
        self.surviving as f64 / self.n as f64
    }
}

/// An estimator value together with its natural logarithm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub ln: f64,
}

/// `C · (1 − k/n)^J` with `C = surviving / n`.
pub fn estimate_from_counts(n: usize, k: usize, iterations: u64, surviving: usize) -> Result<Estimate> {
    if n < 2 || k < 1 || k >= n {
        return Err(domain!("invalid (n, k) = ({n}, {k})"));
    }
    if surviving < n - k + 1 || surviving > n {
        return Err(domain!(
            "surviving count {surviving} outside {}..={n}",
            n - k + 1
        ));
    }
    let ratio = k as f64 / n as f64;
    let c = surviving as f64 / n as f64;
    let ln_value = ln(c) + iterations as f64 * ln_1p(-ratio);
    let value = if iterations <= 1 << 20 {
        c * powf(1.0 - ratio, iterations as f64)
    } else {
        exp(ln_value)
    };
    Ok(Estimate { value, ln: ln_value })
}

#[derive(Debug, Clone, Copy)]
struct Level(f64);

impl PartialEq for Level {
    fn eq(&self, other: &Self) -> bool {
        self.0.total_cmp(&other.0) == Ordering::Equal
    }
}

impl Eq for Level {}

impl PartialOrd for Level {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Level {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Runs AMS(n, k; a, x) once under `law`.
pub fn run_ams<D, R>(config: &AmsConfig, law: &D, rng: &mut R) -> Result<AmsResult>
where
    D: ContinuousLaw + ?Sized,
    R: RngCore + ?Sized,
{
    config.validate()?;
    let AmsConfig { n, k, threshold, initial_level, .. } = *config;
    ConditionalLaw::new(law, initial_level)?;

    let mut replicas: BTreeSet<(Level, u32)> = BTreeSet::new();
    for id in 0..n as u32 {
        replicas.insert((Level(sample_above(law, initial_level, rng)?), id));
    }

    let mut levels = config.record_levels.then(Vec::new);
    let mut killed: Vec<u32> = Vec::with_capacity(k);
    let mut iterations = 0u64;
    let mut previous = initial_level;
    loop {
        let level = replicas
            .iter()
            .nth(k - 1)
            .map(|(v, _)| v.0)
            .ok_or_else(|| Error::Numerical("replica set lost elements".into()))?;
        if let Some(levels) = levels.as_mut() {
            levels.push(level);
        }
        if iterations > 0 && level <= previous {
            return Err(Error::DegenerateLevel { iteration: iterations, level });
        }
        if level >= threshold {
            break;
        }
        if iterations >= config.max_iterations {
            return Err(Error::Nontermination { iterations, level });
        }
        killed.clear();
        for _ in 0..k {
            if let Some((_, id)) = replicas.pop_first() {
                killed.push(id);
            }
        }
        for &id in &killed {
            replicas.insert((Level(sample_above(law, level, rng)?), id));
        }
        previous = level;
        iterations += 1;
    }

    let below = replicas.iter().take_while(|(v, _)| v.0 < threshold).count();
    let surviving = n - below;
    let Estimate { value, ln } = estimate_from_counts(n, k, iterations, surviving)?;
    Ok(AmsResult {
        n,
        k,
        iterations,
        surviving,
        estimate: value,
        log_estimate: ln,
        levels,
    })
}

/// [`run_ams`] returning `ln p̂` alongside the result.
pub fn run_ams_log<D, R>(config: &AmsConfig, law: &D, rng: &mut R) -> Result<(f64, AmsResult)>
where
    D: ContinuousLaw + ?Sized,
    R: RngCore + ?Sized,
{
    let result = run_ams(config, law, rng)?;
    Ok((result.log_estimate, result))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::{Exponential, ShiftedPareto};
    use crate::stream::substream;
    use proptest::prelude::*;

    #[test]
    fn config_validation() {
        assert!(AmsConfig::new(1, 1, 1.0).is_err());
        assert!(AmsConfig::new(10, 0, 1.0).is_err());
        assert!(AmsConfig::new(10, 10, 1.0).is_err());
        assert!(AmsConfig::new(10, 9, 1.0).is_ok());
        assert!(AmsConfig::new(10, 1, 1.0).unwrap().with_initial_level(1.0).is_err());
        assert!(AmsConfig::new(10, 1, f64::NAN).is_err());
        let c = AmsConfig::new(100, 10, 1.0).unwrap().with_probability_guess(0.1);
        assert_eq!(c.max_iterations, 100 * 24);
    }

    #[test]
    fn counts_to_estimate() {
        let e = estimate_from_counts(7, 3, 0, 7).unwrap();
        assert_eq!(e.value, 1.0);
        assert_eq!(e.ln, 0.0);
        let e = estimate_from_counts(100, 10, 22, 95).unwrap();
        assert!((e.value - 0.95 * powf(0.9, 22.0)).abs() < 1e-17);
        assert!(estimate_from_counts(100, 10, 3, 90).is_err());
        assert!(estimate_from_counts(100, 10, 3, 101).is_err());
        for j in [0u64, 1, 17, 500, 10_000] {
            let e = estimate_from_counts(1000, 3, j, 999).unwrap();
            assert!((ln(e.value) - e.ln).abs() < 1e-12, "J = {j}");
        }
    }

    #[test]
    fn immediate_stop_when_all_start_above() {
        // Threshold barely above the floor: almost surely Z^1 >= a.
        let config = AmsConfig::new(5, 2, 1e-300).unwrap().recording_levels();
        let mut rng = substream(5, 0);
        let r = run_ams(&config, &Exponential, &mut rng).unwrap();
        assert_eq!(r.iterations, 0);
        assert_eq!(r.surviving, 5);
        assert_eq!(r.estimate, r.surviving_fraction());
        assert_eq!(r.levels.as_ref().map(Vec::len), Some(1));
    }

    #[test]
    fn iteration_cap_reports_nontermination() {
        let config = AmsConfig::new(10, 1, 50.0).unwrap().with_max_iterations(5);
        let mut rng = substream(1, 0);
        assert!(matches!(
            run_ams(&config, &Exponential, &mut rng),
            Err(Error::Nontermination { iterations: 5, .. })
        ));
    }

    #[test]
    fn log_form_is_consistent() {
        let config = AmsConfig::new(20, 3, 3.0).unwrap();
        let mut rng = substream(8, 2);
        let (log_p, r) = run_ams_log(&config, &Exponential, &mut rng).unwrap();
        assert!((exp(log_p) - r.estimate).abs() <= 1e-12 * r.estimate);
    }

    #[test]
    fn mean_is_close_to_target() {
        let p: f64 = 0.1;
        let config = AmsConfig::new(20, 4, -ln(p)).unwrap();
        let m = 20_000;
        let (mut s, mut s2) = (0.0, 0.0);
        for i in 0..m {
            let r = run_ams(&config, &Exponential, &mut substream(77, i)).unwrap();
            s += r.estimate;
            s2 += r.estimate * r.estimate;
        }
        let mean = s / m as f64;
        let se = crate::math::sqrt((s2 / m as f64 - mean * mean) / m as f64);
        assert!((mean - p).abs() < 4.0 * se, "mean {mean} se {se}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn run_invariants(seed in 0u64..1_000_000, n in 2usize..40, k_raw in 1usize..40, a in 0.1f64..4.0, pareto in any::<bool>()) {
            let k = 1 + (k_raw - 1) % (n - 1);
            let config = AmsConfig::new(n, k, a).unwrap().recording_levels();
            let law: &dyn ContinuousLaw = if pareto { &ShiftedPareto::default() } else { &Exponential };
            let r = run_ams(&config, law, &mut substream(seed, 0)).unwrap();
            prop_assert!(r.surviving >= n - k + 1 && r.surviving <= n);
            if k == 1 {
                prop_assert_eq!(r.surviving, n);
            }
            prop_assert!(r.estimate > 0.0 && r.estimate <= 1.0);
            let direct = r.surviving_fraction() * powf(1.0 - k as f64 / n as f64, r.iterations as f64);
            prop_assert!((r.estimate - direct).abs() <= 1e-15 * direct.max(1e-300));
            let levels = r.levels.unwrap();
            prop_assert_eq!(levels.len() as u64, r.iterations + 1);
            prop_assert!(levels.windows(2).all(|w| w[0] < w[1]));
            prop_assert!(*levels.last().unwrap() >= a);
            if levels.len() >= 2 {
                prop_assert!(levels[levels.len() - 2] < a);
            }
        }
    }
}
