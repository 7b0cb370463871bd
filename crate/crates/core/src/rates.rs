//! Large-deviation rate functions for the AMS estimator and its baselines.
//!
//! Rates are extended reals: outside their effective domain they are
//! [`ExtendedReal::PosInfinity`], never a large sentinel.
//!
//! The double logarithm `log(log p) − log(log y)` is always evaluated as
//! `log(log p / log y)`: both inner logarithms are negative, their ratio is
//! positive.

use crate::error::domain;
use crate::math::{exp, exp_m1, ln, ln_1p};
use crate::Result;

/// A real number or `+∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtendedReal {
    Finite(f64),
    PosInfinity,
}

impl ExtendedReal {
    pub fn is_finite(self) -> bool {
        matches!(self, ExtendedReal::Finite(_))
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            ExtendedReal::Finite(v) => Some(v),
            ExtendedReal::PosInfinity => None,
        }
    }

    /// `f64::INFINITY` for `+∞`.
    pub fn to_f64(self) -> f64 {
        self.finite().unwrap_or(f64::INFINITY)
    }
}

/// A rate function evaluated at one argument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFunctionPoint {
    pub argument: f64,
    pub value: ExtendedReal,
    pub in_domain: bool,
}

impl RateFunctionPoint {
    pub fn new(argument: f64, value: ExtendedReal) -> Self {
        Self { argument, value, in_domain: value.is_finite() }
    }
}

fn check_probability(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(domain!("target probability must lie in (0, 1), got {p}"))
    }
}

fn in_unit_interval(y: f64) -> bool {
    y > 0.0 && y < 1.0
}

/// Rate of the AMS estimator: `log(y) log(log p / log y) + log(y / p)` on `(0, 1)`.
pub fn ams_rate(y: f64, p: f64) -> Result<ExtendedReal> {
    check_probability(p)?;
    if !in_unit_interval(y) {
        return Ok(ExtendedReal::PosInfinity);
    }
    let ly = ln(y);
    Ok(ExtendedReal::Finite(ly * ln(ln(p) / ly) + (ly - ln(p))))
}

/// Rate of `log p̂`: `z − log p − z log(z / log p)` for `z < 0`.
pub fn log_estimator_rate(z: f64, p: f64) -> Result<ExtendedReal> {
    check_probability(p)?;
    if !(z < 0.0) {
        return Ok(ExtendedReal::PosInfinity);
    }
    Ok(ExtendedReal::Finite(z * ln(ln(p) / z) + (z - ln(p))))
}

/// Limiting scaled cumulant generating function `−log(p)(e^{−λ} − 1)`.
pub fn scaled_cgf(lambda: f64, p: f64) -> Result<f64> {
    check_probability(p)?;
    Ok(-ln(p) * exp_m1(-lambda))
}

/// How the Legendre transform of [`scaled_cgf`] is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LegendreRoute {
    /// The closed form (identical to [`log_estimator_rate`]).
    ClosedForm,
    /// Numerical supremum of `λz − Λ(λ)` by safeguarded Newton iteration.
    NumericSup,
}

/// `sup_λ (λz − Λ(λ))`.
pub fn legendre_transform(z: f64, p: f64, route: LegendreRoute) -> Result<ExtendedReal> {
    match route {
        LegendreRoute::ClosedForm => log_estimator_rate(z, p),
        LegendreRoute::NumericSup => {
            check_probability(p)?;
            Ok(numeric_sup(z, p))
        }
    }
}

// Past this point e^{−λ} is below the smallest normal double.
const LAMBDA_CEILING: f64 = 700.0;

fn numeric_sup(z: f64, p: f64) -> ExtendedReal {
    let log_p = ln(p);
    let objective = |l: f64| l * z + log_p * exp_m1(-l);
    let slope = |l: f64| z - log_p * exp(-l);
    let curvature = |l: f64| log_p * exp(-l);

    // Stationary point when it exists, else start from 0.
    let start = if z < 0.0 { -ln(z / log_p) } else { 0.0 };

    // Bracket the maximiser: slope(lo) > 0 > slope(hi).
    let mut step = 1.0;
    let mut lo = start - step;
    while slope(lo) <= 0.0 {
        step *= 2.0;
        lo = start - step;
    }
    step = 1.0;
    let mut hi = start + step;
    while slope(hi) >= 0.0 {
        if hi >= LAMBDA_CEILING {
            // Objective increases on the whole line: report its limit, or +∞ if
            // it is still growing.
            let far = objective(LAMBDA_CEILING);
            let growth = far - objective(0.5 * LAMBDA_CEILING);
            return if growth > 1e-9 * far.abs().max(1.0) {
                ExtendedReal::PosInfinity
            } else {
                ExtendedReal::Finite(far)
            };
        }
        step *= 2.0;
        hi = (start + step).min(LAMBDA_CEILING);
    }

    let mut l = start.clamp(lo, hi);
    for _ in 0..200 {
        let g = slope(l);
        if g > 0.0 {
            lo = l;
        } else {
            hi = l;
        }
        let newton = l - g / curvature(l);
        let next = if newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        if (next - l).abs() <= 1e-15 * l.abs().max(1.0) {
            l = next;
            break;
        }
        l = next;
    }
    ExtendedReal::Finite(objective(l))
}

/// Cramér rate of the crude Monte Carlo estimator (Bernoulli relative entropy).
pub fn crude_rate(y: f64, p: f64) -> Result<ExtendedReal> {
    check_probability(p)?;
    if !in_unit_interval(y) {
        return Ok(ExtendedReal::PosInfinity);
    }
    Ok(ExtendedReal::Finite(y * (ln(y) - ln(p)) + (1.0 - y) * (ln_1p(-y) - ln_1p(-p))))
}

/// Cramér rate of one stage of optimal `N`-level splitting, i.e. the crude
/// rate at target `p^{1/N}`.
pub fn stage_rate(y: f64, p: f64, stages: u32) -> Result<ExtendedReal> {
    check_probability(p)?;
    if stages == 0 {
        return Err(domain!("need at least one stage"));
    }
    if !in_unit_interval(y) {
        return Ok(ExtendedReal::PosInfinity);
    }
    let log_q = ln(p) / stages as f64;
    let one_minus_q = -exp_m1(log_q);
    Ok(ExtendedReal::Finite(
        y * (ln(y) - log_q) + (1.0 - y) * (ln_1p(-y) - ln(one_minus_q)),
    ))
}

/// `N · stage_rate(y^{1/N})`, the upper bound on the fixed-level rate obtained
/// by splitting the deviation evenly over the stages.
pub fn fixed_level_upper_bound(y: f64, p: f64, stages: u32) -> Result<ExtendedReal> {
    check_probability(p)?;
    if stages == 0 {
        return Err(domain!("need at least one stage"));
    }
    if !in_unit_interval(y) {
        return Ok(ExtendedReal::PosInfinity);
    }
    let n = stages as f64;
    let s = ln(y) / n;
    let root = exp(s);
    let one_minus_root = -exp_m1(s);
    let one_minus_q = -exp_m1(ln(p) / n);
    Ok(ExtendedReal::Finite(
        root * (ln(y) - ln(p)) + n * one_minus_root * (ln(one_minus_root) - ln(one_minus_q)),
    ))
}

fn check_open_pair(y: f64, p: f64) -> Result<()> {
    check_probability(p)?;
    if !in_unit_interval(y) {
        return Err(domain!("argument must lie in (0, 1), got {y}"));
    }
    Ok(())
}

/// `D(y, p) = I(y) − 𝓘(y)`, the gap between the AMS and crude rates.
pub fn rate_gap(y: f64, p: f64) -> Result<f64> {
    check_open_pair(y, p)?;
    Ok(ams_rate(y, p)?.to_f64() - crude_rate(y, p)?.to_f64())
}

/// `∂D/∂p = ((1 − y)/(p log p)) (log y/(1 − y) − log p/(1 − p))`.
pub fn rate_gap_dp(y: f64, p: f64) -> Result<f64> {
    check_open_pair(y, p)?;
    let lp = ln(p);
    Ok((1.0 - y) / (p * lp) * (ln(y) / (1.0 - y) - lp / (1.0 - p)))
}

/// Exact rates at the relative deviation `p(1 + ε)` next to their small-`p`
/// equivalents.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmallPRates {
    pub ams_exact: f64,
    /// `(log(1 + ε))² / (−2 log p)`
    pub ams_asymptotic: f64,
    pub crude_exact: f64,
    /// `p((1 + ε) log(1 + ε) − ε)`
    pub crude_asymptotic: f64,
}

impl SmallPRates {
    pub fn ams_ratio(&self) -> f64 {
        self.ams_exact / self.ams_asymptotic
    }

    pub fn crude_ratio(&self) -> f64 {
        self.crude_exact / self.crude_asymptotic
    }
}

pub fn small_p_relative_rates(eps: f64, p: f64) -> Result<SmallPRates> {
    check_probability(p)?;
    if !(eps > 0.0 && eps < 1.0) {
        return Err(domain!("relative deviation must lie in (0, 1), got {eps}"));
    }
    let y = p * (1.0 + eps);
    if !(y < 1.0) {
        return Err(domain!("p(1 + ε) = {y} is not below 1"));
    }
    let l = ln_1p(eps);
    Ok(SmallPRates {
        ams_exact: ams_rate(y, p)?.to_f64(),
        ams_asymptotic: l * l / (-2.0 * ln(p)),
        crude_exact: crude_rate(y, p)?.to_f64(),
        crude_asymptotic: p * ((1.0 + eps) * l - eps),
    })
}

/// First and second derivatives of [`ams_rate`] in `y`.
pub fn ams_rate_derivatives(y: f64, p: f64) -> Result<(f64, f64)> {
    check_open_pair(y, p)?;
    let ly = ln(y);
    let ratio = ln(ln(p) / ly);
    let first = ratio / y;
    let second = -ratio / (y * y) - 1.0 / (y * y * ly);
    Ok((first, second))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;
    use proptest::prelude::*;

    // 50-digit evaluations of the closed forms.
    const AMS_RATE_05_03: f64 = 0.128_111_561_684_089_317_467_838_317_207;
    const CRUDE_RATE_05_03: f64 = 0.087_176_693_572_388_876_350_460_343_043;
    const GAP_05_03: f64 = 0.040_934_868_111_700_441_117_377_974_164;
    const CGF_05_02: f64 = -0.633_264_473_638_921_930_706_348_837_942;
    const SECOND_DERIV_001: f64 = 2171.472_409_516_259_138_255_644_594_583;
    const UPPER_BOUND_05_03_N2: f64 = 0.106_691_260_198_209_809_957_698_520_595;

    fn f(v: Result<ExtendedReal>) -> f64 {
        v.unwrap().to_f64()
    }

    #[test]
    fn pinned_values() {
        assert!((f(ams_rate(0.5, 0.3)) - AMS_RATE_05_03).abs() < 1e-15);
        assert!((f(crude_rate(0.5, 0.3)) - CRUDE_RATE_05_03).abs() < 1e-15);
        assert!((rate_gap(0.5, 0.3).unwrap() - GAP_05_03).abs() < 1e-15);
        assert!((scaled_cgf(0.5, 0.2).unwrap() - CGF_05_02).abs() < 1e-15);
        assert!((f(fixed_level_upper_bound(0.5, 0.3, 2)) - UPPER_BOUND_05_03_N2).abs() < 1e-14);
        let (_, second) = ams_rate_derivatives(0.01, 0.01).unwrap();
        assert!((second - SECOND_DERIV_001).abs() < 1e-9);
    }

    #[test]
    fn domains() {
        assert!(ams_rate(0.5, 0.0).is_err());
        assert!(ams_rate(0.5, 1.0).is_err());
        assert!(crude_rate(0.5, f64::NAN).is_err());
        for y in [0.0, 1.0, -0.5, 1.5] {
            assert_eq!(ams_rate(y, 0.3).unwrap(), ExtendedReal::PosInfinity);
            assert_eq!(crude_rate(y, 0.3).unwrap(), ExtendedReal::PosInfinity);
            assert_eq!(stage_rate(y, 0.3, 3).unwrap(), ExtendedReal::PosInfinity);
        }
        assert_eq!(log_estimator_rate(0.0, 0.3).unwrap(), ExtendedReal::PosInfinity);
        assert_eq!(log_estimator_rate(0.2, 0.3).unwrap(), ExtendedReal::PosInfinity);
        let point = RateFunctionPoint::new(1.5, ams_rate(1.5, 0.3).unwrap());
        assert!(!point.in_domain);
        assert!(small_p_relative_rates(0.5, 0.7).is_err());
        assert!(rate_gap(1.0, 0.3).is_err());
    }

    #[test]
    fn zeros_at_the_target() {
        for p in [0.01, 0.3, 0.9] {
            assert!(f(ams_rate(p, p)).abs() < 1e-15);
            assert!(f(crude_rate(p, p)).abs() < 1e-15);
            assert!(f(log_estimator_rate(ln(p), p)).abs() < 1e-15);
            assert!(rate_gap(p, p).unwrap().abs() < 1e-15);
            assert!(f(legendre_transform(ln(p), p, LegendreRoute::NumericSup)).abs() < 1e-14);
            let (first, second) = ams_rate_derivatives(p, p).unwrap();
            assert!(first.abs() < 1e-15);
            assert!((second - 1.0 / (-p * p * ln(p))).abs() < 1e-9 * second);
        }
        assert_eq!(scaled_cgf(0.0, 0.3).unwrap(), 0.0);
    }

    #[test]
    fn boundary_limits() {
        let p: f64 = 0.3;
        assert!((f(log_estimator_rate(-1e-14, p)) + ln(p)).abs() < 1e-12);
        assert!((f(crude_rate(1.0 - 1e-12, p)) + ln(p)).abs() < 1e-10);
    }

    #[test]
    fn contraction_identity_on_grid() {
        for p in [0.05, 0.3, 0.8] {
            for i in 1..=1000 {
                let y = i as f64 / 1001.0;
                let direct = f(ams_rate(y, p));
                let via_log = f(log_estimator_rate(ln(y), p));
                assert!((direct - via_log).abs() < 1e-12, "y = {y}");
            }
        }
    }

    #[test]
    fn legendre_routes_agree() {
        for p in [0.05, 0.2, 0.3, 0.7] {
            for i in 0..=2000 {
                let z = -1e-3 - (10.0 - 1e-3) * i as f64 / 2000.0;
                let a = f(legendre_transform(z, p, LegendreRoute::ClosedForm));
                let b = f(legendre_transform(z, p, LegendreRoute::NumericSup));
                assert!((a - b).abs() < 1e-10, "z = {z}, p = {p}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn legendre_numeric_diverges_for_positive_arguments() {
        for z in [1e-6, 0.5, 3.0] {
            assert_eq!(
                legendre_transform(z, 0.3, LegendreRoute::NumericSup).unwrap(),
                ExtendedReal::PosInfinity
            );
        }
        // At z = 0 the supremum is the finite limit −log p.
        let at_zero = f(legendre_transform(0.0, 0.3, LegendreRoute::NumericSup));
        assert!((at_zero + ln(0.3)).abs() < 1e-12);
    }

    #[test]
    fn contraction_through_legendre() {
        let v = f(legendre_transform(ln(0.5), 0.3, LegendreRoute::NumericSup));
        assert!((v - AMS_RATE_05_03).abs() < 1e-12);
    }

    #[test]
    fn cgf_is_poisson_log_mgf() {
        // −R with R ~ Poisson(−log p): E[e^{−λR}] = exp(−log(p)(e^{−λ} − 1)).
        let p: f64 = 0.2;
        let mean = -ln(p);
        for lambda in [-1.0, -0.3, 0.5, 2.0] {
            let mut term = exp(-mean);
            let mut mgf = 0.0;
            for r in 0..200 {
                if r > 0 {
                    term *= mean / r as f64;
                }
                mgf += term * exp(-lambda * r as f64);
            }
            assert!((ln(mgf) - scaled_cgf(lambda, p).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn ams_dominates_crude() {
        let grid: Vec<f64> = (1..100).map(|i| i as f64 / 100.0).collect();
        for &p in &grid {
            for &y in &grid {
                let gap = f(ams_rate(y, p)) - f(crude_rate(y, p));
                if y == p {
                    assert!(gap.abs() < 1e-12);
                } else {
                    assert!(gap > 1e-12, "y = {y}, p = {p}: gap {gap}");
                    assert!(f(ams_rate(y, p)) > 0.0 && f(crude_rate(y, p)) > 0.0);
                }
            }
        }
    }

    #[test]
    fn gap_derivative_matches_finite_differences() {
        for &(y, p) in &[(0.5, 0.3), (0.1, 0.6), (0.9, 0.2), (0.35, 0.4)] {
            let h = 1e-6;
            let fd = (rate_gap(y, p + h).unwrap() - rate_gap(y, p - h).unwrap()) / (2.0 * h);
            let exact = rate_gap_dp(y, p).unwrap();
            assert!((fd - exact).abs() < 1e-6, "({y}, {p}): {fd} vs {exact}");
            // D(·, p) vanishes at p = y and is nonnegative, so it falls towards y.
            let sign = if y > p { -1.0 } else { 1.0 };
            assert!(exact * sign > 0.0);
        }
    }

    #[test]
    fn derivative_sign_pattern_and_finite_differences() {
        let p = 0.3;
        for i in 1..100 {
            let y = i as f64 / 100.0;
            if (y - p).abs() < 1e-12 {
                continue;
            }
            let (first, second) = ams_rate_derivatives(y, p).unwrap();
            assert_eq!(first > 0.0, y > p);
            let h = 1e-5 * y.min(1.0 - y);
            let fd1 = (f(ams_rate(y + h, p)) - f(ams_rate(y - h, p))) / (2.0 * h);
            let (d_plus, _) = ams_rate_derivatives(y + h, p).unwrap();
            let (d_minus, _) = ams_rate_derivatives(y - h, p).unwrap();
            let fd2 = (d_plus - d_minus) / (2.0 * h);
            assert!((fd1 - first).abs() <= 1e-6 * first.abs().max(1.0));
            assert!((fd2 - second).abs() <= 1e-6 * second.abs().max(1.0));
        }
    }

    #[test]
    fn single_stage_is_crude() {
        for y in [0.1, 0.5, 0.77] {
            assert!((f(stage_rate(y, 0.3, 1)) - f(crude_rate(y, 0.3))).abs() < 1e-15);
            assert!((f(fixed_level_upper_bound(y, 0.3, 1)) - f(crude_rate(y, 0.3))).abs() < 1e-15);
        }
    }

    #[test]
    fn fixed_level_bound_converges_to_ams_rate() {
        let target = AMS_RATE_05_03;
        let mut previous = f64::INFINITY;
        for stages in [10, 100, 1000, 10_000] {
            let gap = (f(fixed_level_upper_bound(0.5, 0.3, stages)) - target).abs();
            assert!(gap < previous);
            previous = gap;
        }
        assert!(previous < 1e-3);
    }

    #[test]
    fn small_p_equivalents() {
        let r = small_p_relative_rates(0.5, 1e-6).unwrap();
        assert!((r.ams_ratio() - 1.0).abs() < 0.05);
        assert!((r.crude_ratio() - 1.0).abs() < 0.05);
        let mut previous = (f64::INFINITY, f64::INFINITY);
        for p in [1e-2, 1e-4, 1e-6] {
            let r = small_p_relative_rates(0.5, p).unwrap();
            let gaps = ((r.ams_ratio() - 1.0).abs(), (r.crude_ratio() - 1.0).abs());
            assert!(gaps.0 < previous.0 && gaps.1 < previous.1);
            previous = gaps;
        }
    }

    proptest! {
        #[test]
        fn rates_are_nonnegative(y in 1e-6f64..(1.0 - 1e-6), p in 1e-6f64..(1.0 - 1e-6), stages in 1u32..64) {
            prop_assert!(f(ams_rate(y, p)) >= -1e-15);
            prop_assert!(f(crude_rate(y, p)) >= -1e-15);
            prop_assert!(f(stage_rate(y, p, stages)) >= -1e-15);
            prop_assert!(f(ams_rate(y, p)) >= f(crude_rate(y, p)) - 1e-12);
        }
    }
}
