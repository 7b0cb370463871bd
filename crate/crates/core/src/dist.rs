//! Continuous laws with exact conditional sampling, and the order-statistic
//! laws of the exponential case.
//!
//! Every law here is supported on `(0, ∞)` with `cdf(0) = 0` and a continuous
//! CDF. Conditional sampling above a floor `x` is the inverse transform
//! `y = F⁻¹(F(x) + u(1 − F(x)))`, evaluated on the log-survival scale so that
//! it stays accurate deep in the tail.

use alloc::string::String;

use rand_core::RngCore;

use crate::error::domain;
use crate::math::{binomial, exp, exp_m1, ln, ln_1p, ln_binomial};
use crate::stream::open_unit;
use crate::Result;

/// A continuous law on `(0, ∞)` given by its CDF and inverse CDF.
pub trait ContinuousLaw {
    fn name(&self) -> &str;

    fn cdf(&self, y: f64) -> f64;

    /// Quantile function on `(0, 1)`.
    fn inverse_cdf(&self, q: f64) -> f64;

    /// `ln P(X > y)`.
    fn log_survival(&self, y: f64) -> f64 {
        ln_1p(-self.cdf(y))
    }

    /// Inverse of [`ContinuousLaw::log_survival`].
    fn inverse_log_survival(&self, log_sf: f64) -> f64 {
        self.inverse_cdf(-exp_m1(log_sf))
    }

    /// Deterministic inverse-transform draw from `L(X | X > floor)`.
    fn conditional_quantile(&self, floor: f64, u: f64) -> f64 {
        self.inverse_log_survival(self.log_survival(floor) + ln_1p(-u))
    }

    /// An unconditional draw.
    fn quantile(&self, u: f64) -> f64 {
        self.inverse_cdf(u)
    }
}

/// The unit-rate exponential law.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Exponential;

impl ContinuousLaw for Exponential {
    fn name(&self) -> &str {
        "exponential"
    }

    fn cdf(&self, y: f64) -> f64 {
        if y <= 0.0 {
            0.0
        } else {
            -exp_m1(-y)
        }
    }

    fn inverse_cdf(&self, q: f64) -> f64 {
        -ln_1p(-q)
    }

    fn log_survival(&self, y: f64) -> f64 {
        -y.max(0.0)
    }

    fn inverse_log_survival(&self, log_sf: f64) -> f64 {
        -log_sf
    }

    // Memorylessness: floor plus a standard exponential.
    fn conditional_quantile(&self, floor: f64, u: f64) -> f64 {
        floor.max(0.0) - ln_1p(-u)
    }
}

/// `X = Y − 1` with `Y` Pareto of scale 1 and tail index `alpha`, so that
/// `P(X > y) = (1 + y)^(−alpha)` on `y ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftedPareto {
    alpha: f64,
}

impl ShiftedPareto {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha > 0.0 && alpha.is_finite() {
            Ok(Self { alpha })
        } else {
            Err(domain!("Pareto tail index must be positive, got {alpha}"))
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

impl Default for ShiftedPareto {
    fn default() -> Self {
        Self { alpha: 2.0 }
    }
}

impl ContinuousLaw for ShiftedPareto {
    fn name(&self) -> &str {
        "pareto"
    }

    fn cdf(&self, y: f64) -> f64 {
        if y <= 0.0 {
            0.0
        } else {
            -exp_m1(-self.alpha * ln_1p(y))
        }
    }

    fn inverse_cdf(&self, q: f64) -> f64 {
        exp_m1(-ln_1p(-q) / self.alpha)
    }

    fn log_survival(&self, y: f64) -> f64 {
        -self.alpha * ln_1p(y.max(0.0))
    }

    fn inverse_log_survival(&self, log_sf: f64) -> f64 {
        exp_m1(-log_sf / self.alpha)
    }
}

/// A law known only through its CDF. Quantiles come from bracketed bisection.
pub struct CdfLaw<F> {
    name: String,
    cdf: F,
}

/// Absolute tolerance of the bisection quantile solver.
pub const BISECTION_TOL: f64 = 1e-12;

impl<F: Fn(f64) -> f64> CdfLaw<F> {
    pub fn new(name: impl Into<String>, cdf: F) -> Self {
        Self { name: name.into(), cdf }
    }
}

impl<F: Fn(f64) -> f64> ContinuousLaw for CdfLaw<F> {
    fn name(&self) -> &str {
        &self.name
    }

    fn cdf(&self, y: f64) -> f64 {
        if y <= 0.0 {
            0.0
        } else {
            (self.cdf)(y)
        }
    }

    fn inverse_cdf(&self, q: f64) -> f64 {
        if !(q > 0.0 && q < 1.0) {
            return f64::NAN;
        }
        let mut lo = 0.0;
        let mut hi = 1.0;
        while self.cdf(hi) < q {
            lo = hi;
            hi *= 2.0;
            if !hi.is_finite() {
                return f64::INFINITY;
            }
        }
        while hi - lo > BISECTION_TOL {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.cdf(mid) < q {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

const MAX_REDRAWS: usize = 1000;

/// Draws from `L(X | X > floor)`, redrawing the (floating-point only) ties
/// `y ≤ floor`.
pub fn sample_above<D, R>(law: &D, floor: f64, rng: &mut R) -> Result<f64>
where
    D: ContinuousLaw + ?Sized,
    R: RngCore + ?Sized,
{
    for _ in 0..MAX_REDRAWS {
        let y = law.conditional_quantile(floor, open_unit(rng));
        if y > floor {
            return Ok(y);
        }
    }
    Err(domain!(
        "cannot sample {} strictly above {floor}: floor is at the edge of the support",
        law.name()
    ))
}

/// `L(X | X > floor)` for a base law.
#[derive(Debug, Clone, Copy)]
pub struct ConditionalLaw<'a, D: ?Sized> {
    base: &'a D,
    floor: f64,
    log_sf_floor: f64,
}

impl<'a, D: ContinuousLaw + ?Sized> ConditionalLaw<'a, D> {
    /// Fails when `P(X > floor) = 0`.
    pub fn new(base: &'a D, floor: f64) -> Result<Self> {
        let log_sf_floor = base.log_survival(floor);
        if !(log_sf_floor > f64::NEG_INFINITY) || floor.is_nan() {
            return Err(domain!(
                "floor {floor} is at or beyond the essential supremum of {}",
                base.name()
            ));
        }
        Ok(Self { base, floor, log_sf_floor })
    }

    pub fn floor(&self) -> f64 {
        self.floor
    }

    pub fn base(&self) -> &'a D {
        self.base
    }

    /// Inverse transform of `u ∈ (0, 1)`.
    pub fn sample(&self, u: f64) -> Result<f64> {
        if !(u > 0.0 && u < 1.0) {
            return Err(domain!("uniform variate must lie in (0, 1), got {u}"));
        }
        Ok(self.base.conditional_quantile(self.floor, u))
    }

    /// `(F(y) − F(x)) / (1 − F(x))`, clamped to `[0, 1]`.
    pub fn cdf(&self, y: f64) -> f64 {
        if y <= self.floor {
            return 0.0;
        }
        (-exp_m1(self.base.log_survival(y) - self.log_sf_floor)).clamp(0.0, 1.0)
    }
}

/// Law of the `k`-th order statistic of `n` i.i.d. draws of `L(X | X > floor)`
/// for the unit exponential `X`.
///
/// `k = 0` is accepted for the CDF with the convention `F_{n,0}(y; x) = 1{y ≥ x}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderStatisticLaw {
    n: u64,
    k: u64,
    floor: f64,
}

impl OrderStatisticLaw {
    pub fn new(n: u64, k: u64, floor: f64) -> Result<Self> {
        if n == 0 || k > n {
            return Err(domain!("order statistic rank {k} outside 0..={n}"));
        }
        if !floor.is_finite() {
            return Err(domain!("floor must be finite, got {floor}"));
        }
        Ok(Self { n, k, floor })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn floor(&self) -> f64 {
        self.floor
    }

    /// `f_{n,k}(y; x) = k C(n,k) F(y;x)^{k−1} f(y;x) (1 − F(y;x))^{n−k}`.
    pub fn pdf(&self, y: f64) -> Result<f64> {
        let (n, k) = (self.n, self.k);
        if k == 0 {
            return Err(domain!("density of the rank-0 convention is undefined"));
        }
        if y < self.floor {
            return Ok(0.0);
        }
        let t = y - self.floor;
        if t == 0.0 {
            return Ok(if k == 1 { n as f64 } else { 0.0 });
        }
        // F(y; x) = 1 − e^{−t}, f(y; x) = 1 − F(y; x) = e^{−t}.
        let log_f = ln(-exp_m1(-t));
        let log_pdf = ln(k as f64) + ln_binomial(n, k) + (k - 1) as f64 * log_f - (n - k + 1) as f64 * t;
        Ok(exp(log_pdf))
    }

    /// Binomial tail `Σ_{j ≥ k} C(n,j) F^j (1 − F)^{n−j}` with `F = F(y; x)`.
    pub fn cdf(&self, y: f64) -> f64 {
        if y < self.floor {
            return 0.0;
        }
        if self.k == 0 {
            return 1.0;
        }
        let t = y - self.floor;
        if t == 0.0 {
            return 0.0;
        }
        if t == f64::INFINITY {
            return 1.0;
        }
        let f = -exp_m1(-t);
        let n = self.n;
        let mut total = 0.0;
        for j in self.k..=n {
            total += binomial(n, j) * exp(j as f64 * ln(f) - (n - j) as f64 * t);
        }
        total.clamp(0.0, 1.0)
    }
}
