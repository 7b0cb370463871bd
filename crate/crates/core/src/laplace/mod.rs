//! Laplace transform of the scaled log-estimator, `Γ(x) = E[exp(nλ log p̂(x))]`,
//! for the exponential law: the auxiliary function Θ, the functional equation,
//! the order-k ODE it reduces to, and its characteristic-root solution.

mod boundary;
mod characteristic;
mod coefficients;

use alloc::format;

use rand_core::RngCore;

pub use boundary::{boundary_data, boundary_derivatives, BoundaryDerivatives};
pub use characteristic::{
    characteristic_residual, characteristic_roots, killing_factor, root_limits, solve_gamma, CharacteristicSolution,
};
pub use coefficients::{ode_coefficients, OdeCoefficients};

use crate::dist::{Exponential, OrderStatisticLaw};
use crate::error::domain;
use crate::math::{exp, exp_m1, ln, ln_1p, ln_binomial, sqrt};
use crate::quad::integrate;
use crate::splitting::{run_ams, AmsConfig};
use crate::stream::substream;
use crate::{Error, Result};

const RESIDUAL_QUAD_TOL: f64 = 1e-11;

fn check_ranks(n: u64, k: u64) -> Result<()> {
    if k < 1 || k >= n {
        return Err(domain!("need 1 <= k < n, got n = {n}, k = {k}"));
    }
    Ok(())
}

fn check_interval(x: f64, a: f64) -> Result<()> {
    if !(0.0 <= x && x <= a && a.is_finite()) {
        return Err(domain!("need 0 <= x <= a < inf, got x = {x}, a = {a}"));
    }
    Ok(())
}

/// `F_{n,ℓ}(a; x) − F_{n,ℓ+1}(a; x)`: probability that exactly `ℓ` of `n`
/// exponentials above `x` fall at or below `a`.
pub fn rank_gap(n: u64, ell: u64, a: f64, x: f64) -> f64 {
    if ell > n {
        return 0.0;
    }
    let t = a - x;
    if t <= 0.0 {
        return if ell == 0 { 1.0 } else { 0.0 };
    }
    let log_below = ln(-exp_m1(-t));
    exp(ln_binomial(n, ell) + ell as f64 * log_below - (n - ell) as f64 * t)
}

/// `Θ_{n,k}(λ; x) = Σ_{ℓ<k} exp(nλ log(1 − ℓ/n)) (F_{n,ℓ}(a; x) − F_{n,ℓ+1}(a; x))`.
pub fn theta(n: u64, k: u64, lambda: f64, x: f64, a: f64) -> Result<f64> {
    check_ranks(n, k)?;
    check_interval(x, a)?;
    let n_f = n as f64;
    Ok((0..k)
        .map(|ell| exp(n_f * lambda * ln_1p(-(ell as f64) / n_f)) * rank_gap(n, ell, a, x))
        .sum())
}

/// How `Γ` is evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GammaRoute {
    /// `exp(ν(x − a))` with the exact single root; `k = 1` only.
    ClosedForm,
    /// Characteristic-root representation.
    Ode,
    /// Sample mean over independent runs of the splitting algorithm.
    MonteCarlo { replications: u64, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaEstimate {
    pub value: f64,
    /// Zero for the deterministic routes.
    pub std_error: f64,
}

/// One draw of `exp(nλ log p̂(x))`.
pub fn gamma_sample<R: RngCore + ?Sized>(n: u64, k: u64, lambda: f64, x: f64, a: f64, rng: &mut R) -> Result<f64> {
    check_ranks(n, k)?;
    check_interval(x, a)?;
    if x == a {
        // Every replica starts above the threshold: no iteration, p̂ = 1.
        return Ok(1.0);
    }
    let config = AmsConfig::new(n as usize, k as usize, a)?.with_initial_level(x)?;
    let result = run_ams(&config, &Exponential, rng)?;
    Ok(exp(n as f64 * lambda * result.log_estimate))
}

pub fn gamma_transform(n: u64, k: u64, lambda: f64, x: f64, a: f64, route: GammaRoute) -> Result<GammaEstimate> {
    check_ranks(n, k)?;
    check_interval(x, a)?;
    let value = match route {
        GammaRoute::ClosedForm => {
            if k != 1 {
                return Err(domain!("the closed form exists only for k = 1, got k = {k}"));
            }
            let nu = n as f64 * -exp_m1(n as f64 * lambda * ln_1p(-1.0 / n as f64));
            exp(nu * (x - a))
        }
        GammaRoute::Ode => CharacteristicSolution::new(n, k, lambda, a)?.gamma_at(x)?,
        GammaRoute::MonteCarlo { replications, seed } => {
            if replications < 2 {
                return Err(domain!("need at least two replications"));
            }
            let (mut sum, mut sum_sq) = (0.0, 0.0);
            for i in 0..replications {
                let v = gamma_sample(n, k, lambda, x, a, &mut substream(seed, i))?;
                sum += v;
                sum_sq += v * v;
            }
            let m = replications as f64;
            let mean = sum / m;
            let var = ((sum_sq - m * mean * mean) / (m - 1.0)).max(0.0);
            return Ok(GammaEstimate { value: mean, std_error: sqrt(var / m) });
        }
    };
    Ok(GammaEstimate { value, std_error: 0.0 })
}

/// `max_x |Γ(x) − ∫_x^a c Γ(y) f_{n,k}(y; x) dy − Θ_{n,k}(λ; x)| / max(1, Γ(x))`
/// over `grid + 1` equally spaced points of `[0, a]`. `log_gamma` returns
/// `log Γ`, so the check still runs where `Γ` itself overflows.
pub fn functional_equation_residual<G>(n: u64, k: u64, lambda: f64, a: f64, grid: usize, mut log_gamma: G) -> Result<f64>
where
    G: FnMut(f64) -> Result<f64>,
{
    check_ranks(n, k)?;
    check_interval(0.0, a)?;
    if grid == 0 {
        return Err(domain!("grid needs at least one interval"));
    }
    let c = killing_factor(n, k, lambda);
    let mut worst: f64 = 0.0;
    for i in 0..=grid {
        let x = a * i as f64 / grid as f64;
        let law = OrderStatisticLaw::new(n, k, x)?;
        let log_lhs = log_gamma(x)?;
        let shift = log_lhs.max(0.0);
        let mut failure = None;
        let integral = integrate(
            |y| match (log_gamma(y), law.pdf(y)) {
                (Ok(g), Ok(f)) => exp(g - shift) * f,
                (Err(e), _) | (_, Err(e)) => {
                    failure.get_or_insert(e);
                    f64::NAN
                }
            },
            x,
            a,
            RESIDUAL_QUAD_TOL,
        );
        if let Some(e) = failure {
            return Err(e);
        }
        let integral = integral?;
        let theta = theta(n, k, lambda, x, a)? * exp(-shift);
        let residual = (exp(log_lhs - shift) - c * integral - theta).abs();
        if !residual.is_finite() {
            return Err(Error::Numerical(format!("non-finite residual at x = {x}")));
        }
        worst = worst.max(residual);
    }
    Ok(worst)
}

/// `(1/n) log Γ_{n,k}(λ; 0)` with `a = −log p`, via the characteristic roots.
pub fn scaled_log_laplace(n: u64, k: u64, lambda: f64, p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(domain!("p must lie in (0, 1), got {p}"));
    }
    if lambda == 0.0 {
        check_ranks(n, k)?;
        return Ok(0.0);
    }
    let solution = CharacteristicSolution::new(n, k, lambda, -ln(p))?;
    Ok(solution.log_gamma_at(0.0)? / n as f64)
}

#[cfg(test)]
mod tests;
