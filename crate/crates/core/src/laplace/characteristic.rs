use alloc::vec::Vec;
use core::f64::consts::PI;

use num_traits::ToPrimitive;

use super::boundary::boundary_derivatives;
use super::coefficients::ode_coefficients;
use crate::error::domain;
use crate::linalg;
use crate::math::{exp, ln, ln_1p, powi};
use crate::poly::{cabs, cexp, unit, Complex64, DurandKerner};
use crate::{Error, Result};

const RESIDUAL_TOL: f64 = 1e-10;
const IMAGINARY_TOL: f64 = 1e-10;

/// `exp(nλ log(1 − k/n))`, the constant in front of the integral term.
pub fn killing_factor(n: u64, k: u64, lambda: f64) -> f64 {
    let n_f = n as f64;
    exp(n_f * lambda * ln_1p(-(k as f64) / n_f))
}

/// Limit point `1 − e^{−λ} e^{i2π(ℓ−1)/k}` of `ν^ℓ / n`, for `ℓ = 1, …, k`.
pub fn root_limits(k: u64, lambda: f64) -> Vec<Complex64> {
    (0..k)
        .map(|l| Complex64::new(1.0, 0.0) - unit(2.0 * PI * l as f64 / k as f64) * exp(-lambda))
        .collect()
}

/// `|∏_j (n − j − ν) / ∏_j (n − j) − c|`, relative to `max(1, c)`.
pub fn characteristic_residual(n: u64, k: u64, lambda: f64, nu: Complex64) -> f64 {
    let n_f = n as f64;
    let mut ratio = Complex64::new(1.0, 0.0);
    for j in 0..k {
        let base = n_f - j as f64;
        ratio *= (Complex64::new(base, 0.0) - nu) / base;
    }
    let c = killing_factor(n, k, lambda);
    cabs(ratio - c) / c.max(1.0)
}

/// Roots `ν^1, …, ν^k` of `∏_{j<k} (n − j − ν) = c ∏_{j<k} (n − j)`.
///
/// Solved for `ν̄ = ν/n` and returned unscaled, ordered so that `ν^ℓ / n` is
/// matched to the `ℓ`-th entry of [`root_limits`].
pub fn characteristic_roots(n: u64, k: u64, lambda: f64) -> Result<Vec<Complex64>> {
    if !lambda.is_finite() {
        return Err(domain!("λ must be finite, got {lambda}"));
    }
    let ode = ode_coefficients(n, k)?;
    let n_f = n as f64;
    let c = killing_factor(n, k, lambda);
    if k == 1 {
        return Ok(alloc::vec![Complex64::new(n_f * (1.0 - c), 0.0)]);
    }
    // ν^k − Σ r_m ν^m − cμ = 0, divided by n^k.
    let mut coeffs: Vec<f64> = ode
        .r
        .iter()
        .enumerate()
        .map(|(m, r)| -r.to_f64().unwrap_or(f64::NAN) / powi(n_f, (k as usize - m) as i32))
        .collect();
    coeffs[0] -= c * ode.mu.to_f64().unwrap_or(f64::NAN) / powi(n_f, k as i32);
    coeffs.push(1.0);
    if coeffs.iter().any(|c| !c.is_finite()) {
        return Err(Error::Numerical(alloc::format!("characteristic polynomial overflows at n = {n}, k = {k}, λ = {lambda}")));
    }

    let limits = root_limits(k, lambda);
    // Start slightly off the limits so that coincident guesses never occur.
    let initial: Vec<Complex64> = limits
        .iter()
        .enumerate()
        .map(|(i, z)| z + unit(0.4 + i as f64) * 1e-3)
        .collect();
    let scaled = DurandKerner::default().solve(&coeffs, &initial)?;

    let mut remaining = scaled;
    let mut ordered = Vec::with_capacity(k as usize);
    for limit in &limits {
        let (best, _) = remaining
            .iter()
            .enumerate()
            .map(|(i, z)| (i, cabs(z - limit)))
            .fold((0, f64::INFINITY), |acc, cur| if cur.1 < acc.1 { cur } else { acc });
        ordered.push(remaining.swap_remove(best) * n_f);
    }
    for nu in &ordered {
        let residual = characteristic_residual(n, k, lambda, *nu);
        if !(residual < RESIDUAL_TOL) {
            return Err(Error::Numerical(alloc::format!(
                "root {nu} fails the characteristic equation by {residual:e}"
            )));
        }
    }
    Ok(ordered)
}

/// Solves `Σ_ℓ γ_ℓ (ν_ℓ/n)^m = n^{−m} d^mΘ(a)` for `m = 0, …, k − 1`.
pub fn solve_gamma(n: u64, roots: &[Complex64], scaled_theta_derivatives: &[f64]) -> Result<Vec<Complex64>> {
    let k = roots.len();
    if k == 0 || scaled_theta_derivatives.len() != k {
        return Err(domain!("need one boundary value per root"));
    }
    let n_f = n as f64;
    let scaled: Vec<Complex64> = roots.iter().map(|z| z / n_f).collect();
    let matrix: Vec<Vec<Complex64>> = (0..k)
        .map(|m| scaled.iter().map(|z| z.powu(m as u32)).collect())
        .collect();
    let rhs: Vec<Complex64> = scaled_theta_derivatives.iter().map(|&d| Complex64::new(d, 0.0)).collect();
    linalg::solve(matrix, rhs)
}

/// `Γ(x) = Σ_ℓ γ_ℓ exp(ν_ℓ (x − a))`.
#[derive(Debug, Clone, PartialEq)]
pub struct CharacteristicSolution {
    pub n: u64,
    pub k: u64,
    pub lambda: f64,
    pub threshold: f64,
    pub roots: Vec<Complex64>,
    pub coefficients: Vec<Complex64>,
}

impl CharacteristicSolution {
    pub fn new(n: u64, k: u64, lambda: f64, threshold: f64) -> Result<Self> {
        if !(threshold >= 0.0) || !threshold.is_finite() {
            return Err(domain!("threshold must be finite and nonnegative, got {threshold}"));
        }
        let roots = characteristic_roots(n, k, lambda)?;
        let boundary = boundary_derivatives(n, k)?;
        let coefficients = solve_gamma(n, &roots, &boundary.scaled_theta_derivatives(lambda))?;
        Ok(Self { n, k, lambda, threshold, roots, coefficients })
    }

    /// `ν_ℓ / n`.
    pub fn scaled_roots(&self) -> Vec<Complex64> {
        self.roots.iter().map(|z| z / self.n as f64).collect()
    }

    /// `(log|Γ^{(m)}(x)|, sign)` computed with a common exponential shift.
    fn log_derivative(&self, x: f64, m: u32) -> Result<(f64, f64)> {
        if !(0.0..=self.threshold).contains(&x) {
            return Err(domain!("x = {x} outside [0, {}]", self.threshold));
        }
        let t = x - self.threshold;
        let exponents: Vec<Complex64> = self.roots.iter().map(|nu| nu * t).collect();
        let shift = exponents.iter().map(|e| e.re).fold(f64::NEG_INFINITY, f64::max);
        let mut total = Complex64::new(0.0, 0.0);
        let mut magnitude = 0.0;
        for ((gamma, nu), e) in self.coefficients.iter().zip(&self.roots).zip(&exponents) {
            let term = gamma * nu.powu(m) * cexp(e - shift);
            magnitude += cabs(term);
            total += term;
        }
        if total.im.abs() > IMAGINARY_TOL * magnitude.max(f64::MIN_POSITIVE) {
            return Err(Error::Numerical(alloc::format!(
                "imaginary residue {:e} at x = {x} exceeds tolerance",
                total.im.abs() / magnitude
            )));
        }
        if total.re == 0.0 {
            return Ok((f64::NEG_INFINITY, 0.0));
        }
        Ok((shift + ln(total.re.abs()), total.re.signum()))
    }

    pub fn gamma_at(&self, x: f64) -> Result<f64> {
        self.derivative_at(x, 0)
    }

    /// `d^m Γ / dx^m` at `x`.
    pub fn derivative_at(&self, x: f64, m: u32) -> Result<f64> {
        let (log_abs, sign) = self.log_derivative(x, m)?;
        Ok(sign * exp(log_abs))
    }

    /// `log Γ(x)`; errors if the reconstruction is not positive.
    pub fn log_gamma_at(&self, x: f64) -> Result<f64> {
        let (log_abs, sign) = self.log_derivative(x, 0)?;
        if sign <= 0.0 {
            return Err(Error::Numerical(alloc::format!("reconstructed Laplace transform is not positive at x = {x}")));
        }
        Ok(log_abs)
    }
}
