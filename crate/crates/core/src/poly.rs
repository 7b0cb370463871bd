//! Complex helpers and simultaneous (Durand-Kerner) root finding for small
//! monic polynomials.

use alloc::vec;
use alloc::vec::Vec;

pub use num_complex::Complex64;

use crate::math::{cos, exp, hypot, sin};
use crate::{Error, Result};

#[inline]
pub fn cabs(z: Complex64) -> f64 {
    hypot(z.re, z.im)
}

#[inline]
pub fn cexp(z: Complex64) -> Complex64 {
    let r = exp(z.re);
    Complex64::new(r * cos(z.im), r * sin(z.im))
}

/// `e^{iθ}`.
#[inline]
pub fn unit(theta: f64) -> Complex64 {
    Complex64::new(cos(theta), sin(theta))
}

/// Coefficients (constant term first) of `∏ (z − r)` over `roots`.
pub fn monic_from_roots(roots: &[f64]) -> Vec<f64> {
    let mut coeffs = vec![1.0];
    for &r in roots {
        let mut next = vec![0.0; coeffs.len() + 1];
        for (i, &c) in coeffs.iter().enumerate() {
            next[i + 1] += c;
            next[i] -= r * c;
        }
        coeffs = next;
    }
    coeffs
}

/// Evaluates a polynomial given constant-term-first real coefficients.
pub fn horner(coeffs: &[f64], z: Complex64) -> Complex64 {
    coeffs
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

/// Settings of the Weierstrass / Durand-Kerner iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DurandKerner {
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for DurandKerner {
    fn default() -> Self {
        Self { tolerance: 1e-13, max_iterations: 500 }
    }
}

impl DurandKerner {
    /// Roots of the monic polynomial whose lower coefficients (constant term
    /// first, leading 1 included as the last entry) are `coeffs`, starting
    /// from `initial`. The i-th returned root is the one grown from the i-th
    /// initial guess.
    pub fn solve(&self, coeffs: &[f64], initial: &[Complex64]) -> Result<Vec<Complex64>> {
        let degree = coeffs.len().saturating_sub(1);
        if degree == 0 || initial.len() != degree || coeffs[degree] != 1.0 {
            return Err(Error::Numerical("Durand-Kerner needs a monic polynomial and one guess per root".into()));
        }
        let mut z = initial.to_vec();
        let mut correction = f64::INFINITY;
        for _ in 0..self.max_iterations {
            correction = 0.0;
            for i in 0..degree {
                let mut denom = Complex64::new(1.0, 0.0);
                for j in 0..degree {
                    if j != i {
                        denom *= z[i] - z[j];
                    }
                }
                if cabs(denom) == 0.0 {
                    return Err(Error::RootFinding { iterations: 0, correction: f64::INFINITY });
                }
                let delta = horner(coeffs, z[i]) / denom;
                z[i] -= delta;
                correction = correction.max(cabs(delta) / cabs(z[i]).max(1.0));
            }
            if !correction.is_finite() {
                break;
            }
            if correction <= self.tolerance {
                return Ok(z);
            }
        }
        Err(Error::RootFinding { iterations: self.max_iterations, correction })
    }
}
