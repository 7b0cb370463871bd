use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::error::domain;
use crate::math::{exp, ln_1p, powi};
use crate::Result;

/// Exact values `B[m][ℓ] = d^m/dx^m (F_{n,ℓ}(a; x) − F_{n,ℓ+1}(a; x)) at x = a`
/// for `0 ≤ m, ℓ ≤ k − 1` in the exponential case.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryDerivatives {
    pub n: u64,
    pub k: u64,
    /// `table[m][ℓ]`.
    pub table: Vec<Vec<BigInt>>,
}

/// Derivative of a combination `Σ_j v_j f_{n,j}(a; ·)`, using
/// `d/dx f_{n,1} = n f_{n,1}` and `d/dx f_{n,j} = (n − j + 1)(f_{n,j} − f_{n,j−1})`.
fn differentiate(n: u64, v: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::from(0); v.len()];
    for j in 1..v.len() {
        if v[j] == BigInt::from(0) {
            continue;
        }
        let rate = BigInt::from(n - j as u64 + 1);
        out[j] += &rate * &v[j];
        if j >= 2 {
            out[j - 1] -= &rate * &v[j];
        }
    }
    out
}

pub fn boundary_derivatives(n: u64, k: u64) -> Result<BoundaryDerivatives> {
    if k < 1 || k >= n {
        return Err(domain!("need 1 <= k < n, got n = {n}, k = {k}"));
    }
    let size = k as usize;
    let mut table = vec![vec![BigInt::from(0); size]; size];
    table[0][0] = BigInt::from(1);
    for ell in 0..size {
        // d/dx (F_{n,ℓ} − F_{n,ℓ+1})(a; x) = f_{n,ℓ+1}(a; x) − f_{n,ℓ}(a; x), with f_{n,0} = 0.
        let mut v = vec![BigInt::from(0); size + 1];
        v[ell + 1] = BigInt::from(1);
        if ell >= 1 {
            v[ell] = BigInt::from(-1);
        }
        for m in 1..size {
            // f_{n,j}(a; a) = n 1{j = 1}
            table[m][ell] = BigInt::from(n) * &v[1];
            v = differentiate(n, &v);
        }
    }
    Ok(BoundaryDerivatives { n, k, table })
}

impl BoundaryDerivatives {
    /// `B[m][ℓ] / n^m`.
    pub fn scaled(&self, m: usize, ell: usize) -> f64 {
        self.table[m][ell].to_f64().unwrap_or(f64::NAN) / powi(self.n as f64, m as i32)
    }

    /// `exp(nλ log(1 − ℓ/n))` for `ℓ = 0, …, k − 1`.
    pub fn weights(&self, lambda: f64) -> Vec<f64> {
        let n = self.n as f64;
        (0..self.k)
            .map(|ell| exp(n * lambda * ln_1p(-(ell as f64) / n)))
            .collect()
    }

    /// `d^m Θ_{n,k}(λ; x)` at `x = a` for `m = 0, …, k − 1`.
    pub fn theta_derivatives(&self, lambda: f64) -> Vec<f64> {
        let w = self.weights(lambda);
        self.table
            .iter()
            .map(|row| {
                row.iter()
                    .zip(&w)
                    .map(|(b, w)| w * b.to_f64().unwrap_or(f64::NAN))
                    .sum()
            })
            .collect()
    }

    /// `n^{−m} d^m Θ_{n,k}(λ; x)` at `x = a`.
    pub fn scaled_theta_derivatives(&self, lambda: f64) -> Vec<f64> {
        let w = self.weights(lambda);
        (0..self.k as usize)
            .map(|m| (0..self.k as usize).map(|ell| w[ell] * self.scaled(m, ell)).sum())
            .collect()
    }
}

/// The boundary table together with the Θ derivatives at `x = a`.
pub fn boundary_data(n: u64, k: u64, lambda: f64) -> Result<(BoundaryDerivatives, Vec<f64>)> {
    let table = boundary_derivatives(n, k)?;
    let derivs = table.theta_derivatives(lambda);
    Ok((table, derivs))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_rows() {
        let b = boundary_derivatives(12, 4).unwrap();
        assert_eq!(b.table[0], vec![BigInt::from(1), BigInt::from(0), BigInt::from(0), BigInt::from(0)]);
        assert_eq!(b.table[1], vec![BigInt::from(12), BigInt::from(-12), BigInt::from(0), BigInt::from(0)]);
    }

    #[test]
    fn zero_above_diagonal() {
        let b = boundary_derivatives(50, 7).unwrap();
        for m in 0..7 {
            for ell in m + 1..7 {
                assert_eq!(b.table[m][ell], BigInt::from(0), "m={m} l={ell}");
            }
        }
    }

    #[test]
    fn theta_at_boundary_is_one() {
        let (_, d) = boundary_data(20, 3, 0.7).unwrap();
        assert_eq!(d[0], 1.0);
    }
}
