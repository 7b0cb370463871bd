use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;

use crate::error::domain;
use crate::Result;

/// Exact coefficients of the order-k linear ODE
/// `Γ^{(k)} = c μ Γ + Σ_{m<k} r_m Γ^{(m)}`, with `c = (1 − k/n)^{nλ}`.
#[derive(Debug, Clone, PartialEq)]
pub struct OdeCoefficients {
    pub n: u64,
    pub k: u64,
    /// `μ = μ_k` with `μ_0 = 1`, `μ_{l+1} = −(n − k + l + 1) μ_l`.
    pub mu: BigInt,
    /// `r_0, …, r_{k−1}`.
    pub r: Vec<BigInt>,
}

impl OdeCoefficients {
    /// Coefficients of `ν^k − Σ r_m ν^m`, constant term first.
    pub fn characteristic_polynomial(&self) -> Vec<BigInt> {
        let mut poly: Vec<BigInt> = self.r.iter().map(|r| -r).collect();
        poly.push(BigInt::from(1));
        poly
    }
}

/// Runs the coefficient recursion in exact integer arithmetic.
///
/// Row `l` holds `r_{0,l}, …, r_{l,l}` with `r_{l,l} = −1`, starting from the
/// single entry `r_{0,0} = −1`; then
/// `r_{m,l+1} = r_{m−1,l} − (n − k + l + 1) r_{m,l}` for `0 ≤ m ≤ l`
/// (with `r_{−1,l} = 0`), which for `m = 0, l = 0` gives `r_{0,1} = n − k + 1`.
pub fn ode_coefficients(n: u64, k: u64) -> Result<OdeCoefficients> {
    if k < 1 || k >= n {
        return Err(domain!("need 1 <= k < n, got n = {n}, k = {k}"));
    }
    let mut mu = BigInt::from(1);
    let mut row = vec![BigInt::from(-1)];
    for l in 0..k {
        let c = BigInt::from(n - k + l + 1);
        mu = -(&c * &mu);
        let mut next = Vec::with_capacity(row.len() + 1);
        for m in 0..row.len() {
            let lower = if m == 0 { BigInt::from(0) } else { row[m - 1].clone() };
            next.push(lower - &c * &row[m]);
        }
        next.push(BigInt::from(-1));
        row = next;
    }
    row.pop();
    Ok(OdeCoefficients { n, k, mu, r: row })
}
