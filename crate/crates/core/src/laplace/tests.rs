use super::*;
use crate::math::powi;
use crate::poly::{cabs, Complex64};
use crate::rates::scaled_cgf;
use crate::stream::open_unit;
use alloc::vec;
use alloc::vec::Vec;
use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

/// Coefficients of `∏_{j<k} (ν − n + j)`, constant term first.
fn expanded_product(n: u64, k: u64) -> Vec<BigInt> {
    let mut poly = vec![BigInt::one()];
    for j in 0..k {
        let root = BigInt::from(n as i64 - j as i64);
        let mut next = vec![BigInt::zero(); poly.len() + 1];
        for (i, c) in poly.iter().enumerate() {
            next[i + 1] += c;
            next[i] -= &root * c;
        }
        poly = next;
    }
    poly
}

fn falling(n: u64, k: u64) -> BigInt {
    (0..k).fold(BigInt::one(), |acc, j| acc * BigInt::from(n - j))
}

fn choose(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    falling(n, k) / falling(k, k)
}

/// `B[m][ℓ] = C(n,ℓ) Σ_j C(ℓ,j) (−1)^j (n − ℓ + j)^m` for `m ≥ 1`.
fn boundary_closed_form(n: u64, m: u32, ell: u64) -> BigInt {
    if m == 0 {
        return if ell == 0 { BigInt::one() } else { BigInt::zero() };
    }
    let mut total = BigInt::zero();
    for j in 0..=ell {
        let term = choose(ell, j) * BigInt::from(n - ell + j).pow(m);
        if j % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    choose(n, ell) * total
}

#[test]
fn coefficient_recursion_matches_expansion() {
    for n in 2..=30u64 {
        for k in 1..=8u64.min(n - 1) {
            let ode = ode_coefficients(n, k).unwrap();
            let expected = expanded_product(n, k);
            assert_eq!(ode.characteristic_polynomial(), expected, "n={n} k={k}");
            let sign = if k % 2 == 0 { BigInt::one() } else { -BigInt::one() };
            assert_eq!(ode.mu, sign * falling(n, k), "n={n} k={k}");
        }
    }
}

#[test]
fn large_coefficients_do_not_wrap() {
    let ode = ode_coefficients(100_000, 8).unwrap();
    assert_eq!(ode.characteristic_polynomial(), expanded_product(100_000, 8));
}

#[test]
fn boundary_table_matches_closed_form() {
    for &n in &[10u64, 37, 100, 1000] {
        let b = boundary_derivatives(n, 6).unwrap();
        for m in 0..6 {
            for ell in 0..6 {
                assert_eq!(b.table[m][ell], boundary_closed_form(n, m as u32, ell as u64), "n={n} m={m} l={ell}");
            }
        }
    }
}

#[test]
fn boundary_table_matches_finite_differences() {
    // Fourth-order central differences of the rank gaps in x, one step inside a.
    let (n, k, a) = (8u64, 3u64, 1.0);
    let b = boundary_derivatives(n, k).unwrap();
    let h = 1e-3;
    for ell in 0..k {
        let f = |x: f64| rank_gap(n, ell, a, x);
        // one-sided derivative from the left of a, first order only
        let x0 = a - 2.0 * h;
        let d1 = (f(x0 + h) - f(x0 - h)) / (2.0 * h);
        let d1_shift = b.table[1][ell as usize].to_f64().unwrap();
        let d2 = b.table[2][ell as usize].to_f64().unwrap();
        // Taylor: f'(a − 2h) ≈ f'(a) − 2h f''(a)
        assert!((d1 - (d1_shift - 2.0 * h * d2)).abs() < 0.05 * (1.0 + d1_shift.abs()), "l={ell}");
    }
}

#[test]
fn theta_boundary_and_first_order() {
    for &(n, k, lambda) in &[(5u64, 2u64, 0.3), (20, 7, -0.4), (50, 1, 1.2)] {
        assert_eq!(theta(n, k, lambda, 2.0, 2.0).unwrap(), 1.0);
    }
    for &x in &[0.0, 0.3, 0.9] {
        let v = theta(15, 1, 0.7, x, 1.0).unwrap();
        assert!((v - exp(-15.0 * (1.0 - x))).abs() < 1e-15);
    }
    assert!(theta(10, 0, 0.5, 0.0, 1.0).is_err());
    assert!(theta(10, 10, 0.5, 0.0, 1.0).is_err());
    assert!(theta(10, 3, 0.5, 1.5, 1.0).is_err());
}

#[test]
fn rank_gaps_are_order_statistic_cdf_differences() {
    for &(n, x) in &[(10u64, 0.0), (25, 0.4)] {
        for ell in 0..n {
            let lower = OrderStatisticLaw::new(n, ell, x).unwrap().cdf(1.0);
            let upper = OrderStatisticLaw::new(n, ell + 1, x).unwrap().cdf(1.0);
            assert!((rank_gap(n, ell, 1.0, x) - (lower - upper)).abs() < 1e-13, "n={n} l={ell}");
        }
    }
}

#[test]
fn theta_matches_first_iteration_simulation() {
    let (n, k, lambda, a) = (10u64, 3u64, 0.5, 1.0);
    let x = a / 2.0;
    let m = 10_000_000u64;
    let weights: Vec<f64> = (0..k).map(|l| exp(n as f64 * lambda * ln_1p(-(l as f64) / n as f64))).collect();
    let mut rng = substream(77, 0);
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..m {
        let mut below = 0usize;
        for _ in 0..n {
            if x - ln_1p(-open_unit(&mut rng)) <= a {
                below += 1;
            }
        }
        let v = if below < k as usize { weights[below] } else { 0.0 };
        sum += v;
        sum_sq += v * v;
    }
    let mean = sum / m as f64;
    let se = sqrt((sum_sq / m as f64 - mean * mean) / m as f64);
    let exact = theta(n, k, lambda, x, a).unwrap();
    assert!((mean - exact).abs() < 4.0 * se, "mc {mean} exact {exact} se {se}");
}

#[test]
fn first_order_root_is_exact() {
    for &(n, lambda) in &[(20u64, 0.3), (100, -1.0), (7, 2.0)] {
        let roots = characteristic_roots(n, 1, lambda).unwrap();
        let expected = n as f64 * (1.0 - exp(n as f64 * lambda * ln_1p(-1.0 / n as f64)));
        assert!((roots[0].re - expected).abs() <= 1e-12 * expected.abs().max(1.0));
        assert_eq!(roots[0].im, 0.0);
    }
}

#[test]
fn zero_lambda_has_zero_root_and_constant_solution() {
    for k in 1..=5u64 {
        let roots = characteristic_roots(40, k, 0.0).unwrap();
        assert!(cabs(roots[0]) < 1e-9, "k={k} root {}", roots[0]);
        let sol = CharacteristicSolution::new(40, k, 0.0, 1.5).unwrap();
        for &x in &[0.0, 0.7, 1.5] {
            assert!((sol.gamma_at(x).unwrap() - 1.0).abs() < 1e-9, "k={k} x={x}");
        }
    }
}

#[test]
fn roots_satisfy_characteristic_equation() {
    for &(n, k, lambda) in &[(20u64, 2u64, 0.3), (30, 3, 0.5), (50, 5, -0.5), (200, 6, 1.0)] {
        let roots = characteristic_roots(n, k, lambda).unwrap();
        assert_eq!(roots.len(), k as usize);
        for nu in &roots {
            assert!(characteristic_residual(n, k, lambda, *nu) < 1e-10);
        }
        for i in 0..roots.len() {
            for j in 0..i {
                assert!(cabs(roots[i] - roots[j]) > 1e-6 * n as f64);
            }
        }
    }
}

#[test]
fn roots_and_coefficients_approach_their_limits() {
    for k in 2..=5u64 {
        let lambda = 0.5;
        let limits = root_limits(k, lambda);
        let mut previous_root_gap = vec![f64::INFINITY; k as usize];
        let mut previous_lead = f64::INFINITY;
        let mut previous_rest = f64::INFINITY;
        for &n in &[30u64, 100, 300] {
            let sol = CharacteristicSolution::new(n, k, lambda, 1.0).unwrap();
            let scaled = sol.scaled_roots();
            for l in 0..k as usize {
                let gap = cabs(scaled[l] - limits[l]);
                assert!(gap < previous_root_gap[l], "k={k} n={n} l={l}");
                previous_root_gap[l] = gap;
            }
            let lead = cabs(sol.coefficients[0] - 1.0);
            let rest = sol.coefficients[1..].iter().map(|g| cabs(*g)).fold(0.0, f64::max);
            assert!(lead < previous_lead && rest < previous_rest, "k={k} n={n}");
            previous_lead = lead;
            previous_rest = rest;
            for l in 1..k as usize {
                assert!(sol.roots[l].re > sol.roots[0].re);
            }
        }
        if k == 3 {
            assert!(previous_lead < 0.05);
        }
    }
}

#[test]
fn coefficients_sum_to_one() {
    for &(n, k, lambda) in &[(1000u64, 1u64, 0.2), (20, 2, 0.3), (30, 3, 0.5), (60, 4, -0.3)] {
        let sol = CharacteristicSolution::new(n, k, lambda, 1.0).unwrap();
        let sum: Complex64 = sol.coefficients.iter().sum();
        assert!(cabs(sum - 1.0) < 1e-10, "n={n} k={k}");
        assert!((sol.gamma_at(1.0).unwrap() - 1.0).abs() < 1e-10);
    }
}

#[test]
fn reconstruction_matches_boundary_derivatives() {
    let (n, k, lambda, a) = (20u64, 3u64, 0.3, 1.0);
    let sol = CharacteristicSolution::new(n, k, lambda, a).unwrap();
    let exact = boundary_derivatives(n, k).unwrap().theta_derivatives(lambda);
    // Backward differences from x = a with Richardson extrapolation.
    let g = |x: f64| sol.gamma_at(x).unwrap();
    let h = 1e-4;
    let d1 = |h: f64| (3.0 * g(a) - 4.0 * g(a - h) + g(a - 2.0 * h)) / (2.0 * h);
    let d2 = |h: f64| (2.0 * g(a) - 5.0 * g(a - h) + 4.0 * g(a - 2.0 * h) - g(a - 3.0 * h)) / (h * h);
    let first = (4.0 * d1(h / 2.0) - d1(h)) / 3.0;
    assert!((first - exact[1]).abs() < 1e-6 * exact[1].abs(), "{first} vs {}", exact[1]);
    let h2 = 1e-3;
    let second = (4.0 * d2(h2 / 2.0) - d2(h2)) / 3.0;
    assert!((second - exact[2]).abs() < 1e-6 * exact[2].abs(), "{second} vs {}", exact[2]);
    for m in 0..k as u32 {
        let analytic = sol.derivative_at(a, m).unwrap();
        assert!((analytic - exact[m as usize]).abs() < 1e-9 * exact[m as usize].abs().max(1.0));
    }
}

#[test]
fn first_order_routes_agree() {
    for &n in &[20u64, 100] {
        for &lambda in &[-1.0, -0.5, 0.3, 1.0] {
            let a = -ln(0.2);
            let closed = gamma_transform(n, 1, lambda, 0.0, a, GammaRoute::ClosedForm).unwrap().value;
            let ode = gamma_transform(n, 1, lambda, 0.0, a, GammaRoute::Ode).unwrap().value;
            assert!((closed - ode).abs() < 1e-10 * closed.max(1.0), "n={n} λ={lambda}");
            let display = exp(-ln(0.2) * n as f64 * exp_m1(n as f64 * lambda * ln_1p(-1.0 / n as f64)));
            assert!((closed - display).abs() < 1e-10 * display.max(1.0));
        }
    }
    assert!(gamma_transform(20, 2, 0.3, 0.0, 1.0, GammaRoute::ClosedForm).is_err());
}

#[test]
fn boundary_value_is_one_on_every_route() {
    for route in [GammaRoute::Ode, GammaRoute::MonteCarlo { replications: 50, seed: 3 }] {
        let v = gamma_transform(12, 3, 0.4, 2.0, 2.0, route).unwrap();
        assert!((v.value - 1.0).abs() < 1e-12);
    }
    let v = gamma_transform(12, 1, 0.4, 2.0, 2.0, GammaRoute::ClosedForm).unwrap();
    assert_eq!(v.value, 1.0);
}

#[test]
fn ode_route_inside_monte_carlo_band() {
    for k in [2u64, 3] {
        let ode = gamma_transform(20, k, 0.3, 0.0, 1.0, GammaRoute::Ode).unwrap().value;
        let mc = gamma_transform(20, k, 0.3, 0.0, 1.0, GammaRoute::MonteCarlo { replications: 200_000, seed: 11 + k })
            .unwrap();
        assert!((mc.value - ode).abs() < 4.0 * mc.std_error, "k={k} ode {ode} mc {} ± {}", mc.value, mc.std_error);
    }
}

#[test]
fn functional_equation_holds_for_characteristic_solution() {
    for &(n, k, lambda) in &[(20u64, 2u64, 0.3), (30, 3, 0.5), (15, 1, 0.8)] {
        let sol = CharacteristicSolution::new(n, k, lambda, 1.0).unwrap();
        let r = functional_equation_residual(n, k, lambda, 1.0, 32, |x| sol.log_gamma_at(x)).unwrap();
        assert!(r < 1e-8, "n={n} k={k} residual {r:e}");
        let perturbed = functional_equation_residual(n, k, lambda, 1.0, 32, |x| Ok(sol.log_gamma_at(x)? + ln(1.01))).unwrap();
        assert!(perturbed > 1e-3);
    }
}

#[test]
fn functional_equation_holds_where_gamma_overflows() {
    let (n, k, lambda, a) = (1000u64, 2u64, -0.5, 5f64.ln());
    let sol = CharacteristicSolution::new(n, k, lambda, a).unwrap();
    assert!(sol.log_gamma_at(0.0).unwrap() > 710.0);
    let r = functional_equation_residual(n, k, lambda, a, 16, |x| sol.log_gamma_at(x)).unwrap();
    assert!(r < 1e-8, "residual {r:e}");
}

#[test]
fn telescoping_identity_at_zero_lambda() {
    for &(n, k) in &[(10u64, 3u64), (30, 5), (40, 1)] {
        let r = functional_equation_residual(n, k, 0.0, 1.3, 40, |_| Ok(0.0)).unwrap();
        assert!(r < 1e-10, "n={n} k={k} residual {r:e}");
    }
}

#[test]
fn scaled_log_laplace_limits() {
    assert_eq!(scaled_log_laplace(30, 3, 0.0, 0.2).unwrap(), 0.0);
    let p: f64 = 0.2;
    for &n in &[50u64, 500] {
        let v = scaled_log_laplace(n, 1, 0.7, p).unwrap();
        let closed = -ln(p) * exp_m1(n as f64 * 0.7 * ln_1p(-1.0 / n as f64));
        assert!((v - closed).abs() < 1e-12);
    }
    let limit = scaled_cgf(0.5, p).unwrap();
    let mut previous = f64::INFINITY;
    for &n in &[30u64, 100, 300] {
        let gap = (scaled_log_laplace(n, 3, 0.5, p).unwrap() - limit).abs();
        assert!(gap < previous, "n={n} gap {gap}");
        previous = gap;
    }
    assert!(previous < 0.02 * limit.abs());
}

#[test]
fn scaled_theta_derivatives_approach_powers() {
    let lambda = 0.5;
    let target = 1.0 - exp(-lambda);
    let b = boundary_derivatives(10_000, 5).unwrap();
    let d = b.scaled_theta_derivatives(lambda);
    for (m, v) in d.iter().enumerate() {
        assert!((v - powi(target, m as i32)).abs() < 10.0 / 10_000.0, "m={m}");
    }
}
