use std::collections::BTreeMap;

use ams_core::laplace::{
    functional_equation_residual, gamma_transform, root_limits, scaled_log_laplace, CharacteristicSolution, GammaRoute,
};
use ams_core::math::ln;
use ams_core::poly::cabs;
use ams_core::rates::scaled_cgf;
use ams_core::stream::derive_seed;

use crate::config::{DistKind, ExperimentConfig};
use crate::error::{config_error, Result};
use crate::report::{Cell, Report};

/// Grid intervals for the functional-equation residual.
const RESIDUAL_GRID: usize = 32;

/// Characteristic-root solution of the Laplace transform over `(n, k, λ)`:
/// route agreement, functional-equation residuals, root and coefficient
/// limits, and the scaled log-Laplace limit. A positive `reps` adds the
/// Monte Carlo route at `x`.
pub fn laplace_verify(config: &ExperimentConfig) -> Result<Report> {
    if config.dist != DistKind::Exponential {
        return Err(config_error!("the Laplace machinery is stated for the exponential law"));
    }
    let Some(p) = config.p else {
        return Err(config_error!("laplace-verify needs p (threshold a = −log p)"));
    };
    let a = -ln(p);
    let x = config.x;
    if !(0.0..=a).contains(&x) {
        return Err(config_error!("x must lie in [0, −log p]"));
    }
    let mut report = Report::new(
        "laplace-verify",
        config.seed,
        &[
            "n", "k", "lambda", "x", "gamma_ode", "closed_rel_diff", "scaled_log_laplace", "cgf_limit", "cgf_gap",
            "root_gap_max", "lead_coefficient_gap", "other_coefficient_max", "principal_dominant", "residual",
            "mc_value", "mc_std_error", "mc_z",
        ],
    );
    // (k, λ bits) -> per-n (root gaps, lead gap, cgf gap)
    let mut series: BTreeMap<(u64, u64), Vec<(u64, Vec<f64>, f64, f64, f64)>> = BTreeMap::new();
    let mut cell = 0u64;
    for &k in &config.k {
        for &lambda in &config.lambda {
            for &n in &config.n {
                let sol = CharacteristicSolution::new(n, k, lambda, a)?;
                let gamma = sol.gamma_at(x)?;
                let closed = if k == 1 {
                    let c = gamma_transform(n, 1, lambda, x, a, GammaRoute::ClosedForm)?.value;
                    (c - gamma).abs() / c.abs().max(1.0)
                } else {
                    f64::NAN
                };
                let scaled = scaled_log_laplace(n, k, lambda, p)?;
                let limit = scaled_cgf(lambda, p)?;
                let cgf_gap = (scaled - limit).abs();
                let limits = root_limits(k, lambda);
                let root_gaps: Vec<f64> =
                    sol.scaled_roots().iter().zip(&limits).map(|(r, l)| cabs(r - l)).collect();
                let root_gap_max = root_gaps.iter().cloned().fold(0.0, f64::max);
                let lead = cabs(sol.coefficients[0] - 1.0);
                let others = sol.coefficients[1..].iter().map(|g| cabs(*g)).fold(0.0, f64::max);
                let dominant = sol.roots[1..].iter().all(|r| r.re > sol.roots[0].re);
                let residual = functional_equation_residual(n, k, lambda, a, RESIDUAL_GRID, |y| sol.log_gamma_at(y))?;
                let (mc_value, mc_se, mc_z) = if config.reps > 1 {
                    let mc = gamma_transform(
                        n,
                        k,
                        lambda,
                        x,
                        a,
                        GammaRoute::MonteCarlo { replications: config.reps, seed: derive_seed(config.seed, cell) },
                    )?;
                    (mc.value, mc.std_error, (mc.value - gamma) / mc.std_error)
                } else {
                    (f64::NAN, f64::NAN, f64::NAN)
                };
                cell += 1;
                report.push_row(vec![
                    n.into(),
                    k.into(),
                    lambda.into(),
                    x.into(),
                    gamma.into(),
                    closed.into(),
                    scaled.into(),
                    limit.into(),
                    cgf_gap.into(),
                    root_gap_max.into(),
                    lead.into(),
                    others.into(),
                    dominant.into(),
                    residual.into(),
                    mc_value.into(),
                    mc_se.into(),
                    mc_z.into(),
                ]);
                let label = format!("n={n} k={k} λ={lambda}");
                if k == 1 {
                    report.check(
                        format!("closed form {label}"),
                        closed < config.route_tolerance,
                        format!("relative difference {closed:.3e} (limit {:e})", config.route_tolerance),
                    );
                }
                report.check(
                    format!("functional equation {label}"),
                    residual < config.residual_tolerance,
                    format!("sup residual {residual:.3e} (limit {:e})", config.residual_tolerance),
                );
                if k >= 2 && lambda > 0.0 {
                    report.check(format!("principal root {label}"), dominant, "Re ν^ℓ > Re ν^1 for ℓ ≥ 2");
                }
                if config.reps > 1 {
                    report.check(
                        format!("monte carlo {label}"),
                        mc_z.abs() < config.se_multiplier,
                        format!("ODE {gamma:.6e} vs MC {mc_value:.6e} ± {mc_se:.2e}: |z| = {:.3}", mc_z.abs()),
                    );
                }
                series.entry((k, lambda.to_bits())).or_default().push((n, root_gaps, lead, cgf_gap, limit));
            }
        }
    }
    for ((k, bits), rows) in &series {
        let lambda = f64::from_bits(*bits);
        if rows.len() < 2 || lambda == 0.0 {
            continue;
        }
        let label = format!("k={k} λ={lambda}");
        let roots_decrease = rows.windows(2).all(|w| w[0].1.iter().zip(&w[1].1).all(|(a, b)| b < a));
        report.check(format!("root limits {label}"), roots_decrease, "every |ν^ℓ/n − limit| decreases along n");
        if *k >= 2 {
            let lead_decrease = rows.windows(2).all(|w| w[1].2 < w[0].2);
            let last = rows[rows.len() - 1].2;
            report.check(
                format!("coefficient limits {label}"),
                lead_decrease && last < config.coefficient_tolerance,
                format!("|γ¹ − 1| along n: {:.4?}", rows.iter().map(|r| r.2).collect::<Vec<_>>()),
            );
        }
        let gaps: Vec<f64> = rows.iter().map(|r| r.3).collect();
        let last = &rows[rows.len() - 1];
        let relative = last.3 / last.4.abs();
        report.check(
            format!("scaled log-Laplace {label}"),
            gaps.windows(2).all(|w| w[1] < w[0]) && relative < config.limit_tolerance,
            format!("gaps {gaps:.5?}; relative gap {relative:.4} at n = {} (limit {})", last.0, config.limit_tolerance),
        );
        report.push_summary(&format!("relative_cgf_gap k={k} λ={lambda}"), Cell::from(relative));
    }
    Ok(report)
}
