//! Summary statistics and the goodness-of-fit tests used by the experiments.

use statrs::distribution::{ChiSquared, ContinuousCDF, Discrete, DiscreteCDF, Poisson};

use crate::error::{config_error, BenchError, Result};

/// Sample mean and unbiased variance, summed in slice order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub count: usize,
    pub mean: f64,
    pub variance: f64,
}

impl Moments {
    pub fn of(values: &[f64]) -> Self {
        let count = values.len();
        let mean = values.iter().sum::<f64>() / count as f64;
        let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
        let variance = if count > 1 { ss / (count - 1) as f64 } else { f64::NAN };
        Self { count, mean, variance }
    }

    pub fn std_error(&self) -> f64 {
        (self.variance / self.count as f64).sqrt()
    }
}

/// Wilson score interval for `successes` out of `trials` at normal quantile `z`.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let m = trials as f64;
    let q = successes as f64 / m;
    let z2 = z * z;
    let centre = (q + z2 / (2.0 * m)) / (1.0 + z2 / m);
    let half = z / (1.0 + z2 / m) * (q * (1.0 - q) / m + z2 / (4.0 * m * m)).sqrt();
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Least-squares line `y ≈ intercept + slope · x` with weights `w`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope under the weights taken as inverse variances.
    pub slope_std_error: f64,
}

pub fn weighted_line_fit(x: &[f64], y: &[f64], w: &[f64]) -> Result<LineFit> {
    if x.len() != y.len() || x.len() != w.len() || x.len() < 2 {
        return Err(config_error!("a line fit needs at least two points"));
    }
    let sw: f64 = w.iter().sum();
    let mx = x.iter().zip(w).map(|(x, w)| x * w).sum::<f64>() / sw;
    let my = y.iter().zip(w).map(|(y, w)| y * w).sum::<f64>() / sw;
    let sxx: f64 = x.iter().zip(w).map(|(x, w)| w * (x - mx) * (x - mx)).sum();
    let sxy: f64 = x.iter().zip(y).zip(w).map(|((x, y), w)| w * (x - mx) * (y - my)).sum();
    if !(sxx > 0.0) {
        return Err(BenchError::Numerical("degenerate abscissae in line fit".into()));
    }
    let slope = sxy / sxx;
    Ok(LineFit { slope, intercept: my - slope * mx, slope_std_error: (1.0 / sxx).sqrt() })
}

pub fn line_fit(x: &[f64], y: &[f64]) -> Result<LineFit> {
    let w = vec![1.0; x.len()];
    weighted_line_fit(x, y, &w)
}

/// Chi-square goodness-of-fit outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct ChiSquareTest {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
    /// Inclusive lower edges of the pooled bins; the first bin is open below
    /// and the last open above.
    pub bin_edges: Vec<u64>,
}

/// Tests integer samples against `Poisson(mean)`, pooling adjacent values
/// until every bin has expected count at least `min_expected`.
pub fn poisson_chi_square(samples: &[u64], mean: f64, min_expected: f64) -> Result<ChiSquareTest> {
    let law = Poisson::new(mean).map_err(|e| config_error!("Poisson mean {mean}: {e}"))?;
    let m = samples.len() as f64;
    let mut edges = vec![0u64];
    let mut expected = vec![];
    let mut acc = 0.0;
    let mut j = 0u64;
    loop {
        acc += m * law.pmf(j);
        let rest = m * law.sf(j);
        if acc >= min_expected && rest >= min_expected {
            expected.push(acc);
            acc = 0.0;
            edges.push(j + 1);
        } else if rest < min_expected && j as f64 > mean {
            let tail = acc + rest;
            match expected.last_mut() {
                Some(last) if tail < min_expected => {
                    *last += tail;
                    edges.pop();
                }
                _ => expected.push(tail),
            }
            break;
        }
        j += 1;
    }
    if expected.len() < 2 {
        return Err(BenchError::Numerical("too few pooled bins for a chi-square test".into()));
    }
    let mut observed = vec![0f64; expected.len()];
    for &s in samples {
        let bin = edges.partition_point(|&e| e <= s) - 1;
        observed[bin] += 1.0;
    }
    let statistic: f64 = observed.iter().zip(&expected).map(|(o, e)| (o - e) * (o - e) / e).sum();
    let dof = expected.len() - 1;
    let chi = ChiSquared::new(dof as f64).map_err(|e| BenchError::Numerical(e.to_string()))?;
    Ok(ChiSquareTest { statistic, dof, p_value: chi.sf(statistic), bin_edges: edges })
}

/// Survival function of the Kolmogorov distribution, `P(K > t)`.
pub fn kolmogorov_sf(t: f64) -> f64 {
    if t < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for j in 1..=100 {
        let j = j as f64;
        let term = (-2.0 * j * j * t * t).exp();
        sum += if j as u64 % 2 == 1 { term } else { -term };
        if term < 1e-17 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// One-sample Kolmogorov–Smirnov distance of `samples` to `cdf`, and its
/// asymptotic p-value.
pub fn ks_one_sample<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> (f64, f64) {
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let m = sorted.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        d = d.max(f - i as f64 / m).max((i + 1) as f64 / m - f);
    }
    let sq = m.sqrt();
    (d, kolmogorov_sf((sq + 0.12 + 0.11 / sq) * d))
}

/// Two-sample Kolmogorov–Smirnov distance and its asymptotic p-value.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> (f64, f64) {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    let ne = (na * nb / (na + nb)).sqrt();
    (d, kolmogorov_sf((ne + 0.12 + 0.11 / ne) * d))
}
