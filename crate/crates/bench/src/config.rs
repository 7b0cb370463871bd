//! Experiment configuration: per-experiment defaults, a flat TOML file, and
//! command-line overrides, applied in that order.

use std::fs;
use std::path::{Path, PathBuf};

use ams_core::dist::{ContinuousLaw, Exponential, ShiftedPareto};
use ams_core::math::{exp, ln};
use clap::{Args, ValueEnum};
use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{config_error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    LdpSlope,
    Unbiasedness,
    Clt,
    PoissonGof,
    Lognormal,
    LaplaceVerify,
    Compare,
    Reduction,
    RateEval,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::LdpSlope => "ldp-slope",
            ExperimentKind::Unbiasedness => "unbiasedness",
            ExperimentKind::Clt => "clt",
            ExperimentKind::PoissonGof => "poisson-gof",
            ExperimentKind::Lognormal => "lognormal",
            ExperimentKind::LaplaceVerify => "laplace-verify",
            ExperimentKind::Compare => "compare",
            ExperimentKind::Reduction => "reduction",
            ExperimentKind::RateEval => "rate-eval",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum EstimatorKind {
    Ams,
    Crude,
    Fixed,
}

impl EstimatorKind {
    pub fn name(self) -> &'static str {
        match self {
            EstimatorKind::Ams => "ams",
            EstimatorKind::Crude => "crude",
            EstimatorKind::Fixed => "fixed",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum DistKind {
    Exponential,
    Pareto,
}

impl DistKind {
    pub fn name(self) -> &'static str {
        match self {
            DistKind::Exponential => "exponential",
            DistKind::Pareto => "pareto",
        }
    }

    /// Exponential with unit rate, or the shifted Pareto with tail index 2.
    pub fn law(self) -> Box<dyn ContinuousLaw + Send + Sync> {
        match self {
            DistKind::Exponential => Box::new(Exponential),
            DistKind::Pareto => Box::new(ShiftedPareto::default()),
        }
    }
}

/// How AMS draws are produced when `k = 1` under the exponential law.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum EngineKind {
    /// Run the replica algorithm.
    Replica,
    /// Draw the iteration count from its exact Poisson law.
    Poisson,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    Csv,
    Json,
}

/// A fully resolved experiment description.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub estimator: EstimatorKind,
    pub n: Vec<u64>,
    pub k: Vec<u64>,
    pub p: Option<f64>,
    pub threshold: Option<f64>,
    pub dist: DistKind,
    /// Number of stages of the fixed-level estimator.
    pub levels: u32,
    pub lambda: Vec<f64>,
    /// Evaluation points of `rate-eval`.
    pub y: Vec<f64>,
    pub eps: f64,
    pub sigma: f64,
    /// Starting level `x` of the Laplace transform.
    pub x: f64,
    pub reps: u64,
    pub seed: u64,
    pub workers: Option<usize>,
    pub engine: EngineKind,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
    pub alpha: f64,
    pub se_multiplier: f64,
    pub slope_tolerance: f64,
    pub variance_tolerance: f64,
    pub ks_tolerance: f64,
    pub route_tolerance: f64,
    pub residual_tolerance: f64,
    pub limit_tolerance: f64,
    /// Largest accepted `|γ¹ − 1|` at the last `n` of a Laplace grid.
    pub coefficient_tolerance: f64,
    /// Smallest `n` at which tail dominance of AMS over crude MC is checked.
    pub dominance_min_n: u64,
}

impl ExperimentConfig {
    /// Defaults for an experiment kind; these reproduce the reference cells.
    pub fn defaults(kind: ExperimentKind) -> Self {
        let mut c = Self {
            experiment: kind,
            estimator: EstimatorKind::Ams,
            n: vec![100],
            k: vec![1],
            p: Some(0.1),
            threshold: None,
            dist: DistKind::Exponential,
            levels: 4,
            lambda: vec![0.5],
            y: vec![0.5],
            eps: 0.2,
            sigma: 0.5,
            x: 0.0,
            reps: 10_000,
            seed: 20_240_917,
            workers: None,
            engine: EngineKind::Replica,
            out: None,
            format: OutputFormat::Csv,
            alpha: 0.01,
            se_multiplier: 4.0,
            slope_tolerance: 0.2,
            variance_tolerance: 0.1,
            ks_tolerance: 0.02,
            route_tolerance: 1e-10,
            residual_tolerance: 1e-8,
            limit_tolerance: 0.02,
            coefficient_tolerance: 0.05,
            dominance_min_n: 16,
        };
        match kind {
            ExperimentKind::LdpSlope => {
                c.n = vec![8, 16, 24, 32, 40];
                c.p = Some(0.3);
                c.reps = 1_000_000;
            }
            ExperimentKind::Unbiasedness => {
                c.n = vec![10];
                c.k = vec![1, 5];
                c.p = Some(0.5);
                c.reps = 100_000;
            }
            ExperimentKind::Clt => {
                c.n = vec![1000];
                c.k = vec![1, 10];
            }
            ExperimentKind::PoissonGof => {
                c.n = vec![50];
                c.p = Some(exp(-1.0));
                c.reps = 100_000;
            }
            ExperimentKind::Lognormal => {
                c.n = vec![100, 400, 1600];
                c.p = None;
                c.reps = 100_000;
                c.engine = EngineKind::Poisson;
            }
            ExperimentKind::LaplaceVerify => {
                c.n = vec![30, 100, 300];
                c.k = vec![3];
                c.p = Some(0.2);
                c.reps = 0;
            }
            ExperimentKind::Compare => {
                c.n = vec![16, 32];
                c.k = vec![1];
                c.p = Some(0.1);
                c.levels = 32;
            }
            ExperimentKind::Reduction => {
                c.n = vec![50];
                c.k = vec![5];
                c.reps = 100_000;
            }
            ExperimentKind::RateEval => {
                c.p = Some(0.3);
                c.y = vec![0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];
                c.levels = 0;
            }
        }
        c
    }

    /// Defaults, then the file named by `overrides.config` (if any), then the
    /// remaining overrides.
    pub fn resolve(kind: ExperimentKind, overrides: &Overrides) -> Result<Self> {
        let mut config = Self::defaults(kind);
        if let Some(path) = &overrides.config {
            config.apply(&Overrides::from_file(path)?)?;
        }
        config.apply(overrides)?;
        config.validate()?;
        Ok(config)
    }

    pub fn apply(&mut self, o: &Overrides) -> Result<()> {
        if let Some(kind) = o.experiment {
            if kind != self.experiment {
                return Err(config_error!(
                    "config names experiment '{}' but '{}' was requested",
                    kind.name(),
                    self.experiment.name()
                ));
            }
        }
        macro_rules! set {
            ($field:ident) => {
                if let Some(v) = &o.$field {
                    self.$field = v.clone();
                }
            };
            ($field:ident, opt) => {
                if let Some(v) = &o.$field {
                    self.$field = Some(v.clone());
                }
            };
        }
        if o.p.is_some() && o.threshold.is_some() {
            return Err(config_error!("give either p or threshold, not both"));
        }
        if o.p.is_some() {
            self.threshold = None;
        }
        if o.threshold.is_some() {
            self.p = None;
        }
        set!(estimator);
        set!(n);
        set!(k);
        set!(p, opt);
        set!(threshold, opt);
        set!(dist);
        set!(levels);
        set!(lambda);
        set!(y);
        set!(eps);
        set!(sigma);
        set!(x);
        set!(reps);
        set!(seed);
        set!(workers, opt);
        set!(engine);
        set!(out, opt);
        set!(format);
        set!(alpha);
        set!(se_multiplier);
        set!(slope_tolerance);
        set!(variance_tolerance);
        set!(ks_tolerance);
        set!(route_tolerance);
        set!(residual_tolerance);
        set!(limit_tolerance);
        set!(coefficient_tolerance);
        set!(dominance_min_n);
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let kind = self.experiment;
        if self.n.is_empty() || self.k.is_empty() {
            return Err(config_error!("n and k grids must be non-empty"));
        }
        if self.n.iter().any(|&n| n < 1) {
            return Err(config_error!("every n must be positive"));
        }
        let needs_reps = !matches!(kind, ExperimentKind::LaplaceVerify | ExperimentKind::RateEval);
        if needs_reps && self.reps < 1 {
            return Err(config_error!("reps must be at least 1"));
        }
        if let Some(p) = self.p {
            if !(p > 0.0 && p < 1.0) {
                return Err(config_error!("p must lie in (0, 1), got {p}"));
            }
        }
        if let Some(a) = self.threshold {
            if !(a > 0.0 && a.is_finite()) {
                return Err(config_error!("threshold must be positive and finite, got {a}"));
            }
        }
        if kind != ExperimentKind::Lognormal && self.p.is_none() && self.threshold.is_none() {
            return Err(config_error!("either p or threshold is required"));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(config_error!("alpha must lie in (0, 1)"));
        }
        if !(self.se_multiplier > 0.0) {
            return Err(config_error!("se_multiplier must be positive"));
        }
        if self.workers == Some(0) {
            return Err(config_error!("workers must be at least 1"));
        }
        if !(self.eps > 0.0) {
            return Err(config_error!("eps must be positive"));
        }
        if !(self.sigma > 0.0) {
            return Err(config_error!("sigma must be positive"));
        }
        if matches!(kind, ExperimentKind::PoissonGof | ExperimentKind::Lognormal) && self.k != [1] {
            return Err(config_error!("{} requires k = 1", kind.name()));
        }
        if self.estimator == EstimatorKind::Fixed && self.levels == 0 {
            return Err(config_error!("the fixed-level estimator needs levels >= 1"));
        }
        if kind == ExperimentKind::LaplaceVerify && self.lambda.is_empty() {
            return Err(config_error!("lambda grid must be non-empty"));
        }
        if kind == ExperimentKind::RateEval && self.y.is_empty() {
            return Err(config_error!("y grid must be non-empty"));
        }
        if self.engine == EngineKind::Poisson && self.dist != DistKind::Exponential {
            return Err(config_error!("the Poisson engine is exact only for the exponential law"));
        }
        self.target()?;
        Ok(())
    }

    /// `(threshold a, target probability p)` under the configured law.
    pub fn target(&self) -> Result<(f64, f64)> {
        let law = self.dist.law();
        match (self.p, self.threshold) {
            (Some(p), None) => Ok((law.inverse_log_survival(ln(p)), p)),
            (None, Some(a)) => {
                let p = exp(law.log_survival(a));
                if !(p > 0.0 && p < 1.0) {
                    return Err(config_error!("threshold {a} gives P(X > a) = {p} outside (0, 1)"));
                }
                Ok((a, p))
            }
            (None, None) if self.experiment == ExperimentKind::Lognormal => Ok((f64::NAN, f64::NAN)),
            _ => Err(config_error!("give exactly one of p and threshold")),
        }
    }

    pub fn workers(&self) -> Option<usize> {
        self.workers
    }
}

fn one_or_many<'de, D, T>(de: D) -> std::result::Result<Option<Vec<T>>, D::Error>
where
    D: Deserializer<'de>,
    T: Deserialize<'de>,
{
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Shape<T> {
        One(T),
        Many(Vec<T>),
    }
    Ok(Option::<Shape<T>>::deserialize(de)?.map(|s| match s {
        Shape::One(v) => vec![v],
        Shape::Many(v) => v,
    }))
}

/// Optional settings from a flat TOML document or from command-line flags.
#[derive(Debug, Clone, Default, PartialEq, Args, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case")]
pub struct Overrides {
    /// Flat key-value TOML file; flags override its values.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    #[arg(skip)]
    pub experiment: Option<ExperimentKind>,
    #[arg(long, value_enum)]
    pub estimator: Option<EstimatorKind>,
    /// Replica counts (comma-separated grid).
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    #[serde(default, deserialize_with = "one_or_many")]
    pub n: Option<Vec<u64>>,
    /// Killed replicas per iteration (comma-separated grid).
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    #[serde(default, deserialize_with = "one_or_many")]
    pub k: Option<Vec<u64>>,
    /// Target probability; the threshold is derived from the law.
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub threshold: Option<f64>,
    #[arg(long, value_enum)]
    pub dist: Option<DistKind>,
    /// Number of fixed levels N.
    #[arg(long)]
    pub levels: Option<u32>,
    #[arg(long, value_delimiter = ',', num_args = 1, allow_hyphen_values = true)]
    #[serde(default, deserialize_with = "one_or_many")]
    pub lambda: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    #[serde(default, deserialize_with = "one_or_many")]
    pub y: Option<Vec<f64>>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long)]
    pub x: Option<f64>,
    /// Replication count M.
    #[arg(long)]
    pub reps: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long, value_enum)]
    pub engine: Option<EngineKind>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub se_multiplier: Option<f64>,
    #[arg(long)]
    pub slope_tolerance: Option<f64>,
    #[arg(long)]
    pub variance_tolerance: Option<f64>,
    #[arg(long)]
    pub ks_tolerance: Option<f64>,
    #[arg(long)]
    pub route_tolerance: Option<f64>,
    #[arg(long)]
    pub residual_tolerance: Option<f64>,
    #[arg(long)]
    pub limit_tolerance: Option<f64>,
    #[arg(long)]
    pub coefficient_tolerance: Option<f64>,
    #[arg(long)]
    pub dominance_min_n: Option<u64>,
}

impl Overrides {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| config_error!("cannot read config file {}: {e}", path.display()))?;
        Self::from_toml(&text)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }
}
