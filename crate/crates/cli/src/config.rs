//! Experiment configuration files.
//!
//! Configs are TOML. Every count accepts scientific notation (`n = 1e4`,
//! `trials = "1e5"`), and unknown keys are rejected.

use std::path::{Path, PathBuf};

use geocomm::detection::TestKind;
use geocomm::ModelParams;
use serde::de::{self, Deserializer};
use serde::Deserialize;

use crate::CliError;

/// Largest sweep grid accepted.
pub const MAX_GRID_POINTS: usize = 10_000;

fn count_from_f64<E: de::Error>(x: f64) -> Result<u64, E> {
    if x.is_finite() && x >= 0.0 && x.fract() == 0.0 && x <= u64::MAX as f64 {
        Ok(x as u64)
    } else {
        Err(E::custom(format!("expected a non-negative whole number, got {x}")))
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawNumber {
    Int(i64),
    Float(f64),
    Text(String),
}

impl RawNumber {
    fn into_count<E: de::Error>(self) -> Result<u64, E> {
        match self {
            RawNumber::Int(i) => {
                u64::try_from(i).map_err(|_| E::custom(format!("expected a non-negative count, got {i}")))
            }
            RawNumber::Float(x) => count_from_f64(x),
            RawNumber::Text(s) => match s.trim().parse::<u64>() {
                Ok(v) => Ok(v),
                Err(_) => {
                    count_from_f64(s.trim().parse::<f64>().map_err(|_| E::custom(format!("not a number: {s:?}")))?)
                }
            },
        }
    }

    fn into_real<E: de::Error>(self) -> Result<f64, E> {
        match self {
            RawNumber::Int(i) => Ok(i as f64),
            RawNumber::Float(x) => Ok(x),
            RawNumber::Text(s) => s.trim().parse::<f64>().map_err(|_| E::custom(format!("not a number: {s:?}"))),
        }
    }
}

fn count<'de, D: Deserializer<'de>>(d: D) -> Result<usize, D::Error> {
    let v = RawNumber::deserialize(d)?.into_count()?;
    usize::try_from(v).map_err(de::Error::custom)
}

fn count_u64<'de, D: Deserializer<'de>>(d: D) -> Result<u64, D::Error> {
    RawNumber::deserialize(d)?.into_count()
}

fn opt_count<'de, D: Deserializer<'de>>(d: D) -> Result<Option<usize>, D::Error> {
    count(d).map(Some)
}

fn real<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    RawNumber::deserialize(d)?.into_real()
}

fn opt_real<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
    real(d).map(Some)
}

fn reals<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
    Vec::<RawNumber>::deserialize(d)?.into_iter().map(RawNumber::into_real).collect()
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    #[serde(deserialize_with = "count")]
    pub n: usize,
    #[serde(deserialize_with = "real")]
    pub p: f64,
    #[serde(deserialize_with = "count")]
    pub d: usize,
    #[serde(deserialize_with = "real")]
    pub k: f64,
}

impl ModelSection {
    pub fn params(&self) -> Result<ModelParams, CliError> {
        ModelParams::new(self.n, self.p, self.d, self.k).map_err(|e| CliError::Config(format!("[model]: {e}")))
    }
}

/// How a scan maximum is taken on null draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScanSearch {
    /// Exhaustive when at most 10⁷ subsets, otherwise local search.
    #[default]
    Auto,
    Exhaustive,
    LocalSearch,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSection {
    #[serde(default)]
    pub search: ScanSearch,
    #[serde(default = "default_restarts", deserialize_with = "count")]
    pub restarts: usize,
}

fn default_restarts() -> usize {
    geocomm::detection::DEFAULT_LOCAL_SEARCH_RESTARTS
}

impl Default for ScanSection {
    fn default() -> Self {
        Self { search: ScanSearch::Auto, restarts: default_restarts() }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstrainedScanSection {
    #[serde(default)]
    pub search: ScanSearch,
    #[serde(default = "default_restarts", deserialize_with = "count")]
    pub restarts: usize,
    /// Constant in `σ²`; calibrated on the default grid when absent.
    #[serde(default, deserialize_with = "opt_real")]
    pub cycle_constant: Option<f64>,
}

impl Default for ConstrainedScanSection {
    fn default() -> Self {
        Self { search: ScanSearch::Auto, restarts: default_restarts(), cycle_constant: None }
    }
}

/// A sweep axis: an explicit list, or `points` values from `from` to `to`
/// spaced logarithmically (or linearly with `spacing = "linear"`).
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Axis {
    List(#[serde(deserialize_with = "reals")] Vec<f64>),
    Range(RangeAxis),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    #[default]
    Log,
    Linear,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RangeAxis {
    #[serde(deserialize_with = "real")]
    pub from: f64,
    #[serde(deserialize_with = "real")]
    pub to: f64,
    #[serde(deserialize_with = "count")]
    pub points: usize,
    #[serde(default)]
    pub spacing: Spacing,
}

impl Axis {
    pub fn values(&self) -> Result<Vec<f64>, CliError> {
        match self {
            Axis::List(v) => {
                if v.is_empty() {
                    return Err(CliError::Config("sweep axis list is empty".into()));
                }
                Ok(v.clone())
            }
            Axis::Range(r) => {
                if r.points == 0 {
                    return Err(CliError::Config("sweep range needs at least one point".into()));
                }
                if r.points > MAX_GRID_POINTS {
                    return Err(CliError::Config(format!("sweep range has more than {MAX_GRID_POINTS} points")));
                }
                if r.points == 1 {
                    return Ok(vec![r.from]);
                }
                let m = (r.points - 1) as f64;
                match r.spacing {
                    Spacing::Log => {
                        if !(r.from > 0.0 && r.to > 0.0) {
                            return Err(CliError::Config("log-spaced sweep needs positive endpoints".into()));
                        }
                        let (a, b) = (r.from.ln(), r.to.ln());
                        Ok((0..r.points)
                            .map(|i| match i {
                                0 => r.from,
                                _ if i + 1 == r.points => r.to,
                                _ => (a + (b - a) * i as f64 / m).exp(),
                            })
                            .collect())
                    }
                    Spacing::Linear => Ok((0..r.points)
                        .map(|i| if i + 1 == r.points { r.to } else { r.from + (r.to - r.from) * i as f64 / m })
                        .collect()),
                }
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub n: Option<Axis>,
    pub p: Option<Axis>,
    pub d: Option<Axis>,
    pub k: Option<Axis>,
}

impl SweepSection {
    pub fn is_empty(&self) -> bool {
        self.n.is_none() && self.p.is_none() && self.d.is_none() && self.k.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LowdegSection {
    #[serde(default = "default_v_max", deserialize_with = "count")]
    pub v_max: usize,
    #[serde(default = "default_max_edges", deserialize_with = "count")]
    pub max_edges: usize,
    /// Monte Carlo draws per coefficient; defaults to the top-level `trials`.
    #[serde(default, deserialize_with = "opt_count")]
    pub trials: Option<usize>,
}

fn default_v_max() -> usize {
    4
}

fn default_max_edges() -> usize {
    10
}

impl Default for LowdegSection {
    fn default() -> Self {
        Self { v_max: default_v_max(), max_edges: default_max_edges(), trials: None }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WishartSection {
    /// Spherical-Wishart order and dimension for the spectral summary.
    #[serde(default = "default_wishart_k", deserialize_with = "count")]
    pub k: usize,
    #[serde(default = "default_wishart_d", deserialize_with = "count")]
    pub d: usize,
    #[serde(default = "default_draws", deserialize_with = "count")]
    pub draws: usize,
    /// Multiple of `√(k/d)` counted as a spectral deviation exceedance.
    #[serde(default = "default_deviation_constant", deserialize_with = "real")]
    pub deviation_constant: f64,
    /// Community size for the route-equivalence check on `[model]`;
    /// defaults to `⌊n/2⌋`.
    #[serde(default, deserialize_with = "opt_count")]
    pub community: Option<usize>,
    /// Draws per route; defaults to the top-level `trials`.
    #[serde(default, deserialize_with = "opt_count")]
    pub route_trials: Option<usize>,
}

fn default_wishart_k() -> usize {
    20
}

fn default_wishart_d() -> usize {
    20_000
}

fn default_draws() -> usize {
    1000
}

fn default_deviation_constant() -> f64 {
    10.0
}

impl Default for WishartSection {
    fn default() -> Self {
        Self {
            k: default_wishart_k(),
            d: default_wishart_d(),
            draws: default_draws(),
            deviation_constant: default_deviation_constant(),
            community: None,
            route_trials: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelSection,
    #[serde(default = "default_tests")]
    pub tests: Vec<TestKind>,
    #[serde(default = "default_trials", deserialize_with = "count")]
    pub trials: usize,
    #[serde(default, deserialize_with = "count_u64")]
    pub seed: u64,
    #[serde(default, deserialize_with = "opt_count")]
    pub workers: Option<usize>,
    #[serde(default)]
    pub out: Option<PathBuf>,
    /// Threshold as a fraction of the planted mean of the statistic.
    #[serde(default = "default_fraction", deserialize_with = "real")]
    pub threshold_fraction: f64,
    #[serde(default)]
    pub scan: ScanSection,
    #[serde(default, rename = "constrained-scan")]
    pub constrained_scan: ConstrainedScanSection,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub lowdeg: LowdegSection,
    #[serde(default)]
    pub wishart: WishartSection,
}

fn default_tests() -> Vec<TestKind> {
    vec![TestKind::GlobalTriangle]
}

fn default_trials() -> usize {
    200
}

fn default_fraction() -> f64 {
    geocomm::detection::DEFAULT_THRESHOLD_FRACTION
}

/// Overrides from the command line.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: Self = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text =
            std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("reading {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(s) = o.seed {
            self.seed = s;
        }
        if let Some(w) = o.workers {
            self.workers = Some(w);
        }
        if let Some(p) = &o.out {
            self.out = Some(p.clone());
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.model.params()?;
        if self.trials == 0 {
            return Err(CliError::Config("trials must be at least 1".into()));
        }
        if self.tests.is_empty() {
            return Err(CliError::Config("tests must name at least one test kind".into()));
        }
        if !(self.threshold_fraction > 0.0 && self.threshold_fraction < 1.0) {
            return Err(CliError::Config(format!(
                "threshold_fraction must lie in (0, 1), got {}",
                self.threshold_fraction
            )));
        }
        if self.workers == Some(0) {
            return Err(CliError::Config("workers must be at least 1".into()));
        }
        if let Some(c) = self.constrained_scan.cycle_constant {
            if !(c > 0.0) {
                return Err(CliError::Config("cycle_constant must be positive".into()));
            }
        }
        self.grid()?;
        Ok(())
    }

    /// Sweep grid in row order (`n` slowest, then `p`, `d`, `k`). Without
    /// axes this is the single `[model]` point.
    pub fn grid(&self) -> Result<Vec<ModelParams>, CliError> {
        let m = &self.model;
        let axis = |a: &Option<Axis>, base: f64| a.as_ref().map_or(Ok(vec![base]), Axis::values);
        let ns = axis(&self.sweep.n, m.n as f64)?;
        let ps = axis(&self.sweep.p, m.p)?;
        let ds = axis(&self.sweep.d, m.d as f64)?;
        let ks = axis(&self.sweep.k, m.k)?;
        let size = ns.len().saturating_mul(ps.len()).saturating_mul(ds.len()).saturating_mul(ks.len());
        if size > MAX_GRID_POINTS {
            return Err(CliError::Config(format!("sweep grid has {size} points, limit is {MAX_GRID_POINTS}")));
        }
        let mut out = Vec::with_capacity(size);
        for &n in &ns {
            for &p in &ps {
                for &d in &ds {
                    for &k in &ks {
                        let (n, d) = (n.round(), d.round());
                        if !(n >= 1.0 && d >= 1.0) {
                            return Err(CliError::Config(format!("sweep point n = {n}, d = {d} is invalid")));
                        }
                        let params = ModelParams::new(n as usize, p, d as usize, k)
                            .map_err(|e| CliError::Config(format!("sweep point (n={n}, p={p}, d={d}, k={k}): {e}")))?;
                        out.push(params);
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Parses a count given on the command line, accepting `1e6`.
pub fn parse_count(s: &str) -> Result<u64, String> {
    RawNumber::Text(s.to_string()).into_count::<de::value::Error>().map_err(|e| e.to_string())
}
