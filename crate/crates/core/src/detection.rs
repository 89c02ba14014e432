//! Detection thresholds, decision rules and Monte Carlo error estimation.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, precondition, Error, Result};
use crate::graph::{ModelParams, Sampler, Seed};
use crate::special::{binomial_exact, binomial_f64, ln_binomial};
use crate::sphere::{signed_cycle_expectation, CycleExpectationResult};
use crate::stats::{
    constrained_scan_statistic, scan_statistic, CenteredAdjacency, ScanConfig, ScanMode, EXHAUSTIVE_SUBSET_LIMIT,
};

/// Fraction of the planted mean used as the threshold.
pub const DEFAULT_THRESHOLD_FRACTION: f64 = 0.5;

/// Restarts used by the null-side scan when exhaustive search is too large.
pub const DEFAULT_LOCAL_SEARCH_RESTARTS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum TestKind {
    GlobalTriangle,
    Scan,
    ConstrainedScan,
    Cycle(usize),
}

impl fmt::Display for TestKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TestKind::GlobalTriangle => f.write_str("global-triangle"),
            TestKind::Scan => f.write_str("scan"),
            TestKind::ConstrainedScan => f.write_str("constrained-scan"),
            TestKind::Cycle(ell) => write!(f, "cycle-{ell}"),
        }
    }
}

impl FromStr for TestKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "global-triangle" | "global" | "triangle" => Ok(TestKind::GlobalTriangle),
            "scan" => Ok(TestKind::Scan),
            "constrained-scan" => Ok(TestKind::ConstrainedScan),
            _ => {
                let ell = s
                    .strip_prefix("cycle-")
                    .and_then(|x| x.parse::<usize>().ok())
                    .ok_or_else(|| precondition(format!("unknown test kind {s:?}")))?;
                if ell < 3 {
                    return Err(precondition(format!("cycle length must be >= 3, got {ell}")));
                }
                Ok(TestKind::Cycle(ell))
            }
        }
    }
}

impl From<TestKind> for String {
    fn from(k: TestKind) -> String {
        k.to_string()
    }
}

impl TryFrom<String> for TestKind {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// Planted or null.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Decision {
    Null,
    Planted,
}

/// A fully specified test: statistic, model, threshold and constraints.
#[derive(Debug, Clone, PartialEq)]
pub struct TestSpec {
    pub kind: TestKind,
    pub params: ModelParams,
    pub threshold: f64,
    pub sigma_sq: f64,
    pub b: f64,
    pub cycle_constant: f64,
    /// How the scan maximum is taken when no oracle subset is supplied.
    pub scan_mode: ScanMode,
}

impl TestSpec {
    /// Builds a `TestSpec` with the default threshold fraction.
    pub fn new(kind: TestKind, params: ModelParams, cycle_constant: f64) -> Result<Self> {
        Self::with_fraction(kind, params, cycle_constant, DEFAULT_THRESHOLD_FRACTION)
    }

    /// Threshold = `fraction` times the planted mean of the statistic.
    /// Truncation of the series is not an error here; see [`planted_mean`].
    pub fn with_fraction(kind: TestKind, params: ModelParams, cycle_constant: f64, fraction: f64) -> Result<Self> {
        params.validate()?;
        if !(cycle_constant > 0.0) {
            return Err(precondition("cycle constant must be positive"));
        }
        let threshold = fraction * planted_mean(kind, &params)?.0;
        let (sigma_sq, b) = match kind {
            TestKind::ConstrainedScan => constraint_params(&params, cycle_constant)?,
            _ => (f64::INFINITY, f64::INFINITY),
        };
        let k_minus = params.k_minus();
        let exhaustive = binomial_exact(params.n as u64, k_minus as u64).is_some_and(|c| c <= EXHAUSTIVE_SUBSET_LIMIT);
        let scan_mode = if exhaustive {
            ScanMode::Exhaustive
        } else {
            ScanMode::LocalSearch { restarts: DEFAULT_LOCAL_SEARCH_RESTARTS, seed: 0 }
        };
        Ok(Self { kind, params, threshold, sigma_sq, b, cycle_constant, scan_mode })
    }

    pub fn with_threshold(mut self, threshold: f64) -> Self {
        self.threshold = threshold;
        self
    }

    fn scan_config(&self, oracle: Option<&[usize]>) -> ScanConfig {
        let mode = match oracle {
            Some(a) => ScanMode::Oracle(a.to_vec()),
            None => self.scan_mode.clone(),
        };
        ScanConfig { k_minus: self.params.k_minus(), mode, sigma_sq: self.sigma_sq, b: self.b }
    }
}

/// Number of distinct `ℓ`-cycles in `K_n`: `C(n, ℓ)(ℓ−1)!/2`, as a log.
fn ln_cycle_census(n: usize, ell: usize) -> f64 {
    let ln_fact: f64 = (2..ell).map(|i| (i as f64).ln()).sum();
    ln_binomial(n as f64, ell) + ln_fact - std::f64::consts::LN_2
}

/// Expected value of the test statistic under the planted model, together
/// with the series evaluation behind it.
pub fn planted_mean(kind: TestKind, params: &ModelParams) -> Result<(f64, CycleExpectationResult<f64>)> {
    let ell = match kind {
        TestKind::Cycle(ell) => ell,
        _ => 3,
    };
    if params.p > 0.5 {
        return Err(domain(format!("thresholds need p <= 1/2, got {}", params.p)));
    }
    let series = signed_cycle_expectation(ell, params.p, params.d)?;
    let mean = match kind {
        TestKind::GlobalTriangle | TestKind::Cycle(_) => {
            if params.n < ell {
                0.0
            } else {
                let q = params.membership();
                (ln_cycle_census(params.n, ell)).exp() * q.powi(ell as i32) * series.value
            }
        }
        TestKind::Scan | TestKind::ConstrainedScan => binomial_f64(params.k_minus() as u64, 3) * series.value,
    };
    Ok((mean, series))
}

fn strict(series: &CycleExpectationResult<f64>) -> Result<()> {
    series.check().map(|_| ())
}

/// `½ C(n,3) (k/n)³ E[signed triangle]`.
pub fn gamma_tri(params: &ModelParams) -> Result<f64> {
    let (mean, series) = planted_mean(TestKind::GlobalTriangle, params)?;
    strict(&series)?;
    Ok(DEFAULT_THRESHOLD_FRACTION * mean)
}

/// `½ C(k⁻,3) E[signed triangle]`.
pub fn gamma_scan(params: &ModelParams) -> Result<f64> {
    let (mean, series) = planted_mean(TestKind::Scan, params)?;
    strict(&series)?;
    Ok(DEFAULT_THRESHOLD_FRACTION * mean)
}

/// `½ C(n,ℓ) ((ℓ−1)!/2) (k/n)^ℓ E[signed ℓ-cycle]`.
pub fn gamma_cycle(params: &ModelParams, ell: usize) -> Result<f64> {
    let (mean, series) = planted_mean(TestKind::Cycle(ell), params)?;
    strict(&series)?;
    Ok(DEFAULT_THRESHOLD_FRACTION * mean)
}

/// `(σ², B)` of the constrained scan:
/// `σ² = k³p² + C⁴k⁴p⁴ log²(1/p)/d`, `B = (2048kp² + 8)⌈log k⌉`.
pub fn constraint_params(params: &ModelParams, cycle_constant: f64) -> Result<(f64, f64)> {
    let (k, p, d) = (params.k, params.p, params.d as f64);
    if k < 2.0 {
        return Err(precondition(format!("constraints need k >= 2, got {k}")));
    }
    let l = (1.0 / p).ln();
    let sigma_sq = k.powi(3) * p * p + cycle_constant.powi(4) * k.powi(4) * p.powi(4) * l * l / d;
    let b = (2048.0 * k * p * p + 8.0) * k.ln().ceil();
    Ok((sigma_sq, b))
}

/// Value of the statistic of `spec` on `g`. `None` only for a constrained scan
/// whose feasible family is empty.
pub fn statistic(spec: &TestSpec, g: &crate::graph::Graph, oracle: Option<&[usize]>) -> Result<Option<f64>> {
    let p = spec.params.p;
    match spec.kind {
        TestKind::GlobalTriangle => Ok(Some(CenteredAdjacency::new(g, p).triangles())),
        TestKind::Cycle(ell) => Ok(Some(CenteredAdjacency::new(g, p).cycles(ell)?)),
        TestKind::Scan => Ok(Some(scan_statistic(g, p, &spec.scan_config(oracle))?.value)),
        TestKind::ConstrainedScan => Ok(constrained_scan_statistic(g, p, &spec.scan_config(oracle))?.map(|r| r.value)),
    }
}

/// Planted iff the statistic strictly exceeds the threshold.
pub fn run_test(spec: &TestSpec, g: &crate::graph::Graph, oracle_subset: Option<&[usize]>) -> Result<Decision> {
    Ok(match statistic(spec, g, oracle_subset)? {
        Some(v) if v > spec.threshold => Decision::Planted,
        _ => Decision::Null,
    })
}

/// Empirical error rates with 95% normal-approximation half-widths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorEstimate {
    pub type1: f64,
    pub type1_hw: f64,
    pub type2: f64,
    pub type2_hw: f64,
    /// Null draws, and planted draws attempted.
    pub trials: usize,
    /// Planted draws whose community size fell outside `[k⁻, k⁺]`.
    pub excluded: usize,
    pub seed: Seed,
}

impl ErrorEstimate {
    pub fn total(&self) -> f64 {
        self.type1 + self.type2
    }

    /// Planted draws that entered the type II rate.
    pub fn planted_trials(&self) -> usize {
        self.trials - self.excluded
    }
}

/// `1.96 √(r(1−r)/m)`.
pub fn half_width(rate: f64, m: usize) -> f64 {
    if m == 0 {
        return f64::NAN;
    }
    1.96 * (rate * (1.0 - rate) / m as f64).sqrt()
}

/// Stream index of null trial `t`.
pub fn null_stream(t: usize) -> u64 {
    2 * t as u64
}

/// Stream index of planted trial `t`.
pub fn planted_stream(t: usize) -> u64 {
    2 * t as u64 + 1
}

#[derive(Default, Clone, Copy)]
struct Tally {
    false_alarms: usize,
    misses: usize,
    excluded: usize,
}

impl Tally {
    fn merge(self, o: Tally) -> Tally {
        Tally {
            false_alarms: self.false_alarms + o.false_alarms,
            misses: self.misses + o.misses,
            excluded: self.excluded + o.excluded,
        }
    }
}

fn one_trial(spec: &TestSpec, sampler: &Sampler, seed: Seed, t: usize) -> Result<Tally> {
    let mut tally = Tally::default();
    let null = sampler.null(&mut seed.stream(null_stream(t)));
    if run_test(spec, &null, None)? == Decision::Planted {
        tally.false_alarms = 1;
    }
    let draw = sampler.planted(&mut seed.stream(planted_stream(t)));
    let (lo, hi) = (spec.params.k_minus(), spec.params.k_plus());
    let s = draw.community_size();
    if s < lo || s > hi {
        tally.excluded = 1;
        return Ok(tally);
    }
    let oracle = match spec.kind {
        TestKind::Scan | TestKind::ConstrainedScan => draw.prefix(lo),
        _ => None,
    };
    if run_test(spec, &draw.graph, oracle.as_deref())? == Decision::Null {
        tally.misses = 1;
    }
    Ok(tally)
}

/// Type I rate from `G(n, p)` draws and type II rate from planted draws.
///
/// Trial `t` uses streams `2t` (null) and `2t + 1` (planted), so results do
/// not depend on scheduling and a sweep over `d` shares random numbers.
/// Scan tests evaluate planted draws on the `k⁻` smallest community
/// vertices; planted draws with `|S| ∉ [k⁻, k⁺]` are counted as excluded.
pub fn estimate_errors(spec: &TestSpec, trials: usize, seed: Seed) -> Result<ErrorEstimate> {
    if trials == 0 {
        return Err(precondition("trials must be at least 1"));
    }
    let sampler = Sampler::new(spec.params)?;
    let tally = (0..trials)
        .into_par_iter()
        .map(|t| one_trial(spec, &sampler, seed, t))
        .try_reduce(Tally::default, |a, b| Ok(a.merge(b)))?;
    let planted = trials - tally.excluded;
    let type1 = tally.false_alarms as f64 / trials as f64;
    let type2 = if planted == 0 { f64::NAN } else { tally.misses as f64 / planted as f64 };
    Ok(ErrorEstimate {
        type1,
        type1_hw: half_width(type1, trials),
        type2,
        type2_hw: half_width(type2, planted),
        trials,
        excluded: tally.excluded,
        seed,
    })
}

/// Planted mean shift over null standard deviation for the global
/// `ℓ`-cycle statistic.
pub fn cycle_test_snr(params: &ModelParams, ell: usize) -> Result<f64> {
    if ell < 3 {
        return Err(precondition(format!("cycle length must be >= 3, got {ell}")));
    }
    let series = signed_cycle_expectation(ell, params.p, params.d)?;
    let p = params.p;
    let ell_f = ell as f64;
    let ln_snr =
        0.5 * ln_cycle_census(params.n, ell) + ell_f * params.membership().ln() - 0.5 * ell_f * (p * (1.0 - p)).ln();
    Ok(ln_snr.exp() * series.value)
}

/// `E[signed triangle] / p³` under the full geometric model.
pub fn epsilon(p: f64, d: usize) -> Result<f64> {
    Ok(signed_cycle_expectation(3, p, d)?.value / p.powi(3))
}

/// One grid point of a calibration run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CalibrationPoint {
    pub ell: usize,
    pub p: f64,
    pub d: usize,
    /// Series value over `p^ℓ log^{ℓ/2}(1/p)/d^{ℓ/2−1}`.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Calibration {
    pub constant: f64,
    pub points: Vec<CalibrationPoint>,
}

/// Default calibration grid.
pub const CALIBRATION_DIMENSIONS: [usize; 4] = [64, 256, 1024, 4096];
pub const CALIBRATION_DENSITIES: [f64; 3] = [0.1, 0.3, 0.5];
pub const CALIBRATION_LENGTHS: [usize; 3] = [3, 4, 5];

/// Smallest `C ≥ 1` with every ratio in `[C^{−ℓ}, C^ℓ]`.
pub fn calibrate_cycle_constant(p_grid: &[f64], d_grid: &[usize], ell_list: &[usize]) -> Result<Calibration> {
    if p_grid.is_empty() || d_grid.is_empty() || ell_list.is_empty() {
        return Err(precondition("calibration grids must be non-empty"));
    }
    let mut points = Vec::with_capacity(p_grid.len() * d_grid.len() * ell_list.len());
    let mut constant = 1.0f64;
    for &ell in ell_list {
        for &p in p_grid {
            for &d in d_grid {
                let ratio = signed_cycle_expectation(ell, p, d)?.ratio();
                if !(ratio > 0.0) {
                    return Err(domain(format!("non-positive series ratio {ratio} at (ell={ell}, p={p}, d={d})")));
                }
                constant = constant.max(ratio.max(ratio.recip()).powf(1.0 / ell as f64));
                points.push(CalibrationPoint { ell, p, d, ratio });
            }
        }
    }
    Ok(Calibration { constant, points })
}

/// Calibration over the default grid.
pub fn default_calibration() -> Result<Calibration> {
    calibrate_cycle_constant(&CALIBRATION_DENSITIES, &CALIBRATION_DIMENSIONS, &CALIBRATION_LENGTHS)
}
