//! JSON reports of the analysis commands.

use geocomm::detection::default_calibration;
use geocomm::ensembles::{composite_planted_graph, sample_spherical_wishart, spectral_deviation};
use geocomm::lowdeg::{
    fourier_coefficient_mc, low_degree_advantage, mean_and_stderr, AdvantageReport, FourierEstimate,
};
use geocomm::sphere::{signed_cycle_expectation, solve_threshold};
use geocomm::stats::CenteredAdjacency;
use geocomm::{ModelParams, Sampler, Seed, SmallGraph};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::{version, CliError};

#[derive(Debug, Clone, Serialize)]
pub struct TauReport {
    pub version: &'static str,
    pub p: f64,
    pub d: usize,
    pub tau: f64,
    pub residual: f64,
    /// `√(3 log(1/p)/d)` for `p ≤ ½`.
    pub upper_bound: Option<f64>,
}

pub fn tau_report(p: f64, d: usize) -> Result<TauReport, CliError> {
    let t = solve_threshold(p, d)?;
    Ok(TauReport {
        version: version(),
        p,
        d,
        tau: t.tau,
        residual: t.residual,
        upper_bound: (p <= 0.5).then(|| t.upper_bound()),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CycleReport {
    pub version: &'static str,
    pub ell: usize,
    pub p: f64,
    pub d: usize,
    pub value: f64,
    pub truncation_m: usize,
    pub tail_bound: f64,
    pub scale: f64,
    pub ratio: f64,
    pub hit_cap: bool,
    pub truncation_failed: bool,
    pub below_regime: bool,
    /// Calibrated constant `C` on the default grid.
    pub constant: f64,
    /// For triangles, `scale / C`.
    pub lower_bound: Option<f64>,
}

pub fn cycle_report(ell: usize, p: f64, d: usize, strict: bool) -> Result<CycleReport, CliError> {
    let r = signed_cycle_expectation(ell, p, d)?;
    if strict {
        r.check()?;
    }
    let constant = default_calibration()?.constant;
    Ok(CycleReport {
        version: version(),
        ell,
        p,
        d,
        value: r.value,
        truncation_m: r.truncation_m,
        tail_bound: r.tail_bound,
        scale: r.scale,
        ratio: r.ratio(),
        hit_cap: r.hit_cap,
        truncation_failed: r.truncation_failed(),
        below_regime: r.below_regime,
        constant,
        lower_bound: r.triangle_lower_bound(constant),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct LowdegTerm {
    pub vertices: usize,
    pub edges: Vec<(usize, usize)>,
    pub forest: bool,
    /// A tree component forces `Φ = 0`; such terms are not estimated.
    pub analytic_zero: bool,
    pub embeddings: f64,
    pub phi: f64,
    pub stderr: f64,
    pub contribution: f64,
    pub contribution_stderr: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct TriangleCheck {
    pub phi: f64,
    pub stderr: f64,
    /// `(k/n)³ E[signed triangle] / (p(1−p))^{3/2}` from the series.
    pub predicted: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct LowdegReport {
    pub version: &'static str,
    pub model: ModelParams,
    pub v_max: usize,
    pub max_edges: usize,
    pub trials: usize,
    pub seed: u64,
    pub advantage: f64,
    pub advantage_stderr: f64,
    pub terms: Vec<LowdegTerm>,
    pub triangle: TriangleCheck,
}

fn lowdeg_terms(r: &AdvantageReport) -> Vec<LowdegTerm> {
    r.terms
        .iter()
        .map(|t| {
            let (phi, stderr) = t.estimate.as_ref().map_or((0.0, 0.0), |e: &FourierEstimate| (e.phi, e.stderr));
            LowdegTerm {
                vertices: t.graph.vertices(),
                edges: t.graph.edges(),
                forest: t.graph.is_forest(),
                analytic_zero: t.estimate.is_none(),
                embeddings: t.embeddings,
                phi,
                stderr,
                contribution: t.contribution,
                contribution_stderr: t.contribution_stderr,
            }
        })
        .collect()
}

pub fn lowdeg_report(cfg: &ExperimentConfig) -> Result<LowdegReport, CliError> {
    let params = cfg.model.params()?;
    let trials = cfg.lowdeg.trials.unwrap_or(cfg.trials);
    let seed = Seed(cfg.seed);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers.unwrap_or(1))
        .build()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    pool.install(|| {
        let adv = low_degree_advantage(&params, cfg.lowdeg.v_max, cfg.lowdeg.max_edges, trials, seed)?;
        let tri = fourier_coefficient_mc(&SmallGraph::triangle(), &params, trials, seed.derive(u64::MAX))?;
        let predicted = (params.p <= 0.5 && params.d >= 4)
            .then(|| signed_cycle_expectation(3, params.p, params.d))
            .transpose()?
            .map(|s| params.membership().powi(3) * s.value / (params.p * (1.0 - params.p)).powf(1.5));
        Ok(LowdegReport {
            version: version(),
            model: params,
            v_max: cfg.lowdeg.v_max,
            max_edges: cfg.lowdeg.max_edges,
            trials,
            seed: cfg.seed,
            advantage: adv.value,
            advantage_stderr: adv.stderr,
            terms: lowdeg_terms(&adv),
            triangle: TriangleCheck { phi: tri.phi, stderr: tri.stderr, predicted },
        })
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct MeanEstimate {
    pub mean: f64,
    pub stderr: f64,
}

impl MeanEstimate {
    fn of(values: &[f64]) -> Self {
        let (mean, stderr) = mean_and_stderr(values);
        Self { mean, stderr }
    }

    /// Difference over combined standard error.
    fn z(&self, other: &MeanEstimate) -> f64 {
        (self.mean - other.mean) / (self.stderr.powi(2) + other.stderr.powi(2)).sqrt()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RouteReport {
    pub community: Vec<usize>,
    pub trials: usize,
    /// Fraction of community-internal pairs that are edges.
    pub composite_edge_marginal: MeanEstimate,
    pub direct_edge_marginal: MeanEstimate,
    pub composite_triangles: MeanEstimate,
    pub direct_triangles: MeanEstimate,
    pub edge_marginal_z: f64,
    pub triangles_z: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumReport {
    pub k: usize,
    pub d: usize,
    pub draws: usize,
    /// `√(k/d)`.
    pub scale: f64,
    pub deviation_constant: f64,
    pub mean: f64,
    pub median: f64,
    pub q99: f64,
    pub max: f64,
    /// Fraction of draws with deviation at most `constant · scale`.
    pub within_bound: f64,
    /// Deviation of a `k = 1` draw.
    pub k1_deviation: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct WishartReport {
    pub version: &'static str,
    pub model: ModelParams,
    pub seed: u64,
    pub route: RouteReport,
    pub spectrum: SpectrumReport,
}

/// Composite-matrix versus direct planted sampling on a fixed community.
pub fn route_comparison(
    params: &ModelParams,
    community: &[usize],
    trials: usize,
    seed: Seed,
) -> Result<RouteReport, CliError> {
    let sampler = Sampler::new(*params)?;
    let inner_pairs = community.len() * community.len().saturating_sub(1) / 2;
    let summarize = |g: &geocomm::Graph| -> (f64, f64) {
        let mut e = 0usize;
        for (a, &i) in community.iter().enumerate() {
            for &j in &community[a + 1..] {
                e += g.has_edge(i, j) as usize;
            }
        }
        let marginal = if inner_pairs == 0 { 0.0 } else { e as f64 / inner_pairs as f64 };
        (marginal, CenteredAdjacency::new(g, params.p).triangles())
    };
    let composite_seed = seed.derive(1);
    let direct_seed = seed.derive(2);
    let composite: Vec<(f64, f64)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            composite_planted_graph(community, params, &mut composite_seed.stream(t as u64)).map(|g| summarize(&g))
        })
        .collect::<Result<_, _>>()?;
    let direct: Vec<(f64, f64)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            sampler.planted_with_community(community, &mut direct_seed.stream(t as u64)).map(|s| summarize(&s.graph))
        })
        .collect::<Result<_, _>>()?;
    let split = |v: &[(f64, f64)]| -> (Vec<f64>, Vec<f64>) { v.iter().copied().unzip() };
    let (cm, ct) = split(&composite);
    let (dm, dt) = split(&direct);
    let (cm, dm, ct, dt) = (MeanEstimate::of(&cm), MeanEstimate::of(&dm), MeanEstimate::of(&ct), MeanEstimate::of(&dt));
    Ok(RouteReport {
        community: community.to_vec(),
        trials,
        edge_marginal_z: cm.z(&dm),
        triangles_z: ct.z(&dt),
        composite_edge_marginal: cm,
        direct_edge_marginal: dm,
        composite_triangles: ct,
        direct_triangles: dt,
    })
}

/// Spectral deviations of spherical-Wishart draws.
pub fn spectrum_summary(
    k: usize,
    d: usize,
    draws: usize,
    constant: f64,
    seed: Seed,
) -> Result<SpectrumReport, CliError> {
    if draws == 0 {
        return Err(CliError::Config("draws must be at least 1".into()));
    }
    let mut dev: Vec<f64> = (0..draws)
        .into_par_iter()
        .map(|t| {
            let w = sample_spherical_wishart(k, d, &mut seed.stream(t as u64))?;
            spectral_deviation(&w)
        })
        .collect::<Result<_, _>>()?;
    dev.sort_by(f64::total_cmp);
    let scale = (k as f64 / d as f64).sqrt();
    let quantile = |q: f64| dev[((q * (draws - 1) as f64).round() as usize).min(draws - 1)];
    let k1 = spectral_deviation(&sample_spherical_wishart(1, d, &mut seed.derive(3).stream(0))?)?;
    Ok(SpectrumReport {
        k,
        d,
        draws,
        scale,
        deviation_constant: constant,
        mean: dev.iter().sum::<f64>() / draws as f64,
        median: quantile(0.5),
        q99: quantile(0.99),
        max: dev[draws - 1],
        within_bound: dev.iter().filter(|&&x| x <= constant * scale).count() as f64 / draws as f64,
        k1_deviation: k1,
    })
}

pub fn wishart_report(cfg: &ExperimentConfig) -> Result<WishartReport, CliError> {
    let params = cfg.model.params()?;
    let w = &cfg.wishart;
    let s = w.community.unwrap_or(params.n / 2);
    if s > params.n {
        return Err(CliError::Config(format!("community size {s} exceeds n = {}", params.n)));
    }
    let community: Vec<usize> = (0..s).collect();
    let trials = w.route_trials.unwrap_or(cfg.trials);
    let seed = Seed(cfg.seed);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers.unwrap_or(1))
        .build()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    pool.install(|| {
        Ok(WishartReport {
            version: version(),
            model: params,
            seed: cfg.seed,
            route: route_comparison(&params, &community, trials, seed)?,
            spectrum: spectrum_summary(w.k, w.d, w.draws, w.deviation_constant, seed.derive(4))?,
        })
    })
}
