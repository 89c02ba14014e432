//! Small-graph enumeration and Monte Carlo Fourier coefficients of the
//! planted law.

use std::collections::HashSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{precondition, Result};
use crate::graph::{pair_index, ModelParams, Sampler, Seed};
use crate::scalar::pairwise_sum;

/// Largest vertex count of a [`SmallGraph`].
pub const MAX_SMALL_VERTICES: usize = 7;

/// Largest vertex count accepted by the enumeration and advantage sums.
pub const MAX_ENUMERATED_VERTICES: usize = 5;

/// All permutations of `0..v`, in Heap's order.
fn permutations(v: usize) -> Vec<Vec<usize>> {
    let mut a: Vec<usize> = (0..v).collect();
    let mut out = vec![a.clone()];
    let mut c = vec![0usize; v];
    let mut i = 0;
    while i < v {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            out.push(a.clone());
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    out
}

/// Graph on at most seven labelled vertices, with its canonical code.
///
/// Bit `pair_index(v, i, j)` of the mask is the edge `ij`. The canonical code
/// is the smallest mask over all relabellings, so two graphs on the same
/// number of vertices are isomorphic exactly when their codes agree.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct SmallGraph {
    v: usize,
    mask: u32,
    canonical_code: u32,
}

impl SmallGraph {
    pub fn from_mask(v: usize, mask: u32) -> Result<Self> {
        if v > MAX_SMALL_VERTICES {
            return Err(precondition(format!("small graphs have at most {MAX_SMALL_VERTICES} vertices, got {v}")));
        }
        let pairs = v * v.saturating_sub(1) / 2;
        if pairs < 32 && mask >> pairs != 0 {
            return Err(precondition(format!("mask {mask:#b} has bits beyond {pairs} pairs")));
        }
        let canonical_code = permutations(v).iter().map(|perm| relabel(v, mask, perm)).min().unwrap_or(0);
        Ok(Self { v, mask, canonical_code })
    }

    pub fn from_edges(v: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut mask = 0u32;
        for &(i, j) in edges {
            if i == j || i >= v || j >= v {
                return Err(precondition(format!("invalid edge ({i}, {j}) on {v} vertices")));
            }
            mask |= 1 << pair_index(v, i.min(j), i.max(j));
        }
        Self::from_mask(v, mask)
    }

    pub fn edge() -> Self {
        Self::from_edges(2, &[(0, 1)]).expect("valid")
    }

    /// Path with `e` edges.
    pub fn path(e: usize) -> Self {
        let edges: Vec<_> = (0..e).map(|i| (i, i + 1)).collect();
        Self::from_edges(e + 1, &edges).expect("valid")
    }

    /// Star with `leaves` leaves.
    pub fn star(leaves: usize) -> Self {
        let edges: Vec<_> = (1..=leaves).map(|i| (0, i)).collect();
        Self::from_edges(leaves + 1, &edges).expect("valid")
    }

    pub fn cycle(v: usize) -> Self {
        let edges: Vec<_> = (0..v).map(|i| (i, (i + 1) % v)).collect();
        Self::from_edges(v, &edges).expect("valid")
    }

    pub fn triangle() -> Self {
        Self::cycle(3)
    }

    pub fn complete(v: usize) -> Self {
        let pairs = v * v.saturating_sub(1) / 2;
        Self::from_mask(v, ((1u64 << pairs) - 1) as u32).expect("valid")
    }

    /// `m` vertex-disjoint edges.
    pub fn matching(m: usize) -> Self {
        let edges: Vec<_> = (0..m).map(|i| (2 * i, 2 * i + 1)).collect();
        Self::from_edges(2 * m, &edges).expect("valid")
    }

    pub fn vertices(&self) -> usize {
        self.v
    }

    pub fn mask(&self) -> u32 {
        self.mask
    }

    pub fn canonical_code(&self) -> u32 {
        self.canonical_code
    }

    pub fn is_isomorphic(&self, other: &SmallGraph) -> bool {
        self.v == other.v && self.canonical_code == other.canonical_code
    }

    pub fn edge_count(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        i != j && self.mask >> pair_index(self.v, i.min(j), i.max(j)) & 1 == 1
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for i in 0..self.v {
            for j in i + 1..self.v {
                if self.has_edge(i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn degree(&self, u: usize) -> usize {
        (0..self.v).filter(|&w| self.has_edge(u, w)).count()
    }

    pub fn has_isolated_vertex(&self) -> bool {
        (0..self.v).any(|u| self.degree(u) == 0)
    }

    /// Vertex sets of the connected components.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.v];
        let mut out = Vec::new();
        for s in 0..self.v {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut head = 0;
            while head < comp.len() {
                let u = comp[head];
                head += 1;
                for w in 0..self.v {
                    if !seen[w] && self.has_edge(u, w) {
                        seen[w] = true;
                        comp.push(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn component_count(&self) -> usize {
        self.components().len()
    }

    pub fn is_connected(&self) -> bool {
        self.component_count() <= 1
    }

    pub fn is_forest(&self) -> bool {
        self.edge_count() + self.component_count() == self.v
    }

    /// Whether some component with at least one edge is a tree.
    pub fn has_tree_component(&self) -> bool {
        let edges = self.edges();
        self.components().iter().any(|c| {
            let e = edges.iter().filter(|(i, _)| c.binary_search(i).is_ok()).count();
            e > 0 && e + 1 == c.len()
        })
    }

    /// Size of the automorphism group, by brute force.
    pub fn automorphisms(&self) -> usize {
        permutations(self.v).iter().filter(|perm| relabel(self.v, self.mask, perm) == self.mask).count()
    }

    /// Number of labelled copies in `K_n`: `v!/|Aut| · C(n, v)`.
    pub fn embeddings(&self, n: usize) -> f64 {
        if n < self.v {
            return 0.0;
        }
        let falling: f64 = (0..self.v).map(|i| (n - i) as f64).product();
        falling / self.automorphisms() as f64
    }
}

fn relabel(v: usize, mask: u32, perm: &[usize]) -> u32 {
    let mut out = 0u32;
    for i in 0..v {
        for j in i + 1..v {
            if mask >> pair_index(v, i, j) & 1 == 1 {
                let (a, b) = (perm[i].min(perm[j]), perm[i].max(perm[j]));
                out |= 1 << pair_index(v, a, b);
            }
        }
    }
    out
}

/// One representative per isomorphism class of graphs with 2 to `v_max`
/// vertices, at least one edge and no isolated vertex, ordered by vertex
/// count, edge count and canonical code.
pub fn enumerate_graphs_upto(v_max: usize) -> Result<Vec<SmallGraph>> {
    if v_max > MAX_ENUMERATED_VERTICES {
        return Err(precondition(format!("enumeration supports v_max <= {MAX_ENUMERATED_VERTICES}, got {v_max}")));
    }
    let mut out = Vec::new();
    for v in 2..=v_max {
        let pairs = v * (v - 1) / 2;
        let perms = permutations(v);
        let mut seen = HashSet::new();
        for mask in 1u32..(1u32 << pairs) {
            let code = perms.iter().map(|perm| relabel(v, mask, perm)).min().expect("non-empty");
            if !seen.insert(code) {
                continue;
            }
            let g = SmallGraph { v, mask: code, canonical_code: code };
            if !g.has_isolated_vertex() {
                out.push(g);
            }
        }
    }
    out.sort_by_key(|g| (g.v, g.edge_count(), g.canonical_code));
    Ok(out)
}

/// Monte Carlo estimate of `Φ_P(H) = E_P[∏_{ij∈E(H)} (G_ij − p)/√(p(1−p))]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FourierEstimate {
    pub graph: SmallGraph,
    pub phi: f64,
    /// Sample standard deviation over `√trials`.
    pub stderr: f64,
    pub trials: usize,
}

/// Mean and standard error of `values`.
pub fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let m = values.len() as f64;
    let mean = pairwise_sum(values) / m;
    if values.len() < 2 {
        return (mean, f64::NAN);
    }
    let sq: Vec<f64> = values.iter().map(|x| (x - mean) * (x - mean)).collect();
    let var = pairwise_sum(&sq) / (m - 1.0);
    (mean, (var / m).sqrt())
}

/// Averages the normalized signed product of `H` placed on vertices
/// `0..v(H)` over draws of the planted model restricted to those vertices.
pub fn fourier_coefficient_mc(
    h: &SmallGraph,
    params: &ModelParams,
    trials: usize,
    seed: Seed,
) -> Result<FourierEstimate> {
    if h.vertices() > params.n {
        return Err(precondition(format!("H has {} vertices but n = {}", h.vertices(), params.n)));
    }
    if trials == 0 {
        return Err(precondition("trials must be at least 1"));
    }
    if params.p >= 1.0 {
        return Err(precondition("Fourier coefficients need p < 1"));
    }
    let sampler = Sampler::new(*params)?;
    let p = params.p;
    let scale = (p * (1.0 - p)).sqrt();
    let (hi, lo) = ((1.0 - p) / scale, -p / scale);
    let edges = h.edges();
    let values: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let draw = sampler.planted_prefix(h.vertices(), &mut seed.stream(t as u64));
            edges.iter().map(|&(i, j)| if draw.graph.has_edge(i, j) { hi } else { lo }).product()
        })
        .collect();
    let (phi, stderr) = mean_and_stderr(&values);
    Ok(FourierEstimate { graph: h.clone(), phi, stderr, trials })
}

/// One summand of the advantage sum.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdvantageTerm {
    pub graph: SmallGraph,
    pub embeddings: f64,
    /// `None` when the coefficient vanishes analytically (a tree component).
    pub estimate: Option<FourierEstimate>,
    /// `embeddings · (Φ̂² − stderr²)`.
    pub contribution: f64,
    pub contribution_stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdvantageReport {
    pub value: f64,
    pub stderr: f64,
    pub terms: Vec<AdvantageTerm>,
}

/// Truncated low-degree advantage `Σ_H emb_n(H) Φ_P(H)²` over the enumerated
/// graphs with at most `v_max` vertices and `1 ≤ e(H) ≤ max_edges`.
///
/// Each `Φ̂²` is debiased by subtracting `stderr²`; the reported error
/// propagates `Var(Φ̂²) ≈ 4Φ̂²s² + 2s⁴` through the sum. Graphs with a tree
/// component have `Φ = 0` and are listed without being estimated.
pub fn low_degree_advantage(
    params: &ModelParams,
    v_max: usize,
    max_edges: usize,
    trials: usize,
    seed: Seed,
) -> Result<AdvantageReport> {
    let graphs = enumerate_graphs_upto(v_max)?;
    let mut terms = Vec::new();
    let (mut value, mut var) = (0.0, 0.0);
    for (idx, h) in graphs.into_iter().enumerate() {
        if h.edge_count() > max_edges || h.vertices() > params.n {
            continue;
        }
        let embeddings = h.embeddings(params.n);
        if h.has_tree_component() {
            terms.push(AdvantageTerm {
                graph: h,
                embeddings,
                estimate: None,
                contribution: 0.0,
                contribution_stderr: 0.0,
            });
            continue;
        }
        let est = fourier_coefficient_mc(&h, params, trials, seed.derive(idx as u64))?;
        let s2 = est.stderr * est.stderr;
        let contribution = embeddings * (est.phi * est.phi - s2);
        let cvar = embeddings * embeddings * (4.0 * est.phi * est.phi * s2 + 2.0 * s2 * s2);
        value += contribution;
        var += cvar;
        terms.push(AdvantageTerm {
            graph: h,
            embeddings,
            estimate: Some(est),
            contribution,
            contribution_stderr: cvar.sqrt(),
        });
    }
    Ok(AdvantageReport { value, stderr: var.sqrt(), terms })
}

/// `(8p)^e (C v e log^{3/2} d / √d)^{⌈(v−1)/2⌉}` for connected `H`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FourierBound {
    pub value: f64,
    /// `H` connected and `C v e log^{3/2} d ≤ √d`. When false the value is
    /// computed but carries no guarantee.
    pub precondition_holds: bool,
}

pub fn rgg_fourier_bound(h: &SmallGraph, p: f64, d: usize, constant: f64) -> FourierBound {
    let (v, e) = (h.vertices() as f64, h.edge_count() as f64);
    let df = d as f64;
    let inner = constant * v * e * df.ln().powf(1.5) / df.sqrt();
    let power = h.vertices().saturating_sub(1).div_ceil(2) as i32;
    FourierBound {
        value: (8.0 * p).powi(h.edge_count() as i32) * inner.powi(power),
        precondition_holds: h.is_connected() && inner <= 1.0,
    }
}
