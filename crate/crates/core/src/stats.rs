//! Signed subgraph statistics over the centered adjacency matrix.

use rand::seq::index;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{precondition, Error, Result};
use crate::graph::{Graph, Seed};
use crate::scalar::{dot, pairwise_sum, Scalar};
use crate::special::binomial_exact;

/// Above this order the triangle count switches to the trace kernel.
pub const TRACE_KERNEL_MIN_N: usize = 257;

/// Largest number of subsets the exhaustive scan will visit.
pub const EXHAUSTIVE_SUBSET_LIMIT: u128 = 10_000_000;

/// Largest cycle length and vertex count handled by enumeration.
pub const MAX_ENUMERATED_CYCLE: usize = 7;
pub const MAX_ENUMERATED_N: usize = 64;

/// `Ā = G − p` off the diagonal, zero on it, stored densely row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CenteredAdjacency<T: Scalar = f64> {
    n: usize,
    p: T,
    entries: Vec<T>,
}

impl<T: Scalar> CenteredAdjacency<T> {
    pub fn new(g: &Graph, p: T) -> Self {
        let n = g.n();
        let (hi, lo) = (T::one() - p, -p);
        let mut entries = vec![T::zero(); n * n];
        for i in 0..n {
            for j in i + 1..n {
                let a = if g.has_edge(i, j) { hi } else { lo };
                entries[i * n + j] = a;
                entries[j * n + i] = a;
            }
        }
        Self { n, p, entries }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> T {
        self.p
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.entries[i * self.n + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[T] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    /// `Σ_{i<j<ℓ} Ā_ij Ā_jℓ Ā_iℓ` by the direct loop.
    pub fn triangles_direct(&self) -> T {
        let n = self.n;
        let per_row: Vec<T> = (0..n)
            .map(|i| {
                let ri = self.row(i);
                let mut acc = T::zero();
                for j in i + 1..n {
                    acc += ri[j] * dot(&ri[j + 1..], &self.row(j)[j + 1..]);
                }
                acc
            })
            .collect();
        pairwise_sum(&per_row)
    }

    /// `Tr(Ā³)/6`, evaluated as `Σ_{i<j} Ā_ij (Ā²)_ij / 3`.
    pub fn triangles_trace(&self) -> T {
        let n = self.n;
        let per_row: Vec<T> = (0..n)
            .map(|i| {
                let ri = self.row(i);
                let mut acc = T::zero();
                for j in i + 1..n {
                    acc += ri[j] * dot(ri, self.row(j));
                }
                acc
            })
            .collect();
        pairwise_sum(&per_row) / T::lit(3.0)
    }

    pub fn triangles(&self) -> T {
        if self.n >= TRACE_KERNEL_MIN_N {
            self.triangles_trace()
        } else {
            self.triangles_direct()
        }
    }

    /// Signed triangle count of the subgraph induced on `a`.
    pub fn subset_triangles(&self, a: &[usize]) -> T {
        let mut terms = Vec::with_capacity(a.len() * a.len());
        for (x, &i) in a.iter().enumerate() {
            for (y, &j) in a.iter().enumerate().skip(x + 1) {
                let aij = self.get(i, j);
                let mut acc = T::zero();
                for &l in &a[y + 1..] {
                    acc += self.get(j, l) * self.get(i, l);
                }
                terms.push(aij * acc);
            }
        }
        pairwise_sum(&terms)
    }

    /// Sum over all distinct `ell`-cycles of the product of centered entries.
    ///
    /// Each cycle is visited once: rooted at its smallest vertex, through
    /// larger vertices only, with the second vertex smaller than the last.
    pub fn cycles(&self, ell: usize) -> Result<T> {
        if ell < 3 {
            return Err(precondition(format!("cycle length must be at least 3, got {ell}")));
        }
        if ell == 3 {
            return Ok(self.triangles());
        }
        if ell > MAX_ENUMERATED_CYCLE || self.n > MAX_ENUMERATED_N {
            return Err(precondition(format!(
                "cycle enumeration needs ell <= {MAX_ENUMERATED_CYCLE} and n <= {MAX_ENUMERATED_N} (got ell = {ell}, n = {})",
                self.n
            )));
        }
        let mut per_root = Vec::with_capacity(self.n);
        let mut path = Vec::with_capacity(ell);
        let mut used = vec![false; self.n];
        for root in 0..self.n {
            path.clear();
            path.push(root);
            used[root] = true;
            per_root.push(self.extend_cycle(ell, &mut path, &mut used, T::one()));
            used[root] = false;
        }
        Ok(pairwise_sum(&per_root))
    }

    fn extend_cycle(&self, ell: usize, path: &mut Vec<usize>, used: &mut [bool], weight: T) -> T {
        let root = path[0];
        let last = *path.last().expect("non-empty path");
        let mut acc = T::zero();
        if path.len() + 1 == ell {
            let second = path[1];
            for v in second + 1..self.n {
                if !used[v] {
                    acc += self.get(last, v) * self.get(v, root);
                }
            }
            return weight * acc;
        }
        for v in root + 1..self.n {
            if used[v] {
                continue;
            }
            path.push(v);
            used[v] = true;
            acc += self.extend_cycle(ell, path, used, weight * self.get(last, v));
            used[v] = false;
            path.pop();
        }
        acc
    }
}

/// `Σ_{i<j<ℓ} (G_ij − p)(G_jℓ − p)(G_iℓ − p)`.
pub fn signed_triangle_count<T: Scalar>(g: &Graph, p: T) -> T {
    CenteredAdjacency::new(g, p).triangles()
}

pub fn signed_triangle_count_direct<T: Scalar>(g: &Graph, p: T) -> T {
    CenteredAdjacency::new(g, p).triangles_direct()
}

pub fn signed_triangle_count_trace<T: Scalar>(g: &Graph, p: T) -> T {
    CenteredAdjacency::new(g, p).triangles_trace()
}

pub fn signed_cycle_count<T: Scalar>(g: &Graph, p: T, ell: usize) -> Result<T> {
    CenteredAdjacency::new(g, p).cycles(ell)
}

/// Which vertices `ℓ` enter a wedge sum `W_ij`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WedgeRange {
    /// `ℓ ∈ A`, `ℓ < i`: the ordered sum used by the constrained scan.
    Preceding,
    /// `ℓ ∈ A`, `ℓ ∉ {i, j}`: symmetric diagnostic variant.
    AllOthers,
}

/// Wedge sums `W_ij` for the pairs `i < j` of a vertex set.
#[derive(Debug, Clone, PartialEq)]
pub struct WedgeTable<T: Scalar = f64> {
    vertices: Vec<usize>,
    values: Vec<T>,
    range: WedgeRange,
}

impl<T: Scalar> WedgeTable<T> {
    /// Vertices of `A`, ascending.
    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn range(&self) -> WedgeRange {
        self.range
    }

    /// `W` for the `x`-th and `y`-th smallest vertices of `A`, `x < y`.
    pub fn get(&self, x: usize, y: usize) -> T {
        self.values[crate::graph::pair_index(self.vertices.len(), x, y)]
    }

    /// `W_ij` by vertex label.
    pub fn by_label(&self, i: usize, j: usize) -> Option<T> {
        let x = self.vertices.binary_search(&i).ok()?;
        let y = self.vertices.binary_search(&j).ok()?;
        match x.cmp(&y) {
            std::cmp::Ordering::Less => Some(self.get(x, y)),
            std::cmp::Ordering::Greater => Some(self.get(y, x)),
            std::cmp::Ordering::Equal => None,
        }
    }

    /// Values in pair-index order.
    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn sum_of_squares(&self) -> T {
        let sq: Vec<T> = self.values.iter().map(|&w| w * w).collect();
        pairwise_sum(&sq)
    }

    pub fn max_abs(&self) -> T {
        self.values.iter().fold(T::zero(), |m, w| m.max(w.abs()))
    }
}

fn sorted_unique(a: &[usize], n: usize) -> Result<Vec<usize>> {
    let mut v = a.to_vec();
    v.sort_unstable();
    v.dedup();
    if v.len() != a.len() {
        return Err(precondition("vertex set contains duplicates"));
    }
    if let Some(&x) = v.last() {
        if x >= n {
            return Err(precondition(format!("vertex {x} out of range for n = {n}")));
        }
    }
    Ok(v)
}

impl<T: Scalar> CenteredAdjacency<T> {
    pub fn wedge_sums(&self, a: &[usize], range: WedgeRange) -> Result<WedgeTable<T>> {
        let vertices = sorted_unique(a, self.n)?;
        let s = vertices.len();
        let mut values = Vec::with_capacity(s * s.saturating_sub(1) / 2);
        for x in 0..s {
            for y in x + 1..s {
                let (i, j) = (vertices[x], vertices[y]);
                let others: &mut dyn Iterator<Item = usize> = match range {
                    WedgeRange::Preceding => &mut vertices[..x].iter().copied(),
                    WedgeRange::AllOthers => &mut vertices.iter().copied().filter(|&l| l != i && l != j),
                };
                let mut acc = T::zero();
                for l in others {
                    acc += self.get(l, i) * self.get(l, j);
                }
                values.push(acc);
            }
        }
        Ok(WedgeTable { vertices, values, range })
    }
}

/// Ordered wedge sums `W_ij = Σ_{ℓ∈A, ℓ<i} (G_ℓi − p)(G_ℓj − p)`.
pub fn wedge_sums<T: Scalar>(g: &Graph, p: T, a: &[usize]) -> Result<WedgeTable<T>> {
    CenteredAdjacency::new(g, p).wedge_sums(a, WedgeRange::Preceding)
}

/// Symmetric variant: `ℓ` ranges over all of `A` except `i` and `j`.
pub fn symmetric_wedge_sums<T: Scalar>(g: &Graph, p: T, a: &[usize]) -> Result<WedgeTable<T>> {
    CenteredAdjacency::new(g, p).wedge_sums(a, WedgeRange::AllOthers)
}

/// `f_A`: signed triangles inside `A`.
pub fn subset_signed_triangles<T: Scalar>(g: &Graph, p: T, a: &[usize]) -> Result<T> {
    let adj = CenteredAdjacency::new(g, p);
    let a = sorted_unique(a, adj.n)?;
    Ok(adj.subset_triangles(&a))
}

/// `∏ (G_ij − p)` over the listed edges.
pub fn signed_embedding_product<T: Scalar>(g: &Graph, p: T, edges: &[(usize, usize)]) -> Result<T> {
    let mut seen: Vec<(usize, usize)> = Vec::with_capacity(edges.len());
    let mut prod = T::one();
    for &(i, j) in edges {
        if i == j || i >= g.n() || j >= g.n() {
            return Err(precondition(format!("invalid pair ({i}, {j}) for n = {}", g.n())));
        }
        let key = (i.min(j), i.max(j));
        if seen.contains(&key) {
            return Err(precondition(format!("duplicate edge ({i}, {j})")));
        }
        seen.push(key);
        prod *= if g.has_edge(i, j) { T::one() - p } else { -p };
    }
    Ok(prod)
}

/// How the maximum over size-`k⁻` subsets is taken.
#[derive(Debug, Clone, PartialEq)]
pub enum ScanMode {
    /// Every subset; refused above [`EXHAUSTIVE_SUBSET_LIMIT`] subsets.
    Exhaustive,
    /// `f_A` on a caller-supplied subset.
    Oracle(Vec<usize>),
    /// Best of `restarts` swap hill-climbs from random subsets. A lower
    /// bound on the exact maximum.
    LocalSearch { restarts: usize, seed: u64 },
}

/// Scan subset size, mode, and the wedge constraints used by the
/// constrained scan (infinite bounds make it unconstrained).
#[derive(Debug, Clone, PartialEq)]
pub struct ScanConfig {
    pub k_minus: usize,
    pub mode: ScanMode,
    pub sigma_sq: f64,
    pub b: f64,
}

impl ScanConfig {
    pub fn new(k_minus: usize, mode: ScanMode) -> Self {
        Self { k_minus, mode, sigma_sq: f64::INFINITY, b: f64::INFINITY }
    }

    pub fn exhaustive(k_minus: usize) -> Self {
        Self::new(k_minus, ScanMode::Exhaustive)
    }

    pub fn with_constraints(mut self, sigma_sq: f64, b: f64) -> Self {
        self.sigma_sq = sigma_sq;
        self.b = b;
        self
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.k_minus > n {
            return Err(precondition(format!("subset size {} exceeds n = {n}", self.k_minus)));
        }
        if self.sigma_sq.is_nan() || self.b.is_nan() || self.sigma_sq < 0.0 || self.b < 0.0 {
            return Err(precondition("constraint bounds must be non-negative"));
        }
        match &self.mode {
            ScanMode::Exhaustive => {
                let count = binomial_exact(n as u64, self.k_minus as u64).unwrap_or(u128::MAX);
                if count > EXHAUSTIVE_SUBSET_LIMIT {
                    return Err(precondition(format!(
                        "exhaustive scan over C({n}, {}) = {count} subsets exceeds {EXHAUSTIVE_SUBSET_LIMIT}",
                        self.k_minus
                    )));
                }
            }
            ScanMode::Oracle(a) => {
                if a.len() != self.k_minus {
                    return Err(precondition(format!(
                        "oracle subset has {} vertices, expected {}",
                        a.len(),
                        self.k_minus
                    )));
                }
                sorted_unique(a, n)?;
            }
            ScanMode::LocalSearch { restarts, .. } => {
                if *restarts == 0 {
                    return Err(precondition("local search needs at least one restart"));
                }
            }
        }
        Ok(())
    }
}

/// Scan value and the (ascending) subset attaining it.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanResult<T: Scalar = f64> {
    pub value: T,
    pub subset: Vec<usize>,
}

/// Incremental subset state for the exhaustive search: vertices are added in
/// increasing order, so adding `v` leaves earlier wedge sums unchanged.
struct Frontier<'a, T: Scalar> {
    adj: &'a CenteredAdjacency<T>,
    k: usize,
    sigma_sq: T,
    b: T,
    constrained: bool,
    chosen: Vec<usize>,
    best: Option<(T, Vec<usize>)>,
}

impl<T: Scalar> Frontier<'_, T> {
    fn search(&mut self, start: usize, value: T, sum_sq: T) {
        let n = self.adj.n;
        if self.chosen.len() == self.k {
            if self.best.as_ref().is_none_or(|(b, _)| value > *b) {
                self.best = Some((value, self.chosen.clone()));
            }
            return;
        }
        let remaining = self.k - self.chosen.len();
        for v in start..=n - remaining {
            let mut gain = T::zero();
            for (x, &i) in self.chosen.iter().enumerate() {
                let aiv = self.adj.get(i, v);
                for &j in &self.chosen[x + 1..] {
                    gain += self.adj.get(i, j) * aiv * self.adj.get(j, v);
                }
            }
            let mut next_sq = sum_sq;
            if self.constrained {
                let mut feasible = true;
                for (x, &i) in self.chosen.iter().enumerate() {
                    let mut w = T::zero();
                    for &l in &self.chosen[..x] {
                        w += self.adj.get(l, i) * self.adj.get(l, v);
                    }
                    next_sq += w * w;
                    if w.abs() > self.b || next_sq > self.sigma_sq {
                        feasible = false;
                        break;
                    }
                }
                if !feasible {
                    continue;
                }
            }
            self.chosen.push(v);
            self.search(v + 1, value + gain, next_sq);
            self.chosen.pop();
        }
    }
}

fn satisfies<T: Scalar>(adj: &CenteredAdjacency<T>, a: &[usize], sigma_sq: T, b: T) -> bool {
    let table = adj.wedge_sums(a, WedgeRange::Preceding).expect("validated subset");
    table.max_abs() <= b && table.sum_of_squares() <= sigma_sq
}

/// Contribution of `v` to `f_{A ∪ {v}}` from the triangles through it, with
/// `skip` removed from `A`.
fn vertex_gain<T: Scalar>(adj: &CenteredAdjacency<T>, a: &[usize], v: usize, skip: usize) -> T {
    let mut gain = T::zero();
    for (x, &i) in a.iter().enumerate() {
        if i == skip || i == v {
            continue;
        }
        let aiv = adj.get(i, v);
        for &j in &a[x + 1..] {
            if j != skip && j != v {
                gain += adj.get(i, j) * aiv * adj.get(j, v);
            }
        }
    }
    gain
}

fn local_search<T: Scalar>(
    adj: &CenteredAdjacency<T>,
    k: usize,
    restarts: usize,
    seed: u64,
    constraint: Option<(T, T)>,
) -> Option<ScanResult<T>> {
    let n = adj.n;
    let mut best: Option<ScanResult<T>> = None;
    let tol = T::attainable(1e-12);
    let offer = |a: &[usize], best: &mut Option<ScanResult<T>>| {
        let mut sorted = a.to_vec();
        sorted.sort_unstable();
        if let Some((s2, b)) = constraint {
            if !satisfies(adj, &sorted, s2, b) {
                return;
            }
        }
        let value = adj.subset_triangles(&sorted);
        if best.as_ref().is_none_or(|r| value > r.value) {
            *best = Some(ScanResult { value, subset: sorted });
        }
    };
    for r in 0..restarts {
        let mut rng: ChaCha8Rng = Seed(seed).stream(r as u64);
        let mut a: Vec<usize> = index::sample(&mut rng, n, k).into_vec();
        let mut inside = vec![false; n];
        a.iter().for_each(|&v| inside[v] = true);
        offer(&a, &mut best);
        if k == 0 || k == n {
            continue;
        }
        // Each accepted swap strictly increases f_A, so this terminates.
        loop {
            let (pos, worst, worst_c) = a
                .iter()
                .enumerate()
                .map(|(pos, &u)| (pos, u, vertex_gain(adj, &a, u, u)))
                .fold(None, |acc: Option<(usize, usize, T)>, x| match acc {
                    Some(m) if m.2 <= x.2 => Some(m),
                    _ => Some(x),
                })
                .expect("non-empty subset");
            let candidate = (0..n).filter(|&v| !inside[v]).map(|v| (v, vertex_gain(adj, &a, v, worst))).fold(
                None,
                |acc: Option<(usize, T)>, x| match acc {
                    Some(m) if m.1 >= x.1 => Some(m),
                    _ => Some(x),
                },
            );
            match candidate {
                Some((v, g)) if g > worst_c + tol * (T::one() + worst_c.abs()) => {
                    inside[worst] = false;
                    inside[v] = true;
                    a[pos] = v;
                    offer(&a, &mut best);
                }
                _ => break,
            }
        }
    }
    best
}

fn scan_impl<T: Scalar>(g: &Graph, p: T, cfg: &ScanConfig, constrained: bool) -> Result<Option<ScanResult<T>>> {
    cfg.validate(g.n())?;
    let adj = CenteredAdjacency::new(g, p);
    let (sigma_sq, b) = (T::lit(cfg.sigma_sq), T::lit(cfg.b));
    let constraint = (constrained && (cfg.sigma_sq.is_finite() || cfg.b.is_finite())).then_some((sigma_sq, b));
    match &cfg.mode {
        ScanMode::Oracle(a) => {
            let a = sorted_unique(a, adj.n)?;
            if let Some((s2, b)) = constraint {
                if !satisfies(&adj, &a, s2, b) {
                    return Ok(None);
                }
            }
            Ok(Some(ScanResult { value: adj.subset_triangles(&a), subset: a }))
        }
        ScanMode::Exhaustive => {
            let mut f = Frontier {
                adj: &adj,
                k: cfg.k_minus,
                sigma_sq,
                b,
                constrained: constraint.is_some(),
                chosen: Vec::with_capacity(cfg.k_minus),
                best: None,
            };
            f.search(0, T::zero(), T::zero());
            // Report f_A evaluated canonically rather than the running sum.
            Ok(f.best.map(|(_, subset)| ScanResult { value: adj.subset_triangles(&subset), subset }))
        }
        ScanMode::LocalSearch { restarts, seed } => Ok(local_search(&adj, cfg.k_minus, *restarts, *seed, constraint)),
    }
}

/// `max_{|A| = k⁻} f_A(G)` under the configured mode.
pub fn scan_statistic<T: Scalar>(g: &Graph, p: T, cfg: &ScanConfig) -> Result<ScanResult<T>> {
    scan_impl(g, p, cfg, false)?.ok_or_else(|| Error::Precondition("scan over an empty family of subsets".into()))
}

/// The scan restricted to subsets with `Σ W_ij² ≤ σ²` and `max |W_ij| ≤ B`;
/// `None` when no subset qualifies.
pub fn constrained_scan_statistic<T: Scalar>(g: &Graph, p: T, cfg: &ScanConfig) -> Result<Option<ScanResult<T>>> {
    scan_impl(g, p, cfg, true)
}

/// Uniform random size-`k` subset, ascending.
pub fn random_subset<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Vec<usize> {
    let mut a = index::sample(rng, n, k).into_vec();
    a.sort_unstable();
    a
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::sample_null;

    #[test]
    fn triangle_boundaries() {
        assert!((signed_triangle_count(&Graph::empty(3), 0.4f64) - (-0.064)).abs() < 1e-15);
        assert!((signed_triangle_count(&Graph::complete(3), 0.4f64) - 0.216).abs() < 1e-15);
        assert_eq!(signed_triangle_count(&Graph::empty(2), 0.4), 0.0);
    }

    #[test]
    fn kernels_agree() {
        for t in 0..20 {
            let g = sample_null(20 + t, 0.3, &mut Seed(5).stream(t as u64));
            let a = signed_triangle_count_direct(&g, 0.3f64);
            let b = signed_triangle_count_trace(&g, 0.3);
            assert!((a - b).abs() <= 1e-9, "{a} vs {b}");
        }
    }

    #[test]
    fn four_cycles_small_cases() {
        let v: f64 = signed_cycle_count(&Graph::empty(4), 0.5, 4).unwrap();
        assert!((v - 0.1875).abs() < 1e-15);
        let c4 = Graph::from_edges(4, [(0, 1), (1, 2), (2, 3), (0, 3)]).unwrap();
        let v: f64 = signed_cycle_count(&c4, 0.5, 4).unwrap();
        assert!((v - 3.0 / 16.0).abs() < 1e-15);
    }

    #[test]
    fn cycle_census() {
        // With p = 0 on the complete graph every summand is 1.
        let k6 = Graph::complete(6);
        let count: f64 = signed_cycle_count(&k6, 0.0, 4).unwrap();
        assert_eq!(count, 45.0);
        let count: f64 = signed_cycle_count(&k6, 0.0, 5).unwrap();
        assert_eq!(count, 72.0);
        let count: f64 = signed_cycle_count(&Graph::complete(7), 0.0, 7).unwrap();
        assert_eq!(count, 360.0);
    }

    #[test]
    fn cycle_preconditions() {
        assert!(signed_cycle_count(&Graph::empty(5), 0.5, 2).is_err());
        assert!(signed_cycle_count(&Graph::empty(5), 0.5, 8).is_err());
        assert!(signed_cycle_count(&Graph::empty(65), 0.5, 4).is_err());
        assert!(signed_cycle_count(&Graph::empty(300), 0.5, 3).is_ok());
    }

    #[test]
    fn wedge_boundaries() {
        let g = sample_null(8, 0.5, &mut Seed(1).stream(0));
        let w = wedge_sums(&g, 0.5, &[2, 5]).unwrap();
        assert_eq!(w.values(), &[0.0]);
        let w = wedge_sums(&g, 0.5, &[6, 1, 3, 4]).unwrap();
        assert_eq!(w.vertices(), &[1, 3, 4, 6]);
        for y in 1..4 {
            assert_eq!(w.get(0, y), 0.0);
        }
        assert_eq!(w.by_label(6, 3), Some(w.get(1, 3)));
        assert!(wedge_sums(&g, 0.5, &[1, 1]).is_err());
    }

    #[test]
    fn embedding_products() {
        let g = Graph::from_edges(3, [(0, 1)]).unwrap();
        let v: f64 = signed_embedding_product(&g, 0.3, &[(1, 0)]).unwrap();
        assert!((v - 0.7).abs() < 1e-15);
        let v: f64 = signed_embedding_product(&Graph::empty(3), 0.5, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(v, 0.25);
        assert!(signed_embedding_product::<f64>(&g, 0.3, &[(0, 1), (1, 0)]).is_err());
    }

    #[test]
    fn scan_config_checks() {
        let g = Graph::empty(40);
        assert!(scan_statistic::<f64>(&g, 0.5, &ScanConfig::exhaustive(20)).is_err());
        assert!(scan_statistic::<f64>(&g, 0.5, &ScanConfig::new(3, ScanMode::Oracle(vec![1, 2]))).is_err());
        assert!(scan_statistic::<f64>(&g, 0.5, &ScanConfig::exhaustive(41)).is_err());
        let cfg = ScanConfig::new(3, ScanMode::LocalSearch { restarts: 0, seed: 0 });
        assert!(scan_statistic::<f64>(&g, 0.5, &cfg).is_err());
    }

    #[test]
    fn scan_of_whole_vertex_set() {
        let g = sample_null(9, 0.4, &mut Seed(2).stream(0));
        let r = scan_statistic(&g, 0.4, &ScanConfig::exhaustive(9)).unwrap();
        assert!((r.value - signed_triangle_count(&g, 0.4f64)).abs() < 1e-12);
        assert_eq!(r.subset, (0..9).collect::<Vec<_>>());
    }

    #[test]
    fn f32_matches_f64() {
        let g = sample_null(30, 0.3, &mut Seed(3).stream(0));
        let a = signed_triangle_count::<f64>(&g, 0.3);
        let b = signed_triangle_count::<f32>(&g, 0.3) as f64;
        assert!((a - b).abs() < 1e-3 * (1.0 + a.abs()));
    }
}
