//! Simple undirected graphs, the model parameters, seeded streams and the
//! null / geometric / planted samplers.

use std::io::{BufRead, Write};

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{domain, precondition, Error, Result};
use crate::sphere::{sample_uniform_sphere, solve_threshold};

/// Index of the pair `i < j` in the flat upper-triangular layout.
#[inline]
pub fn pair_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

#[inline]
pub fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Simple undirected graph on `0..n` stored as one bit per unordered pair.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    bits: Vec<u64>,
}

impl std::fmt::Debug for Graph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Graph").field("n", &self.n).field("edges", &self.edge_count()).finish()
    }
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Self { n, bits: vec![0; pair_count(n).div_ceil(64)] }
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Self::empty(n);
        for b in 0..pair_count(n) {
            g.set_bit(b);
        }
        g
    }

    /// Builds a graph from `i j` pairs, rejecting loops and out-of-range ends.
    pub fn from_edges<I: IntoIterator<Item = (usize, usize)>>(n: usize, edges: I) -> Result<Self> {
        let mut g = Self::empty(n);
        for (i, j) in edges {
            if i == j || i >= n || j >= n {
                return Err(Error::Format(format!("invalid edge ({i}, {j}) for n = {n}")));
            }
            g.add_edge(i, j);
        }
        Ok(g)
    }

    /// Edge `ij` is present iff `edge(i, j)`.
    pub fn from_fn<F: FnMut(usize, usize) -> bool>(n: usize, mut edge: F) -> Self {
        let mut g = Self::empty(n);
        let mut b = 0;
        for i in 0..n {
            for j in i + 1..n {
                if edge(i, j) {
                    g.set_bit(b);
                }
                b += 1;
            }
        }
        g
    }

    #[inline]
    fn set_bit(&mut self, b: usize) {
        self.bits[b / 64] |= 1u64 << (b % 64);
    }

    #[inline]
    fn bit(&self, b: usize) -> bool {
        self.bits[b / 64] >> (b % 64) & 1 == 1
    }

    pub fn add_edge(&mut self, i: usize, j: usize) {
        assert!(i != j, "self-loops are not allowed");
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        self.set_bit(pair_index(self.n, a, b));
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        if i == j {
            return false;
        }
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        self.bit(pair_index(self.n, a, b))
    }

    pub fn edge_count(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Edges `(i, j)` with `i < j`, in pair-index order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.n;
        (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j))).filter(|&(i, j)| self.has_edge(i, j))
    }

    pub fn degree(&self, v: usize) -> usize {
        (0..self.n).filter(|&u| self.has_edge(u, v)).count()
    }

    /// Induced subgraph on `vertices`, relabelled `0..vertices.len()`.
    pub fn induced(&self, vertices: &[usize]) -> Graph {
        Graph::from_fn(vertices.len(), |a, b| self.has_edge(vertices[a], vertices[b]))
    }

    /// Relabels vertex `v` as `perm[v]`.
    pub fn permuted(&self, perm: &[usize]) -> Graph {
        assert_eq!(perm.len(), self.n);
        let mut g = Graph::empty(self.n);
        for (i, j) in self.edges() {
            g.add_edge(perm[i], perm[j]);
        }
        g
    }

    /// Edge-list text: `n`, `m`, then one `i j` line per edge (`i < j`).
    pub fn write_edge_list<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{}", self.n)?;
        writeln!(w, "{}", self.edge_count())?;
        for (i, j) in self.edges() {
            writeln!(w, "{i} {j}")?;
        }
        Ok(())
    }

    pub fn to_edge_list(&self) -> String {
        let mut buf = Vec::new();
        self.write_edge_list(&mut buf).expect("writing to a Vec");
        String::from_utf8(buf).expect("ascii output")
    }

    pub fn read_edge_list<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines().map(|l| l.map_err(|e| Error::Format(e.to_string())));
        let mut next_nonempty = || -> Result<Option<String>> {
            for line in lines.by_ref() {
                let line = line?;
                if !line.trim().is_empty() {
                    return Ok(Some(line));
                }
            }
            Ok(None)
        };
        let parse = |s: &str| s.trim().parse::<usize>().map_err(|e| Error::Format(format!("{s:?}: {e}")));
        let n = parse(&next_nonempty()?.ok_or_else(|| Error::Format("missing vertex count".into()))?)?;
        let m = parse(&next_nonempty()?.ok_or_else(|| Error::Format("missing edge count".into()))?)?;
        let mut g = Graph::empty(n);
        for _ in 0..m {
            let line = next_nonempty()?.ok_or_else(|| Error::Format("fewer edges than declared".into()))?;
            let mut parts = line.split_whitespace();
            let (i, j) = match (parts.next(), parts.next(), parts.next()) {
                (Some(i), Some(j), None) => (parse(i)?, parse(j)?),
                _ => return Err(Error::Format(format!("bad edge line {line:?}"))),
            };
            if i >= j || j >= n {
                return Err(Error::Format(format!("edge ({i}, {j}) must satisfy i < j < n")));
            }
            if g.has_edge(i, j) {
                return Err(Error::Format(format!("duplicate edge ({i}, {j})")));
            }
            g.add_edge(i, j);
        }
        if next_nonempty()?.is_some() {
            return Err(Error::Format("more edges than declared".into()));
        }
        Ok(g)
    }

    pub fn from_edge_list(s: &str) -> Result<Self> {
        Self::read_edge_list(s.as_bytes())
    }

    /// Binary form: `n` as a little-endian `u64`, then the pair bits packed
    /// least-significant-bit first, `⌈n(n-1)/16⌉` bytes.
    pub fn to_bytes(&self) -> Vec<u8> {
        let nbytes = pair_count(self.n).div_ceil(8);
        let mut out = Vec::with_capacity(8 + nbytes);
        out.extend_from_slice(&(self.n as u64).to_le_bytes());
        out.extend(self.bits.iter().flat_map(|w| w.to_le_bytes()).take(nbytes));
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 8 {
            return Err(Error::Format("missing 8-byte header".into()));
        }
        let n = u64::from_le_bytes(bytes[..8].try_into().expect("8 bytes")) as usize;
        let pairs = pair_count(n);
        let body = &bytes[8..];
        if body.len() != pairs.div_ceil(8) {
            return Err(Error::Format(format!(
                "expected {} payload bytes for n = {n}, got {}",
                pairs.div_ceil(8),
                body.len()
            )));
        }
        let mut g = Graph::empty(n);
        for (k, chunk) in body.chunks(8).enumerate() {
            let mut word = [0u8; 8];
            word[..chunk.len()].copy_from_slice(chunk);
            g.bits[k] = u64::from_le_bytes(word);
        }
        if pairs % 64 != 0 {
            let spare = g.bits.last().copied().unwrap_or(0) >> (pairs % 64);
            if spare != 0 {
                return Err(Error::Format("padding bits must be zero".into()));
            }
        }
        Ok(g)
    }
}

/// `(n, p, d, k)`: vertices, edge density, latent dimension and expected
/// community size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub n: usize,
    pub p: f64,
    pub d: usize,
    pub k: f64,
}

impl ModelParams {
    pub fn new(n: usize, p: f64, d: usize, k: f64) -> Result<Self> {
        let params = Self { n, p, d, k };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(precondition("n must be at least 1"));
        }
        if !(self.p > 0.0 && self.p <= 1.0) {
            return Err(precondition(format!("p must lie in (0, 1], got {}", self.p)));
        }
        if self.d == 0 {
            return Err(precondition("d must be at least 1"));
        }
        if !(self.k >= 0.0 && self.k <= self.n as f64) {
            return Err(precondition(format!("k must lie in [0, n], got {}", self.k)));
        }
        Ok(())
    }

    /// `⌊0.9k⌋`.
    pub fn k_minus(&self) -> usize {
        (9.0 * self.k / 10.0).floor() as usize
    }

    /// `⌈1.1k⌉`.
    pub fn k_plus(&self) -> usize {
        (11.0 * self.k / 10.0).ceil() as usize
    }

    /// Per-vertex membership probability `k/n`.
    pub fn membership(&self) -> f64 {
        self.k / self.n as f64
    }
}

/// Master seed. Trial `t` draws from its own stream derived from a stable
/// hash of `(master, t)`, so trials can run in any order or in parallel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Seed(pub u64);

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl Seed {
    pub fn stream_seed(&self, index: u64) -> u64 {
        splitmix64(self.0 ^ splitmix64(index.wrapping_add(0x5851_F42D_4C95_7F2D)))
    }

    pub fn stream(&self, index: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.stream_seed(index))
    }

    /// A seed for an independent family of streams.
    pub fn derive(&self, label: u64) -> Seed {
        Seed(self.stream_seed(label ^ 0xD1B5_4A32_D192_ED03))
    }
}

/// Unit latent vectors of the community vertices.
///
/// When `d` exceeds the community size `s`, vectors are stored by their
/// coordinates in an orthonormal basis of their own span (`s` numbers each):
/// inner products, and hence every edge, are identical to those of the
/// ambient vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct Latents {
    ambient_dim: usize,
    coord_dim: usize,
    vertices: Vec<usize>,
    coords: Vec<f64>,
}

impl Latents {
    /// Draws `vertices.len()` i.i.d. uniform points on `S^{d-1}`.
    pub fn sample<R: Rng + ?Sized>(vertices: Vec<usize>, d: usize, rng: &mut R) -> Self {
        let s = vertices.len();
        if d <= s {
            let mut coords = Vec::with_capacity(s * d);
            for _ in 0..s {
                coords.extend(sample_uniform_sphere(d, rng));
            }
            return Self { ambient_dim: d, coord_dim: d, vertices, coords };
        }
        // Bartlett: rows of the Cholesky factor of a Wishart(d, I_s) Gram
        // matrix are the Gaussian vectors written in their Gram–Schmidt basis.
        let mut coords = vec![0.0; s * s];
        for i in 0..s {
            let row = &mut coords[i * s..(i + 1) * s];
            for x in row.iter_mut().take(i) {
                *x = rng.sample(StandardNormal);
            }
            let chi = ChiSquared::new((d - i) as f64).expect("positive degrees of freedom");
            row[i] = chi.sample(rng).sqrt();
            let norm = row.iter().map(|x| x * x).sum::<f64>().sqrt();
            row.iter_mut().for_each(|x| *x /= norm);
        }
        Self { ambient_dim: d, coord_dim: s, vertices, coords }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn coord_dim(&self) -> usize {
        self.coord_dim
    }

    /// Community vertices, ascending.
    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Coordinates of the `slot`-th community vertex.
    pub fn row(&self, slot: usize) -> &[f64] {
        &self.coords[slot * self.coord_dim..(slot + 1) * self.coord_dim]
    }

    pub fn get(&self, vertex: usize) -> Option<&[f64]> {
        self.vertices.binary_search(&vertex).ok().map(|s| self.row(s))
    }

    pub fn inner(&self, a: usize, b: usize) -> f64 {
        crate::scalar::dot(self.row(a), self.row(b))
    }
}

/// A planted draw: the graph, the community mask and the community latents.
#[derive(Debug, Clone)]
pub struct PlantedSample {
    pub graph: Graph,
    pub community: Vec<bool>,
    pub latents: Latents,
}

impl PlantedSample {
    /// Community vertices, ascending.
    pub fn members(&self) -> &[usize] {
        self.latents.vertices()
    }

    pub fn community_size(&self) -> usize {
        self.latents.len()
    }

    /// The `size` smallest community vertices.
    pub fn prefix(&self, size: usize) -> Option<Vec<usize>> {
        let m = self.members();
        (m.len() >= size).then(|| m[..size].to_vec())
    }
}

/// `G(n, p)`.
pub fn sample_null<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Graph {
    Graph::from_fn(n, |_, _| rng.random::<f64>() < p)
}

/// Sampler for the planted model with `τ(p, d)` solved once.
#[derive(Debug, Clone, Copy)]
pub struct Sampler {
    params: ModelParams,
    tau: f64,
}

impl Sampler {
    pub fn new(params: ModelParams) -> Result<Self> {
        params.validate()?;
        if params.d < 3 {
            return Err(domain(format!("geometric sampling needs d >= 3, got {}", params.d)));
        }
        let tau = if params.p >= 1.0 { -1.0 } else { solve_threshold(params.p, params.d)?.tau };
        Ok(Self { params, tau })
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn null<R: Rng + ?Sized>(&self, rng: &mut R) -> Graph {
        sample_null(self.params.n, self.params.p, rng)
    }

    /// Every vertex in the community: `G(n, p, d)`.
    pub fn full_geometric<R: Rng + ?Sized>(&self, rng: &mut R) -> PlantedSample {
        self.with_community(vec![true; self.params.n], rng)
    }

    /// Bernoulli(`k/n`) membership, then the geometric rule inside the
    /// community and independent `Bernoulli(p)` edges elsewhere.
    pub fn planted<R: Rng + ?Sized>(&self, rng: &mut R) -> PlantedSample {
        let q = self.params.membership();
        let mask = (0..self.params.n).map(|_| rng.random::<f64>() < q).collect();
        self.with_community(mask, rng)
    }

    /// Community chosen uniformly among the size-`s` subsets.
    pub fn planted_fixed_size<R: Rng + ?Sized>(&self, s: usize, rng: &mut R) -> Result<PlantedSample> {
        let n = self.params.n;
        if s > n {
            return Err(precondition(format!("community size {s} exceeds n = {n}")));
        }
        let mut mask = vec![false; n];
        for v in index::sample(rng, n, s) {
            mask[v] = true;
        }
        Ok(self.with_community(mask, rng))
    }

    /// `P_S` for a fixed community `S`.
    pub fn planted_with_community<R: Rng + ?Sized>(&self, community: &[usize], rng: &mut R) -> Result<PlantedSample> {
        let n = self.params.n;
        let mut mask = vec![false; n];
        for &v in community {
            if v >= n {
                return Err(precondition(format!("community vertex {v} out of range for n = {n}")));
            }
            if mask[v] {
                return Err(precondition(format!("community vertex {v} listed twice")));
            }
            mask[v] = true;
        }
        Ok(self.with_community(mask, rng))
    }

    pub fn with_community<R: Rng + ?Sized>(&self, community: Vec<bool>, rng: &mut R) -> PlantedSample {
        let n = self.params.n;
        assert_eq!(community.len(), n);
        let members: Vec<usize> = (0..n).filter(|&v| community[v]).collect();
        let latents = Latents::sample(members, self.params.d, rng);
        let mut slot = vec![usize::MAX; n];
        for (s, &v) in latents.vertices().iter().enumerate() {
            slot[v] = s;
        }
        let (p, tau) = (self.params.p, self.tau);
        let graph = Graph::from_fn(n, |i, j| {
            if community[i] && community[j] {
                latents.inner(slot[i], slot[j]) >= tau
            } else {
                rng.random::<f64>() < p
            }
        });
        PlantedSample { graph, community, latents }
    }

    /// The planted model restricted to vertices `0..v`. Membership stays
    /// `Bernoulli(k/n)`, so this is the law of the induced subgraph of a full
    /// draw on its first `v` vertices.
    pub fn planted_prefix<R: Rng + ?Sized>(&self, v: usize, rng: &mut R) -> PlantedSample {
        let q = self.params.membership();
        let mask: Vec<bool> = (0..v).map(|_| rng.random::<f64>() < q).collect();
        let inner = Sampler { params: ModelParams { n: v, ..self.params }, tau: self.tau };
        inner.with_community(mask, rng)
    }
}

/// `G(n, p, d)` with its latents.
pub fn sample_full_geometric<R: Rng + ?Sized>(n: usize, p: f64, d: usize, rng: &mut R) -> Result<(Graph, Latents)> {
    let s = Sampler::new(ModelParams::new(n, p, d, n as f64)?)?.full_geometric(rng);
    Ok((s.graph, s.latents))
}

pub fn sample_planted<R: Rng + ?Sized>(params: ModelParams, rng: &mut R) -> Result<PlantedSample> {
    Ok(Sampler::new(params)?.planted(rng))
}

pub fn sample_planted_fixed_community<R: Rng + ?Sized>(
    community: &[usize],
    params: ModelParams,
    rng: &mut R,
) -> Result<PlantedSample> {
    Sampler::new(params)?.planted_with_community(community, rng)
}

pub fn sample_planted_fixed_size<R: Rng + ?Sized>(s: usize, params: ModelParams, rng: &mut R) -> Result<PlantedSample> {
    Sampler::new(params)?.planted_fixed_size(s, rng)
}
