//! Shifted GOE, Wishart and spherical Wishart ensembles, the thresholding
//! maps that turn them into graphs, and spectral diagnostics.

use rand::Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{precondition, Error, Result};
use crate::graph::{pair_count, pair_index, Graph, Latents, ModelParams};
use crate::scalar::{dot, Scalar};
use crate::sphere::solve_threshold;

/// Dense symmetric matrix, row-major.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymMatrix<T: Scalar = f64> {
    order: usize,
    data: Vec<T>,
}

impl<T: Scalar> SymMatrix<T> {
    pub fn zeros(order: usize) -> Self {
        Self { order, data: vec![T::zero(); order * order] }
    }

    pub fn identity(order: usize) -> Self {
        let mut m = Self::zeros(order);
        for i in 0..order {
            m.data[i * order + i] = T::one();
        }
        m
    }

    /// Fills the upper triangle (diagonal included) from `f` and mirrors it.
    pub fn from_upper<F: FnMut(usize, usize) -> T>(order: usize, mut f: F) -> Self {
        let mut m = Self::zeros(order);
        for i in 0..order {
            for j in i..order {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.order + j]
    }

    /// Sets both `(i, j)` and `(j, i)`.
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, x: T) {
        self.data[i * self.order + j] = x;
        self.data[j * self.order + i] = x;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.order..(i + 1) * self.order]
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    /// Applies the same permutation to rows and columns: entry `(i, j)` moves
    /// to `(perm[i], perm[j])`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let mut out = Self::zeros(self.order);
        for i in 0..self.order {
            for j in i..self.order {
                out.set(perm[i], perm[j], self.get(i, j));
            }
        }
        out
    }

    pub fn sub_identity(&self) -> Self {
        let mut out = self.clone();
        for i in 0..self.order {
            out.data[i * self.order + i] -= T::one();
        }
        out
    }

    /// Eigenvalues, ascending.
    pub fn eigenvalues(&self) -> Result<Vec<T>> {
        jacobi_eigenvalues(self)
    }

    /// Lower Cholesky factor, or `None` if the matrix is not positive definite.
    pub fn cholesky(&self) -> Option<Vec<T>> {
        let n = self.order;
        let mut l = vec![T::zero(); n * n];
        for j in 0..n {
            let mut s = self.get(j, j) - dot(&l[j * n..j * n + j], &l[j * n..j * n + j]);
            if !(s > T::zero()) {
                return None;
            }
            s = s.sqrt();
            l[j * n + j] = s;
            for i in j + 1..n {
                let v = self.get(i, j) - dot(&l[i * n..i * n + j], &l[j * n..j * n + j]);
                l[i * n + j] = v / s;
            }
        }
        Some(l)
    }
}

/// Sweeps allowed before the Jacobi iteration reports failure.
pub const MAX_JACOBI_SWEEPS: usize = 100;

/// Cyclic Jacobi eigenvalues of a symmetric matrix, ascending.
pub fn jacobi_eigenvalues<T: Scalar>(m: &SymMatrix<T>) -> Result<Vec<T>> {
    let n = m.order;
    let mut a = m.data.clone();
    let frob: T = a.iter().map(|&x| x * x).sum::<T>().sqrt();
    let tol = T::epsilon() * frob;
    let off = |a: &[T]| -> T {
        let mut s = T::zero();
        for i in 0..n {
            for j in i + 1..n {
                s += a[i * n + j] * a[i * n + j];
            }
        }
        (s + s).sqrt()
    };
    let mut sweeps = 0;
    while off(&a) > tol {
        if sweeps == MAX_JACOBI_SWEEPS {
            return Err(Error::Eigensolver { sweeps });
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == T::zero() {
                    continue;
                }
                let (app, aqq) = (a[p * n + p], a[q * n + q]);
                let theta = (aqq - app) / (apq + apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = (t * t + T::one()).sqrt().recip();
                let s = t * c;
                for r in 0..n {
                    let (arp, arq) = (a[r * n + p], a[r * n + q]);
                    a[r * n + p] = c * arp - s * arq;
                    a[r * n + q] = s * arp + c * arq;
                }
                for r in 0..n {
                    let (apr, aqr) = (a[p * n + r], a[q * n + r]);
                    a[p * n + r] = c * apr - s * aqr;
                    a[q * n + r] = s * apr + c * aqr;
                }
            }
        }
    }
    let mut eig: Vec<T> = (0..n).map(|i| a[i * n + i]).collect();
    eig.sort_by(|x, y| x.partial_cmp(y).expect("finite eigenvalues"));
    Ok(eig)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnsembleKind {
    GoeShifted,
    Wishart,
    SphericalWishart,
    /// Wishart block on the listed vertices, shifted GOE elsewhere.
    Composite(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleDraw {
    pub kind: EnsembleKind,
    pub matrix: SymMatrix<f64>,
    pub d: f64,
    /// The Gaussian vectors behind a Wishart draw, `k × d` row-major.
    #[serde(skip)]
    pub latents: Option<Vec<f64>>,
}

/// `d I_n + √d GOE(n)`: diagonal `d + √d N(0, 2)`, off-diagonal `√d N(0, 1)`.
pub fn sample_goe_shifted<R: Rng + ?Sized>(n: usize, d: f64, rng: &mut R) -> Result<EnsembleDraw> {
    if n == 0 || !(d > 0.0) {
        return Err(precondition(format!("shifted GOE needs n >= 1 and d > 0, got n = {n}, d = {d}")));
    }
    let sd = d.sqrt();
    let diag_sd = (2.0 * d).sqrt();
    let matrix = SymMatrix::from_upper(n, |i, j| {
        let z: f64 = rng.sample(StandardNormal);
        if i == j {
            d + diag_sd * z
        } else {
            sd * z
        }
    });
    Ok(EnsembleDraw { kind: EnsembleKind::GoeShifted, matrix, d, latents: None })
}

/// Gram matrix of `k` i.i.d. `N(0, I_d)` vectors, which are kept.
pub fn sample_wishart<R: Rng + ?Sized>(k: usize, d: usize, rng: &mut R) -> Result<EnsembleDraw> {
    if k == 0 || d == 0 {
        return Err(precondition(format!("Wishart needs k, d >= 1, got k = {k}, d = {d}")));
    }
    let z: Vec<f64> = (0..k * d).map(|_| rng.sample(StandardNormal)).collect();
    let matrix = SymMatrix::from_upper(k, |i, j| dot(&z[i * d..(i + 1) * d], &z[j * d..(j + 1) * d]));
    Ok(EnsembleDraw { kind: EnsembleKind::Wishart, matrix, d: d as f64, latents: Some(z) })
}

/// Wishart Gram matrix without the vectors: for `d > k` it is `L Lᵀ` with
/// `L` the Bartlett factor (`L_ii² ~ χ²_{d−i}`, `L_ij ~ N(0, 1)` below).
pub fn wishart_gram<R: Rng + ?Sized>(k: usize, d: usize, rng: &mut R) -> Result<SymMatrix<f64>> {
    if d <= k {
        return Ok(sample_wishart(k, d, rng)?.matrix);
    }
    let mut l = vec![0.0; k * k];
    for i in 0..k {
        for j in 0..i {
            l[i * k + j] = rng.sample(StandardNormal);
        }
        let chi = ChiSquared::new((d - i) as f64).expect("positive degrees of freedom");
        l[i * k + i] = chi.sample(rng).sqrt();
    }
    Ok(SymMatrix::from_upper(k, |i, j| dot(&l[i * k..i * k + i + 1], &l[j * k..j * k + i + 1])))
}

/// Gram matrix of `k` i.i.d. uniform unit vectors in `R^d`; unit diagonal.
pub fn sample_spherical_wishart<R: Rng + ?Sized>(k: usize, d: usize, rng: &mut R) -> Result<EnsembleDraw> {
    if k == 0 || d == 0 {
        return Err(precondition(format!("spherical Wishart needs k, d >= 1, got k = {k}, d = {d}")));
    }
    let u = Latents::sample((0..k).collect(), d, rng);
    let matrix = SymMatrix::from_upper(k, |i, j| if i == j { 1.0 } else { u.inner(i, j) });
    Ok(EnsembleDraw { kind: EnsembleKind::SphericalWishart, matrix, d: d as f64, latents: None })
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// `Φ⁻¹(p)`: Acklam's rational approximation refined by Halley steps on
/// the complementary error function.
pub fn normal_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(crate::error::domain(format!("normal quantile needs 0 < p < 1, got {p}")));
    }
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383577518672690e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00, 3.754408661907416e+00];
    const P_LOW: f64 = 0.02425;
    let tail = |q: f64| {
        let r = (-2.0 * q.ln()).sqrt();
        (((((C[0] * r + C[1]) * r + C[2]) * r + C[3]) * r + C[4]) * r + C[5])
            / ((((D[0] * r + D[1]) * r + D[2]) * r + D[3]) * r + 1.0)
    };
    let mut x = if p < P_LOW {
        tail(p)
    } else if p > 1.0 - P_LOW {
        -tail(1.0 - p)
    } else {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    };
    for _ in 0..2 {
        // Work in the smaller tail so the residual keeps relative accuracy.
        let e = if x <= 0.0 { normal_cdf(x) - p } else { (1.0 - p) - 0.5 * libm::erfc(x / std::f64::consts::SQRT_2) };
        let u = e * (2.0 * std::f64::consts::PI).sqrt() * (0.5 * x * x).exp();
        x -= u / (1.0 + 0.5 * x * u);
    }
    Ok(x)
}

/// `α`: edge `ij` iff `M_ij ≥ √d Φ⁻¹(1 − p)`.
pub fn threshold_map_alpha(m: &SymMatrix<f64>, p: f64, d: f64) -> Result<Graph> {
    let t = alpha_threshold(p, d)?;
    Ok(Graph::from_fn(m.order(), |i, j| m.get(i, j) >= t))
}

fn alpha_threshold(p: f64, d: f64) -> Result<f64> {
    if p >= 1.0 {
        return Ok(f64::NEG_INFINITY);
    }
    if p <= 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(d.sqrt() * normal_quantile(1.0 - p)?)
}

/// `β`: edge `ij` iff `W_ij / √(W_ii W_jj) > τ`.
pub fn threshold_map_beta(w: &SymMatrix<f64>, tau: f64) -> Result<Graph> {
    let n = w.order();
    let scale: Vec<f64> = (0..n).map(|i| w.get(i, i)).collect();
    if let Some(i) = scale.iter().position(|&x| !(x > 0.0)) {
        return Err(precondition(format!("diagonal entry {i} is {} (must be positive)", scale[i])));
    }
    let inv: Vec<f64> = scale.iter().map(|x| x.sqrt().recip()).collect();
    Ok(Graph::from_fn(n, |i, j| w.get(i, j) * inv[i] * inv[j] > tau))
}

/// `W^S`: a Wishart block on `S × S` and shifted-GOE entries elsewhere.
pub fn composite_planted_matrix<R: Rng + ?Sized>(
    community: &[usize],
    n: usize,
    d: usize,
    rng: &mut R,
) -> Result<EnsembleDraw> {
    let mut members = community.to_vec();
    members.sort_unstable();
    members.dedup();
    if members.len() != community.len() || members.last().is_some_and(|&v| v >= n) {
        return Err(precondition("community must be distinct vertices of [n]"));
    }
    let mut matrix = sample_goe_shifted(n, d as f64, rng)?.matrix;
    if !members.is_empty() {
        let block = wishart_gram(members.len(), d, rng)?;
        for (a, &i) in members.iter().enumerate() {
            for (b, &j) in members.iter().enumerate().skip(a) {
                matrix.set(i, j, block.get(a, b));
            }
        }
    }
    Ok(EnsembleDraw { kind: EnsembleKind::Composite(members), matrix, d: d as f64, latents: None })
}

/// `β^S(W^S)`: `β` on pairs inside `S`, `α` on every other pair.
pub fn composite_planted_graph<R: Rng + ?Sized>(
    community: &[usize],
    params: &ModelParams,
    rng: &mut R,
) -> Result<Graph> {
    params.validate()?;
    let draw = composite_planted_matrix(community, params.n, params.d, rng)?;
    let tau = if params.p >= 1.0 { -1.0 } else { solve_threshold(params.p, params.d)?.tau };
    let t_alpha = alpha_threshold(params.p, params.d as f64)?;
    let m = &draw.matrix;
    let mut inside = vec![false; params.n];
    community.iter().for_each(|&v| inside[v] = true);
    Ok(Graph::from_fn(params.n, |i, j| {
        if inside[i] && inside[j] {
            m.get(i, j) / (m.get(i, i) * m.get(j, j)).sqrt() > tau
        } else {
            m.get(i, j) >= t_alpha
        }
    }))
}

/// `‖M − I‖_op` via the Jacobi eigenvalues.
pub fn spectral_deviation(draw: &EnsembleDraw) -> Result<f64> {
    let eig = draw.matrix.sub_identity().eigenvalues()?;
    Ok(eig.iter().fold(0.0f64, |m, x| m.max(x.abs())))
}

/// `((d − k − 1)/2) log det(I_k + ȳ)` for the strictly upper-triangular
/// entries `y` in pair-index order.
pub fn lkj_log_kernel(y: &[f64], k: usize, d: usize) -> Result<f64> {
    if y.len() != pair_count(k) {
        return Err(precondition(format!(
            "expected {} off-diagonal entries for k = {k}, got {}",
            pair_count(k),
            y.len()
        )));
    }
    let m = SymMatrix::from_upper(k, |i, j| if i == j { 1.0 } else { y[pair_index(k, i, j)] });
    let Some(l) = m.cholesky() else {
        let min_eigenvalue = m.eigenvalues()?.first().copied().unwrap_or(f64::NAN);
        return Err(Error::NotPositiveDefinite { min_eigenvalue });
    };
    let log_det: f64 = (0..k).map(|i| 2.0 * l[i * k + i].ln()).sum();
    Ok((d as f64 - k as f64 - 1.0) / 2.0 * log_det)
}
