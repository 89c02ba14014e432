//! Geometry of `S^{d-1}`: the inner-product law of two uniform points, the
//! edge threshold `τ(p, d)`, orthonormal Gegenbauer polynomials, harmonic
//! multiplicities, the cap-indicator coefficients and the signed-cycle
//! series built from them.
//!
//! For independent uniform `U, V` the law `μ` of `⟨U, V⟩` has density
//! `Γ(d/2) / (Γ((d-1)/2) √π) · (1 - x²)^{(d-3)/2}` on `[-1, 1]`, and
//! `(X + 1) / 2 ~ Beta((d-1)/2, (d-1)/2)`. The polynomials `q_m` are
//! orthonormal in `L²(μ)`, and the expected signed `ℓ`-cycle of the full
//! geometric graph equals `Σ_{m ≥ 1} c_m^ℓ / N_m^{ℓ/2 - 1}` where `c_m` is
//! the `m`-th coefficient of `1{x ≥ τ}`.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{domain, precondition, Error, Result};
use crate::quadrature::{GaussLegendre, MAX_NODES, PANEL_ORDER};
use crate::scalar::Scalar;
use crate::special::{beta_continued_fraction, binomial_exact, ln_binomial, ln_gamma_half_ratio};

/// Integration windows stop this many standard deviations (`1/√(d-3)`)
/// above `max(τ, 0)`; the density there is below `e^{-800}`.
const CUT_SIGMAS: f64 = 40.0;
const CF_MAX_ITER: usize = 200_000;
const BISECTION_MAX_ITER: usize = 200;
/// Required `|P(X ≥ τ) - p|`.
pub const THRESHOLD_RESIDUAL: f64 = 1e-10;
/// Node-doubling agreement target for the coefficients `c_m`.
pub const COEFFICIENT_REL_TOL: f64 = 1e-10;

/// Law `μ` of the inner product of two independent uniform points on `S^{d-1}`.
#[derive(Debug, Clone, Copy)]
pub struct InnerProductLaw<T> {
    d: usize,
    ln_norm: T,
}

impl<T: Scalar> InnerProductLaw<T> {
    pub fn new(d: usize) -> Result<Self> {
        if d < 3 {
            return Err(domain(format!("inner-product law needs d >= 3, got {d}")));
        }
        let a = T::from_usize_lossy(d - 1) * T::lit(0.5);
        // Γ(d/2) / Γ((d-1)/2) = Γ(a + ½) / Γ(a)
        let ln_norm = ln_gamma_half_ratio(a)? - T::lit(0.5) * T::PI().ln();
        Ok(Self { d, ln_norm })
    }

    pub fn dimension(&self) -> usize {
        self.d
    }

    /// `ln(Γ(d/2) / (Γ((d-1)/2) √π))`.
    pub fn ln_normalizer(&self) -> T {
        self.ln_norm
    }

    fn exponent(&self) -> T {
        T::from_usize_lossy(self.d - 3) * T::lit(0.5)
    }

    pub fn density(&self, x: T) -> T {
        if x.abs() > T::one() {
            return T::zero();
        }
        if self.d == 3 {
            return self.ln_norm.exp();
        }
        (self.ln_norm + self.exponent() * (-x * x).ln_1p()).exp()
    }

    /// Integration window for `∫_lower^1 · dμ`. The window is cut this many
    /// standard deviations above `max(lower, 0)`. Near the endpoint `x = 1`
    /// the substitution `x = cos θ` removes the `(1 - x²)^{(d-3)/2}`
    /// endpoint behaviour; away from it `x` is used directly, which keeps
    /// full relative precision in the weights at very large `d`.
    fn window(&self, lower: T) -> Window<T> {
        let top = if self.d <= 3 {
            T::one()
        } else {
            let sigma = T::from_usize_lossy(self.d - 3).sqrt().recip();
            (lower.max(T::zero()) + T::lit(CUT_SIGMAS) * sigma).min(T::one())
        };
        if top < T::lit(0.9) {
            Window { lo: lower, hi: top, angular: false }
        } else {
            Window { lo: top.acos(), hi: lower.acos(), angular: true }
        }
    }

    /// `(x, w · μ(x) · jacobian)` pairs of a composite rule on `window`.
    fn weighted_nodes<'a>(
        &'a self,
        rule: &'a GaussLegendre<T>,
        window: Window<T>,
        panels: usize,
    ) -> impl Iterator<Item = (T, T)> + 'a {
        let half = T::lit(0.5);
        rule.composite(window.lo, window.hi, panels).map(move |(s, w)| {
            if window.angular {
                // μ(cos θ) sin θ = norm · sin^{d-2} θ
                let x = s.cos();
                let ln_sin = half * (-x * x).ln_1p();
                (x, w * (self.ln_norm + T::from_usize_lossy(self.d - 2) * ln_sin).exp())
            } else {
                (s, w * self.density(s))
            }
        })
    }

    /// `P(X ≥ t)` via the symmetric incomplete beta, falling back to
    /// quadrature if the continued fraction stalls.
    pub fn tail(&self, t: T) -> Result<T> {
        if t.is_nan() {
            return Err(domain("tail probability at NaN"));
        }
        if t < -T::one() || t > T::one() {
            return Err(domain(format!("tail probability needs t in [-1, 1], got {t}")));
        }
        if t == T::zero() {
            return Ok(T::lit(0.5));
        }
        if t < T::zero() {
            return Ok(T::one() - self.tail(-t)?);
        }
        if t == T::one() {
            return Ok(T::zero());
        }
        match self.tail_by_beta(t) {
            Ok(v) => Ok(v),
            Err(Error::ContinuedFraction { .. }) => self.tail_by_quadrature(t),
            Err(e) => Err(e),
        }
    }

    fn tail_by_beta(&self, t: T) -> Result<T> {
        let half = T::lit(0.5);
        let a = T::from_usize_lossy(self.d - 1) * half;
        let x = (T::one() - t) * half;
        // x^a (1-x)^a / (a B(a, a)) = (1-t²)^a / (2 a B(½, a))
        let ln_front = a * (-t * t).ln_1p() - T::LN_2() - half * T::PI().ln() + ln_gamma_half_ratio(a)? - a.ln();
        let front = ln_front.exp();
        if front == T::zero() {
            return Ok(T::zero());
        }
        Ok(front * beta_continued_fraction(a, a, x, CF_MAX_ITER)?)
    }

    /// `P(X ≥ t)` by composite Gauss–Legendre quadrature of `μ`.
    pub fn tail_by_quadrature(&self, t: T) -> Result<T> {
        if !(t >= -T::one() && t <= T::one()) {
            return Err(domain(format!("tail probability needs t in [-1, 1], got {t}")));
        }
        if t < T::zero() {
            return Ok(T::one() - self.tail_by_quadrature(-t)?);
        }
        let window = self.window(t);
        let rule = GaussLegendre::<T>::new(PANEL_ORDER);
        let rel = T::attainable(1e-13);
        let abs = T::attainable(1e-16);
        let sum = |panels| self.weighted_nodes(&rule, window, panels).map(|(_, w)| w).sum::<T>();
        let mut panels = 1;
        let mut prev = sum(panels);
        let mut err = T::infinity();
        while panels * PANEL_ORDER < MAX_NODES {
            panels *= 2;
            let next = sum(panels);
            err = (next - prev).abs();
            prev = next;
            if err <= rel * next + abs {
                return Ok(next);
            }
        }
        Err(Error::Quadrature { nodes: panels * PANEL_ORDER, achieved: err.to_f64_lossy() })
    }
}

#[derive(Debug, Clone, Copy)]
struct Window<T> {
    lo: T,
    hi: T,
    angular: bool,
}

/// `P(⟨U, V⟩ ≥ t)` for independent uniform `U, V` on `S^{d-1}`.
pub fn inner_product_tail<T: Scalar>(t: T, d: usize) -> Result<T> {
    InnerProductLaw::new(d)?.tail(t)
}

/// The edge threshold `τ(p, d)` and how well it was attained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThresholdResult<T> {
    pub p: T,
    pub d: usize,
    pub tau: T,
    /// `|P(X ≥ τ) - p|`.
    pub residual: T,
}

impl<T: Scalar> ThresholdResult<T> {
    /// `√(3 log(1/p) / d)`, an upper bound on `τ` for `p ≤ ½`.
    pub fn upper_bound(&self) -> T {
        (T::lit(3.0) * self.p.recip().ln() / T::from_usize_lossy(self.d)).sqrt()
    }
}

/// Solves `P(X ≥ τ) = p` by bisection (on `[0, 1)` for `p ≤ ½`, by symmetry
/// otherwise). Bisection runs until the bracket stops shrinking, then the
/// residual is checked against [`THRESHOLD_RESIDUAL`].
pub fn solve_threshold<T: Scalar>(p: T, d: usize) -> Result<ThresholdResult<T>> {
    if !(p > T::zero() && p < T::one()) {
        return Err(domain(format!("threshold needs p in (0, 1), got {p}")));
    }
    let law = InnerProductLaw::<T>::new(d)?;
    let half = T::lit(0.5);
    if p == half {
        return Ok(ThresholdResult { p, d, tau: T::zero(), residual: T::zero() });
    }
    let target = if p < half { p } else { T::one() - p };
    let (mut lo, mut hi) = (T::zero(), T::one());
    for _ in 0..BISECTION_MAX_ITER {
        let mid = (lo + hi) * half;
        if mid <= lo || mid >= hi {
            break;
        }
        if law.tail(mid)? > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (r_lo, r_hi) = ((law.tail(lo)? - target).abs(), (law.tail(hi)? - target).abs());
    let (tau, residual) = if r_lo <= r_hi { (lo, r_lo) } else { (hi, r_hi) };
    if residual > T::attainable(THRESHOLD_RESIDUAL) {
        return Err(Error::Precondition(format!("threshold residual {residual} above tolerance for p={p}, d={d}")));
    }
    let tau = if p < half { tau } else { -tau };
    Ok(ThresholdResult { p, d, tau, residual })
}

/// Three-term recurrence for the `L²(μ)`-orthonormal Gegenbauer polynomials:
/// `q_0 = 1`, `q_1 = √d x`, and
/// `q_{m+1} = A_m x q_m - B_m q_{m-1}` with
/// `A_m = √((2m+d)(2m+d-2) / ((m+1)(m+d-2)))`,
/// `B_m = √(m(m+d-3)(m+d/2) / ((m+1)(m+d-2)(m+d/2-2)))`.
#[derive(Debug, Clone)]
pub struct GegenbauerRecurrence<T> {
    d: usize,
    a: Vec<T>,
    b: Vec<T>,
}

impl<T: Scalar> GegenbauerRecurrence<T> {
    pub fn new(d: usize, max_order: usize) -> Result<Self> {
        if d < 3 {
            return Err(domain(format!("Gegenbauer recurrence needs d >= 3, got {d}")));
        }
        let df = T::from_usize_lossy(d);
        let two = T::lit(2.0);
        let half = T::lit(0.5);
        let mut a = Vec::with_capacity(max_order);
        let mut b = Vec::with_capacity(max_order);
        for m in 0..max_order {
            let mf = T::from_usize_lossy(m);
            let m1 = mf + T::one();
            a.push(((two * mf + df) * (two * mf + df - two) / (m1 * (mf + df - two))).sqrt());
            if m == 0 {
                b.push(T::zero());
            } else {
                let num = mf * (mf + df - T::lit(3.0)) * (mf + df * half);
                let den = m1 * (mf + df - two) * (mf + df * half - two);
                b.push((num / den).sqrt());
            }
        }
        Ok(Self { d, a, b })
    }

    pub fn dimension(&self) -> usize {
        self.d
    }

    pub fn max_order(&self) -> usize {
        self.a.len()
    }

    /// Writes `q_0(x), …, q_{out.len()-1}(x)` into `out`.
    pub fn fill(&self, x: T, out: &mut [T]) {
        assert!(out.len() <= self.a.len() + 1, "recurrence table too short");
        if out.is_empty() {
            return;
        }
        out[0] = T::one();
        let (mut prev, mut cur) = (T::zero(), T::one());
        for m in 1..out.len() {
            let next = self.a[m - 1] * x * cur - self.b[m - 1] * prev;
            out[m] = next;
            prev = cur;
            cur = next;
        }
    }
}

/// `q_m(x)` for the dimension-`d` orthonormal Gegenbauer family.
pub fn gegenbauer_eval<T: Scalar>(m: usize, d: usize, x: T) -> Result<T> {
    if !(x >= -T::one() && x <= T::one()) {
        return Err(domain(format!("Gegenbauer argument must lie in [-1, 1], got {x}")));
    }
    let rec = GegenbauerRecurrence::new(d, m)?;
    let mut out = vec![T::zero(); m + 1];
    rec.fill(x, &mut out);
    Ok(out[m])
}

/// Dimension `N_m` of the degree-`m` spherical harmonics on `S^{d-1}`,
/// carried in log space with the exact integer when it fits a `u128`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Multiplicity<T> {
    ln: T,
    exact: Option<u128>,
}

impl<T: Scalar> Multiplicity<T> {
    pub fn ln(&self) -> T {
        self.ln
    }

    pub fn exact(&self) -> Option<u128> {
        self.exact
    }

    /// `N_m` as a float, `None` when it is not representable.
    pub fn value(&self) -> Option<T> {
        if let Some(v) = self.exact {
            if let Some(f) = T::from_u128(v) {
                if f.is_finite() {
                    return Some(f);
                }
            }
        }
        let v = self.ln.exp();
        v.is_finite().then_some(v)
    }
}

/// `N_0 = 1`, `N_m = ((d + 2m - 2) / m) · C(d + m - 3, m - 1)`.
pub fn multiplicity<T: Scalar>(m: usize, d: usize) -> Result<Multiplicity<T>> {
    if d < 3 {
        return Err(domain(format!("multiplicity needs d >= 3, got {d}")));
    }
    if m == 0 {
        return Ok(Multiplicity { ln: T::zero(), exact: Some(1) });
    }
    let lead = (d + 2 * m - 2) as u128;
    let exact =
        binomial_exact((d + m - 3) as u64, (m - 1) as u64).and_then(|c| c.checked_mul(lead)).map(|v| v / m as u128);
    let ln = T::from_usize_lossy(d + 2 * m - 2).ln() - T::from_usize_lossy(m).ln()
        + ln_binomial(T::from_usize_lossy(d + m - 3), m - 1);
    Ok(Multiplicity { ln, exact })
}

/// Coefficients `c_m = ⟨1{· ≥ τ}, q_m⟩_{L²(μ)}` for `m = 0..=max_order`
/// together with `ln N_m`. Immutable once built.
#[derive(Debug, Clone)]
pub struct GegenbauerBasis<T> {
    d: usize,
    tau: T,
    coeffs: Vec<T>,
    errors: Vec<T>,
    ln_mults: Vec<T>,
    nodes: usize,
}

impl<T: Scalar> GegenbauerBasis<T> {
    /// Integrates every `q_m μ` over `[τ, 1]` in one pass per node set,
    /// doubling the panel count until all coefficients agree to
    /// [`COEFFICIENT_REL_TOL`] (plus an absolute floor, since `|c_m|` can sit
    /// far below the `L¹(μ)` size of `q_m`, which is at most one).
    pub fn new(d: usize, tau: T, max_order: usize) -> Result<Self> {
        if !(tau >= -T::one() && tau < T::one()) {
            return Err(domain(format!("threshold must lie in [-1, 1), got {tau}")));
        }
        let law = InnerProductLaw::<T>::new(d)?;
        let rec = GegenbauerRecurrence::<T>::new(d, max_order)?;
        let window = law.window(tau);
        let rule = GaussLegendre::<T>::new(PANEL_ORDER);
        let width = max_order + 1;
        let mut q = vec![T::zero(); width];
        let mut integrate = |panels: usize| {
            let mut acc = vec![T::zero(); width];
            for (x, weight) in law.weighted_nodes(&rule, window, panels) {
                if weight == T::zero() {
                    continue;
                }
                rec.fill(x, &mut q);
                for (a, &qm) in acc.iter_mut().zip(q.iter()) {
                    *a += weight * qm;
                }
            }
            acc
        };
        let rel = T::attainable(COEFFICIENT_REL_TOL);
        let floor = T::attainable(1e-14);
        let mut panels = 1;
        let mut prev = integrate(panels);
        let mut worst = T::infinity();
        while panels * PANEL_ORDER < MAX_NODES {
            panels *= 2;
            let next = integrate(panels);
            let errors: Vec<T> = next.iter().zip(prev.iter()).map(|(a, b)| (*a - *b).abs()).collect();
            worst = errors.iter().zip(next.iter()).map(|(e, c)| *e / (rel * c.abs() + floor)).fold(T::zero(), T::max);
            prev = next;
            if worst <= T::one() {
                let ln_mults =
                    (0..=max_order).map(|m| multiplicity::<T>(m, d).map(|n| n.ln())).collect::<Result<Vec<_>>>()?;
                return Ok(Self { d, tau, coeffs: prev, errors, ln_mults, nodes: panels * PANEL_ORDER });
            }
        }
        Err(Error::Quadrature { nodes: panels * PANEL_ORDER, achieved: (worst * (rel + floor)).to_f64_lossy() })
    }

    /// Basis for the threshold that gives edge density `p`.
    pub fn for_density(p: T, d: usize, max_order: usize) -> Result<Self> {
        let th = solve_threshold(p, d)?;
        Self::new(d, th.tau, max_order)
    }

    pub fn dimension(&self) -> usize {
        self.d
    }

    pub fn tau(&self) -> T {
        self.tau
    }

    pub fn max_order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coefficient(&self, m: usize) -> T {
        self.coeffs[m]
    }

    pub fn coefficients(&self) -> &[T] {
        &self.coeffs
    }

    /// Doubling-difference error estimate of `c_m`.
    pub fn coefficient_error(&self, m: usize) -> T {
        self.errors[m]
    }

    pub fn ln_multiplicity(&self, m: usize) -> T {
        self.ln_mults[m]
    }

    pub fn quadrature_nodes(&self) -> usize {
        self.nodes
    }

    /// `c_m^ℓ / N_m^{ℓ/2 - 1}`, combined in log space.
    pub fn cycle_term(&self, m: usize, ell: usize) -> T {
        let c = self.coeffs[m];
        if c == T::zero() {
            return T::zero();
        }
        let ell_t = T::from_usize_lossy(ell);
        let ln_mag = ell_t * c.abs().ln() - (ell_t * T::lit(0.5) - T::one()) * self.ln_mults[m];
        let sign = if c < T::zero() && ell % 2 == 1 { -T::one() } else { T::one() };
        sign * ln_mag.exp()
    }
}

/// `c_m` for a single order; prefer [`GegenbauerBasis`] when several are needed.
pub fn gegenbauer_coefficient<T: Scalar>(m: usize, d: usize, tau: T) -> Result<T> {
    Ok(GegenbauerBasis::new(d, tau, m)?.coefficient(m))
}

/// Truncation rule for the signed-cycle series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesOptions {
    /// The rule may only fire at or after this order.
    pub min_order: usize,
    /// Number of consecutive negligible terms required.
    pub run_length: usize,
    /// A term is negligible when `|term| ≤ rel_tol · |partial sum|`.
    pub rel_tol: f64,
    /// Overrides the default cap `max(64, ⌈d^{1/4}⌉)`.
    pub hard_cap: Option<usize>,
    /// Force truncation after this order (diagnostics).
    pub max_order: Option<usize>,
}

impl Default for SeriesOptions {
    fn default() -> Self {
        Self { min_order: 8, run_length: 5, rel_tol: 1e-16, hard_cap: None, max_order: None }
    }
}

impl SeriesOptions {
    pub fn cap_for(&self, d: usize) -> usize {
        self.hard_cap.unwrap_or_else(|| 64usize.max((d as f64).powf(0.25).ceil() as usize))
    }
}

/// The series value of `E[∏_{ij ∈ Cyc_ℓ} (G_ij - p)]` under the full
/// geometric model, with truncation diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CycleExpectationResult<T> {
    pub ell: usize,
    pub p: T,
    pub d: usize,
    pub value: T,
    /// Last order included in the sum.
    pub truncation_m: usize,
    /// Ten times the magnitude of the last included term.
    pub tail_bound: T,
    /// `p^ℓ log^{ℓ/2}(1/p) / d^{ℓ/2 - 1}`.
    pub scale: T,
    /// The hard cap was reached before the truncation rule fired.
    pub hit_cap: bool,
    /// `d < (5 log(1/p))^4`: computed, but outside the asymptotic regime.
    pub below_regime: bool,
}

impl<T: Scalar> CycleExpectationResult<T> {
    pub fn ratio(&self) -> T {
        self.value / self.scale
    }

    /// True when the cap was hit with a tail that is not negligible.
    pub fn truncation_failed(&self) -> bool {
        self.hit_cap && self.tail_bound > T::lit(1e-12) * self.value.abs()
    }

    pub fn check(&self) -> Result<&Self> {
        if self.truncation_failed() {
            return Err(Error::Truncation { order: self.truncation_m, tail: self.tail_bound.to_f64_lossy() });
        }
        Ok(self)
    }

    /// For triangles: `p³ log^{3/2}(1/p) / (C √d)`.
    pub fn triangle_lower_bound(&self, constant: T) -> Option<T> {
        (self.ell == 3).then(|| self.scale / constant)
    }
}

/// `p^ℓ log^{ℓ/2}(1/p) / d^{ℓ/2 - 1}`.
pub fn cycle_scale<T: Scalar>(ell: usize, p: T, d: usize) -> T {
    let ell_t = T::from_usize_lossy(ell);
    let half = T::lit(0.5);
    (ell_t * p.ln() + ell_t * half * p.recip().ln().ln() - (ell_t * half - T::one()) * T::from_usize_lossy(d).ln())
        .exp()
}

/// Sums the series over an existing basis (which must reach the cap).
pub fn cycle_series<T: Scalar>(
    basis: &GegenbauerBasis<T>,
    ell: usize,
    p: T,
    opts: &SeriesOptions,
) -> Result<CycleExpectationResult<T>> {
    if ell < 3 {
        return Err(precondition(format!("cycle length must be >= 3, got {ell}")));
    }
    let d = basis.dimension();
    let cap = opts.cap_for(d).min(opts.max_order.unwrap_or(usize::MAX));
    if basis.max_order() < cap {
        return Err(precondition(format!("basis reaches order {} but the series needs {cap}", basis.max_order())));
    }
    let rel = T::lit(opts.rel_tol);
    let mut sum = T::zero();
    let mut last = T::zero();
    let mut run = 0;
    let mut truncation_m = cap;
    let mut fired = false;
    for m in 1..=cap {
        let term = basis.cycle_term(m, ell);
        sum += term;
        last = term;
        if term.abs() <= rel * sum.abs() {
            run += 1;
        } else {
            run = 0;
        }
        if m >= opts.min_order && run >= opts.run_length {
            truncation_m = m;
            fired = true;
            break;
        }
    }
    let forced = opts.max_order.is_some_and(|mo| mo <= cap && truncation_m == mo);
    let five = T::lit(5.0);
    Ok(CycleExpectationResult {
        ell,
        p,
        d,
        value: sum,
        truncation_m,
        tail_bound: T::lit(10.0) * last.abs(),
        scale: cycle_scale(ell, p, d),
        hit_cap: !fired && !forced,
        below_regime: T::from_usize_lossy(d) < (five * p.recip().ln()).powi(4),
    })
}

/// Expected signed `ℓ`-cycle of `G(n, p, d)` by the Gegenbauer series.
pub fn signed_cycle_expectation<T: Scalar>(ell: usize, p: T, d: usize) -> Result<CycleExpectationResult<T>> {
    signed_cycle_expectation_with(ell, p, d, &SeriesOptions::default())
}

pub fn signed_cycle_expectation_with<T: Scalar>(
    ell: usize,
    p: T,
    d: usize,
    opts: &SeriesOptions,
) -> Result<CycleExpectationResult<T>> {
    if !(p > T::zero() && p <= T::lit(0.5)) {
        return Err(precondition(format!("series needs 0 < p <= 1/2, got {p}")));
    }
    if d < 4 {
        return Err(precondition(format!("series needs d >= 4, got {d}")));
    }
    let cap = opts.cap_for(d).min(opts.max_order.unwrap_or(usize::MAX));
    let basis = GegenbauerBasis::for_density(p, d, cap)?;
    cycle_series(&basis, ell, p, opts)
}

/// Uniform point on `S^{d-1}` as a normalized standard Gaussian vector.
pub fn sample_uniform_sphere<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<f64> {
    assert!(d >= 1, "sphere dimension must be positive");
    loop {
        let mut v: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 && norm.is_finite() {
            v.iter_mut().for_each(|x| *x /= norm);
            return v;
        }
    }
}
