//! Composite Gauss–Legendre quadrature with panel doubling.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Points per panel.
pub const PANEL_ORDER: usize = 32;
/// Hard cap on the total node count.
pub const MAX_NODES: usize = 1 << 14;

/// Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre<T> {
    nodes: Vec<T>,
    weights: Vec<T>,
}

impl<T: Scalar> GaussLegendre<T> {
    /// Nodes are found by Newton iteration on `P_n` in `f64` and then cast.
    pub fn new(order: usize) -> Self {
        assert!(order >= 1);
        let n = order;
        let mut nodes = vec![0.0f64; n];
        let mut weights = vec![0.0f64; n];
        for i in 0..n.div_ceil(2) {
            let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp;
            loop {
                let (mut p1, mut p2) = (1.0f64, 0.0f64);
                for j in 1..=n {
                    let p3 = p2;
                    p2 = p1;
                    p1 = ((2 * j - 1) as f64 * z * p2 - (j - 1) as f64 * p3) / j as f64;
                }
                dp = n as f64 * (z * p1 - p2) / (z * z - 1.0);
                let z_prev = z;
                z = z_prev - p1 / dp;
                if (z - z_prev).abs() <= 1e-15 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - z * z) * dp * dp);
            nodes[i] = -z;
            nodes[n - 1 - i] = z;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes: nodes.into_iter().map(T::lit).collect(), weights: weights.into_iter().map(T::lit).collect() }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// `(x, w)` pairs of the rule split into `panels` equal panels of `[a, b]`.
    pub fn composite(&self, a: T, b: T, panels: usize) -> impl Iterator<Item = (T, T)> + '_ {
        let width = (b - a) / T::from_usize_lossy(panels);
        let half = width * T::lit(0.5);
        (0..panels).flat_map(move |k| {
            let mid = a + width * (T::from_usize_lossy(k) + T::lit(0.5));
            self.nodes.iter().zip(self.weights.iter()).map(move |(&x, &w)| (mid + half * x, half * w))
        })
    }
}

/// An integral together with its doubling-difference error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral<T> {
    pub value: T,
    pub error: T,
    pub nodes: usize,
}

/// Integrates `f` over `[a, b]`, doubling panels until two successive
/// estimates differ by at most `rel_tol * |I| + abs_tol`.
pub fn integrate<T, F>(mut f: F, a: T, b: T, rel_tol: f64, abs_tol: f64) -> Result<Integral<T>>
where
    T: Scalar,
    F: FnMut(T) -> T,
{
    let rule = GaussLegendre::<T>::new(PANEL_ORDER);
    let rel = T::attainable(rel_tol);
    let abs = T::lit(abs_tol);
    let mut panels = 1;
    let mut prev: T = rule.composite(a, b, panels).map(|(x, w)| w * f(x)).sum();
    let mut err = T::infinity();
    while panels * PANEL_ORDER < MAX_NODES {
        panels *= 2;
        let next: T = rule.composite(a, b, panels).map(|(x, w)| w * f(x)).sum();
        err = (next - prev).abs();
        prev = next;
        if err <= rel * next.abs() + abs {
            return Ok(Integral { value: next, error: err, nodes: panels * PANEL_ORDER });
        }
    }
    Err(Error::Quadrature { nodes: panels * PANEL_ORDER, achieved: err.to_f64_lossy() })
}
