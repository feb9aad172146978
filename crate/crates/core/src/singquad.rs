//! Product integration for the Abel kernel `(t - s)^(alpha - 1)` and a
//! time-marching solver for weakly singular Volterra equations of the
//! second kind.
//!
//! The quadrature is product-trapezoidal on a uniform grid: on each
//! subinterval the smooth factor is replaced by its linear interpolant and
//! integrated against the kernel analytically, so the rule is exact for
//! affine integrands and never evaluates the kernel at its singularity.
//! Weights for the target node `t_n` depend only on the distance `n - j`,
//! which keeps the table in convolution form (O(N) storage).
//!
//! [`solve_volterra`] marches the integral equality
//! `u = a + b * int u + g * int (t-s)^(alpha-1) u` forward in time, solving
//! for the diagonal entry at each node. Its output is the extremal witness
//! the bound evaluators are tested against.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;

use crate::grid::{AlphaOrder, GridError, SampledFn, TimeGrid};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QuadError {
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error("kernel exponent must be positive and finite, got mu = {0}")]
    BadExponent(f64),
    #[error("hypothesis violated: {0}")]
    HypothesisViolation(String),
    #[error("singular step at node {node}: implicit diagonal coefficient {coefficient} <= 0 (step too large)")]
    SingularStep { node: usize, coefficient: f64 },
    #[error("solution became non-finite at node {node}")]
    NonFinite { node: usize },
}

/// Product-trapezoidal weights for the kernel `(t - s)^(mu - 1)`, `mu > 0`.
///
/// `l[m]` / `r[m]` are the weights a subinterval at kernel distance `m`
/// contributes to its left / right endpoint value.
#[derive(Debug, Clone)]
pub(crate) struct ProductWeights {
    mu: f64,
    grid: TimeGrid,
    h_mu: f64,
    pow_mu: Vec<f64>,
    l: Vec<f64>,
    r: Vec<f64>,
}

impl ProductWeights {
    pub(crate) fn new(mu: f64, grid: TimeGrid) -> Result<Self, QuadError> {
        if !mu.is_finite() || mu <= 0.0 {
            return Err(QuadError::BadExponent(mu));
        }
        let n = grid.n_steps();
        let h = grid.step();
        let h_mu = h.powf(mu);
        let pow_mu: Vec<f64> = (0..=n).map(|m| (m as f64).powf(mu)).collect();
        let pow_mu1: Vec<f64> = (0..=n).map(|m| (m as f64).powf(mu + 1.0)).collect();
        let mut l = vec![0.0; n];
        let mut r = vec![0.0; n];
        for m in 0..n {
            let q = (pow_mu[m + 1] - pow_mu[m]) / mu;
            let p = (pow_mu1[m + 1] - pow_mu1[m]) / (mu + 1.0);
            l[m] = h_mu * (p - m as f64 * q);
            r[m] = h_mu * ((m as f64 + 1.0) * q - p);
        }
        Ok(Self { mu, grid, h_mu, pow_mu, l, r })
    }

    #[inline]
    pub(crate) fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    /// Weight of the sample at node `j` in the integral ending at `t_n`.
    pub(crate) fn weight(&self, n: usize, j: usize) -> f64 {
        debug_assert!(j <= n && n <= self.grid.n_steps());
        let mut w = 0.0;
        if j < n {
            w += self.l[n - 1 - j];
        }
        if j >= 1 && n >= j {
            w += self.r[n - j];
        }
        w
    }

    /// Kernel mass of one subinterval at distance `m` from the target node,
    /// `int_{m h}^{(m+1) h} u^(mu-1) du`.
    #[inline]
    pub(crate) fn segment_mass(&self, m: usize) -> f64 {
        self.h_mu * (self.pow_mu[m + 1] - self.pow_mu[m]) / self.mu
    }

    /// `t_j^mu`.
    #[inline]
    pub(crate) fn node_pow(&self, j: usize) -> f64 {
        self.h_mu * self.pow_mu[j]
    }

    /// Integral at `t_n` of the kernel against the interpolant of `values`,
    /// using only history nodes `j <= hist_end`.
    fn apply_at_truncated(&self, n: usize, values: &[f64], hist_end: usize) -> f64 {
        let mut acc = 0.0;
        for m in 0..n {
            let j_left = n - 1 - m;
            if j_left <= hist_end {
                acc += self.l[m] * values[j_left];
            }
            let j_right = n - m;
            if m >= 1 && j_right <= hist_end {
                acc += self.r[m] * values[j_right];
            }
        }
        // m = 0 right endpoint is the diagonal sample j = n.
        if n >= 1 && n <= hist_end {
            acc += self.r[0] * values[n];
        }
        acc
    }

    /// Integral at every node; value at `t_0` is 0.
    pub(crate) fn apply(&self, values: &[f64]) -> Vec<f64> {
        debug_assert_eq!(values.len(), self.grid.n_nodes());
        let n_nodes = self.grid.n_nodes();
        let mut out = vec![0.0; n_nodes];
        for n in 1..n_nodes {
            out[n] = self.apply_at_truncated(n, values, n);
        }
        out
    }
}

/// Product-trapezoidal weight table for the Abel kernel
/// `(t - s)^(alpha - 1)`; all weights are nonnegative and each row applied
/// to the constant 1 sums to `t_n^alpha / alpha`.
#[derive(Debug, Clone)]
pub struct AbelWeights {
    alpha: AlphaOrder,
    inner: ProductWeights,
}

impl AbelWeights {
    pub fn new(alpha: AlphaOrder, grid: TimeGrid) -> Result<Self, QuadError> {
        Ok(Self {
            alpha,
            inner: ProductWeights::new(alpha.value(), grid)?,
        })
    }

    #[inline]
    pub fn alpha(&self) -> AlphaOrder {
        self.alpha
    }

    #[inline]
    pub fn grid(&self) -> &TimeGrid {
        self.inner.grid()
    }

    /// `w[n][j]`: weight of `phi(t_j)` in `int_0^{t_n} (t_n - s)^(alpha-1) phi(s) ds`.
    #[inline]
    pub fn weight(&self, n: usize, j: usize) -> f64 {
        self.inner.weight(n, j)
    }

    /// `int_{t_j}^{t_{j+1}} (t_n - s)^(alpha-1) ds` for a subinterval at
    /// distance `m = n - 1 - j`; the left-point weight the path simulator
    /// uses for its explicit singular channel.
    #[inline]
    pub fn segment_kernel_integral(&self, m: usize) -> f64 {
        self.inner.segment_mass(m)
    }

    /// `t_j^alpha`.
    #[inline]
    pub fn node_pow_alpha(&self, j: usize) -> f64 {
        self.inner.node_pow(j)
    }

    /// Diagonal weight `w[n][n]`, the analytically integrated singular
    /// corner `h^alpha / (alpha (alpha + 1))`.
    #[inline]
    pub fn diagonal_weight(&self) -> f64 {
        self.inner.r[0]
    }
}

/// Abel integral of `phi` at every grid node.
pub fn frac_integral(phi: &SampledFn, w: &AbelWeights) -> Result<SampledFn, QuadError> {
    if phi.grid() != w.grid() {
        return Err(GridError::GridMismatch.into());
    }
    let values = w.inner.apply(phi.values());
    Ok(SampledFn::from_values(*phi.grid(), values)?)
}

/// Cumulative trapezoid integral `int_0^{t_n} f`, exact for affine `f`.
pub fn cumulative_trapezoid(f: &SampledFn) -> SampledFn {
    let h = f.grid().step();
    let v = f.values();
    let mut out = Vec::with_capacity(v.len());
    out.push(0.0);
    let mut acc = 0.0;
    for j in 1..v.len() {
        acc += 0.5 * h * (v[j - 1] + v[j]);
        out.push(acc);
    }
    SampledFn::from_values(*f.grid(), out).expect("trapezoid of finite samples is finite")
}

/// Coefficients `(c0, c1)` when the samples lie on an affine function
/// `c0 + c1 t` (up to 1e-12 of the sample scale), `None` otherwise.
pub(crate) fn affine_decomposition(f: &SampledFn) -> Option<(f64, f64)> {
    let v = f.values();
    let scale = f.sup_norm().max(1.0);
    for j in 1..v.len() - 1 {
        if (v[j + 1] - 2.0 * v[j] + v[j - 1]).abs() > 1e-12 * scale {
            return None;
        }
    }
    let c0 = v[0];
    let c1 = (v[v.len() - 1] - v[0]) / f.grid().t_end();
    Some((c0, c1))
}

/// `int_0^{t_n} (t_n - s)^(mu - 1) a(s) ds` at every node, by product
/// integration against the piecewise-linear interpolant of `a`. Affine
/// inputs take a closed-form path (the two agree, the rule is exact for
/// affine integrands).
pub fn kernel_moments(mu: f64, a: &SampledFn) -> Result<Vec<f64>, QuadError> {
    if !mu.is_finite() || mu <= 0.0 {
        return Err(QuadError::BadExponent(mu));
    }
    if let Some((c0, c1)) = affine_decomposition(a) {
        let grid = a.grid();
        let mut out = vec![0.0; grid.n_nodes()];
        for (n, t) in grid.nodes().enumerate().skip(1) {
            let t_mu = (mu * t.ln()).exp();
            out[n] = c0 * t_mu / mu + c1 * t_mu * t / (mu * (mu + 1.0));
        }
        Ok(out)
    } else {
        Ok(ProductWeights::new(mu, *a.grid())?.apply(a.values()))
    }
}

/// Solve the second-kind Volterra equality
/// `u(t) = a(t) + b(t) int_0^t u(s) ds + g(t) int_0^t (t-s)^(alpha-1) u(s) ds`
/// by marching in time with an implicitly handled diagonal.
///
/// Requires `a, b, g >= 0` and `b, g` nondecreasing on the grid, matching
/// the hypotheses the bounds are proved under; the returned curve is the
/// extremal function for the corresponding inequality.
pub fn solve_volterra(
    a: &SampledFn,
    b: &SampledFn,
    g: &SampledFn,
    alpha: AlphaOrder,
) -> Result<SampledFn, QuadError> {
    if !a.same_grid(b) || !a.same_grid(g) {
        return Err(GridError::GridMismatch.into());
    }
    for (name, f) in [("a", a), ("b", b), ("g", g)] {
        if !f.is_nonnegative() {
            return Err(QuadError::HypothesisViolation(alloc::format!(
                "{name} must be nonnegative on the grid"
            )));
        }
    }
    for (name, f) in [("b", b), ("g", g)] {
        if !f.is_nondecreasing(1e-12) {
            return Err(QuadError::HypothesisViolation(alloc::format!(
                "{name} must be nondecreasing on the grid"
            )));
        }
    }

    let grid = *a.grid();
    let h = grid.step();
    let w = AbelWeights::new(alpha, grid)?;
    let diag_abel = w.diagonal_weight();

    let n_nodes = grid.n_nodes();
    let mut u = vec![0.0; n_nodes];
    u[0] = a.value(0);
    // Running trapezoid history: u_0/2 + u_1 + ... + u_{n-1}.
    let mut trap_hist = 0.5 * u[0];
    for n in 1..n_nodes {
        let abel_hist = w.inner.apply_at_truncated(n, &u, n - 1);
        let bn = b.value(n);
        let gn = g.value(n);
        let denom = 1.0 - bn * 0.5 * h - gn * diag_abel;
        if denom <= 0.0 {
            return Err(QuadError::SingularStep { node: n, coefficient: denom });
        }
        let un = (a.value(n) + bn * h * trap_hist + gn * abel_hist) / denom;
        if !un.is_finite() {
            return Err(QuadError::NonFinite { node: n });
        }
        u[n] = un;
        trap_hist += un;
    }
    Ok(SampledFn::from_values(grid, u)?)
}
