//! Shared domain types: the fractional order, uniform time grids, and
//! functions sampled on them.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GridError {
    #[error("fractional order must lie in (0, 1], got {0}")]
    BadAlpha(f64),
    #[error("time grid needs t_end > 0 and n_steps >= 2, got t_end={t_end}, n_steps={n_steps}")]
    BadTimeGrid { t_end: f64, n_steps: usize },
    #[error("sampled function has {got} values, grid expects {expected}")]
    LengthMismatch { got: usize, expected: usize },
    #[error("non-finite sample at node {index}")]
    NonFiniteValue { index: usize },
    #[error("operands live on different time grids")]
    GridMismatch,
}

/// Fractional order `alpha` in `(0, 1]`.
///
/// The mixed bound is a statement about `alpha < 1`; `alpha = 1` is accepted
/// because every kernel formula specializes smoothly to the classical case
/// (the Abel weights become plain trapezoid weights) and the reduction
/// checks rely on evaluating there.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaOrder(f64);

impl AlphaOrder {
    pub fn new(alpha: f64) -> Result<Self, GridError> {
        if alpha.is_finite() && alpha > 0.0 && alpha <= 1.0 {
            Ok(Self(alpha))
        } else {
            Err(GridError::BadAlpha(alpha))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }
}

/// Uniform partition of `[0, t_end]` into `n_steps` steps, nodes
/// `t_j = j * t_end / n_steps` for `j = 0..=n_steps`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    t_end: f64,
    n_steps: usize,
}

impl TimeGrid {
    pub fn new(t_end: f64, n_steps: usize) -> Result<Self, GridError> {
        if t_end.is_finite() && t_end > 0.0 && n_steps >= 2 {
            Ok(Self { t_end, n_steps })
        } else {
            Err(GridError::BadTimeGrid { t_end, n_steps })
        }
    }

    #[inline]
    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    #[inline]
    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    /// Number of nodes, `n_steps + 1`.
    #[inline]
    pub fn n_nodes(&self) -> usize {
        self.n_steps + 1
    }

    /// Step size `t_end / n_steps`.
    #[inline]
    pub fn step(&self) -> f64 {
        self.t_end / self.n_steps as f64
    }

    #[inline]
    pub fn node(&self, j: usize) -> f64 {
        debug_assert!(j <= self.n_steps);
        self.t_end * j as f64 / self.n_steps as f64
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_nodes()).map(move |j| self.node(j))
    }
}

/// Real-valued function sampled on a [`TimeGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFn {
    grid: TimeGrid,
    values: Vec<f64>,
}

impl SampledFn {
    pub fn from_values(grid: TimeGrid, values: Vec<f64>) -> Result<Self, GridError> {
        if values.len() != grid.n_nodes() {
            return Err(GridError::LengthMismatch {
                got: values.len(),
                expected: grid.n_nodes(),
            });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(GridError::NonFiniteValue { index });
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: TimeGrid, mut f: impl FnMut(f64) -> f64) -> Result<Self, GridError> {
        let values: Vec<f64> = grid.nodes().map(&mut f).collect();
        Self::from_values(grid, values)
    }

    pub fn constant(grid: TimeGrid, c: f64) -> Result<Self, GridError> {
        Self::from_values(grid, alloc::vec![c; grid.n_nodes()])
    }

    #[inline]
    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn value(&self, j: usize) -> f64 {
        self.values[j]
    }

    pub fn same_grid(&self, other: &SampledFn) -> bool {
        self.grid == other.grid
    }

    /// Largest absolute value over the grid.
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Largest node-wise absolute difference to `other`.
    pub fn sup_distance(&self, other: &SampledFn) -> Result<f64, GridError> {
        if !self.same_grid(other) {
            return Err(GridError::GridMismatch);
        }
        Ok(self
            .values
            .iter()
            .zip(other.values.iter())
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs())))
    }

    /// True if no node drops by more than `tol` relative to the running
    /// maximum (numerically flat segments count as nondecreasing).
    pub fn is_nondecreasing(&self, tol: f64) -> bool {
        let scale = self.sup_norm().max(1.0);
        let mut run_max = f64::NEG_INFINITY;
        for &v in &self.values {
            if v < run_max - tol * scale {
                return false;
            }
            run_max = run_max.max(v);
        }
        true
    }

    pub fn is_nonnegative(&self) -> bool {
        self.values.iter().all(|&v| v >= 0.0)
    }
}
