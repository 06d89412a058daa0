//! Finite-difference weights, local polynomial interpolation and cumulative quadrature.

use std::ops::{Add, Mul, Sub};

use crate::error::{Error, Result};

/// Weights for derivatives of order `0..=max_order` at `x0` over arbitrary distinct
/// `nodes` (Fornberg's recursion). Indexed as `weights[order][node]`.
pub fn fornberg_weights(x0: f64, nodes: &[f64], max_order: usize) -> Vec<Vec<f64>> {
    let n = nodes.len();
    let mut c = vec![vec![0.0; n]; max_order + 1];
    if n == 0 {
        return c;
    }
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - x0;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(max_order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - x0;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// Values that can be combined linearly by a stencil.
pub trait Linear: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {}

impl<T> Linear for T where T: Copy + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T> {}

/// A centered stencil on a uniform grid with `2 * half_width + 1` points,
/// spaced `stride` samples apart.
#[derive(Debug, Clone)]
pub struct CentralStencil {
    half_width: usize,
    stride: usize,
    spacing: f64,
    /// `weights[order]`, unit spacing, orders `0..=4`.
    weights: Vec<Vec<f64>>,
}

impl CentralStencil {
    pub const MAX_ORDER: usize = 4;

    /// `step` is the grid spacing; the stencil spacing is `stride * step`.
    pub fn new(half_width: usize, stride: usize, step: f64) -> Self {
        assert!(half_width >= 1 && stride >= 1);
        let nodes: Vec<f64> = (0..=2 * half_width).map(|j| j as f64 - half_width as f64).collect();
        let weights = fornberg_weights(0.0, &nodes, Self::MAX_ORDER);
        Self { half_width, stride, spacing: stride as f64 * step, weights }
    }

    /// Stencil whose spacing is the multiple of `step` closest to `target_spacing`,
    /// shrunk if needed so that at least one full stencil fits in `len` samples.
    pub fn with_target_spacing(half_width: usize, step: f64, target_spacing: f64, len: usize) -> Result<Self> {
        let need = 2 * half_width + 1;
        if len < need {
            return Err(Error::TooFewSamples { got: len, need });
        }
        let mut stride = ((target_spacing / step).round() as usize).max(1);
        let max_stride = (len - 1) / (2 * half_width);
        stride = stride.min(max_stride).max(1);
        Ok(Self::new(half_width, stride, step))
    }

    /// Samples trimmed on each side.
    pub fn reach(&self) -> usize {
        self.half_width * self.stride
    }

    pub fn stride(&self) -> usize {
        self.stride
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn points(&self) -> usize {
        2 * self.half_width + 1
    }

    /// Unit-spacing weights for `order`.
    pub fn weights(&self, order: usize) -> &[f64] {
        &self.weights[order]
    }

    /// Derivative of `order` (1..=4) at sample `i`; the caller guarantees `i` is interior.
    pub fn apply<T: Linear>(&self, values: &[T], i: usize, order: usize) -> T {
        debug_assert!((1..=Self::MAX_ORDER).contains(&order));
        debug_assert!(i >= self.reach() && i + self.reach() < values.len());
        let center = values[i];
        let w = &self.weights[order];
        let mut acc = center * 0.0;
        for (j, wj) in w.iter().enumerate() {
            if *wj == 0.0 {
                continue;
            }
            let idx = i + j * self.stride - self.reach();
            acc = acc + (values[idx] - center) * *wj;
        }
        acc * (1.0 / self.spacing.powi(order as i32))
    }
}

/// Number of nodes used by [`interpolate_uniform`] and [`interpolate_nodes`].
pub const INTERP_POINTS: usize = 8;

/// Window of `points` consecutive indices around the cell containing `x`.
fn window_start(cell: usize, len: usize, points: usize) -> usize {
    let half = points / 2;
    let start = (cell + 1).saturating_sub(half);
    start.min(len.saturating_sub(points))
}

/// Local Lagrange interpolation of samples on the uniform grid `start + i * step`.
///
/// Returns the node value unchanged when `x` is within `1e-9 * step` of a node.
pub fn interpolate_uniform<T: Linear>(values: &[T], start: f64, step: f64, x: f64) -> T {
    let n = values.len();
    let u = (x - start) / step;
    let nearest = u.round();
    if (u - nearest).abs() <= 1e-9 && nearest >= 0.0 && (nearest as usize) < n {
        return values[nearest as usize];
    }
    let cell = (u.floor().max(0.0) as usize).min(n.saturating_sub(2));
    let points = INTERP_POINTS.min(n);
    let lo = window_start(cell, n, points);
    let nodes: Vec<f64> = (lo..lo + points).map(|i| i as f64).collect();
    let w = fornberg_weights(u, &nodes, 0);
    combine(&values[lo..lo + points], &w[0])
}

/// Index of the cell `[xs[j], xs[j+1]]` containing `x` (clamped).
pub fn locate(xs: &[f64], x: f64) -> usize {
    let n = xs.len();
    if n < 2 {
        return 0;
    }
    let pos = xs.partition_point(|v| *v <= x);
    pos.saturating_sub(1).min(n - 2)
}

/// Local Lagrange interpolation on strictly increasing, possibly non-uniform nodes.
pub fn interpolate_nodes<T: Linear>(xs: &[f64], values: &[T], x: f64, points: usize) -> T {
    let n = xs.len();
    let cell = locate(xs, x);
    for j in [cell, cell + 1] {
        if j < n && x == xs[j] {
            return values[j];
        }
    }
    let points = points.min(n);
    let lo = window_start(cell, n, points);
    let w = fornberg_weights(x, &xs[lo..lo + points], 0);
    combine(&values[lo..lo + points], &w[0])
}

/// Derivative of `order` at `x` from a local polynomial through `points` nearby nodes.
pub fn derivative_nodes<T: Linear>(xs: &[f64], values: &[T], x: f64, order: usize, points: usize) -> T {
    let n = xs.len();
    let cell = locate(xs, x);
    let points = points.min(n);
    let lo = window_start(cell, n, points);
    let w = fornberg_weights(x, &xs[lo..lo + points], order);
    combine(&values[lo..lo + points], &w[order])
}

fn combine<T: Linear>(values: &[T], weights: &[f64]) -> T {
    let base = values[0];
    let mut acc = base * 0.0;
    let mut wsum = 0.0;
    for (v, w) in values.iter().zip(weights) {
        acc = acc + (*v - base) * *w;
        wsum += *w;
    }
    acc + base * wsum
}

/// Cumulative integral of samples on a uniform grid, exact for cubics on every cell.
///
/// Interior cells use the four surrounding samples; the two end cells use one-sided
/// cubic weights. Requires at least four samples.
pub fn cumulative_integral(values: &[f64], step: f64) -> Vec<f64> {
    let n = values.len();
    assert!(n >= 4, "cumulative_integral needs at least four samples");
    let mut out = Vec::with_capacity(n);
    out.push(0.0);
    let mut acc = 0.0;
    for i in 0..n - 1 {
        let cell = if i == 0 {
            (9.0 * values[0] + 19.0 * values[1] - 5.0 * values[2] + values[3]) / 24.0
        } else if i == n - 2 {
            (9.0 * values[n - 1] + 19.0 * values[n - 2] - 5.0 * values[n - 3] + values[n - 4]) / 24.0
        } else {
            (-values[i - 1] + 13.0 * values[i] + 13.0 * values[i + 1] - values[i + 2]) / 24.0
        };
        acc += cell * step;
        out.push(acc);
    }
    out
}

/// Simpson's rule on a single panel `[x0, x1]`.
pub fn simpson<F: FnMut(f64) -> f64>(mut f: F, x0: f64, x1: f64) -> f64 {
    let xm = 0.5 * (x0 + x1);
    (x1 - x0) / 6.0 * (f(x0) + 4.0 * f(xm) + f(x1))
}
