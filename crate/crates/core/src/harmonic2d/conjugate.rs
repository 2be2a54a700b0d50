//! The conjugate vector field of a harmonic function and the strip-wise
//! skew approximation used to chain local rigidity estimates.

use serde::Serialize;

use super::grid::Grid2D;
use super::solve::Harmonic2DSolution;
use crate::error::{check_exponent, Result};
use crate::numerics::pairwise_sum;

/// A planar vector field `W = (u, v)` sampled on a grid, with gradients.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField2D {
    pub grid: Grid2D,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub ux: Vec<f64>,
    pub uy: Vec<f64>,
    pub vx: Vec<f64>,
    pub vy: Vec<f64>,
}

impl VectorField2D {
    /// Nodal values with gradients by finite differences.
    pub fn from_nodal(grid: Grid2D, u: Vec<f64>, v: Vec<f64>) -> Self {
        let (ux, uy) = grid.gradient(&u);
        let (vx, vy) = grid.gradient(&v);
        Self { grid, u, v, ux, uy, vx, vy }
    }

    /// Samples an analytic field `(x, y) ↦ ((u, v), ∇W)` with `∇W = [[u_x, u_y], [v_x, v_y]]`.
    pub fn from_fn(grid: Grid2D, f: impl Fn(f64, f64) -> ([f64; 2], [[f64; 2]; 2])) -> Self {
        let n = grid.len();
        let mut out = Self {
            grid,
            u: vec![0.0; n],
            v: vec![0.0; n],
            ux: vec![0.0; n],
            uy: vec![0.0; n],
            vx: vec![0.0; n],
            vy: vec![0.0; n],
        };
        for j in 0..=grid.n_y {
            for i in 0..=grid.n_s {
                let (x, y) = grid.xy(i, j);
                let ([u, v], [[ux, uy], [vx, vy]]) = f(x, y);
                let k = grid.idx(i, j);
                out.u[k] = u;
                out.v[k] = v;
                out.ux[k] = ux;
                out.uy[k] = uy;
                out.vx[k] = vx;
                out.vy[k] = vy;
            }
        }
        out
    }

    /// `e₁₂ = (u_y + v_x)/2` at every node.
    pub fn e12(&self) -> Vec<f64> {
        self.uy.iter().zip(&self.vx).map(|(a, b)| 0.5 * (a + b)).collect()
    }

    /// `e₁₁ − e₂₂ = u_x − v_y` at every node.
    pub fn e_diff(&self) -> Vec<f64> {
        self.ux.iter().zip(&self.vy).map(|(a, b)| a - b).collect()
    }

    /// Frobenius norm of `e(W)` at every node.
    pub fn strain_norm(&self) -> Vec<f64> {
        (0..self.u.len())
            .map(|k| {
                let e12 = 0.5 * (self.uy[k] + self.vx[k]);
                (self.ux[k].powi(2) + self.vy[k].powi(2) + 2.0 * e12 * e12).sqrt()
            })
            .collect()
    }
}

/// `u = w`, `v(x, y) = −∫₀ˣ ∂_y w(t, y) dt + ∫₀ʸ ∂_x w(0, ζ) dζ`.
///
/// The `x`-integral runs along grid rows (fixed `y`, where `x` is affine in
/// `s`) by the cumulative trapezoid rule from the left side, applied to a
/// fourth-order `∂_y w`; the value at `x = 0`, i.e. `s₀ = φ₁/H`, is taken
/// by cubic interpolation.
pub fn conjugate_field(sol: &Harmonic2DSolution) -> VectorField2D {
    let g = sol.grid;
    let (wx, _) = sol.gradient();
    let wy = g.gradient_y4(&sol.w);
    let ds = g.ds();
    let mut v = vec![0.0; g.len()];
    let mut q = vec![0.0; g.n_y + 1];
    for j in 0..=g.n_y {
        let y = g.y(j);
        let p1 = g.domain.phi1(y).0;
        let big_h = p1 + g.domain.phi2(y).0;
        let s0 = p1 / big_h;
        // integrand in s: ∂_y w · dx/ds
        let f: Vec<f64> = (0..=g.n_s).map(|i| wy[g.idx(i, j)] * big_h).collect();
        let mut cum = vec![0.0; g.n_s + 1];
        for i in 1..=g.n_s {
            cum[i] = cum[i - 1] + 0.5 * ds * (f[i - 1] + f[i]);
        }
        let at_zero = cubic_at(&cum, s0 / ds);
        for i in 0..=g.n_s {
            v[g.idx(i, j)] = -(cum[i] - at_zero);
        }
        let wx_row: Vec<f64> = (0..=g.n_s).map(|i| wx[g.idx(i, j)]).collect();
        q[j] = cubic_at(&wx_row, s0 / ds);
    }
    let dy = g.dy();
    let mut along = 0.0;
    for j in 0..=g.n_y {
        if j > 0 {
            along += 0.5 * dy * (q[j - 1] + q[j]);
        }
        for i in 0..=g.n_s {
            v[g.idx(i, j)] += along;
        }
    }
    let (vx, vy) = g.gradient(&v);
    VectorField2D { grid: g, u: sol.w.clone(), v, ux: wx, uy: wy, vx, vy }
}

/// Four-point Lagrange interpolation of equispaced samples at fractional index `r`.
fn cubic_at(f: &[f64], r: f64) -> f64 {
    let n = f.len() - 1;
    let k = (r.floor() as usize).clamp(1, n - 2) - 1;
    let x = r - k as f64;
    let l = [
        -(x - 1.0) * (x - 2.0) * (x - 3.0) / 6.0,
        x * (x - 2.0) * (x - 3.0) / 2.0,
        -x * (x - 1.0) * (x - 3.0) / 2.0,
        x * (x - 1.0) * (x - 2.0) / 6.0,
    ];
    (0..4).map(|m| l[m] * f[k + m]).sum()
}

/// Per-strip skew approximations `A_k = [[0, a_k], [−a_k, 0]]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SkewChain {
    /// Number of strip boundaries per unit height, `N = ⌊b/h⌋ + 1`.
    pub n: usize,
    /// `y`-ranges of the strips.
    pub strips: Vec<(f64, f64)>,
    pub a: Vec<f64>,
    /// `‖e(W)‖_{L^p(D_k)}` per strip.
    pub strain: Vec<f64>,
    /// `max_k |a₁ − a_k|`
    pub max_deviation: f64,
    /// `Σ_k ‖e(W)‖_{L^p(D_k)}`
    pub strain_sum: f64,
    /// Set when `N < 3` and the whole domain is one strip.
    pub single_strip: bool,
}

/// Overlapping strips `y/b ∈ [(k−1)/N, (k+1)/N]`, `k = 1, …, N−1`, and the
/// `p`-optimal skew matrix on each.
pub fn strip_chain(field: &VectorField2D, p: f64) -> Result<SkewChain> {
    check_exponent(p)?;
    let g = &field.grid;
    let d = g.domain;
    let n = (d.b / d.h).floor() as usize + 1;
    let strips: Vec<(f64, f64)> = if n < 3 {
        vec![(0.0, d.b)]
    } else {
        (1..n).map(|k| (d.b * (k - 1) as f64 / n as f64, d.b * (k + 1) as f64 / n as f64)).collect()
    };
    let w = g.weights();
    let e = field.strain_norm();
    let m: Vec<f64> = field.uy.iter().zip(&field.vx).map(|(uy, vx)| 0.5 * (uy - vx)).collect();
    let mut a = Vec::with_capacity(strips.len());
    let mut strain = Vec::with_capacity(strips.len());
    for &(lo, hi) in &strips {
        let tol = 1e-12 * d.b;
        let nodes: Vec<usize> = (0..=g.n_y)
            .filter(|&j| g.y(j) >= lo - tol && g.y(j) <= hi + tol)
            .flat_map(|j| (0..=g.n_s).map(move |i| g.idx(i, j)))
            .collect();
        let ws: Vec<f64> = nodes.iter().map(|&k| w[k]).collect();
        let es: Vec<f64> = nodes.iter().map(|&k| e[k]).collect();
        let ms: Vec<f64> = nodes.iter().map(|&k| m[k]).collect();
        a.push(skew_fit(&ms, &es, &ws, p));
        strain.push(g.lp_norm_weighted(&es, &ws, p));
    }
    let max_deviation = a.iter().map(|ak| (a[0] - ak).abs()).fold(0.0, f64::max);
    Ok(SkewChain { n, strips, strain_sum: pairwise_sum(&strain), a, strain, max_deviation, single_strip: n < 3 })
}

/// Minimizer of `Σ w (|e|² + 2(a − m)²)^{p/2}`, which equals
/// `Σ w |∇W − A(a)|^p`. The minimizer lies in the range of `m`.
fn skew_fit(m: &[f64], e: &[f64], w: &[f64], p: f64) -> f64 {
    let (lo, hi) = m.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
    if !(hi > lo) {
        return lo;
    }
    let slope = |a: f64| {
        let t: Vec<f64> = (0..m.len())
            .map(|k| {
                let q = e[k] * e[k] + 2.0 * (a - m[k]).powi(2);
                if q == 0.0 {
                    0.0
                } else {
                    w[k] * q.powf(0.5 * p - 1.0) * (a - m[k])
                }
            })
            .collect();
        pairwise_sum(&t)
    };
    let (mut a0, mut a1) = (lo, hi);
    for _ in 0..60 {
        if a1 - a0 <= 1e-10 * (hi - lo) {
            break;
        }
        let mid = 0.5 * (a0 + a1);
        if slope(mid) > 0.0 {
            a1 = mid;
        } else {
            a0 = mid;
        }
    }
    0.5 * (a0 + a1)
}
