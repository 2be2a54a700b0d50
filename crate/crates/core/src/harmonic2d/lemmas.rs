//! Numerical versions of the planar rigidity estimates.

use serde::Serialize;

use super::solve::Harmonic2DSolution;
use crate::error::{check_exponent, Error, Result};
use crate::numerics::pairwise_sum;
use crate::numerics::quad1d::integrate;
use crate::numerics::shift;

/// Best constant `a` and residual `‖f − a‖_{L^p(D)}` for nodal values `f`
/// on the solution's grid.
pub fn optimal_shift(sol: &Harmonic2DSolution, values: &[f64], p: f64) -> Result<(f64, f64)> {
    shift::optimal_shift(values, &sol.grid.weights(), p)
}

/// `inf_a ‖∂_y w − a‖` against `(b/h)‖∂_x w‖`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Lemma41 {
    pub lhs: f64,
    pub rhs_factor: f64,
    pub shift: f64,
}

impl Lemma41 {
    /// `lhs / rhs_factor`; `None` when both vanish (affine kernel).
    pub fn ratio(&self) -> Option<f64> {
        ratio(self.lhs, self.rhs_factor)
    }
}

/// `num/den`, `None` for `0/0`, `∞` for `x/0`.
pub(crate) fn ratio(num: f64, den: f64) -> Option<f64> {
    if den > 0.0 {
        Some(num / den)
    } else if num > 0.0 {
        Some(f64::INFINITY)
    } else {
        None
    }
}

pub fn check_lemma41(sol: &Harmonic2DSolution, p: f64) -> Result<Lemma41> {
    check_exponent(p)?;
    let (wx, wy) = sol.gradient();
    let (a, lhs) = optimal_shift(sol, &wy, p)?;
    let d = sol.domain();
    let rhs_factor = d.b / d.h * sol.grid.lp_norm(&wx, p)?;
    Ok(Lemma41 { lhs, rhs_factor, shift: a })
}

/// `‖∂_y w‖² / (‖w‖‖∂_x w‖/h + ‖w‖²/b² + ‖∂_x w‖²)`.
pub fn check_lemma42(sol: &Harmonic2DSolution, p: f64) -> Result<f64> {
    check_exponent(p)?;
    let (wx, wy) = sol.gradient();
    let g = &sol.grid;
    let (nw, nx, ny) = (g.lp_norm(&sol.w, p)?, g.lp_norm(&wx, p)?, g.lp_norm(&wy, p)?);
    let d = sol.domain();
    let den = nw * nx / d.h + nw * nw / (d.b * d.b) + nx * nx;
    if !(den > 0.0) {
        return Err(Error::Degenerate("w vanishes identically".into()));
    }
    Ok(ny * ny / den)
}

/// `∫ ρ^p |∇w|^p / ∫ |w|^p` with `ρ` the distance to `∂D`.
pub fn check_lemma43(sol: &Harmonic2DSolution, p: f64) -> Result<f64> {
    check_exponent(p)?;
    let (wx, wy) = sol.gradient();
    let g = &sol.grid;
    let w = g.weights();
    let mut num = Vec::with_capacity(g.len());
    let mut den = Vec::with_capacity(g.len());
    for j in 0..=g.n_y {
        for i in 0..=g.n_s {
            let k = g.idx(i, j);
            let (x, y) = g.xy(i, j);
            let rho = if g.is_boundary(i, j) { 0.0 } else { sol.domain().boundary_distance(x, y) };
            num.push(w[k] * (rho * wx[k].hypot(wy[k])).powf(p));
            den.push(w[k] * sol.w[k].abs().powf(p));
        }
    }
    let den = pairwise_sum(&den);
    if !(den > 0.0) {
        return Err(Error::Degenerate("w vanishes identically".into()));
    }
    Ok(pairwise_sum(&num) / den)
}

/// Relative tolerance of the adaptive quadrature in [`check_lemma44`].
pub const LEMMA44_TOL: f64 = 1e-9;

/// Both sides of the one-dimensional inequality
/// `∫_{a+λ(b−a)}^b |f|^p ≤ ((2+λ)/λ) ∫_a^{a+λ(b−a)} |f|^p + 2^p (p−1)^{p−1} ∫_a^b (b−t)^p |f'|^p`.
pub fn check_lemma44(
    f: &dyn Fn(f64) -> f64,
    df: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    lambda: f64,
    p: f64,
) -> Result<(f64, f64)> {
    check_exponent(p)?;
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::InvalidArgument(format!("need a < b, got [{a}, {b}]")));
    }
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::InvalidArgument(format!("λ must lie in (0, 1), got {lambda}")));
    }
    let c = a + lambda * (b - a);
    let fp = |t: f64| f(t).abs().powf(p);
    let lhs = integrate(fp, c, b, LEMMA44_TOL)?;
    let near = integrate(fp, a, c, LEMMA44_TOL)?;
    let deriv = integrate(|t| ((b - t) * df(t).abs()).powf(p), a, b, LEMMA44_TOL)?;
    let rhs = (2.0 + lambda) / lambda * near + 2f64.powf(p) * (p - 1.0).powf(p - 1.0) * deriv;
    Ok((lhs, rhs))
}
