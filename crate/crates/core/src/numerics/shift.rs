//! Best constant approximation in weighted `L^p`.

use crate::error::{check_exponent, Result};
use crate::numerics::pairwise_sum;

/// Minimizer `a` of `Σ wᵢ |fᵢ − a|^p` and the residual `(Σ wᵢ |fᵢ − a|^p)^{1/p}`.
///
/// For `p = 2` this is the weighted mean. Otherwise the objective is strictly
/// convex with a monotone derivative, and the minimizer is bracketed by the
/// data range and found by bisection to `1e-10·range` (at most 60 steps).
pub fn optimal_shift(values: &[f64], weights: &[f64], p: f64) -> Result<(f64, f64)> {
    check_exponent(p)?;
    assert_eq!(values.len(), weights.len());
    if values.is_empty() {
        return Ok((0.0, 0.0));
    }
    let (lo, hi) = values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let range = hi - lo;
    let a = if range == 0.0 {
        lo
    } else if p == 2.0 {
        let wsum = pairwise_sum(weights);
        let m: Vec<f64> = values.iter().zip(weights).map(|(v, w)| v * w).collect();
        pairwise_sum(&m) / wsum
    } else {
        // d/da Σ w |f − a|^p ∝ Σ w |a − f|^{p−1} sign(a − f), increasing in a
        let slope = |a: f64| {
            let terms: Vec<f64> = values
                .iter()
                .zip(weights)
                .map(|(&f, &w)| {
                    let d = a - f;
                    w * d.abs().powf(p - 1.0) * d.signum()
                })
                .collect();
            pairwise_sum(&terms)
        };
        let (mut a0, mut a1) = (lo, hi);
        for _ in 0..60 {
            if a1 - a0 <= 1e-10 * range {
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
    };
    Ok((a, lp_residual(values, weights, a, p)))
}

pub(crate) fn lp_residual(values: &[f64], weights: &[f64], a: f64, p: f64) -> f64 {
    let terms: Vec<f64> = values.iter().zip(weights).map(|(&f, &w)| w * (f - a).abs().powf(p)).collect();
    pairwise_sum(&terms).powf(1.0 / p)
}
