//! Log-log regression of constants against the thickness scale.

use serde::Serialize;

use crate::error::{Error, Result};

/// `C ≈ c·h^{−α}` fitted by least squares in `(ln h, ln C)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingFit {
    pub samples: Vec<(f64, f64)>,
    pub c: f64,
    pub alpha: f64,
    /// RMS of the log misfit.
    pub residual: f64,
}

impl ScalingFit {
    pub fn predict(&self, h: f64) -> f64 {
        self.c * h.powf(-self.alpha)
    }
}

pub fn fit_scaling(samples: &[(f64, f64)]) -> Result<ScalingFit> {
    if samples.len() < 3 {
        return Err(Error::InvalidArgument(format!("need at least 3 samples, got {}", samples.len())));
    }
    for (i, &(h, c)) in samples.iter().enumerate() {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidArgument(format!("sample {i}: h = {h} must be positive")));
        }
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidArgument(format!("sample {i} (h = {h}): C = {c} must be positive")));
        }
    }
    for (i, a) in samples.iter().enumerate() {
        if samples[..i].iter().any(|b| b.0 == a.0) {
            return Err(Error::InvalidArgument(format!("sample {i}: h = {} repeated", a.0)));
        }
    }
    let n = samples.len() as f64;
    let xs: Vec<f64> = samples.iter().map(|s| s.0.ln()).collect();
    let ys: Vec<f64> = samples.iter().map(|s| s.1.ln()).collect();
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum::<f64>() / n).sqrt();
    Ok(ScalingFit { samples: samples.to_vec(), c: intercept.exp(), alpha: -slope, residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;

    #[test]
    fn exact_inverse_law() {
        let f = fit_scaling(&[(0.1, 50.0), (0.01, 500.0), (0.001, 5000.0)]).unwrap();
        assert!((f.c - 5.0).abs() < 1e-10 && (f.alpha - 1.0).abs() < 1e-12 && f.residual <= 1e-12);
    }

    #[test]
    fn constant_law() {
        let f = fit_scaling(&[(0.1, 3.0), (0.05, 3.0), (0.02, 3.0)]).unwrap();
        assert!(f.alpha.abs() < 1e-12 && (f.c - 3.0).abs() < 1e-12);
    }

    #[test]
    fn noisy_law() {
        let mut rng = crate::testing::rng(1);
        let s: Vec<(f64, f64)> = [0.1, 0.05, 0.025, 0.0125, 0.00625]
            .iter()
            .map(|&h| (h, 5.0 / h * (1.0 + 0.05 * rng.random_range(-1.0..1.0))))
            .collect();
        let f = fit_scaling(&s).unwrap();
        assert!((0.9..=1.1).contains(&f.alpha));
    }

    #[test]
    fn rejects_bad_samples() {
        match fit_scaling(&[(0.1, 1.0), (0.05, -2.0), (0.02, 3.0)]) {
            Err(Error::InvalidArgument(m)) => assert!(m.contains("sample 1")),
            other => panic!("{other:?}"),
        }
        assert!(fit_scaling(&[(0.1, 1.0), (0.05, 2.0)]).is_err());
        assert!(fit_scaling(&[(0.1, 1.0), (0.1, 2.0), (0.02, 3.0)]).is_err());
    }

    proptest! {
        #[test]
        fn exact_on_power_laws(c in 0.01f64..100.0, alpha in -2.0f64..3.0, h0 in 0.01f64..0.5) {
            let s: Vec<(f64, f64)> = (0..4).map(|i| { let h = h0 / 2f64.powi(i); (h, c * h.powf(-alpha)) }).collect();
            let f = fit_scaling(&s).unwrap();
            prop_assert!(f.residual <= 1e-12);
            prop_assert!((f.alpha - alpha).abs() <= 1e-10);
            prop_assert!((f.c - c).abs() <= 1e-9 * c);
        }
    }
}
