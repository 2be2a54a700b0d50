use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Lateral boundary profile `φ(y)`, expressed in units of `h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Profile1D {
    /// `φ = h`
    Constant,
    /// `φ = h(1 + rise·y/b)`
    Tilted { rise: f64 },
    /// `φ = h(1 + amp(1 − cos(2πky/b))/2)`
    Wavy { amp: f64, k: f64 },
}

impl Profile1D {
    /// `(φ, φ', φ'')` at `y`.
    pub fn eval(&self, y: f64, h: f64, b: f64) -> (f64, f64, f64) {
        match *self {
            Profile1D::Constant => (h, 0.0, 0.0),
            Profile1D::Tilted { rise } => (h * (1.0 + rise * y / b), h * rise / b, 0.0),
            Profile1D::Wavy { amp, k } => {
                let w = 2.0 * std::f64::consts::PI * k / b;
                let (s, c) = (w * y).sin_cos();
                (h * (1.0 + 0.5 * amp * (1.0 - c)), 0.5 * h * amp * w * s, 0.5 * h * amp * w * w * c)
            }
        }
    }
}

/// `D = {(x, y) : 0 < y < b, −φ₁(y) < x < φ₂(y)}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThinDomain2D {
    pub b: f64,
    pub h: f64,
    pub phi1: Profile1D,
    pub phi2: Profile1D,
    pub c1: f64,
    pub c2: f64,
}

impl ThinDomain2D {
    /// Validates `h < b/8`, `h ≤ φᵢ ≤ C₁h` and `|φᵢ'| ≤ C₂h` on 1025 samples.
    pub fn new(b: f64, h: f64, phi1: Profile1D, phi2: Profile1D, c1: f64, c2: f64) -> Result<Self> {
        if !(b > 0.0 && b.is_finite()) {
            return Err(Error::InvalidParameter { name: "b".into(), reason: format!("must be positive, got {b}") });
        }
        if !(h > 0.0 && h < b / 8.0) {
            return Err(Error::InvalidParameter {
                name: "h".into(),
                reason: format!("need 0 < h < b/8, got h = {h}, b = {b}"),
            });
        }
        let d = Self { b, h, phi1, phi2, c1, c2 };
        let mut bad = Vec::new();
        for (name, prof) in [("phi1", phi1), ("phi2", phi2)] {
            let (mut lo, mut hi, mut slope) = (f64::INFINITY, 0.0f64, 0.0f64);
            for i in 0..=1024 {
                let (p, dp, _) = prof.eval(b * i as f64 / 1024.0, h, b);
                lo = lo.min(p);
                hi = hi.max(p);
                slope = slope.max(dp.abs());
            }
            let tol = 1e-12;
            if lo < h * (1.0 - tol) {
                bad.push(format!("{name}: min {lo:.6e} < h"));
            }
            if hi > c1 * h * (1.0 + tol) {
                bad.push(format!("{name}: max {hi:.6e} > C1·h = {:.6e}", c1 * h));
            }
            if slope > c2 * h * (1.0 + tol) {
                bad.push(format!("{name}: max |φ'| = {slope:.6e} > C2·h = {:.6e}", c2 * h));
            }
        }
        if bad.is_empty() {
            Ok(d)
        } else {
            Err(Error::Validation(bad))
        }
    }

    /// Same shape at a different `h`.
    pub fn with_h(&self, h: f64) -> Result<Self> {
        Self::new(self.b, h, self.phi1, self.phi2, self.c1, self.c2)
    }

    pub fn phi1(&self, y: f64) -> (f64, f64, f64) {
        self.phi1.eval(y, self.h, self.b)
    }

    pub fn phi2(&self, y: f64) -> (f64, f64, f64) {
        self.phi2.eval(y, self.h, self.b)
    }

    /// `x` of the boundary-fitted coordinate `(s, y)`.
    pub fn x_at(&self, s: f64, y: f64) -> f64 {
        let (p1, p2) = (self.phi1(y).0, self.phi2(y).0);
        -p1 + s * (p1 + p2)
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        (0.0..=self.b).contains(&y) && x >= -self.phi1(y).0 && x <= self.phi2(y).0
    }

    /// Euclidean distance from an interior point to `∂D`: the two horizontal
    /// segments exactly, the lateral curves by Newton projection.
    pub fn boundary_distance(&self, x: f64, y: f64) -> f64 {
        let seg = |yy: f64| {
            let (a, bnd) = (-self.phi1(yy).0, self.phi2(yy).0);
            let dx = if x < a {
                a - x
            } else if x > bnd {
                x - bnd
            } else {
                0.0
            };
            (dx * dx + (y - yy).powi(2)).sqrt()
        };
        let bottom = seg(0.0);
        let top = seg(self.b);
        // curve points (c(η), η) with c = −φ₁ or φ₂
        let lateral = |sign: f64, prof: Profile1D| {
            let c = |eta: f64| {
                let (p, dp, ddp) = prof.eval(eta, self.h, self.b);
                (sign * p, sign * dp, sign * ddp)
            };
            let mut eta = y;
            for _ in 0..50 {
                let (cv, c1, c2) = c(eta);
                let g = (cv - x) * c1 + (eta - y);
                let dg = c1 * c1 + (cv - x) * c2 + 1.0;
                let step = g / dg;
                eta = (eta - step).clamp(0.0, self.b);
                if step.abs() <= 1e-14 * self.b {
                    break;
                }
            }
            let (cv, _, _) = c(eta);
            ((cv - x).powi(2) + (eta - y).powi(2)).sqrt()
        };
        bottom.min(top).min(lateral(-1.0, self.phi1)).min(lateral(1.0, self.phi2))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profiles_and_derivatives() {
        for p in [Profile1D::Constant, Profile1D::Tilted { rise: 0.5 }, Profile1D::Wavy { amp: 0.5, k: 1.5 }] {
            let e = 1e-6;
            for y in [0.1, 0.4, 0.77] {
                let (_, d1, d2) = p.eval(y, 0.01, 1.0);
                let fd1 = (p.eval(y + e, 0.01, 1.0).0 - p.eval(y - e, 0.01, 1.0).0) / (2.0 * e);
                let fd2 = (p.eval(y + e, 0.01, 1.0).1 - p.eval(y - e, 0.01, 1.0).1) / (2.0 * e);
                assert!((d1 - fd1).abs() < 1e-9 && (d2 - fd2).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn validation() {
        assert!(ThinDomain2D::new(1.0, 0.2, Profile1D::Constant, Profile1D::Constant, 2.0, 2.0).is_err());
        assert!(ThinDomain2D::new(1.0, 0.01, Profile1D::Tilted { rise: 1.5 }, Profile1D::Constant, 2.0, 2.0).is_err());
        assert!(
            ThinDomain2D::new(1.0, 0.01, Profile1D::Wavy { amp: 1.0, k: 1.0 }, Profile1D::Constant, 2.0, 2.0).is_err()
        );
        assert!(ThinDomain2D::new(
            1.0,
            0.01,
            Profile1D::Tilted { rise: 0.5 },
            Profile1D::Wavy { amp: 0.5, k: 1.0 },
            2.0,
            2.0
        )
        .is_ok());
    }

    #[test]
    fn distance_on_rectangle() {
        let d = ThinDomain2D::new(1.0, 0.01, Profile1D::Constant, Profile1D::Constant, 2.0, 2.0).unwrap();
        assert!((d.boundary_distance(0.0, 0.5) - 0.01).abs() < 1e-15);
        assert!((d.boundary_distance(0.004, 0.002) - 0.002).abs() < 1e-15);
        assert!((d.boundary_distance(-0.007, 0.5) - 0.003).abs() < 1e-15);
    }

    #[test]
    fn distance_to_tilted_side() {
        let d = ThinDomain2D::new(1.0, 0.1, Profile1D::Constant, Profile1D::Tilted { rise: 1.0 }, 2.0, 2.0).unwrap();
        // right side is the line x = 0.1 + 0.1 y
        let (x, y) = (0.1, 0.5);
        let exact = (0.1 + 0.1 * y - x) / (1.0f64 + 0.01).sqrt();
        assert!((d.boundary_distance(x, y) - exact).abs() < 1e-12);
    }
}
