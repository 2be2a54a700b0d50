//! The extension estimate `‖∇U‖_{D₂} ≤ C(‖∇U‖_{D₁} + ‖e(U)‖_{D₂})` on
//! nested boxes in ℝ³.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{check_exponent, Error, Result};
use crate::geometry::Vec3;
use crate::numerics::pairwise_sum;

/// A vector field on ℝ³ with its Jacobian `J[i][j] = ∂Uᵢ/∂xⱼ`.
pub trait CartesianField: Send + Sync {
    fn value(&self, x: Vec3) -> Vec3;
    fn jacobian(&self, x: Vec3) -> [[f64; 3]; 3];
}

/// Axis-aligned box `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Box3 {
    pub lo: Vec3,
    pub hi: Vec3,
}

impl Box3 {
    pub fn new(lo: Vec3, hi: Vec3) -> Result<Self> {
        if (0..3).any(|i| !(hi[i] > lo[i]) || !lo[i].is_finite() || !hi[i].is_finite()) {
            return Err(Error::InvalidArgument(format!("degenerate box {lo:?}–{hi:?}")));
        }
        Ok(Self { lo, hi })
    }

    pub fn volume(&self) -> f64 {
        (0..3).map(|i| self.hi[i] - self.lo[i]).product()
    }

    pub fn contains_box(&self, o: &Box3) -> bool {
        (0..3).all(|i| o.lo[i] >= self.lo[i] && o.hi[i] <= self.hi[i])
    }

    fn scaled(&self, l: f64) -> Box3 {
        Box3 { lo: self.lo.map(|v| l * v), hi: self.hi.map(|v| l * v) }
    }
}

/// `D₁ ⊂ D₂`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NestedBoxPair {
    pub inner: Box3,
    pub outer: Box3,
}

impl NestedBoxPair {
    pub fn new(inner: Box3, outer: Box3) -> Result<Self> {
        if !outer.contains_box(&inner) {
            return Err(Error::InvalidArgument("inner box is not contained in the outer box".into()));
        }
        Ok(Self { inner, outer })
    }

    /// `|D₂| / |D₁|`
    pub fn volume_ratio(&self) -> f64 {
        self.outer.volume() / self.inner.volume()
    }

    /// The pair under `x → λx`.
    pub fn scaled(&self, l: f64) -> Result<Self> {
        if !(l > 0.0 && l.is_finite()) {
            return Err(Error::InvalidArgument(format!("scale factor {l} must be positive")));
        }
        Ok(Self { inner: self.inner.scaled(l), outer: self.outer.scaled(l) })
    }
}

/// Both sides of the extension estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExtensionReport {
    /// `‖∇U‖_{L^p(D₂)}`
    pub lhs: f64,
    /// `‖∇U‖_{L^p(D₁)} + ‖e(U)‖_{L^p(D₂)}`
    pub rhs: f64,
    pub grad_inner: f64,
    pub strain_outer: f64,
}

impl ExtensionReport {
    /// `lhs / rhs`, or `None` when both vanish.
    pub fn ratio(&self) -> Option<f64> {
        (self.rhs > 0.0).then(|| self.lhs / self.rhs).or((self.lhs > 0.0).then_some(f64::INFINITY))
    }
}

/// Cells per axis used by [`extension_check`].
pub const EXTENSION_CELLS: usize = 32;

pub fn extension_check(pair: &NestedBoxPair, field: &dyn CartesianField, p: f64) -> Result<ExtensionReport> {
    extension_check_with(pair, field, p, EXTENSION_CELLS)
}

/// As [`extension_check`] with `n` midpoint cells per axis on each box.
pub fn extension_check_with(
    pair: &NestedBoxPair,
    field: &dyn CartesianField,
    p: f64,
    n: usize,
) -> Result<ExtensionReport> {
    check_exponent(p)?;
    if n == 0 {
        return Err(Error::Resolution("extension grid needs at least one cell".into()));
    }
    let [g2, e2] = box_integrals(&pair.outer, field, p, n)?;
    let [g1, _] = box_integrals(&pair.inner, field, p, n)?;
    let r = |s: f64| s.powf(1.0 / p);
    Ok(ExtensionReport { lhs: r(g2), rhs: r(g1) + r(e2), grad_inner: r(g1), strain_outer: r(e2) })
}

/// `∫|∇U|^p` and `∫|e(U)|^p` (Frobenius norms) by the midpoint rule.
fn box_integrals(b: &Box3, field: &dyn CartesianField, p: f64, n: usize) -> Result<[f64; 2]> {
    let step: Vec3 = std::array::from_fn(|i| (b.hi[i] - b.lo[i]) / n as f64);
    let w = step.iter().product::<f64>();
    let vals: Vec<[f64; 2]> = (0..n * n * n)
        .into_par_iter()
        .map(|c| {
            let idx = [c / (n * n), (c / n) % n, c % n];
            let x: Vec3 = std::array::from_fn(|i| b.lo[i] + (idx[i] as f64 + 0.5) * step[i]);
            let j = field.jacobian(x);
            let (mut g, mut e) = (0.0, 0.0);
            for a in 0..3 {
                for k in 0..3 {
                    g += j[a][k] * j[a][k];
                    let s = 0.5 * (j[a][k] + j[k][a]);
                    e += s * s;
                }
            }
            if !(g.is_finite() && e.is_finite()) {
                return Err(Error::Domain(format!("field undefined at {x:?}")));
            }
            Ok([w * g.sqrt().powf(p), w * e.sqrt().powf(p)])
        })
        .collect::<Result<_>>()?;
    let col = |k: usize| pairwise_sum(&vals.iter().map(|v| v[k]).collect::<Vec<_>>());
    Ok([col(0), col(1)])
}

/// `U(x) = ω × (x − x₀) + b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RigidMotion {
    pub axis: Vec3,
    pub center: Vec3,
    pub shift: Vec3,
}

impl CartesianField for RigidMotion {
    fn value(&self, x: Vec3) -> Vec3 {
        let r: Vec3 = std::array::from_fn(|i| x[i] - self.center[i]);
        let a = self.axis;
        [
            a[1] * r[2] - a[2] * r[1] + self.shift[0],
            a[2] * r[0] - a[0] * r[2] + self.shift[1],
            a[0] * r[1] - a[1] * r[0] + self.shift[2],
        ]
    }

    fn jacobian(&self, _: Vec3) -> [[f64; 3]; 3] {
        let a = self.axis;
        [[0.0, -a[2], a[1]], [a[2], 0.0, -a[0]], [-a[1], a[0], 0.0]]
    }
}

/// `U = ∇(1/|x − x₀|)`, harmonic away from the pole `x₀`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HarmonicGradient {
    pub pole: Vec3,
}

impl CartesianField for HarmonicGradient {
    fn value(&self, x: Vec3) -> Vec3 {
        let r: Vec3 = std::array::from_fn(|i| x[i] - self.pole[i]);
        let d2 = r.iter().map(|v| v * v).sum::<f64>();
        r.map(|v| -v / (d2 * d2.sqrt()))
    }

    fn jacobian(&self, x: Vec3) -> [[f64; 3]; 3] {
        let r: Vec3 = std::array::from_fn(|i| x[i] - self.pole[i]);
        let d2 = r.iter().map(|v| v * v).sum::<f64>();
        let d3 = d2 * d2.sqrt();
        let d5 = d3 * d2;
        std::array::from_fn(|i| std::array::from_fn(|j| 3.0 * r[i] * r[j] / d5 - if i == j { 1.0 / d3 } else { 0.0 }))
    }
}

/// Rotational field plus a non-rigid shear, `U = (−x₂, x₁, 0) + ε(x₂², 0, x₁x₃)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShearedRotation {
    pub eps: f64,
}

impl CartesianField for ShearedRotation {
    fn value(&self, x: Vec3) -> Vec3 {
        [-x[1] + self.eps * x[1] * x[1], x[0], self.eps * x[0] * x[2]]
    }

    fn jacobian(&self, x: Vec3) -> [[f64; 3]; 3] {
        let e = self.eps;
        [[0.0, -1.0 + 2.0 * e * x[1], 0.0], [1.0, 0.0, 0.0], [e * x[2], 0.0, e * x[0]]]
    }
}

/// `U_λ(x) = λ U(x/λ)`, the field carried along by `x → λx`; its Jacobian
/// at `λx` equals that of `U` at `x`.
pub struct Rescaled<F> {
    pub lambda: f64,
    pub inner: F,
}

impl<F: CartesianField> CartesianField for Rescaled<F> {
    fn value(&self, x: Vec3) -> Vec3 {
        self.inner.value(x.map(|v| v / self.lambda)).map(|v| v * self.lambda)
    }

    fn jacobian(&self, x: Vec3) -> [[f64; 3]; 3] {
        self.inner.jacobian(x.map(|v| v / self.lambda))
    }
}
