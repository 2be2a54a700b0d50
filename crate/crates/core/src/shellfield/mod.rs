//! Displacement fields in the local frame `(n, e_θ, e_z)` of a thin domain,
//! their exact and simplified gradients, and `L^p` norms.

mod fields;
mod quadrature;

use std::ops::{Add, Mul, Sub};

use crate::error::{Error, Result};
use crate::geometry::{SurfacePoint, ThinDomain};

pub use fields::{rigid_field, rigid_field_at, AnalyticField, BumpField, SampledField, ZeroField};
pub use quadrature::{lp_norm, QuadPoint, QuadratureGrid, Region, Resolution};

/// Values and first partials of a field at one point.
///
/// `grad[i][j] = ∂uᵢ/∂qⱼ` with components `(u_t, u_θ, u_z)` and coordinates
/// `q = (t, θ, z)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Jet {
    pub value: [f64; 3],
    pub grad: [[f64; 3]; 3],
}

impl Jet {
    pub fn scaled(&self, c: f64) -> Jet {
        Jet { value: self.value.map(|v| c * v), grad: self.grad.map(|row| row.map(|v| c * v)) }
    }
}

/// A displacement `u = (u_t, u_θ, u_z)` with derivative access.
pub trait ShellField: Send + Sync {
    fn jet(&self, t: f64, theta: f64, z: f64) -> Jet;

    fn value(&self, t: f64, theta: f64, z: f64) -> [f64; 3] {
        self.jet(t, theta, z).value
    }
}

impl<F: ShellField + ?Sized> ShellField for &F {
    fn jet(&self, t: f64, theta: f64, z: f64) -> Jet {
        (**self).jet(t, theta, z)
    }
}

impl<F: ShellField + ?Sized> ShellField for Box<F> {
    fn jet(&self, t: f64, theta: f64, z: f64) -> Jet {
        (**self).jet(t, theta, z)
    }
}

impl<F: ShellField + ?Sized> ShellField for std::sync::Arc<F> {
    fn jet(&self, t: f64, theta: f64, z: f64) -> Jet {
        (**self).jet(t, theta, z)
    }
}

/// A field multiplied by a constant.
pub struct Scaled<F>(pub f64, pub F);

impl<F: ShellField> ShellField for Scaled<F> {
    fn jet(&self, t: f64, theta: f64, z: f64) -> Jet {
        self.1.jet(t, theta, z).scaled(self.0)
    }
}

/// 3×3 matrix in the ordered basis `(n, e_θ, e_z)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FrameMatrix(pub [[f64; 3]; 3]);

impl FrameMatrix {
    pub const ZERO: FrameMatrix = FrameMatrix([[0.0; 3]; 3]);

    pub fn transpose(&self) -> FrameMatrix {
        FrameMatrix(std::array::from_fn(|i| std::array::from_fn(|j| self.0[j][i])))
    }

    /// `(M + Mᵀ)/2`
    pub fn symmetrize(&self) -> FrameMatrix {
        FrameMatrix(std::array::from_fn(|i| std::array::from_fn(|j| 0.5 * (self.0[i][j] + self.0[j][i]))))
    }

    pub fn frobenius(&self) -> f64 {
        self.0.iter().flatten().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

impl Add for FrameMatrix {
    type Output = FrameMatrix;
    fn add(self, o: FrameMatrix) -> FrameMatrix {
        FrameMatrix(std::array::from_fn(|i| std::array::from_fn(|j| self.0[i][j] + o.0[i][j])))
    }
}

impl Sub for FrameMatrix {
    type Output = FrameMatrix;
    fn sub(self, o: FrameMatrix) -> FrameMatrix {
        FrameMatrix(std::array::from_fn(|i| std::array::from_fn(|j| self.0[i][j] - o.0[i][j])))
    }
}

impl Mul<FrameMatrix> for f64 {
    type Output = FrameMatrix;
    fn mul(self, m: FrameMatrix) -> FrameMatrix {
        FrameMatrix(m.0.map(|row| row.map(|v| self * v)))
    }
}

/// Symmetric part `e = (M + Mᵀ)/2`.
pub fn strain(m: &FrameMatrix) -> FrameMatrix {
    m.symmetrize()
}

/// The two `1 + tκ` factors, with the singularity check shared by both
/// gradient variants.
pub(crate) fn stretch_factors(sp: &SurfacePoint, t: f64, theta: f64, z: f64) -> Result<(f64, f64)> {
    let ft = 1.0 + t * sp.kappa_theta;
    let fz = 1.0 + t * sp.kappa_z;
    let factor = ft.min(fz);
    if !(factor >= 0.5) {
        return Err(Error::Singular { factor, t, theta, z });
    }
    Ok((ft, fz))
}

/// The frame gradient of a field from its jet.
///
/// With `(ft, fz) = (1 + tκ_θ, 1 + tκ_z)` this is the exact gradient; with
/// `(1, 1)` it is the simplified (mid-surface) gradient `F`. Linear in the jet.
pub fn gradient_from_jet(jet: &Jet, sp: &SurfacePoint, ft: f64, fz: f64) -> FrameMatrix {
    let [ut, uth, uz] = jet.value;
    let g = &jet.grad;
    let (at, az) = (sp.a_theta, sp.a_z);
    let at_z = sp.d_a_theta[1];
    let az_t = sp.d_a_z[0];
    let (kt, kz) = (sp.kappa_theta, sp.kappa_z);
    let ata_z = at * az;
    FrameMatrix([
        [g[0][0], (g[0][1] - at * kt * uth) / (at * ft), (g[0][2] - az * kz * uz) / (az * fz)],
        [
            g[1][0],
            (az * g[1][1] + ata_z * kt * ut + at_z * uz) / (ata_z * ft),
            (at * g[1][2] - az_t * uz) / (ata_z * fz),
        ],
        [
            g[2][0],
            (az * g[2][1] - at_z * uth) / (ata_z * ft),
            (at * g[2][2] + ata_z * kz * ut + az_t * uth) / (ata_z * fz),
        ],
    ])
}

/// Exact gradient `∇u` in the local orthonormal basis.
pub fn eval_gradient(f: &dyn ShellField, d: &ThinDomain, point: (f64, f64, f64)) -> Result<FrameMatrix> {
    let (t, theta, z) = point;
    let sp = d.surface().point(theta, z);
    let (ft, fz) = stretch_factors(&sp, t, theta, z)?;
    Ok(gradient_from_jet(&f.jet(t, theta, z), &sp, ft, fz))
}

/// Simplified gradient `F`: the exact gradient without the `1 + tκ`
/// denominators.
pub fn eval_simplified_gradient(f: &dyn ShellField, d: &ThinDomain, point: (f64, f64, f64)) -> Result<FrameMatrix> {
    let (t, theta, z) = point;
    let sp = d.surface().point(theta, z);
    stretch_factors(&sp, t, theta, z)?;
    Ok(gradient_from_jet(&f.jet(t, theta, z), &sp, 1.0, 1.0))
}

/// `L^p` norms of the quantities entering the thin-domain inequalities.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct FieldNorms {
    pub u: f64,
    pub u_t: f64,
    pub grad: f64,
    pub strain: f64,
    /// `‖F‖`
    pub simplified: f64,
    /// `‖F − ∇u‖`
    pub simplified_defect: f64,
}

/// All [`FieldNorms`] in one pass over `grid`.
pub fn field_norms(f: &dyn ShellField, d: &ThinDomain, grid: &QuadratureGrid, p: f64) -> Result<FieldNorms> {
    crate::error::check_exponent(p)?;
    let sums = grid.integrate_many::<6>(|q| {
        let sp = d.surface().point(q.theta, q.z);
        let (ft, fz) = stretch_factors(&sp, q.t, q.theta, q.z)?;
        let jet = f.jet(q.t, q.theta, q.z);
        let g = gradient_from_jet(&jet, &sp, ft, fz);
        let fs = gradient_from_jet(&jet, &sp, 1.0, 1.0);
        let u = jet.value.iter().map(|v| v * v).sum::<f64>().sqrt();
        let vals =
            [u, jet.value[0].abs(), g.frobenius(), g.symmetrize().frobenius(), fs.frobenius(), (fs - g).frobenius()];
        Ok(vals.map(|v| v.powf(p)))
    })?;
    let r = sums.map(|s| s.powf(1.0 / p));
    Ok(FieldNorms { u: r[0], u_t: r[1], grad: r[2], strain: r[3], simplified: r[4], simplified_defect: r[5] })
}

/// Writes `t, theta, z` and the nine gradient entries (row-major) per
/// quadrature point as CSV.
pub fn dump_gradient_csv(
    f: &dyn ShellField,
    d: &ThinDomain,
    grid: &QuadratureGrid,
    out: &mut impl std::io::Write,
) -> std::io::Result<()> {
    writeln!(out, "t,theta,z,g11,g12,g13,g21,g22,g23,g31,g32,g33")?;
    for q in grid.points() {
        let m = eval_gradient(f, d, (q.t, q.theta, q.z)).map_err(std::io::Error::other)?;
        let mut row = vec![q.t, q.theta, q.z];
        row.extend(m.0.iter().flatten());
        let cells: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
        writeln!(out, "{}", cells.join(","))?;
    }
    Ok(())
}
