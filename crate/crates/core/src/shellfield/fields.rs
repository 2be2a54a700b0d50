//! Built-in field types.

use rand::Rng;

use super::{Jet, Resolution, ShellField};
use crate::geometry::{MidSurface, ThinDomain, Vec3};

/// A field given by a closure returning its jet.
pub struct AnalyticField<F> {
    f: F,
}

impl<F: Fn(f64, f64, f64) -> Jet + Send + Sync> AnalyticField<F> {
    pub fn new(f: F) -> Self {
        Self { f }
    }
}

impl<F: Fn(f64, f64, f64) -> Jet + Send + Sync> ShellField for AnalyticField<F> {
    fn jet(&self, t: f64, theta: f64, z: f64) -> Jet {
        (self.f)(t, theta, z)
    }
}

pub struct ZeroField;

impl ShellField for ZeroField {
    fn jet(&self, _: f64, _: f64, _: f64) -> Jet {
        Jet::default()
    }
}

/// A field known through point values only; partials are fourth-order
/// centered differences reaching half a cell of the given grid, so at
/// quadrature nodes the stencil stays within the cell. Near the boundary of
/// the domain the stencil switches to one-sided second-order differences.
pub struct SampledField<F> {
    values: F,
    domain: ThinDomain,
    res: Resolution,
}

impl<F: Fn(f64, f64, f64) -> [f64; 3] + Send + Sync> SampledField<F> {
    pub fn new(values: F, domain: &ThinDomain, res: Resolution) -> Self {
        Self { values, domain: domain.clone(), res }
    }

    fn steps(&self, theta: f64, z: f64) -> [f64; 3] {
        let s = self.domain.surface();
        let (z0, z1) = s.z_range(theta);
        let (g1, g2) = self.domain.thickness(theta, z);
        [
            0.5 * (g1 + g2) / self.res.n_t as f64,
            0.5 * s.omega() / self.res.n_theta as f64,
            0.5 * (z1 - z0) / self.res.n_z as f64,
        ]
    }

    fn inside(&self, q: [f64; 3]) -> bool {
        let (t, th, z) = (q[0], q[1], q[2]);
        let s = self.domain.surface();
        let tol = 1e-12;
        let (z0, z1) = s.z_range(th);
        let (g1, g2) = self.domain.thickness(th.clamp(0.0, s.omega()), z);
        th >= -tol && th <= s.omega() + tol && z >= z0 - tol && z <= z1 + tol && t >= -g1 - tol && t <= g2 + tol
    }
}

impl<F: Fn(f64, f64, f64) -> [f64; 3] + Send + Sync> ShellField for SampledField<F> {
    fn jet(&self, t: f64, theta: f64, z: f64) -> Jet {
        let at = |q: [f64; 3]| (self.values)(q[0], q[1], q[2]);
        let q0 = [t, theta, z];
        let value = at(q0);
        let steps = self.steps(theta, z);
        let mut grad = [[0.0; 3]; 3];
        for (j, &dq) in steps.iter().enumerate() {
            let shift = |k: f64| {
                let mut q = q0;
                q[j] += k * dq;
                q
            };
            let (qp, qm) = (shift(1.0), shift(-1.0));
            let d: [f64; 3] = if self.inside(qp) && self.inside(qm) {
                let (a, b) = (at(qp), at(qm));
                let (ah, bh) = (at(shift(0.5)), at(shift(-0.5)));
                std::array::from_fn(|i| (8.0 * (ah[i] - bh[i]) - (a[i] - b[i])) / (6.0 * dq))
            } else {
                // one-sided, second order, pointing into the domain
                let sgn = if self.inside(qp) { 1.0 } else { -1.0 };
                let (f1, f2) = (at(shift(sgn)), at(shift(2.0 * sgn)));
                std::array::from_fn(|i| sgn * (-3.0 * value[i] + 4.0 * f1[i] - f2[i]) / (2.0 * dq))
            };
            for i in 0..3 {
                grad[i][j] = d[i];
            }
        }
        Jet { value, grad }
    }
}

/// Infinitesimal rigid motion `u(x) = axis × (x − center)` expressed in the
/// local frame, sampled at the default resolution.
pub fn rigid_field(
    axis: Vec3,
    center: Vec3,
    d: &ThinDomain,
) -> SampledField<impl Fn(f64, f64, f64) -> [f64; 3] + Send + Sync> {
    rigid_field_at(axis, center, d, Resolution::default())
}

/// [`rigid_field`] with an explicit sampling grid.
pub fn rigid_field_at(
    axis: Vec3,
    center: Vec3,
    d: &ThinDomain,
    res: Resolution,
) -> SampledField<impl Fn(f64, f64, f64) -> [f64; 3] + Send + Sync> {
    let surface = d.surface().clone();
    let values = move |t: f64, theta: f64, z: f64| {
        let p = surface.point(theta, z);
        let x: Vec3 = std::array::from_fn(|i| p.position[i] + t * p.normal[i] - center[i]);
        let u = cross(axis, x);
        [dot(u, p.normal), dot(u, p.e_theta), dot(u, p.e_z)]
    };
    SampledField::new(values, d, res)
}

fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[derive(Debug, Clone, PartialEq)]
struct Bump {
    theta: f64,
    z: f64,
    inv_width2: f64,
    coeff: [f64; 3],
    slope: [f64; 3],
}

/// Sum of Gaussian bumps in `(θ, z)`, each component affine in `t`:
/// `uᵢ = Σₖ (cᵢₖ + t dᵢₖ) exp(−|(θ, z) − pₖ|²/σₖ²)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BumpField {
    bumps: Vec<Bump>,
}

impl BumpField {
    /// `n` bumps centered in the middle 60% of the patch, widths a fifth of
    /// the smaller patch extent, coefficients uniform in `[−1, 1]`.
    pub fn random(rng: &mut impl Rng, s: &MidSurface, n: usize) -> Self {
        let omega = s.omega();
        let (th_c, _) = s.center();
        let (z0, z1) = s.z_range(th_c);
        let width = 0.2 * omega.min(z1 - z0);
        let bumps = (0..n)
            .map(|_| {
                let theta = omega * rng.random_range(0.2..0.8);
                let (a, b) = s.z_range(theta);
                Bump {
                    theta,
                    z: a + (b - a) * rng.random_range(0.2..0.8),
                    inv_width2: 1.0 / (width * width * rng.random_range(0.7..1.3)),
                    coeff: std::array::from_fn(|_| rng.random_range(-1.0..1.0)),
                    slope: std::array::from_fn(|_| rng.random_range(-1.0..1.0)),
                }
            })
            .collect();
        Self { bumps }
    }
}

impl ShellField for BumpField {
    fn jet(&self, t: f64, theta: f64, z: f64) -> Jet {
        let mut jet = Jet::default();
        for b in &self.bumps {
            let (dth, dz) = (theta - b.theta, z - b.z);
            let e = (-(dth * dth + dz * dz) * b.inv_width2).exp();
            let (e_th, e_z) = (-2.0 * dth * b.inv_width2 * e, -2.0 * dz * b.inv_width2 * e);
            for i in 0..3 {
                let amp = b.coeff[i] + t * b.slope[i];
                jet.value[i] += amp * e;
                jet.grad[i][0] += b.slope[i] * e;
                jet.grad[i][1] += amp * e_th;
                jet.grad[i][2] += amp * e_z;
            }
        }
        jet
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{default_surface, make_thin_domain, ProfileKind, SurfaceKind};
    use crate::testing::{fd_jet, rng};

    #[test]
    fn bump_partials_match_finite_differences() {
        for kind in SurfaceKind::ALL {
            let s = default_surface(kind);
            let f = BumpField::random(&mut rng(17), &s, 4);
            let (th, z) = s.center();
            let exact = f.jet(0.01, th + 0.03, z - 0.02);
            let fd = fd_jet(&f, (0.01, th + 0.03, z - 0.02), 1e-4);
            for i in 0..3 {
                for j in 0..3 {
                    let scale = 1.0 + exact.grad[i][j].abs();
                    assert!((exact.grad[i][j] - fd.grad[i][j]).abs() <= 1e-5 * scale, "{kind} {i}{j}");
                }
            }
        }
    }

    #[test]
    fn rigid_on_plate_is_linear() {
        let d = make_thin_domain(&default_surface(SurfaceKind::Plate), 0.01, ProfileKind::Constant, 2.0, 1.0).unwrap();
        let f = rigid_field([0.0, 0.0, 1.0], [0.0; 3], &d);
        let j = f.jet(0.003, 0.25, 0.75);
        assert_eq!(j.value, [0.0, -0.75, 0.25]);
        let expect = [[0.0; 3], [0.0, 0.0, -1.0], [0.0, 1.0, 0.0]];
        for i in 0..3 {
            for k in 0..3 {
                assert!((j.grad[i][k] - expect[i][k]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn zero_axis_gives_zero_field() {
        let d =
            make_thin_domain(&default_surface(SurfaceKind::Catenoid), 0.01, ProfileKind::Constant, 2.0, 1.0).unwrap();
        let f = rigid_field([0.0; 3], [0.3, -0.2, 1.0], &d);
        assert_eq!(f.jet(0.0, 0.5, 0.1), Jet::default());
    }

    #[test]
    fn sampled_field_uses_one_sided_stencil_at_faces() {
        let d = make_thin_domain(&default_surface(SurfaceKind::Plate), 0.01, ProfileKind::Constant, 2.0, 1.0).unwrap();
        let f =
            SampledField::new(|t: f64, th: f64, z: f64| [th * th, z * z * z, t * t], &d, Resolution::new(16, 16, 4));
        // at θ = 0 the centered stencil would leave the patch; one-sided is exact for quadratics
        let j = f.jet(0.01, 0.0, 1.0);
        assert!((j.grad[0][1] - 0.0).abs() < 1e-12);
        assert!((j.grad[2][0] - 0.02).abs() < 1e-12);
    }
}
