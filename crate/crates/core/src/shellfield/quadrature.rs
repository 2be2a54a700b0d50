use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_exponent, Error, Result};
use crate::geometry::ThinDomain;
use crate::numerics::pairwise_sum;

/// Cell counts of a tensor quadrature grid in `(θ, z, t)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Resolution {
    pub n_theta: usize,
    pub n_z: usize,
    pub n_t: usize,
}

impl Resolution {
    pub const fn new(n_theta: usize, n_z: usize, n_t: usize) -> Self {
        Self { n_theta, n_z, n_t }
    }

    pub fn doubled(self) -> Self {
        Self::new(2 * self.n_theta, 2 * self.n_z, 2 * self.n_t)
    }

    /// Scales every count by `k`, rounding up.
    pub fn scaled(self, k: f64) -> Self {
        let s = |n: usize| ((n as f64 * k).ceil() as usize).max(1);
        Self::new(s(self.n_theta), s(self.n_z), s(self.n_t))
    }
}

impl Default for Resolution {
    fn default() -> Self {
        Self::new(64, 64, 8)
    }
}

/// One midpoint-rule node; `weight` includes the volume element.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadPoint {
    pub t: f64,
    pub theta: f64,
    pub z: f64,
    pub weight: f64,
    /// Cell indices `(θ, z, t)`.
    pub cell: [u32; 3],
}

/// Tensor-product midpoint rule on a thin domain.
///
/// Cells are uniform in `θ`, in the normalized coordinate
/// `s = (z − z¹)/(z² − z¹)` and in `τ = (t + g¹)/(g¹ + g²)`; the weight of a
/// node is the cell volume in `(t, θ, z)` times `J = A_θ A_z (1+tκ_θ)(1+tκ_z)`.
#[derive(Debug, Clone)]
pub struct QuadratureGrid {
    points: Vec<QuadPoint>,
    res: Resolution,
}

/// Sub-region of the domain to discretize.
#[derive(Debug, Clone, Copy, Default)]
pub struct Region {
    pub theta: Option<(f64, f64)>,
    pub z: Option<(f64, f64)>,
    /// Intersected with `(−g¹, g²)`.
    pub t_window: Option<(f64, f64)>,
}

impl QuadratureGrid {
    /// The whole patch.
    pub fn new(d: &ThinDomain, res: Resolution) -> Result<Self> {
        Self::over_region(d, Region::default(), res)
    }

    /// A `(θ, z)` box, which must lie inside the patch.
    pub fn over_box(d: &ThinDomain, theta: (f64, f64), z: (f64, f64), res: Resolution) -> Result<Self> {
        Self::over_region(d, Region { theta: Some(theta), z: Some(z), t_window: None }, res)
    }

    pub fn over_region(d: &ThinDomain, region: Region, res: Resolution) -> Result<Self> {
        if res.n_theta == 0 || res.n_z == 0 || res.n_t == 0 {
            return Err(Error::Resolution(format!("empty grid {res:?}")));
        }
        let s = d.surface();
        let (th0, th1) = region.theta.unwrap_or((0.0, s.omega()));
        let tol = 1e-12 * (1.0 + s.omega());
        if th0 < -tol || th1 > s.omega() + tol || th1 <= th0 {
            return Err(Error::Domain(format!("θ-range [{th0}, {th1}] not inside [0, {}]", s.omega())));
        }
        let dth = (th1 - th0) / res.n_theta as f64;
        let cells: Vec<usize> = (0..res.n_theta * res.n_z).collect();
        let chunks: Vec<Vec<QuadPoint>> = cells
            .par_iter()
            .map(|&c| -> Result<Vec<QuadPoint>> {
                let (i, j) = (c / res.n_z, c % res.n_z);
                let theta = th0 + (i as f64 + 0.5) * dth;
                let (pz0, pz1) = s.z_range(theta);
                let (z0, z1) = match region.z {
                    Some((a, b)) => {
                        let ztol = 1e-12 * (1.0 + pz1.abs() + pz0.abs());
                        if a < pz0 - ztol || b > pz1 + ztol || b <= a {
                            return Err(Error::Domain(format!(
                                "z-range [{a}, {b}] not inside [{pz0}, {pz1}] at θ = {theta}"
                            )));
                        }
                        (a, b)
                    }
                    None => (pz0, pz1),
                };
                let dz = (z1 - z0) / res.n_z as f64;
                let z = z0 + (j as f64 + 0.5) * dz;
                let (g1, g2) = d.thickness(theta, z);
                let (t0, t1) = match region.t_window {
                    Some((a, b)) => (a.max(-g1), b.min(g2)),
                    None => (-g1, g2),
                };
                if t1 <= t0 {
                    return Err(Error::Resolution(format!("empty thickness window at θ = {theta}, z = {z}")));
                }
                let dt = (t1 - t0) / res.n_t as f64;
                Ok((0..res.n_t)
                    .map(|k| {
                        let t = t0 + (k as f64 + 0.5) * dt;
                        QuadPoint {
                            t,
                            theta,
                            z,
                            weight: dth * dz * dt * d.jacobian(t, theta, z),
                            cell: [i as u32, j as u32, k as u32],
                        }
                    })
                    .collect())
            })
            .collect::<Result<_>>()?;
        Ok(Self { points: chunks.into_iter().flatten().collect(), res })
    }

    pub fn points(&self) -> &[QuadPoint] {
        &self.points
    }

    pub fn resolution(&self) -> Resolution {
        self.res
    }

    pub fn volume(&self) -> f64 {
        let w: Vec<f64> = self.points.iter().map(|q| q.weight).collect();
        pairwise_sum(&w)
    }

    /// `Σ w f` for `N` integrands at once, each point evaluated once.
    ///
    /// Points are mapped in parallel and reduced by pairwise summation in
    /// grid order, so the result does not depend on the thread count.
    pub fn integrate_many<const N: usize>(
        &self,
        f: impl Fn(&QuadPoint) -> Result<[f64; N]> + Sync,
    ) -> Result<[f64; N]> {
        self.integrate_subset(|_| true, f)
    }

    /// As [`Self::integrate_many`], restricted to points accepted by `keep`.
    pub fn integrate_subset<const N: usize>(
        &self,
        keep: impl Fn(&QuadPoint) -> bool + Sync,
        f: impl Fn(&QuadPoint) -> Result<[f64; N]> + Sync,
    ) -> Result<[f64; N]> {
        let vals: Vec<[f64; N]> = self
            .points
            .par_iter()
            .filter(|q| keep(q))
            .map(|q| {
                let v = f(q)?;
                if v.iter().any(|x| !x.is_finite()) {
                    return Err(Error::Evaluation { t: q.t, theta: q.theta, z: q.z });
                }
                Ok(v.map(|x| x * q.weight))
            })
            .collect::<Result<_>>()?;
        let mut out = [0.0; N];
        let mut column = vec![0.0; vals.len()];
        for (k, o) in out.iter_mut().enumerate() {
            for (c, v) in column.iter_mut().zip(&vals) {
                *c = v[k];
            }
            *o = pairwise_sum(&column);
        }
        Ok(out)
    }
}

/// `(∫ |f|^p J dt dθ dz)^{1/p}` where `f` returns the pointwise absolute
/// value (use a Euclidean or Frobenius norm for vector and matrix fields).
pub fn lp_norm(grid: &QuadratureGrid, p: f64, f: impl Fn(&QuadPoint) -> Result<f64> + Sync) -> Result<f64> {
    check_exponent(p)?;
    let [s] = grid.integrate_many(|q| Ok([f(q)?.abs().powf(p)]))?;
    Ok(s.powf(1.0 / p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{default_surface, make_thin_domain, ProfileKind, SurfaceKind};
    use crate::shellfield::{eval_gradient, BumpField};
    use approx::assert_relative_eq;

    fn plate(h: f64, profile: ProfileKind) -> ThinDomain {
        make_thin_domain(&default_surface(SurfaceKind::Plate), h, profile, 2.0, 1.0).unwrap()
    }

    #[test]
    fn plate_volume_exact() {
        let d = plate(0.01, ProfileKind::Constant);
        let g = QuadratureGrid::new(&d, Resolution::new(16, 16, 4)).unwrap();
        assert_relative_eq!(g.volume(), 0.02, max_relative = 1e-10);
        // tilted: ∫₀¹ (h + h(1 + θ/2)) dθ = 2h + h/4
        let d = plate(0.01, ProfileKind::Tilted);
        let g = QuadratureGrid::new(&d, Resolution::new(16, 16, 4)).unwrap();
        assert_relative_eq!(g.volume(), 0.0225, max_relative = 1e-10);
    }

    #[test]
    fn constant_one_norm() {
        let h = 0.01;
        let d = plate(h, ProfileKind::Constant);
        let g = QuadratureGrid::new(&d, Resolution::default()).unwrap();
        for p in [1.5, 2.0, 3.0] {
            assert_relative_eq!(lp_norm(&g, p, |_| Ok(1.0)).unwrap(), (2.0 * h).powf(1.0 / p), max_relative = 1e-12);
        }
    }

    #[test]
    fn sine_norm_on_plate() {
        let d = plate(0.01, ProfileKind::Constant);
        let g = QuadratureGrid::new(&d, Resolution::new(256, 4, 4)).unwrap();
        let n = lp_norm(&g, 2.0, |q| Ok((std::f64::consts::PI * q.theta).sin())).unwrap();
        // midpoint rule is exact for sin² at this spacing
        assert_relative_eq!(n, 0.1, max_relative = 1e-12);
    }

    #[test]
    fn constant_one_on_cylinder() {
        let h = 0.01;
        let d = make_thin_domain(&default_surface(SurfaceKind::Cylinder), h, ProfileKind::Constant, 2.0, 1.0).unwrap();
        let g = QuadratureGrid::new(&d, Resolution::default()).unwrap();
        assert_relative_eq!(lp_norm(&g, 2.0, |_| Ok(1.0)).unwrap(), (2.0 * h).sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn rejects_bad_exponent_and_nan() {
        let d = plate(0.01, ProfileKind::Constant);
        let g = QuadratureGrid::new(&d, Resolution::new(4, 4, 2)).unwrap();
        assert!(lp_norm(&g, 1.0, |_| Ok(1.0)).is_err());
        assert!(matches!(lp_norm(&g, 2.0, |_| Ok(f64::NAN)), Err(Error::Evaluation { .. })));
    }

    #[test]
    fn homogeneity_and_entrywise_sum() {
        let d =
            make_thin_domain(&default_surface(SurfaceKind::SphereCap), 0.02, ProfileKind::Tilted, 2.0, 1.0).unwrap();
        let g = QuadratureGrid::new(&d, Resolution::new(24, 24, 4)).unwrap();
        let f = BumpField::random(&mut crate::testing::rng(5), d.surface(), 3);
        let grad = |q: &QuadPoint| eval_gradient(&f, &d, (q.t, q.theta, q.z));
        let n = lp_norm(&g, 2.5, |q| Ok(grad(q)?.frobenius())).unwrap();
        let n3 = lp_norm(&g, 2.5, |q| Ok(-3.0 * grad(q)?.frobenius())).unwrap();
        assert_relative_eq!(n3, 3.0 * n, max_relative = 1e-14);
        let whole = lp_norm(&g, 2.0, |q| Ok(grad(q)?.frobenius())).unwrap().powi(2);
        let mut parts = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                parts += lp_norm(&g, 2.0, |q| Ok(grad(q)?.0[i][j])).unwrap().powi(2);
            }
        }
        assert_relative_eq!(whole, parts, max_relative = 1e-12);
    }

    #[test]
    fn thread_count_does_not_change_sums() {
        let d = plate(0.02, ProfileKind::Wavy { slope: None });
        let g = QuadratureGrid::new(&d, Resolution::new(32, 32, 4)).unwrap();
        let f = |q: &QuadPoint| Ok((3.0 * q.theta).sin() * (q.z + q.t).exp());
        let a = lp_norm(&g, 3.0, f).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| lp_norm(&g, 3.0, f).unwrap());
        assert_eq!(a.to_bits(), b.to_bits());
    }
}
