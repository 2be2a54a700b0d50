//! Trilinear nodal fields on the mapped `(θ, s, τ)` grid of a thin domain.
//!
//! Each of `u_t, u_θ, u_z` is expanded in hat functions of the normalized
//! coordinates `s = (z − z¹)/(z² − z¹)` and `τ = (t + g¹)/(g¹ + g²)`; the
//! physical partials follow by the chain rule through the exact domain map.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::ThinDomain;
use crate::numerics::banded::SymBand;
use crate::numerics::pairwise_sum;
use crate::shellfield::{gradient_from_jet, stretch_factors, FrameMatrix, Jet, ShellField};

/// Discrete space of dimension `3·(n_θ+1)(n_z+1)(n_t+1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NodalSpace {
    pub n_theta: usize,
    pub n_z: usize,
    pub n_t: usize,
}

/// Smallest space dimension accepted by the eigenvalue estimate.
pub const MIN_DIM: usize = 200;

const GAUSS: [f64; 2] = [0.211_324_865_405_187_1, 0.788_675_134_594_812_9];

/// One Gauss node of one cell with the eight local hat functions.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ElementPoint {
    pub t: f64,
    pub theta: f64,
    pub z: f64,
    pub weight: f64,
    pub nodes: [usize; 8],
    pub phi: [f64; 8],
    /// `(∂_t, ∂_θ, ∂_z)` of each hat function.
    pub dphi: [[f64; 3]; 8],
}

impl NodalSpace {
    pub fn new(n_theta: usize, n_z: usize, n_t: usize) -> Result<Self> {
        if n_theta == 0 || n_z == 0 || n_t == 0 {
            return Err(Error::Resolution(format!(
                "nodal grid needs at least one cell per direction, got ({n_theta}, {n_z}, {n_t})"
            )));
        }
        Ok(Self { n_theta, n_z, n_t })
    }

    /// Default space for a thickness scale: `θ`-cells of arc length about
    /// `h` (which keeps transverse shear locking independent of `h`), four
    /// cells along `z`, one through the thickness; `n_θ` is raised if the
    /// dimension would fall below [`MIN_DIM`].
    pub fn for_domain(d: &ThinDomain) -> Self {
        let s = d.surface();
        let (_, z_c) = s.center();
        let arc = s.omega() * (0..=16).map(|i| s.a_theta(s.omega() * i as f64 / 16.0, z_c)).fold(0.0, f64::max);
        let mut sp = Self { n_theta: (arc / d.h()).ceil() as usize, n_z: 4, n_t: 1 };
        while sp.dim() < MIN_DIM {
            sp.n_theta += 1;
        }
        sp
    }

    pub fn n_nodes(&self) -> usize {
        (self.n_theta + 1) * (self.n_z + 1) * (self.n_t + 1)
    }

    pub fn dim(&self) -> usize {
        3 * self.n_nodes()
    }

    /// Node numbering with `θ` slowest, so the band is set by one `θ`-layer.
    #[inline]
    pub fn node(&self, i: usize, j: usize, k: usize) -> usize {
        (i * (self.n_z + 1) + j) * (self.n_t + 1) + k
    }

    /// Half-bandwidth of the assembled matrices in degrees of freedom.
    pub fn bandwidth(&self) -> usize {
        3 * self.node(1, 1, 1) + 2
    }

    /// Physical coordinates `(t, θ, z)` of node `(i, j, k)`.
    pub fn node_position(&self, d: &ThinDomain, i: usize, j: usize, k: usize) -> (f64, f64, f64) {
        let theta = d.surface().omega() * i as f64 / self.n_theta as f64;
        let (z0, z1) = d.surface().z_range(theta);
        let (g1, g2) = d.thickness(theta, 0.0);
        let z = z0 + (z1 - z0) * j as f64 / self.n_z as f64;
        let t = -g1 + (g1 + g2) * k as f64 / self.n_t as f64;
        (t, theta, z)
    }

    /// Nodal interpolant of `f`: coefficient `3n + c` is component `c` at node `n`.
    pub fn interpolate(&self, d: &ThinDomain, f: &dyn ShellField) -> Vec<f64> {
        let mut x = vec![0.0; self.dim()];
        for i in 0..=self.n_theta {
            for j in 0..=self.n_z {
                for k in 0..=self.n_t {
                    let (t, th, z) = self.node_position(d, i, j, k);
                    let v = f.value(t, th, z);
                    let n = self.node(i, j, k);
                    x[3 * n..3 * n + 3].copy_from_slice(&v);
                }
            }
        }
        x
    }

    pub(crate) fn cell_points(&self, d: &ThinDomain, i: usize, j: usize, k: usize) -> Vec<ElementPoint> {
        let s = d.surface();
        let dth = s.omega() / self.n_theta as f64;
        let (ds, dtau) = (1.0 / self.n_z as f64, 1.0 / self.n_t as f64);
        let (zl, zu) = s.z_bounds();
        let nodes = self.cell_nodes(i, j, k);
        let mut out = Vec::with_capacity(8);
        for &gx in &GAUSS {
            let theta = (i as f64 + gx) * dth;
            let (z0, z1) = s.z_range(theta);
            let len = z1 - z0;
            let (g1, g2) = d.thickness(theta, 0.0);
            let (dg1, dg2) = d.thickness_dtheta(theta);
            let big_h = g1 + g2;
            for &gy in &GAUSS {
                let sig = (j as f64 + gy) * ds;
                let z = z0 + sig * len;
                let sig_th = -(zl.slope + sig * (zu.slope - zl.slope)) / len;
                for &gz in &GAUSS {
                    let tau = (k as f64 + gz) * dtau;
                    let t = -g1 + tau * big_h;
                    let tau_th = (dg1 - tau * (dg1 + dg2)) / big_h;
                    let lx = [1.0 - gx, gx];
                    let ly = [1.0 - gy, gy];
                    let lz = [1.0 - gz, gz];
                    let dl = [-1.0, 1.0];
                    let mut phi = [0.0; 8];
                    let mut dphi = [[0.0; 3]; 8];
                    for a in 0..8 {
                        let (bx, by, bz) = (a >> 2, (a >> 1) & 1, a & 1);
                        phi[a] = lx[bx] * ly[by] * lz[bz];
                        let n_th = dl[bx] / dth * ly[by] * lz[bz];
                        let n_s = lx[bx] * dl[by] / ds * lz[bz];
                        let n_tau = lx[bx] * ly[by] * dl[bz] / dtau;
                        dphi[a] = [n_tau / big_h, n_th + n_tau * tau_th + n_s * sig_th, n_s / len];
                    }
                    let weight = 0.125 * dth * ds * dtau * big_h * len * d.jacobian(t, theta, z);
                    out.push(ElementPoint { t, theta, z, weight, nodes, phi, dphi });
                }
            }
        }
        out
    }

    fn cells(&self) -> Vec<(usize, usize, usize)> {
        let mut c = Vec::with_capacity(self.n_theta * self.n_z * self.n_t);
        for i in 0..self.n_theta {
            for j in 0..self.n_z {
                for k in 0..self.n_t {
                    c.push((i, j, k));
                }
            }
        }
        c
    }

    /// Gradient (`K`), mass-plus-strain (`M`) and mass (`M₀`) matrices.
    pub fn assemble(&self, d: &ThinDomain) -> Result<Assembled> {
        let bw = self.bandwidth();
        let n = self.dim();
        // element matrices in parallel, scattered in cell order for
        // thread-count independent sums
        let elems: Vec<Vec<(usize, usize, [f64; 3])>> =
            self.cells().par_iter().map(|&(i, j, k)| self.element_matrices(d, i, j, k)).collect::<Result<_>>()?;
        let mut mats = [SymBand::zeros(n, bw), SymBand::zeros(n, bw), SymBand::zeros(n, bw)];
        for e in &elems {
            for &(r, c, v) in e {
                for (m, val) in mats.iter_mut().zip(v) {
                    m.add(r, c, val);
                }
            }
        }
        let [k, m, m0] = mats;
        Ok(Assembled { k, m, m0 })
    }

    fn element_matrices(&self, d: &ThinDomain, i: usize, j: usize, k: usize) -> Result<Vec<(usize, usize, [f64; 3])>> {
        let mut loc = vec![[0.0f64; 3]; 24 * 24];
        for ep in self.cell_points(d, i, j, k) {
            let sp = d.surface().point(ep.theta, ep.z);
            let (ft, fz) = stretch_factors(&sp, ep.t, ep.theta, ep.z)?;
            let g: Vec<FrameMatrix> = (0..24)
                .map(|b| {
                    let (a, c) = (b / 3, b % 3);
                    let mut jet = Jet::default();
                    jet.value[c] = ep.phi[a];
                    jet.grad[c] = ep.dphi[a];
                    gradient_from_jet(&jet, &sp, ft, fz)
                })
                .collect();
            let e: Vec<FrameMatrix> = g.iter().map(|m| m.symmetrize()).collect();
            for r in 0..24 {
                for c in 0..=r {
                    let kk = frob_dot(&g[r], &g[c]);
                    let mass = if r % 3 == c % 3 { ep.phi[r / 3] * ep.phi[c / 3] } else { 0.0 };
                    let ee = frob_dot(&e[r], &e[c]);
                    let cell = &mut loc[r * 24 + c];
                    cell[0] += ep.weight * kk;
                    cell[1] += ep.weight * (mass + ee);
                    cell[2] += ep.weight * mass;
                }
            }
        }
        let nodes = self.cell_nodes(i, j, k);
        let mut out = Vec::with_capacity(300);
        for r in 0..24 {
            for c in 0..=r {
                let gr = 3 * nodes[r / 3] + r % 3;
                let gc = 3 * nodes[c / 3] + c % 3;
                out.push((gr, gc, loc[r * 24 + c]));
            }
        }
        Ok(out)
    }

    fn cell_nodes(&self, i: usize, j: usize, k: usize) -> [usize; 8] {
        std::array::from_fn(|a| self.node(i + (a >> 2), j + ((a >> 1) & 1), k + (a & 1)))
    }

    /// Relative `L²` distance from `f` to its `L²` projection onto the space.
    pub fn projection_residual(&self, d: &ThinDomain, f: &dyn ShellField) -> Result<f64> {
        let a = self.assemble(d)?;
        let pts: Vec<ElementPoint> = self.cells().iter().flat_map(|&(i, j, k)| self.cell_points(d, i, j, k)).collect();
        let vals: Vec<[f64; 3]> = pts.par_iter().map(|p| f.value(p.t, p.theta, p.z)).collect();
        let mut rhs = vec![0.0; self.dim()];
        for (p, v) in pts.iter().zip(&vals) {
            for a in 0..8 {
                for c in 0..3 {
                    rhs[3 * p.nodes[a] + c] += p.weight * p.phi[a] * v[c];
                }
            }
        }
        a.m0.cholesky()?.solve(&mut rhs);
        let (mut num, mut den) = (Vec::with_capacity(pts.len()), Vec::with_capacity(pts.len()));
        for (p, v) in pts.iter().zip(&vals) {
            let mut r2 = 0.0;
            for c in 0..3 {
                let proj: f64 = (0..8).map(|a| p.phi[a] * rhs[3 * p.nodes[a] + c]).sum();
                r2 += (v[c] - proj).powi(2);
            }
            num.push(p.weight * r2);
            den.push(p.weight * v.iter().map(|x| x * x).sum::<f64>());
        }
        let den = pairwise_sum(&den);
        if den == 0.0 {
            return Err(Error::Degenerate("projection of the zero field".into()));
        }
        Ok((pairwise_sum(&num) / den).sqrt())
    }
}

fn frob_dot(a: &FrameMatrix, b: &FrameMatrix) -> f64 {
    let mut s = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            s += a.0[i][j] * b.0[i][j];
        }
    }
    s
}

/// The three quadratic forms of a [`NodalSpace`].
#[derive(Debug, Clone)]
pub struct Assembled {
    /// `∫ ∇u : ∇v`
    pub k: SymBand,
    /// `∫ u·v + e(u) : e(v)`
    pub m: SymBand,
    /// `∫ u·v`
    pub m0: SymBand,
}

impl Assembled {
    /// `xᵀKx / xᵀMx`
    pub fn rayleigh_quotient(&self, x: &[f64]) -> f64 {
        let mut y = vec![0.0; x.len()];
        self.k.matvec(x, &mut y);
        let num: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
        self.m.matvec(x, &mut y);
        let den: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
        num / den
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{default_surface, make_thin_domain, ProfileKind, SurfaceKind};
    use crate::shellfield::{field_norms, rigid_field, AnalyticField, QuadratureGrid, Resolution};

    fn domain(kind: SurfaceKind, h: f64, profile: ProfileKind) -> ThinDomain {
        make_thin_domain(&default_surface(kind), h, profile, 2.0, 1.0).unwrap()
    }

    #[test]
    fn weights_sum_to_volume() {
        for kind in SurfaceKind::ALL {
            let d = domain(kind, 0.05, ProfileKind::Tilted);
            let sp = NodalSpace::new(8, 6, 2).unwrap();
            let v: f64 = sp.cells().iter().flat_map(|&(i, j, k)| sp.cell_points(&d, i, j, k)).map(|p| p.weight).sum();
            let fine = QuadratureGrid::new(&d, Resolution::new(128, 128, 64)).unwrap().volume();
            assert!((v - fine).abs() < 1e-5 * fine, "{kind}: {v} vs {fine}");
        }
    }

    #[test]
    fn hat_partials_reproduce_coordinate_gradients() {
        // θ and z are trilinear in the mapped coordinates, so their
        // interpolants are exact and carry gradients (0, 1, 0) and (0, 0, 1)
        let d = domain(SurfaceKind::Catenoid, 0.05, ProfileKind::Wavy { slope: None });
        let sp = NodalSpace::new(4, 3, 2).unwrap();
        let per_layer = (sp.n_z + 1) * (sp.n_t + 1);
        for ep in sp.cell_points(&d, 2, 1, 1) {
            let (mut gth, mut gz) = ([0.0; 3], [0.0; 3]);
            for a in 0..8 {
                let n = ep.nodes[a];
                let (i, j, k) = (n / per_layer, (n / (sp.n_t + 1)) % (sp.n_z + 1), n % (sp.n_t + 1));
                let (_, th, z) = sp.node_position(&d, i, j, k);
                for c in 0..3 {
                    gth[c] += th * ep.dphi[a][c];
                    gz[c] += z * ep.dphi[a][c];
                }
            }
            assert!(gth[0].abs() < 1e-12 && (gth[1] - 1.0).abs() < 1e-12 && gth[2].abs() < 1e-12, "{gth:?}");
            assert!(gz[0].abs() < 1e-12 && gz[1].abs() < 1e-12 && (gz[2] - 1.0).abs() < 1e-12, "{gz:?}");
        }
    }

    #[test]
    fn plate_contains_constants_and_rigid_fields() {
        let d = domain(SurfaceKind::Plate, 0.05, ProfileKind::Tilted);
        let sp = NodalSpace::new(6, 4, 1).unwrap();
        let constant = AnalyticField::new(|_, _, _| Jet { value: [0.3, -1.0, 2.0], grad: [[0.0; 3]; 3] });
        assert!(sp.projection_residual(&d, &constant).unwrap() <= 1e-8);
        for axis in [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [0.3, -0.5, 0.8]] {
            let r = rigid_field(axis, [0.2, 0.4, 0.0], &d);
            assert!(sp.projection_residual(&d, &r).unwrap() <= 1e-8);
        }
    }

    #[test]
    fn forms_match_field_norms_for_interpolant() {
        // trilinear in (θ, z, t) on the plate: the interpolant is the field itself
        let d = domain(SurfaceKind::Plate, 0.05, ProfileKind::Constant);
        let sp = NodalSpace::new(4, 4, 1).unwrap();
        let f = AnalyticField::new(|t: f64, th: f64, z: f64| Jet {
            value: [th * z, t * th, z + t],
            grad: [[0.0, z, th], [th, t, 0.0], [1.0, 0.0, 1.0]],
        });
        let x = sp.interpolate(&d, &f);
        let a = sp.assemble(&d).unwrap();
        let norms = field_norms(&f, &d, &QuadratureGrid::new(&d, Resolution::new(200, 200, 8)).unwrap(), 2.0).unwrap();
        let expect = norms.grad.powi(2) / (norms.u.powi(2) + norms.strain.powi(2));
        let got = a.rayleigh_quotient(&x);
        assert!((got - expect).abs() < 1e-4 * expect, "{got} vs {expect}");
    }

    #[test]
    fn default_space_sizes() {
        let plate = domain(SurfaceKind::Plate, 0.1, ProfileKind::Constant);
        assert!(NodalSpace::for_domain(&plate).dim() >= MIN_DIM);
        let thin = plate.with_h(0.0125).unwrap();
        let sp = NodalSpace::for_domain(&thin);
        assert_eq!(sp.n_theta, 80);
        assert!(sp.dim() <= 3000);
    }
}
