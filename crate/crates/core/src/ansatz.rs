//! The sharpness Ansatz and the ratios it realizes in the interpolation and
//! second Korn inequalities.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{MidSurface, ThinDomain};
use crate::shellfield::{field_norms, FieldNorms, Jet, QuadratureGrid, Resolution, ShellField};

/// `W` and its partials up to second order at one point.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ProfileJet {
    pub w: f64,
    pub w_xi: f64,
    pub w_eta: f64,
    pub w_xixi: f64,
    pub w_xieta: f64,
    pub w_etaeta: f64,
}

/// A smooth profile `W(ξ, η)` with compact support.
pub trait AnsatzProfile: Send + Sync {
    /// Must vanish (with all partials) outside [`Self::support`].
    fn eval(&self, xi: f64, eta: f64) -> ProfileJet;

    /// `((ξ_min, ξ_max), (η_min, η_max))`
    fn support(&self) -> ((f64, f64), (f64, f64));
}

/// `b(x) = exp(−1/(1 − x²))` on `(−1, 1)` with two derivatives.
fn bump(x: f64) -> (f64, f64, f64) {
    if x.abs() >= 1.0 {
        return (0.0, 0.0, 0.0);
    }
    let q = 1.0 - x * x;
    let b = (-1.0 / q).exp();
    let d1 = -2.0 * x / (q * q);
    let d2 = -2.0 / (q * q) - 8.0 * x * x / (q * q * q);
    (b, b * d1, b * (d1 * d1 + d2))
}

/// Product bump `b((ξ − ξ₀)/ρ_ξ) b((η − η₀)/ρ_η)`, scaled to peak value `amplitude`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BumpProfile {
    pub xi0: f64,
    pub eta0: f64,
    pub rho_xi: f64,
    pub rho_eta: f64,
    pub amplitude: f64,
}

impl BumpProfile {
    /// The default profile for a surface: centered at the patch midpoint,
    /// both half-widths `min(ω, l)/2` where `l` is the `z`-extent there.
    /// The `θ`-extent of the support is then `√h·min(ω, l)`.
    pub fn for_surface(s: &MidSurface) -> Self {
        let (th_c, z_c) = s.center();
        let (z0, z1) = s.z_range(th_c);
        let rho = 0.5 * s.omega().min(z1 - z0);
        Self { xi0: 0.0, eta0: z_c, rho_xi: rho, rho_eta: rho, amplitude: 1.0 }
    }
}

impl AnsatzProfile for BumpProfile {
    fn eval(&self, xi: f64, eta: f64) -> ProfileJet {
        let (a, a1, a2) = bump((xi - self.xi0) / self.rho_xi);
        let (b, b1, b2) = bump((eta - self.eta0) / self.rho_eta);
        let (rx, ry, c) = (1.0 / self.rho_xi, 1.0 / self.rho_eta, self.amplitude * (1.0f64).exp().powi(2));
        ProfileJet {
            w: c * a * b,
            w_xi: c * a1 * rx * b,
            w_eta: c * a * b1 * ry,
            w_xixi: c * a2 * rx * rx * b,
            w_xieta: c * a1 * b1 * rx * ry,
            w_etaeta: c * a * b2 * ry * ry,
        }
    }

    fn support(&self) -> ((f64, f64), (f64, f64)) {
        ((self.xi0 - self.rho_xi, self.xi0 + self.rho_xi), (self.eta0 - self.rho_eta, self.eta0 + self.rho_eta))
    }
}

impl<P: AnsatzProfile + ?Sized> AnsatzProfile for &P {
    fn eval(&self, xi: f64, eta: f64) -> ProfileJet {
        (**self).eval(xi, eta)
    }

    fn support(&self) -> ((f64, f64), (f64, f64)) {
        (**self).support()
    }
}

/// The field `u_t = W(ξ, z)`, `u_θ = −t W_ξ/(A_θ√h)`, `u_z = −t W_η/A_z`
/// with `ξ = (θ − θ_c)/√h`, `θ_c` the midpoint of the `θ`-range.
pub struct AnsatzField<P> {
    profile: P,
    surface: MidSurface,
    theta_c: f64,
    sqrt_h: f64,
}

/// Places `profile` on `d`, failing if its support leaves the patch.
pub fn make_ansatz<P: AnsatzProfile>(profile: P, d: &ThinDomain) -> Result<AnsatzField<P>> {
    let s = d.surface();
    let f = AnsatzField { theta_c: 0.5 * s.omega(), sqrt_h: d.h().sqrt(), surface: s.clone(), profile };
    let ((th0, th1), (z0, z1)) = f.support_box();
    let tol = 1e-12;
    let inside = th0 >= -tol
        && th1 <= s.omega() + tol
        && [th0, th1].iter().all(|&th| {
            let (a, b) = s.z_range(th.clamp(0.0, s.omega()));
            z0 >= a - tol && z1 <= b + tol
        });
    if !inside {
        let ((x0, x1), _) = f.profile.support();
        let need = 2.0 * f.sqrt_h * x0.abs().max(x1.abs());
        return Err(Error::Domain(format!(
            "Ansatz support θ ∈ [{th0}, {th1}], z ∈ [{z0}, {z1}] leaves the patch; \
             needs ω ≥ {need} and the z-range to contain [{z0}, {z1}]"
        )));
    }
    Ok(f)
}

impl<P: AnsatzProfile> AnsatzField<P> {
    /// Support in `(θ, z)`.
    pub fn support_box(&self) -> ((f64, f64), (f64, f64)) {
        let ((x0, x1), eta) = self.profile.support();
        ((self.theta_c + self.sqrt_h * x0, self.theta_c + self.sqrt_h * x1), eta)
    }

    pub fn profile(&self) -> &P {
        &self.profile
    }
}

impl<P: AnsatzProfile> ShellField for AnsatzField<P> {
    fn jet(&self, t: f64, theta: f64, z: f64) -> Jet {
        let s = self.sqrt_h;
        let w = self.profile.eval((theta - self.theta_c) / s, z);
        if w == ProfileJet::default() {
            return Jet::default();
        }
        let p = self.surface.point(theta, z);
        let (a, b) = (p.a_theta, p.a_z);
        let [a_th, a_z] = p.d_a_theta;
        let [b_th, b_z] = p.d_a_z;
        Jet {
            value: [w.w, -t * w.w_xi / (a * s), -t * w.w_eta / b],
            grad: [
                [0.0, w.w_xi / s, w.w_eta],
                [
                    -w.w_xi / (a * s),
                    -t / s * (w.w_xixi / (s * a) - w.w_xi * a_th / (a * a)),
                    -t / s * (w.w_xieta / a - w.w_xi * a_z / (a * a)),
                ],
                [
                    -w.w_eta / b,
                    -t * (w.w_xieta / (s * b) - w.w_eta * b_th / (b * b)),
                    -t * (w.w_etaeta / b - w.w_eta * b_z / (b * b)),
                ],
            ],
        }
    }
}

/// Norms of a field and the two dimensionless ratios
/// `‖∇u‖² / (‖u_t‖‖e‖/h + ‖u‖² + ‖e‖²)` and `‖∇u‖² / ((‖u‖² + ‖e‖²)/h)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatioReport {
    pub h: f64,
    pub p: f64,
    pub norms: FieldNorms,
    pub interpolation_ratio: f64,
    pub second_ratio: f64,
}

/// Whole-patch quadrature used by [`ratio_report`]: `(64, 64, 8)` cells,
/// with `n_θ` raised to at least `16ω/√h` so that features on the `θ`-scale
/// `√h` are resolved.
pub fn ratio_resolution(d: &ThinDomain) -> Resolution {
    let n_theta = (16.0 * d.surface().omega() / d.h().sqrt()).ceil() as usize;
    Resolution::new(n_theta.max(64), 64, 8)
}

/// Ratios of `f` integrated over the whole patch.
pub fn ratio_report(f: &dyn ShellField, d: &ThinDomain, p: f64) -> Result<RatioReport> {
    let grid = QuadratureGrid::new(d, ratio_resolution(d))?;
    ratio_report_on(f, d, &grid, p)
}

/// Ratios of `f` with norms computed on `grid`, which must cover the
/// support of `f`.
pub fn ratio_report_on(f: &dyn ShellField, d: &ThinDomain, grid: &QuadratureGrid, p: f64) -> Result<RatioReport> {
    let norms = field_norms(f, d, grid, p)?;
    ratios_from_norms(norms, d.h(), p)
}

pub fn ratios_from_norms(norms: FieldNorms, h: f64, p: f64) -> Result<RatioReport> {
    let lower = norms.u * norms.u + norms.strain * norms.strain;
    let interp_den = norms.u_t * norms.strain / h + lower;
    if !(interp_den > 0.0) {
        return Err(Error::Degenerate(format!("field has ‖u‖ = ‖e(u)‖ = 0 (h = {h})")));
    }
    Ok(RatioReport {
        h,
        p,
        norms,
        interpolation_ratio: norms.grad * norms.grad / interp_den,
        second_ratio: norms.grad * norms.grad * h / lower,
    })
}

/// Quadrature over the Ansatz support at base resolution `res`, refined
/// in `θ` to at least 16 cells per unit of `θ/√h`.
pub fn ansatz_grid<P: AnsatzProfile>(f: &AnsatzField<P>, d: &ThinDomain, res: Resolution) -> Result<QuadratureGrid> {
    let ((th0, th1), z) = f.support_box();
    let need = (16.0 * (th1 - th0) / d.h().sqrt()).ceil() as usize;
    let res = Resolution { n_theta: res.n_theta.max(need), ..res };
    QuadratureGrid::over_box(d, (th0, th1), z, res)
}

/// Default quadrature for [`sharpness_sweep`].
pub const SWEEP_RESOLUTION: Resolution = Resolution::new(96, 64, 8);

/// One [`RatioReport`] per thickness in `ladder`, in input order.
///
/// `d` supplies the surface, profile kind and constants; its own `h` is
/// ignored.
pub fn sharpness_sweep<P: AnsatzProfile + Clone>(
    profile: &P,
    d: &ThinDomain,
    p: f64,
    ladder: &[f64],
    res: Resolution,
) -> Result<Vec<RatioReport>> {
    crate::error::check_exponent(p)?;
    if let Some(w) = ladder.windows(2).find(|w| !(w[1] < w[0])) {
        return Err(Error::InvalidArgument(format!(
            "h-ladder must be strictly decreasing, got {} then {}",
            w[0], w[1]
        )));
    }
    if let Some(&h) = ladder.iter().find(|&&h| !(h > 0.0 && h < d.h_max())) {
        return Err(Error::InvalidArgument(format!("h = {h} outside (0, h_max = {})", d.h_max())));
    }
    ladder
        .par_iter()
        .map(|&h| {
            let dh = d.with_h(h)?;
            let f = make_ansatz(profile.clone(), &dh)?;
            let grid = ansatz_grid(&f, &dh, res)?;
            ratio_report_on(&f, &dh, &grid, p)
        })
        .collect()
}
