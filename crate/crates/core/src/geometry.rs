//! Single-patch mid-surfaces in principal coordinates and the thin domains
//! built around them.
//!
//! Coordinates are `(θ, z)` with `θ ∈ [0, ω]` and `z ∈ [z¹(θ), z²(θ)]`. The
//! unit normal `n` of every built-in surface is oriented so that the offset
//! surface `r + t n` stretches the coordinate lines by `1 + t κ`, that is
//! `∂n/∂θ = κ_θ ∂r/∂θ` and `∂n/∂z = κ_z ∂r/∂z`. With that orientation the
//! cylinder and the sphere have positive curvatures (the normal points away
//! from the axis / center).

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vec3 = [f64; 3];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SurfaceKind {
    Plate,
    Cylinder,
    SphereCap,
    Catenoid,
}

impl SurfaceKind {
    pub const ALL: [SurfaceKind; 4] =
        [SurfaceKind::Plate, SurfaceKind::Cylinder, SurfaceKind::SphereCap, SurfaceKind::Catenoid];

    pub fn name(self) -> &'static str {
        match self {
            SurfaceKind::Plate => "plate",
            SurfaceKind::Cylinder => "cylinder",
            SurfaceKind::SphereCap => "sphere_cap",
            SurfaceKind::Catenoid => "catenoid",
        }
    }

    /// Parameter names accepted by [`make_surface`], required ones first.
    fn param_names(self) -> (&'static [&'static str], &'static [&'static str]) {
        match self {
            SurfaceKind::Plate => (&["Lx", "Ly"], &[]),
            SurfaceKind::Cylinder => (&["R", "length"], &["omega"]),
            SurfaceKind::SphereCap => (&["R", "polar_min", "polar_max"], &["omega"]),
            SurfaceKind::Catenoid => (&[], &["c", "z_min", "z_max", "omega"]),
        }
    }
}

impl fmt::Display for SurfaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SurfaceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SurfaceKind::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| Error::UnknownKind(s.to_string()))
    }
}

/// Affine bound `z(θ) = offset + slope·θ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffineBound {
    pub offset: f64,
    pub slope: f64,
}

impl AffineBound {
    pub fn constant(offset: f64) -> Self {
        Self { offset, slope: 0.0 }
    }

    #[inline]
    pub fn at(&self, theta: f64) -> f64 {
        self.offset + self.slope * theta
    }
}

/// Everything the shell calculus needs at one surface point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfacePoint {
    pub position: Vec3,
    pub normal: Vec3,
    pub e_theta: Vec3,
    pub e_z: Vec3,
    pub a_theta: f64,
    pub a_z: f64,
    /// `(∂A_θ/∂θ, ∂A_θ/∂z)`
    pub d_a_theta: [f64; 2],
    /// `(∂A_z/∂θ, ∂A_z/∂z)`
    pub d_a_z: [f64; 2],
    pub kappa_theta: f64,
    pub kappa_z: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Shape {
    Plate,
    Cylinder { radius: f64 },
    Sphere { radius: f64 },
    Catenoid { neck: f64 },
}

/// A single-patch mid-surface parametrized by principal coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct MidSurface {
    kind: SurfaceKind,
    params: BTreeMap<String, f64>,
    shape: Shape,
    omega: f64,
    z_lower: AffineBound,
    z_upper: AffineBound,
}

fn positive(params: &BTreeMap<String, f64>, name: &str, default: Option<f64>) -> Result<f64> {
    let v = match (params.get(name), default) {
        (Some(&v), _) => v,
        (None, Some(d)) => d,
        (None, None) => return Err(Error::InvalidParameter { name: name.into(), reason: "missing".into() }),
    };
    if !(v.is_finite() && v > 0.0) {
        return Err(Error::InvalidParameter { name: name.into(), reason: format!("must be positive, got {v}") });
    }
    Ok(v)
}

fn finite(params: &BTreeMap<String, f64>, name: &str, default: f64) -> Result<f64> {
    let v = params.get(name).copied().unwrap_or(default);
    if !v.is_finite() {
        return Err(Error::InvalidParameter { name: name.into(), reason: format!("must be finite, got {v}") });
    }
    Ok(v)
}

/// Builds one of the built-in surfaces.
///
/// | kind | required | optional (default) |
/// |------|----------|--------------------|
/// | `plate` | `Lx`, `Ly` | |
/// | `cylinder` | `R`, `length` | `omega` (1) |
/// | `sphere_cap` | `R`, `polar_min`, `polar_max` (radians) | `omega` (1) |
/// | `catenoid` | | `c` (1), `z_min` (−0.5), `z_max` (0.5), `omega` (1) |
pub fn make_surface(kind: SurfaceKind, params: &BTreeMap<String, f64>) -> Result<MidSurface> {
    let (required, optional) = kind.param_names();
    if let Some(unknown) = params.keys().find(|k| !required.contains(&k.as_str()) && !optional.contains(&k.as_str())) {
        return Err(Error::InvalidParameter { name: unknown.clone(), reason: format!("not a parameter of `{kind}`") });
    }
    let (shape, omega, z0, z1) = match kind {
        SurfaceKind::Plate => (Shape::Plate, positive(params, "Lx", None)?, 0.0, positive(params, "Ly", None)?),
        SurfaceKind::Cylinder => {
            let radius = positive(params, "R", None)?;
            (Shape::Cylinder { radius }, positive(params, "omega", Some(1.0))?, 0.0, positive(params, "length", None)?)
        }
        SurfaceKind::SphereCap => {
            let radius = positive(params, "R", None)?;
            let lo = positive(params, "polar_min", None)?;
            let hi = positive(params, "polar_max", None)?;
            if hi >= std::f64::consts::PI {
                return Err(Error::InvalidParameter { name: "polar_max".into(), reason: "must be below π".into() });
            }
            if hi <= lo {
                return Err(Error::InvalidParameter {
                    name: "polar_max".into(),
                    reason: format!("must exceed polar_min = {lo}"),
                });
            }
            (Shape::Sphere { radius }, positive(params, "omega", Some(1.0))?, radius * lo, radius * hi)
        }
        SurfaceKind::Catenoid => {
            let neck = positive(params, "c", Some(1.0))?;
            let lo = finite(params, "z_min", -0.5)?;
            let hi = finite(params, "z_max", 0.5)?;
            if hi <= lo {
                return Err(Error::InvalidParameter {
                    name: "z_max".into(),
                    reason: format!("must exceed z_min = {lo}"),
                });
            }
            (Shape::Catenoid { neck }, positive(params, "omega", Some(1.0))?, lo, hi)
        }
    };
    Ok(MidSurface {
        kind,
        params: params.clone(),
        shape,
        omega,
        z_lower: AffineBound::constant(z0),
        z_upper: AffineBound::constant(z1),
    })
}

/// The reference instance of each kind used by the test suites and the
/// default experiment configs.
///
/// The sphere cap uses `ω = 2` so that the tilted profile stays within
/// `c₂ = 1` despite the small `A_θ = sin 0.3` near the inner rim.
pub fn default_surface(kind: SurfaceKind) -> MidSurface {
    let pairs: &[(&str, f64)] = match kind {
        SurfaceKind::Plate => &[("Lx", 1.0), ("Ly", 1.0)],
        SurfaceKind::Cylinder => &[("R", 1.0), ("length", 1.0)],
        SurfaceKind::SphereCap => &[("R", 1.0), ("polar_min", 0.3), ("polar_max", 1.2), ("omega", 2.0)],
        SurfaceKind::Catenoid => &[],
    };
    surface_from_pairs(kind, pairs).expect("built-in parameters are valid")
}

/// Convenience wrapper taking `(name, value)` pairs.
pub fn surface_from_pairs(kind: SurfaceKind, pairs: &[(&str, f64)]) -> Result<MidSurface> {
    let params = pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    make_surface(kind, &params)
}

impl MidSurface {
    pub fn kind(&self) -> SurfaceKind {
        self.kind
    }

    pub fn params(&self) -> &BTreeMap<String, f64> {
        &self.params
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn z_bounds(&self) -> (AffineBound, AffineBound) {
        (self.z_lower, self.z_upper)
    }

    /// Replaces the `z`-range by affine bounds; fails if the patch would
    /// pinch (`z² − z¹ ≤ 0` somewhere on `[0, ω]`).
    pub fn with_z_bounds(mut self, lower: AffineBound, upper: AffineBound) -> Result<Self> {
        let gap = |th: f64| upper.at(th) - lower.at(th);
        if !(gap(0.0) > 0.0 && gap(self.omega) > 0.0) {
            return Err(Error::InvalidParameter {
                name: "z_bounds".into(),
                reason: "z² − z¹ must stay positive".into(),
            });
        }
        self.z_lower = lower;
        self.z_upper = upper;
        Ok(self)
    }

    #[inline]
    pub fn z_range(&self, theta: f64) -> (f64, f64) {
        (self.z_lower.at(theta), self.z_upper.at(theta))
    }

    /// Midpoint of the patch in `(θ, z)`.
    pub fn center(&self) -> (f64, f64) {
        let th = 0.5 * self.omega;
        let (z0, z1) = self.z_range(th);
        (th, 0.5 * (z0 + z1))
    }

    pub fn contains(&self, theta: f64, z: f64) -> bool {
        let (z0, z1) = self.z_range(theta);
        (0.0..=self.omega).contains(&theta) && z >= z0 && z <= z1
    }

    pub fn position(&self, theta: f64, z: f64) -> Vec3 {
        self.point(theta, z).position
    }

    pub fn a_theta(&self, theta: f64, z: f64) -> f64 {
        self.point(theta, z).a_theta
    }

    pub fn a_z(&self, theta: f64, z: f64) -> f64 {
        self.point(theta, z).a_z
    }

    pub fn kappa(&self, theta: f64, z: f64) -> (f64, f64) {
        let p = self.point(theta, z);
        (p.kappa_theta, p.kappa_z)
    }

    /// Position, frame, metric (with first derivatives) and principal
    /// curvatures at `(θ, z)`.
    pub fn point(&self, theta: f64, z: f64) -> SurfacePoint {
        let (st, ct) = theta.sin_cos();
        match self.shape {
            Shape::Plate => SurfacePoint {
                position: [theta, z, 0.0],
                normal: [0.0, 0.0, 1.0],
                e_theta: [1.0, 0.0, 0.0],
                e_z: [0.0, 1.0, 0.0],
                a_theta: 1.0,
                a_z: 1.0,
                d_a_theta: [0.0; 2],
                d_a_z: [0.0; 2],
                kappa_theta: 0.0,
                kappa_z: 0.0,
            },
            Shape::Cylinder { radius } => SurfacePoint {
                position: [radius * ct, radius * st, z],
                normal: [ct, st, 0.0],
                e_theta: [-st, ct, 0.0],
                e_z: [0.0, 0.0, 1.0],
                a_theta: radius,
                a_z: 1.0,
                d_a_theta: [0.0; 2],
                d_a_z: [0.0; 2],
                kappa_theta: 1.0 / radius,
                kappa_z: 0.0,
            },
            Shape::Sphere { radius } => {
                let (sp, cp) = (z / radius).sin_cos();
                SurfacePoint {
                    position: [radius * sp * ct, radius * sp * st, radius * cp],
                    normal: [sp * ct, sp * st, cp],
                    e_theta: [-st, ct, 0.0],
                    e_z: [cp * ct, cp * st, -sp],
                    a_theta: radius * sp,
                    a_z: 1.0,
                    d_a_theta: [0.0, cp],
                    d_a_z: [0.0; 2],
                    kappa_theta: 1.0 / radius,
                    kappa_z: 1.0 / radius,
                }
            }
            Shape::Catenoid { neck } => {
                let (sh, ch) = ((z / neck).sinh(), (z / neck).cosh());
                let k = 1.0 / (neck * ch * ch);
                SurfacePoint {
                    position: [neck * ch * ct, neck * ch * st, z],
                    normal: [ct / ch, st / ch, -sh / ch],
                    e_theta: [-st, ct, 0.0],
                    e_z: [sh * ct / ch, sh * st / ch, 1.0 / ch],
                    a_theta: neck * ch,
                    a_z: ch,
                    d_a_theta: [0.0, sh],
                    d_a_z: [0.0, sh / neck],
                    kappa_theta: k,
                    kappa_z: -k,
                }
            }
        }
    }

    /// Position of `r(θ, z) + t n(θ, z)`.
    pub fn embed(&self, t: f64, theta: f64, z: f64) -> Vec3 {
        let p = self.point(theta, z);
        std::array::from_fn(|i| p.position[i] + t * p.normal[i])
    }
}

/// Mid-surface and thickness parameters of a single patch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DomainParams {
    /// `min(A_θ, A_z)`
    pub a: f64,
    /// `‖A_θ‖_{W^{2,∞}} + ‖A_z‖_{W^{2,∞}}`
    #[serde(rename = "A")]
    pub big_a: f64,
    /// `‖κ_θ‖_{W^{1,∞}} + ‖κ_z‖_{W^{1,∞}}`
    pub k: f64,
    /// `max(z² − z¹)`
    #[serde(rename = "L")]
    pub big_l: f64,
    /// `‖z¹‖_{W^{1,∞}} + ‖z²‖_{W^{1,∞}}`
    #[serde(rename = "Z")]
    pub big_z: f64,
    pub omega: f64,
    /// `min(z² − z¹)`
    pub l: f64,
}

/// Sup-norm accumulator for a function and its partials.
#[derive(Default)]
struct SupNorms([f64; 6]);

impl SupNorms {
    fn push(&mut self, vals: &[f64]) {
        for (m, v) in self.0.iter_mut().zip(vals) {
            *m = m.max(v.abs());
        }
    }

    fn total(&self, n: usize) -> f64 {
        self.0[..n].iter().sum()
    }
}

/// Grid estimates of the patch parameters.
///
/// Values are sampled on the nested `(res+1)²` node grid; first and second
/// partials use central differences with a fixed step of `1e-4` times the
/// coordinate range, so the sampled sets (and thus every max/min) are
/// monotone in the resolution when it doubles. `W^{k,∞}` norms are the sum
/// of the sup norms of all partials up to order `k`.
pub fn domain_params(s: &MidSurface, grid_resolution: usize) -> Result<DomainParams> {
    if grid_resolution < 8 {
        return Err(Error::InvalidArgument(format!("grid_resolution must be ≥ 8, got {grid_resolution}")));
    }
    let n = grid_resolution;
    let omega = s.omega;
    let dth = 1e-4 * omega;
    let (zl, zu) = s.z_bounds();
    let (mut lmin, mut lmax) = (f64::INFINITY, 0.0f64);
    let mut a = f64::INFINITY;
    let (mut sa_t, mut sa_z, mut sk_t, mut sk_z) =
        (SupNorms::default(), SupNorms::default(), SupNorms::default(), SupNorms::default());
    let mut sz = [SupNorms::default(), SupNorms::default()];

    for i in 0..=n {
        let th = omega * i as f64 / n as f64;
        let (z0, z1) = s.z_range(th);
        lmin = lmin.min(z1 - z0);
        lmax = lmax.max(z1 - z0);
        for (acc, b) in sz.iter_mut().zip([zl, zu]) {
            acc.push(&[b.at(th), b.slope]);
        }
        let dz = 1e-4 * (z1 - z0);
        for j in 0..=n {
            let z = z0 + (z1 - z0) * j as f64 / n as f64;
            let eval = |dt: f64, dzz: f64| {
                let p = s.point(th + dt, z + dzz);
                [p.a_theta, p.a_z, p.kappa_theta, p.kappa_z]
            };
            let c = eval(0.0, 0.0);
            for (q, name) in c.iter().zip(["A_theta", "A_z", "kappa_theta", "kappa_z"]) {
                if !q.is_finite() {
                    return Err(Error::NonFiniteGeometry { quantity: name, theta: th, z });
                }
            }
            let (tp, tm, zp, zm) = (eval(dth, 0.0), eval(-dth, 0.0), eval(0.0, dz), eval(0.0, -dz));
            let (pp, pm, mp, mm) = (eval(dth, dz), eval(dth, -dz), eval(-dth, dz), eval(-dth, -dz));
            let partials = |q: usize| {
                [
                    c[q],
                    (tp[q] - tm[q]) / (2.0 * dth),
                    (zp[q] - zm[q]) / (2.0 * dz),
                    (tp[q] - 2.0 * c[q] + tm[q]) / (dth * dth),
                    (pp[q] - pm[q] - mp[q] + mm[q]) / (4.0 * dth * dz),
                    (zp[q] - 2.0 * c[q] + zm[q]) / (dz * dz),
                ]
            };
            let (pa_t, pa_z, pk_t, pk_z) = (partials(0), partials(1), partials(2), partials(3));
            for v in pa_t.iter().chain(&pa_z).chain(&pk_t[..3]).chain(&pk_z[..3]) {
                if !v.is_finite() {
                    return Err(Error::NonFiniteGeometry { quantity: "derivative", theta: th, z });
                }
            }
            a = a.min(c[0]).min(c[1]);
            sa_t.push(&pa_t);
            sa_z.push(&pa_z);
            sk_t.push(&pk_t[..3]);
            sk_z.push(&pk_z[..3]);
        }
    }
    Ok(DomainParams {
        a,
        big_a: sa_t.total(6) + sa_z.total(6),
        k: sk_t.total(3) + sk_z.total(3),
        big_l: lmax,
        big_z: sz[0].total(2) + sz[1].total(2),
        omega,
        l: lmin,
    })
}

/// Thickness profile family for the upper face `g²`; the lower face is
/// always `g¹ = h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "profile", rename_all = "snake_case")]
pub enum ProfileKind {
    Constant,
    /// `g² = h(1 + θ/(2ω))`, clipped to `[h, c₁h]`.
    Tilted,
    /// `g² = h(1 + β(1 − cos(2πθ/ω))/2)` with `β` tuned so that the largest
    /// surface slope equals `slope·h` (default `c₂/2`).
    Wavy {
        #[serde(default)]
        slope: Option<f64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Face {
    Constant,
    Tilted { cap: f64 },
    Wavy { beta: f64 },
}

/// `(g, ∂g/∂θ, ∂g/∂z)` of one face.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Thickness {
    face: Face,
    h: f64,
    omega: f64,
}

impl Thickness {
    fn eval(&self, theta: f64) -> (f64, f64, f64) {
        let (h, om) = (self.h, self.omega);
        match self.face {
            Face::Constant => (h, 0.0, 0.0),
            Face::Tilted { cap } => {
                let g = h * (1.0 + 0.5 * theta / om);
                if g < h {
                    (h, 0.0, 0.0)
                } else if g > cap {
                    (cap, 0.0, 0.0)
                } else {
                    (g, 0.5 * h / om, 0.0)
                }
            }
            Face::Wavy { beta } => {
                let arg = 2.0 * std::f64::consts::PI * theta / om;
                (h * (1.0 + 0.5 * beta * (1.0 - arg.cos())), h * beta * std::f64::consts::PI / om * arg.sin(), 0.0)
            }
        }
    }
}

/// Mid-surface with thickness profiles `g¹, g²` at scale `h`.
#[derive(Debug, Clone, PartialEq)]
pub struct ThinDomain {
    surface: MidSurface,
    h: f64,
    profile: ProfileKind,
    c1: f64,
    c2: f64,
    lower: Thickness,
    upper: Thickness,
    h_max: f64,
}

/// Largest admissible `h`: `0.4/(c₁k)` keeps `1 + tκ ≥ 0.6` for `|t| ≤ c₁h`.
pub fn h_max(s: &MidSurface, c1: f64) -> Result<f64> {
    let k = domain_params(s, 32)?.k;
    Ok(if k > 0.0 { 0.4 / (c1 * k) } else { f64::INFINITY })
}

/// Builds and validates a thin domain.
pub fn make_thin_domain(s: &MidSurface, h: f64, profile: ProfileKind, c1: f64, c2: f64) -> Result<ThinDomain> {
    if !(c1.is_finite() && c1 >= 1.0) {
        return Err(Error::InvalidParameter { name: "c1".into(), reason: format!("must be ≥ 1, got {c1}") });
    }
    if !(c2.is_finite() && c2 > 0.0) {
        return Err(Error::InvalidParameter { name: "c2".into(), reason: format!("must be positive, got {c2}") });
    }
    let hm = h_max(s, c1)?;
    if !(h > 0.0 && h < hm) {
        return Err(Error::InvalidParameter { name: "h".into(), reason: format!("h = {h} outside (0, h_max = {hm})") });
    }
    let omega = s.omega();
    let face = match profile {
        ProfileKind::Constant => Face::Constant,
        ProfileKind::Tilted => Face::Tilted { cap: c1 * h },
        ProfileKind::Wavy { slope } => {
            let slope = slope.unwrap_or(0.5 * c2);
            if !(slope.is_finite() && slope >= 0.0) {
                return Err(Error::InvalidParameter { name: "slope".into(), reason: format!("got {slope}") });
            }
            let a_theta_min = grid_min_a_theta(s, 64);
            Face::Wavy { beta: slope * omega * a_theta_min / std::f64::consts::PI }
        }
    };
    let d = ThinDomain {
        surface: s.clone(),
        h,
        profile,
        c1,
        c2,
        lower: Thickness { face: Face::Constant, h, omega },
        upper: Thickness { face, h, omega },
        h_max: hm,
    };
    d.validate()?;
    Ok(d)
}

fn grid_min_a_theta(s: &MidSurface, n: usize) -> f64 {
    let mut m = f64::INFINITY;
    for i in 0..=n {
        let th = s.omega() * i as f64 / n as f64;
        let (z0, z1) = s.z_range(th);
        for j in 0..=n {
            m = m.min(s.a_theta(th, z0 + (z1 - z0) * j as f64 / n as f64));
        }
    }
    m
}

impl ThinDomain {
    pub fn surface(&self) -> &MidSurface {
        &self.surface
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn profile(&self) -> ProfileKind {
        self.profile
    }

    pub fn c1(&self) -> f64 {
        self.c1
    }

    pub fn c2(&self) -> f64 {
        self.c2
    }

    pub fn h_max(&self) -> f64 {
        self.h_max
    }

    /// Same surface, profile and constants at a different thickness scale.
    pub fn with_h(&self, h: f64) -> Result<ThinDomain> {
        make_thin_domain(&self.surface, h, self.profile, self.c1, self.c2)
    }

    /// `(g¹, g²)` at `(θ, z)`.
    pub fn thickness(&self, theta: f64, _z: f64) -> (f64, f64) {
        (self.lower.eval(theta).0, self.upper.eval(theta).0)
    }

    /// `(∂g¹/∂θ, ∂g²/∂θ)`; the profiles do not depend on `z`.
    pub fn thickness_dtheta(&self, theta: f64) -> (f64, f64) {
        (self.lower.eval(theta).1, self.upper.eval(theta).1)
    }

    /// Surface gradients `|∇g¹|, |∇g²|` (coordinate partials divided by the metric).
    pub fn thickness_slopes(&self, theta: f64, z: f64) -> (f64, f64) {
        let p = self.surface.point(theta, z);
        let slope = |(_, gt, gz): (f64, f64, f64)| ((gt / p.a_theta).powi(2) + (gz / p.a_z).powi(2)).sqrt();
        (slope(self.lower.eval(theta)), slope(self.upper.eval(theta)))
    }

    pub fn contains(&self, t: f64, theta: f64, z: f64) -> bool {
        let (g1, g2) = self.thickness(theta, z);
        self.surface.contains(theta, z) && t >= -g1 && t <= g2
    }

    /// Volume element `A_θ A_z (1 + tκ_θ)(1 + tκ_z)`.
    pub fn jacobian(&self, t: f64, theta: f64, z: f64) -> f64 {
        let p = self.surface.point(theta, z);
        p.a_theta * p.a_z * (1.0 + t * p.kappa_theta) * (1.0 + t * p.kappa_z)
    }

    /// Checks `h ≤ gᵢ ≤ c₁h` and `|∇g¹| + |∇g²| ≤ c₂h` on a 65×65 sample.
    pub fn validate(&self) -> Result<()> {
        let mut violations = Vec::new();
        let (h, c1, c2) = (self.h, self.c1, self.c2);
        let n = 64;
        let (mut gmin, mut gmax, mut slope) = (f64::INFINITY, 0.0f64, 0.0f64);
        for i in 0..=n {
            let th = self.surface.omega() * i as f64 / n as f64;
            let (z0, z1) = self.surface.z_range(th);
            for j in 0..=n {
                let z = z0 + (z1 - z0) * j as f64 / n as f64;
                let (g1, g2) = self.thickness(th, z);
                let (s1, s2) = self.thickness_slopes(th, z);
                gmin = gmin.min(g1).min(g2);
                gmax = gmax.max(g1).max(g2);
                slope = slope.max(s1 + s2);
            }
        }
        if gmin < h * (1.0 - 1e-12) {
            violations.push(format!("min thickness {gmin:.6e} < h = {h:.6e}"));
        }
        if gmax > c1 * h * (1.0 + 1e-12) {
            violations.push(format!("max thickness {gmax:.6e} > c1·h = {:.6e}", c1 * h));
        }
        if slope > c2 * h * (1.0 + 1e-9) {
            violations.push(format!("max |∇g1|+|∇g2| = {slope:.6e} > c2·h = {:.6e}", c2 * h));
        }
        if violations.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(violations))
        }
    }
}
