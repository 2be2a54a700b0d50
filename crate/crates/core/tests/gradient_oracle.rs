//! The curvilinear gradient against a Cartesian finite-difference oracle,
//! and strain-free rigid motions on every surface kind.

use korn_core::ansatz::{make_ansatz, BumpProfile};
use korn_core::geometry::{default_surface, make_thin_domain, ProfileKind, SurfaceKind, ThinDomain};
use korn_core::shellfield::{
    eval_gradient, eval_simplified_gradient, field_norms, rigid_field_at, BumpField, QuadratureGrid, Resolution,
    ShellField,
};
use korn_core::testing::{cartesian_gradient, rng};
use rand::Rng;

fn domain(kind: SurfaceKind, h: f64, profile: ProfileKind) -> ThinDomain {
    make_thin_domain(&default_surface(kind), h, profile, 2.0, 1.0).unwrap()
}

fn random_point(d: &ThinDomain, r: &mut impl Rng) -> (f64, f64, f64) {
    let s = d.surface();
    let theta = s.omega() * r.random_range(0.02..0.98);
    let (z0, z1) = s.z_range(theta);
    let z = z0 + (z1 - z0) * r.random_range(0.02..0.98);
    let (g1, g2) = d.thickness(theta, z);
    (-g1 + (g1 + g2) * r.random_range(0.0..1.0), theta, z)
}

fn max_relative_error(f: &dyn ShellField, d: &ThinDomain, n: usize, seed: u64) -> f64 {
    let mut r = rng(seed);
    (0..n)
        .map(|_| {
            let q = random_point(d, &mut r);
            let exact = eval_gradient(f, d, q).unwrap();
            let oracle = cartesian_gradient(f, d.surface(), q, 1e-4);
            (exact - oracle).frobenius() / oracle.frobenius()
        })
        .fold(0.0, f64::max)
}

#[test]
fn bump_field_gradient_matches_cartesian_oracle() {
    for kind in SurfaceKind::ALL {
        for profile in [ProfileKind::Constant, ProfileKind::Tilted, ProfileKind::Wavy { slope: None }] {
            let d = domain(kind, 0.05, profile);
            let f = BumpField::random(&mut rng(21), d.surface(), 3);
            let err = max_relative_error(&f, &d, 200, 5);
            assert!(err < 1e-7, "{kind} {profile:?}: {err:e}");
        }
    }
}

#[test]
fn ansatz_gradient_matches_cartesian_oracle() {
    for kind in SurfaceKind::ALL {
        let d = domain(kind, 0.02, ProfileKind::Constant);
        let f = make_ansatz(BumpProfile::for_surface(d.surface()), &d).unwrap();
        let ((th0, th1), (z0, z1)) = f.support_box();
        let mut r = rng(9);
        for _ in 0..100 {
            let theta = th0 + (th1 - th0) * r.random_range(0.1..0.9);
            let z = z0 + (z1 - z0) * r.random_range(0.1..0.9);
            let t = 0.02 * r.random_range(-0.9..0.9);
            let exact = eval_gradient(&f, &d, (t, theta, z)).unwrap();
            let oracle = cartesian_gradient(&f, d.surface(), (t, theta, z), 1e-5);
            let scale = oracle.frobenius().max(1e-3 * f.profile().amplitude);
            assert!((exact - oracle).frobenius() <= 1e-4 * scale, "{kind} at {:?}", (t, theta, z));
        }
    }
}

#[test]
fn simplified_gradient_defect_is_order_h() {
    for kind in SurfaceKind::ALL {
        let d = domain(kind, 0.02, ProfileKind::Constant);
        let f = BumpField::random(&mut rng(4), d.surface(), 3);
        let k = korn_core::geometry::domain_params(d.surface(), 64).unwrap().k;
        let bound = 2.0 * d.c1() * k / (1.0 - d.c1() * k * d.h());
        let mut r = rng(8);
        for _ in 0..50 {
            let q = random_point(&d, &mut r);
            let g = eval_gradient(&f, &d, q).unwrap();
            let fs = eval_simplified_gradient(&f, &d, q).unwrap();
            assert!((fs - g).frobenius() <= bound * d.h() * g.frobenius() + 1e-14, "{kind}");
        }
    }
}

#[test]
fn rigid_fields_are_strain_free_to_second_order() {
    let mut r = rng(17);
    for kind in SurfaceKind::ALL {
        let d = domain(kind, 0.02, ProfileKind::Constant);
        let axis: [f64; 3] = std::array::from_fn(|_| r.random_range(-1.0..1.0));
        let center: [f64; 3] = std::array::from_fn(|_| r.random_range(-1.0..1.0));
        let ratio = |res: Resolution| {
            let f = rigid_field_at(axis, center, &d, res);
            let n = field_norms(&f, &d, &QuadratureGrid::new(&d, res).unwrap(), 2.0).unwrap();
            n.strain / n.grad
        };
        let coarse = ratio(Resolution::new(32, 32, 4));
        let fine = ratio(Resolution::new(64, 64, 8));
        assert!(coarse < 1e-6, "{kind}: {coarse:e}");
        assert!(coarse < 1e-12 || fine * 3.0 <= coarse, "{kind}: {coarse:e} -> {fine:e}");
    }
}
