//! Helpers shared by the test suites: seeded generators and independent
//! finite-difference oracles.

use nalgebra::{Matrix3, Vector3};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::geometry::MidSurface;
use crate::shellfield::{FrameMatrix, Jet, ShellField};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Fourth-order centered differences of `f` in `(t, θ, z)`.
pub fn fd_jet(f: &dyn ShellField, (t, theta, z): (f64, f64, f64), step: f64) -> Jet {
    let q = [t, theta, z];
    let mut grad = [[0.0; 3]; 3];
    for j in 0..3 {
        let at = |k: f64| {
            let mut p = q;
            p[j] += k * step;
            f.value(p[0], p[1], p[2])
        };
        let (p1, m1, p2, m2) = (at(1.0), at(-1.0), at(2.0), at(-2.0));
        for i in 0..3 {
            grad[i][j] = (8.0 * (p1[i] - m1[i]) - (p2[i] - m2[i])) / (12.0 * step);
        }
    }
    Jet { value: f.value(t, theta, z), grad }
}

/// Gradient of `u` in the frame `(n, e_θ, e_z)`, computed without the
/// curvature formula: the field is pushed to Cartesian components
/// `U(q) = Σ uᵢ(q) fᵢ(q)`, both `U` and the embedding `X(q)` are
/// differentiated numerically, and `∇U = J_U J_X⁻¹` is rotated back into
/// the frame at the point.
pub fn cartesian_gradient(
    f: &dyn ShellField,
    s: &MidSurface,
    (t, theta, z): (f64, f64, f64),
    step: f64,
) -> FrameMatrix {
    let cart = |q: [f64; 3]| -> (Vector3<f64>, Vector3<f64>) {
        let p = s.point(q[1], q[2]);
        let u = f.value(q[0], q[1], q[2]);
        let frame = [p.normal, p.e_theta, p.e_z];
        let big_u = Vector3::from_fn(|k, _| (0..3).map(|i| u[i] * frame[i][k]).sum());
        let x = Vector3::from_fn(|k, _| p.position[k] + q[0] * p.normal[k]);
        (big_u, x)
    };
    let q = [t, theta, z];
    let mut ju = Matrix3::zeros();
    let mut jx = Matrix3::zeros();
    for j in 0..3 {
        let at = |k: f64| {
            let mut p = q;
            p[j] += k * step;
            cart(p)
        };
        let (p1, m1, p2, m2) = (at(1.0), at(-1.0), at(2.0), at(-2.0));
        let d = |a: Vector3<f64>, b: Vector3<f64>, c: Vector3<f64>, e: Vector3<f64>| {
            (8.0 * (a - b) - (c - e)) / (12.0 * step)
        };
        ju.set_column(j, &d(p1.0, m1.0, p2.0, m2.0));
        jx.set_column(j, &d(p1.1, m1.1, p2.1, m2.1));
    }
    let grad = ju * jx.try_inverse().expect("embedding is a local diffeomorphism");
    let p = s.point(theta, z);
    let frame = Matrix3::from_columns(&[Vector3::from(p.normal), Vector3::from(p.e_theta), Vector3::from(p.e_z)]);
    let local = frame.transpose() * grad * frame;
    FrameMatrix(std::array::from_fn(|i| std::array::from_fn(|j| local[(i, j)])))
}
