//! Largest eigenvalue of a symmetric-definite pencil `K x = λ M x`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;

use crate::error::{Error, Result};
use crate::numerics::banded::SymBand;

/// Outcome of an eigenvalue solve.
#[derive(Debug, Clone, PartialEq)]
pub struct TopEigen {
    pub value: f64,
    /// `M`-normalized eigenvector.
    pub vector: Vec<f64>,
    /// Krylov steps taken (0 for the dense route).
    pub iterations: usize,
    /// Largest Ritz value at each convergence check.
    pub history: Vec<f64>,
}

const SEED: u64 = 0x4b6f_726e;
const CHECK_EVERY: usize = 4;

/// Lanczos with full reorthogonalization on `L⁻¹ K L⁻ᵀ`, `M = L Lᵀ`.
///
/// Stops when the residual bound `β_m |s_m|` of the top Ritz pair is below
/// `rel_tol·θ`, or when the Krylov space becomes invariant.
pub fn lanczos_top(k: &SymBand, m: &SymBand, rel_tol: f64, max_steps: usize) -> Result<TopEigen> {
    let n = k.dim();
    if m.dim() != n || n == 0 {
        return Err(Error::InvalidArgument(format!("pencil dimensions {n} and {}", m.dim())));
    }
    let chol = m.cholesky().map_err(|e| Error::Degenerate(format!("mass form is not definite: {e}")))?;
    let apply = |x: &[f64], out: &mut Vec<f64>| {
        let mut y = x.to_vec();
        chol.solve_upper(&mut y);
        k.matvec(&y, out);
        chol.solve_lower(out);
    };

    let mut rng = crate::testing::rng(SEED);
    let mut q0: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    normalize(&mut q0);
    let mut basis: Vec<Vec<f64>> = vec![q0];
    let (mut alpha, mut beta) = (Vec::new(), Vec::new());
    let mut history = Vec::new();
    let mut w = vec![0.0; n];
    let steps = max_steps.min(n);
    for j in 0..steps {
        apply(&basis[j], &mut w);
        let a = dot(&basis[j], &w);
        alpha.push(a);
        // two passes of classical Gram-Schmidt against the whole basis
        for _ in 0..2 {
            for q in &basis {
                let c = dot(q, &w);
                axpy(-c, q, &mut w);
            }
        }
        let b = dot(&w, &w).sqrt();
        let last = j + 1 == steps;
        let invariant = b <= 1e-13 * alpha.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
        if invariant || last || (j + 1) % CHECK_EVERY == 0 {
            let (theta, s) = top_ritz(&alpha, &beta);
            history.push(theta);
            let resid = b * s[s.len() - 1].abs();
            if invariant || resid <= rel_tol * theta.abs() || theta == 0.0 && resid == 0.0 {
                let mut y = vec![0.0; n];
                for (q, c) in basis.iter().zip(s.iter()) {
                    axpy(*c, q, &mut y);
                }
                chol.solve_upper(&mut y);
                return Ok(TopEigen { value: theta, vector: y, iterations: j + 1, history });
            }
            if last {
                break;
            }
        }
        beta.push(b);
        let mut q = std::mem::take(&mut w);
        q.iter_mut().for_each(|v| *v /= b);
        basis.push(q);
        w = vec![0.0; n];
    }
    Err(Error::NonConvergence { message: format!("Lanczos did not converge in {steps} steps"), history })
}

fn top_ritz(alpha: &[f64], beta: &[f64]) -> (f64, Vec<f64>) {
    let m = alpha.len();
    let t = DMatrix::from_fn(m, m, |i, j| {
        if i == j {
            alpha[i]
        } else if i == j + 1 {
            beta[j]
        } else if j == i + 1 {
            beta[i]
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(t);
    let (imax, &theta) =
        eig.eigenvalues.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).expect("nonempty tridiagonal");
    (theta, eig.eigenvectors.column(imax).iter().copied().collect())
}

/// Dense route through `nalgebra`: Cholesky of `M` and a full symmetric
/// eigendecomposition of `L⁻¹ K L⁻ᵀ`.
pub fn dense_top(k: &DMatrix<f64>, m: &DMatrix<f64>) -> Result<TopEigen> {
    let chol = m
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Degenerate("mass form is not definite (dependent or zero fields)".into()))?;
    let l = chol.l();
    let linv = l.clone().try_inverse().ok_or_else(|| Error::Degenerate("singular Cholesky factor".into()))?;
    let mut a = &linv * k * linv.transpose();
    a = (&a + a.transpose()) * 0.5;
    let eig = SymmetricEigen::new(a);
    let (imax, &value) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .ok_or_else(|| Error::Degenerate("empty pencil".into()))?;
    let y: DVector<f64> = linv.transpose() * eig.eigenvectors.column(imax);
    Ok(TopEigen { value, vector: y.iter().copied().collect(), iterations: 0, history: vec![value] })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(c: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += c * xi;
    }
}

fn normalize(x: &mut [f64]) {
    let n = dot(x, x).sqrt();
    x.iter_mut().for_each(|v| *v /= n);
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random_pencil(n: usize, bw: usize, seed: u64) -> (SymBand, SymBand) {
        let mut rng = crate::testing::rng(seed);
        let mut k = SymBand::zeros(n, bw);
        let mut m = SymBand::zeros(n, bw);
        for i in 0..n {
            for j in i.saturating_sub(bw)..=i {
                let v: f64 = rng.random_range(-1.0..1.0);
                k.add(i, j, v);
                // pentadiagonal, diagonally dominant mass
                if i - j <= 1 {
                    m.add(i, j, if i == j { 4.0 } else { 0.5 * v });
                }
            }
        }
        // make K positive semidefinite-ish by shifting
        for i in 0..n {
            k.add(i, i, 2.0 * bw as f64);
        }
        (k, m)
    }

    #[test]
    fn lanczos_matches_dense() {
        for seed in 0..4 {
            let (k, m) = random_pencil(120, 5, seed);
            let a = lanczos_top(&k, &m, 1e-10, 400).unwrap();
            let b = dense_top(&k.to_dense(), &m.to_dense()).unwrap();
            assert!((a.value - b.value).abs() <= 1e-8 * b.value.abs(), "{} vs {}", a.value, b.value);
            // eigen-equation residual
            let mut kx = vec![0.0; 120];
            let mut mx = vec![0.0; 120];
            k.matvec(&a.vector, &mut kx);
            m.matvec(&a.vector, &mut mx);
            let r: f64 = kx.iter().zip(&mx).map(|(p, q)| (p - a.value * q).powi(2)).sum::<f64>().sqrt();
            assert!(r <= 1e-6 * a.value, "residual {r}");
        }
    }

    #[test]
    fn zero_stiffness_gives_zero() {
        let k = SymBand::zeros(10, 1);
        let mut m = SymBand::zeros(10, 1);
        (0..10).for_each(|i| m.add(i, i, 1.0));
        assert_eq!(lanczos_top(&k, &m, 1e-6, 50).unwrap().value, 0.0);
    }

    #[test]
    fn non_convergence_reports_history() {
        let (k, m) = random_pencil(200, 3, 9);
        match lanczos_top(&k, &m, 1e-14, 8) {
            Err(Error::NonConvergence { history, .. }) => assert!(!history.is_empty()),
            other => panic!("{:?}", other.map(|e| e.value)),
        }
    }

    #[test]
    fn indefinite_mass_is_rejected() {
        let mut k = SymBand::zeros(3, 0);
        let mut m = SymBand::zeros(3, 0);
        for i in 0..3 {
            k.add(i, i, 1.0);
            m.add(i, i, if i == 1 { 0.0 } else { 1.0 });
        }
        assert!(matches!(lanczos_top(&k, &m, 1e-6, 10), Err(Error::Degenerate(_))));
    }
}
