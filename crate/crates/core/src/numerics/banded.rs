//! Banded direct solvers: symmetric positive definite (Cholesky) and general
//! (LU with partial pivoting).

use crate::error::{Error, Result};

/// Symmetric banded matrix, lower band stored row-wise.
///
/// Row `i` holds `A[i][i - k]` for `k = 0..=bw`.
#[derive(Debug, Clone)]
pub struct SymBand {
    n: usize,
    bw: usize,
    data: Vec<f64>,
}

impl SymBand {
    pub fn zeros(n: usize, bw: usize) -> Self {
        Self { n, bw, data: vec![0.0; n * (bw + 1)] }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.bw
    }

    #[inline]
    fn idx(&self, i: usize, k: usize) -> usize {
        i * (self.bw + 1) + k
    }

    /// Entry `(i, j)`; zero outside the band.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        let k = i - j;
        if k > self.bw {
            0.0
        } else {
            self.data[self.idx(i, k)]
        }
    }

    /// Adds `v` to entries `(i, j)` and `(j, i)`.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        let k = i - j;
        assert!(k <= self.bw, "entry ({i}, {j}) outside bandwidth {}", self.bw);
        let ix = self.idx(i, k);
        self.data[ix] += v;
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.n);
        assert_eq!(y.len(), self.n);
        y.iter_mut().for_each(|v| *v = 0.0);
        for i in 0..self.n {
            let d = self.data[self.idx(i, 0)];
            let mut acc = d * x[i];
            for k in 1..=self.bw.min(i) {
                let a = self.data[self.idx(i, k)];
                acc += a * x[i - k];
                y[i - k] += a * x[i];
            }
            y[i] += acc;
        }
    }

    /// Dense copy, for small problems and tests.
    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        nalgebra::DMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j))
    }

    pub fn cholesky(&self) -> Result<BandCholesky> {
        let (n, bw) = (self.n, self.bw);
        let mut l = self.data.clone();
        let at = |i: usize, k: usize| i * (bw + 1) + k;
        for i in 0..n {
            let k0 = bw.min(i);
            // off-diagonal entries L[i][j], j = i - k
            for k in (1..=k0).rev() {
                let j = i - k;
                let mut s = l[at(i, k)];
                // sum over m < j within both bands
                let lo = i.saturating_sub(bw).max(j.saturating_sub(bw));
                for m in lo..j {
                    s -= l[at(i, i - m)] * l[at(j, j - m)];
                }
                l[at(i, k)] = s / l[at(j, 0)];
            }
            let mut d = l[at(i, 0)];
            for k in 1..=k0 {
                d -= l[at(i, k)] * l[at(i, k)];
            }
            if !(d > 0.0) || !d.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "matrix is not positive definite (pivot {d:e} at row {i})"
                )));
            }
            l[at(i, 0)] = d.sqrt();
        }
        Ok(BandCholesky { n, bw, l })
    }
}

/// Banded Cholesky factor `A = L Lᵀ`.
#[derive(Debug, Clone)]
pub struct BandCholesky {
    n: usize,
    bw: usize,
    l: Vec<f64>,
}

impl BandCholesky {
    #[inline]
    fn at(&self, i: usize, k: usize) -> f64 {
        self.l[i * (self.bw + 1) + k]
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// In place `x ← L⁻¹ x`.
    pub fn solve_lower(&self, x: &mut [f64]) {
        for i in 0..self.n {
            let mut s = x[i];
            for k in 1..=self.bw.min(i) {
                s -= self.at(i, k) * x[i - k];
            }
            x[i] = s / self.at(i, 0);
        }
    }

    /// In place `x ← L⁻ᵀ x`.
    pub fn solve_upper(&self, x: &mut [f64]) {
        for i in (0..self.n).rev() {
            let xi = x[i] / self.at(i, 0);
            x[i] = xi;
            for k in 1..=self.bw.min(i) {
                x[i - k] -= self.at(i, k) * xi;
            }
        }
    }

    /// In place `x ← A⁻¹ x`.
    pub fn solve(&self, x: &mut [f64]) {
        self.solve_lower(x);
        self.solve_upper(x);
    }
}

/// General banded matrix with `kl` sub- and `ku` super-diagonals, stored with
/// room for the fill produced by partial pivoting.
#[derive(Debug, Clone)]
pub struct Band {
    n: usize,
    kl: usize,
    ku: usize,
    data: Vec<f64>,
}

impl Band {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let w = 2 * kl + ku + 1;
        Self { n, kl, ku, data: vec![0.0; n * w] }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    fn width(&self) -> usize {
        2 * self.kl + self.ku + 1
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        i * self.width() + (j + self.kl - i)
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        assert!(j + self.kl >= i && j <= i + self.ku, "entry ({i}, {j}) outside band");
        let ix = self.idx(i, j);
        self.data[ix] = v;
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if j + self.kl < i || j > i + self.ku {
            0.0
        } else {
            self.data[self.idx(i, j)]
        }
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        for i in 0..self.n {
            let lo = i.saturating_sub(self.kl);
            let hi = (i + self.ku).min(self.n - 1);
            y[i] = (lo..=hi).map(|j| self.data[self.idx(i, j)] * x[j]).sum();
        }
    }

    pub fn lu(&self) -> Result<BandLu> {
        let (n, kl, ku) = (self.n, self.kl, self.ku);
        let mut a = self.clone();
        let mut piv = vec![0usize; n];
        let reach = kl + ku;
        for k in 0..n {
            let last = (k + kl).min(n - 1);
            let mut p = k;
            let mut best = a.data[a.idx(k, k)].abs();
            for i in k + 1..=last {
                let v = a.data[a.idx(i, k)].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == 0.0 || !best.is_finite() {
                return Err(Error::InvalidArgument(format!("singular banded matrix at column {k}")));
            }
            piv[k] = p;
            let jmax = (k + reach).min(n - 1);
            if p != k {
                for j in k..=jmax {
                    let (ia, ib) = (a.idx(k, j), a.idx(p, j));
                    a.data.swap(ia, ib);
                }
            }
            let pivot = a.data[a.idx(k, k)];
            for i in k + 1..=last {
                let ik = a.idx(i, k);
                let m = a.data[ik] / pivot;
                a.data[ik] = m;
                if m != 0.0 {
                    for j in k + 1..=jmax {
                        let kj = a.data[a.idx(k, j)];
                        let ij = a.idx(i, j);
                        a.data[ij] -= m * kj;
                    }
                }
            }
        }
        Ok(BandLu { a, piv })
    }
}

/// LU factors of a [`Band`] matrix.
#[derive(Debug, Clone)]
pub struct BandLu {
    a: Band,
    piv: Vec<usize>,
}

impl BandLu {
    pub fn solve(&self, x: &mut [f64]) {
        let a = &self.a;
        let (n, kl) = (a.n, a.kl);
        let reach = a.kl + a.ku;
        for k in 0..n {
            let p = self.piv[k];
            if p != k {
                x.swap(k, p);
            }
            let xk = x[k];
            for i in k + 1..=(k + kl).min(n - 1) {
                x[i] -= a.data[a.idx(i, k)] * xk;
            }
        }
        for k in (0..n).rev() {
            let mut s = x[k];
            for j in k + 1..=(k + reach).min(n - 1) {
                s -= a.data[a.idx(k, j)] * x[j];
            }
            x[k] = s / a.data[a.idx(k, k)];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, DVector};

    fn spd_band(n: usize, bw: usize) -> SymBand {
        let mut a = SymBand::zeros(n, bw);
        for i in 0..n {
            a.add(i, i, 4.0 + bw as f64 + (i % 3) as f64);
            for k in 1..=bw.min(i) {
                a.add(i, i - k, -1.0 / (k as f64 + 0.5) + 0.01 * ((i * 7 + k) % 5) as f64);
            }
        }
        a
    }

    #[test]
    fn cholesky_solves_against_dense() {
        let a = spd_band(40, 5);
        let b: Vec<f64> = (0..40).map(|i| (i as f64 * 0.37).sin()).collect();
        let mut x = b.clone();
        a.cholesky().unwrap().solve(&mut x);
        let dense = a.to_dense();
        let r = &dense * DVector::from_vec(x) - DVector::from_vec(b);
        assert!(r.amax() < 1e-12);
    }

    #[test]
    fn symmetric_matvec_matches_dense() {
        let a = spd_band(17, 3);
        let x: Vec<f64> = (0..17).map(|i| i as f64 - 8.0).collect();
        let mut y = vec![0.0; 17];
        a.matvec(&x, &mut y);
        let yd = a.to_dense() * DVector::from_vec(x);
        for i in 0..17 {
            assert!((y[i] - yd[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn not_positive_definite_is_rejected() {
        let mut a = SymBand::zeros(3, 1);
        a.add(0, 0, 1.0);
        a.add(1, 1, -1.0);
        a.add(2, 2, 1.0);
        assert!(a.cholesky().is_err());
    }

    #[test]
    fn lu_with_pivoting_matches_dense() {
        let n = 30;
        let (kl, ku) = (3, 2);
        let mut a = Band::zeros(n, kl, ku);
        let mut dense = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i.saturating_sub(kl)..=(i + ku).min(n - 1) {
                // weak diagonal so that pivoting is exercised
                let v = if i == j { 0.1 } else { ((i * 31 + j * 17) % 11) as f64 - 5.0 };
                a.set(i, j, v);
                dense[(i, j)] = v;
            }
        }
        let b: Vec<f64> = (0..n).map(|i| 1.0 + i as f64).collect();
        let mut x = b.clone();
        a.lu().unwrap().solve(&mut x);
        let r = &dense * DVector::from_vec(x) - DVector::from_vec(b);
        assert!(r.amax() < 1e-9, "{}", r.amax());
    }
}
