use super::domain::ThinDomain2D;
use crate::error::{check_exponent, Error, Result};
use crate::numerics::pairwise_sum;

/// Uniform grid in the boundary-fitted coordinates `(s, y) ∈ [0,1]×[0,b]`,
/// `x = −φ₁(y) + s(φ₁(y) + φ₂(y))`. Nodes are numbered with `s` fastest.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid2D {
    pub domain: ThinDomain2D,
    pub n_s: usize,
    pub n_y: usize,
}

/// Map coefficients at one node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Metric {
    /// `φ₁ + φ₂`
    pub big_h: f64,
    pub s_y: f64,
    pub s_yy: f64,
}

impl Grid2D {
    pub fn new(domain: ThinDomain2D, n_s: usize, n_y: usize) -> Result<Self> {
        if n_s < 2 || n_y < 2 {
            return Err(Error::Resolution(format!("grid ({n_s}, {n_y}) too coarse")));
        }
        Ok(Self { domain, n_s, n_y })
    }

    pub fn len(&self) -> usize {
        (self.n_s + 1) * (self.n_y + 1)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        j * (self.n_s + 1) + i
    }

    pub fn ds(&self) -> f64 {
        1.0 / self.n_s as f64
    }

    pub fn dy(&self) -> f64 {
        self.domain.b / self.n_y as f64
    }

    pub fn s(&self, i: usize) -> f64 {
        i as f64 / self.n_s as f64
    }

    pub fn y(&self, j: usize) -> f64 {
        self.domain.b * j as f64 / self.n_y as f64
    }

    /// Physical position of node `(i, j)`.
    pub fn xy(&self, i: usize, j: usize) -> (f64, f64) {
        let y = self.y(j);
        (self.domain.x_at(self.s(i), y), y)
    }

    pub fn is_boundary(&self, i: usize, j: usize) -> bool {
        i == 0 || j == 0 || i == self.n_s || j == self.n_y
    }

    pub(crate) fn metric(&self, i: usize, j: usize) -> Metric {
        let y = self.y(j);
        let s = self.s(i);
        let (p1, d1, dd1) = self.domain.phi1(y);
        let (p2, d2, dd2) = self.domain.phi2(y);
        let (big_h, dh, ddh) = (p1 + p2, d1 + d2, dd1 + dd2);
        let s_y = (d1 - s * dh) / big_h;
        let s_yy = (dd1 - s * ddh) / big_h - 2.0 * s_y * dh / big_h;
        Metric { big_h, s_y, s_yy }
    }

    /// Trapezoid weights including the area element `H ds dy`.
    pub fn weights(&self) -> Vec<f64> {
        let mut w = vec![0.0; self.len()];
        for j in 0..=self.n_y {
            let cy = if j == 0 || j == self.n_y { 0.5 } else { 1.0 };
            let hy = self.domain.phi1(self.y(j)).0 + self.domain.phi2(self.y(j)).0;
            for i in 0..=self.n_s {
                let cs = if i == 0 || i == self.n_s { 0.5 } else { 1.0 };
                w[self.idx(i, j)] = cs * cy * hy * self.ds() * self.dy();
            }
        }
        w
    }

    /// `∂/∂s` at a node: centered inside, second-order one-sided at the ends.
    pub fn d_s(&self, v: &[f64], i: usize, j: usize) -> f64 {
        let at = |ii: usize| v[self.idx(ii, j)];
        let h = self.ds();
        if i == 0 {
            (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * h)
        } else if i == self.n_s {
            (3.0 * at(i) - 4.0 * at(i - 1) + at(i - 2)) / (2.0 * h)
        } else {
            (at(i + 1) - at(i - 1)) / (2.0 * h)
        }
    }

    /// `∂/∂y` at fixed `s`.
    pub fn d_y(&self, v: &[f64], i: usize, j: usize) -> f64 {
        let at = |jj: usize| v[self.idx(i, jj)];
        let h = self.dy();
        if j == 0 {
            (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * h)
        } else if j == self.n_y {
            (3.0 * at(j) - 4.0 * at(j - 1) + at(j - 2)) / (2.0 * h)
        } else {
            (at(j + 1) - at(j - 1)) / (2.0 * h)
        }
    }

    /// Fourth-order `∂/∂y` at fixed `s`: five-point stencils, shifted at the ends.
    pub(crate) fn d_y4(&self, v: &[f64], i: usize, j: usize) -> f64 {
        let at = |jj: usize| v[self.idx(i, jj)];
        let n = self.n_y;
        let h = 12.0 * self.dy();
        match j {
            0 => (-25.0 * at(0) + 48.0 * at(1) - 36.0 * at(2) + 16.0 * at(3) - 3.0 * at(4)) / h,
            1 => (-3.0 * at(0) - 10.0 * at(1) + 18.0 * at(2) - 6.0 * at(3) + at(4)) / h,
            _ if j == n => {
                (25.0 * at(n) - 48.0 * at(n - 1) + 36.0 * at(n - 2) - 16.0 * at(n - 3) + 3.0 * at(n - 4)) / h
            }
            _ if j == n - 1 => (3.0 * at(n) + 10.0 * at(n - 1) - 18.0 * at(n - 2) + 6.0 * at(n - 3) - at(n - 4)) / h,
            _ => (at(j - 2) - 8.0 * at(j - 1) + 8.0 * at(j + 1) - at(j + 2)) / h,
        }
    }

    /// `∂_y` of nodal values with the fourth-order `y`-stencil.
    pub(crate) fn gradient_y4(&self, v: &[f64]) -> Vec<f64> {
        let mut gy = vec![0.0; self.len()];
        for j in 0..=self.n_y {
            for i in 0..=self.n_s {
                gy[self.idx(i, j)] = self.d_y4(v, i, j) + self.metric(i, j).s_y * self.d_s(v, i, j);
            }
        }
        gy
    }

    /// Physical gradient `(∂_x, ∂_y)` of nodal values at every node.
    pub fn gradient(&self, v: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let mut gx = vec![0.0; self.len()];
        let mut gy = vec![0.0; self.len()];
        for j in 0..=self.n_y {
            for i in 0..=self.n_s {
                let m = self.metric(i, j);
                let vs = self.d_s(v, i, j);
                let k = self.idx(i, j);
                gx[k] = vs / m.big_h;
                gy[k] = self.d_y(v, i, j) + m.s_y * vs;
            }
        }
        (gx, gy)
    }

    /// Trapezoid `L^p` norm of nodal values.
    pub fn lp_norm(&self, v: &[f64], p: f64) -> Result<f64> {
        check_exponent(p)?;
        Ok(self.lp_norm_weighted(v, &self.weights(), p))
    }

    pub(crate) fn lp_norm_weighted(&self, v: &[f64], w: &[f64], p: f64) -> f64 {
        let terms: Vec<f64> = v.iter().zip(w).map(|(x, w)| w * x.abs().powf(p)).collect();
        pairwise_sum(&terms).powf(1.0 / p)
    }
}
