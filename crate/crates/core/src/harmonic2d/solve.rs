use super::domain::ThinDomain2D;
use super::grid::Grid2D;
use crate::error::{Error, Result};
use crate::numerics::banded::Band;

/// Discrete harmonic function on a boundary-fitted grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Harmonic2DSolution {
    pub grid: Grid2D,
    /// Nodal values, `s` fastest.
    pub w: Vec<f64>,
    /// Max-norm residual of the diagonally scaled system.
    pub residual: f64,
}

/// Solves `Δw = 0` with `w = g` on `∂D`, using the Laplacian transformed to
/// `(s, y)` and discretized by a nine-point stencil.
pub fn solve_harmonic(
    d2: &ThinDomain2D,
    boundary: &dyn Fn(f64, f64) -> f64,
    n_s: usize,
    n_y: usize,
) -> Result<Harmonic2DSolution> {
    if n_s < 8 || n_y < 64 {
        return Err(Error::Resolution(format!("need n_s ≥ 8 and n_y ≥ 64, got ({n_s}, {n_y})")));
    }
    let grid = Grid2D::new(*d2, n_s, n_y)?;
    let n = grid.len();
    let bw = n_s + 2;
    let mut a = Band::zeros(n, bw, bw);
    let mut rhs = vec![0.0; n];
    let (ds, dy) = (grid.ds(), grid.dy());
    for j in 0..=n_y {
        for i in 0..=n_s {
            let r = grid.idx(i, j);
            if grid.is_boundary(i, j) {
                let (x, y) = grid.xy(i, j);
                a.set(r, r, 1.0);
                rhs[r] = boundary(x, y);
                continue;
            }
            let m = grid.metric(i, j);
            // (1/H² + s_y²) W_ss + 2 s_y W_sy + W_yy + s_yy W_s = 0
            let c_ss = 1.0 / (m.big_h * m.big_h) + m.s_y * m.s_y;
            let c_sy = 2.0 * m.s_y;
            let c_s = m.s_yy;
            let diag = -2.0 * c_ss / (ds * ds) - 2.0 / (dy * dy);
            let scale = 1.0 / diag;
            let mut put = |ii: usize, jj: usize, v: f64| {
                let c = grid.idx(ii, jj);
                a.set(r, c, a.get(r, c) + v * scale);
            };
            put(i, j, diag);
            put(i + 1, j, c_ss / (ds * ds) + c_s / (2.0 * ds));
            put(i - 1, j, c_ss / (ds * ds) - c_s / (2.0 * ds));
            put(i, j + 1, 1.0 / (dy * dy));
            put(i, j - 1, 1.0 / (dy * dy));
            let x = c_sy / (4.0 * ds * dy);
            put(i + 1, j + 1, x);
            put(i - 1, j - 1, x);
            put(i + 1, j - 1, -x);
            put(i - 1, j + 1, -x);
        }
    }
    let lu = a.lu()?;
    let mut w = rhs.clone();
    lu.solve(&mut w);
    let residual_of = |w: &[f64]| {
        let mut r = vec![0.0; n];
        a.matvec(w, &mut r);
        r.iter_mut().zip(&rhs).for_each(|(ri, bi)| *ri -= bi);
        r
    };
    let mut history = Vec::new();
    for _ in 0..4 {
        let r = residual_of(&w);
        let rmax = r.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let wmax = w.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        history.push(rmax);
        if rmax <= 1e-10 * wmax || rmax == 0.0 {
            // boundary rows are identities: reimpose the data exactly
            for j in 0..=n_y {
                for i in 0..=n_s {
                    if grid.is_boundary(i, j) {
                        let k = grid.idx(i, j);
                        w[k] = rhs[k];
                    }
                }
            }
            return Ok(Harmonic2DSolution { grid, w, residual: rmax });
        }
        let mut corr = r;
        lu.solve(&mut corr);
        w.iter_mut().zip(&corr).for_each(|(wi, ci)| *wi -= ci);
    }
    Err(Error::NonConvergence { message: "harmonic solve residual above 1e-10·‖w‖".into(), history })
}

impl Harmonic2DSolution {
    /// `(∂_x w, ∂_y w)` at every node.
    pub fn gradient(&self) -> (Vec<f64>, Vec<f64>) {
        self.grid.gradient(&self.w)
    }

    pub fn domain(&self) -> &ThinDomain2D {
        &self.grid.domain
    }
}
