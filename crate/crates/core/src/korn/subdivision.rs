//! Partition of a thin domain into pieces of size about `h` and the summed
//! extension estimate over the pieces.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{check_exponent, Error, Result};
use crate::geometry::ThinDomain;
use crate::numerics::pairwise_sum;
use crate::shellfield::{eval_gradient, QuadratureGrid, Region, Resolution, ShellField};

/// Norms on one piece `Ω_ij` (`p`-th powers).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PieceStats {
    pub i: usize,
    pub j: usize,
    /// `∫_{Ω_ij} |∇u|^p`
    pub grad_p: f64,
    /// `∫ |∇u|^p` over the inner shell `|t| < h` of the piece
    pub inner_grad_p: f64,
    /// `∫_{Ω_ij} |e(u)|^p`
    pub strain_p: f64,
}

impl PieceStats {
    /// `‖∇u‖ / (‖∇u‖_inner + ‖e(u)‖)` on this piece; `None` if both sides vanish.
    pub fn ratio(&self, p: f64) -> Option<f64> {
        let (l, r) = (self.grad_p.powf(1.0 / p), self.inner_grad_p.powf(1.0 / p) + self.strain_p.powf(1.0 / p));
        if r > 0.0 {
            Some(l / r)
        } else if l > 0.0 {
            Some(f64::INFINITY)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubdivisionReport {
    pub h: f64,
    pub p: f64,
    /// Pieces per direction, `N = ⌊1/h⌋ + 1`.
    pub n: usize,
    pub pieces: Vec<PieceStats>,
    /// `(Σ ∫|∇u|^p)^{1/p}` over the pieces.
    pub lhs: f64,
    /// `(Σ ∫_inner |∇u|^p)^{1/p} + (Σ ∫|e(u)|^p)^{1/p}`
    pub rhs: f64,
    /// `lhs / rhs`
    pub c_aggregate: f64,
    /// Largest per-piece ratio.
    pub c_max_piece: f64,
    /// `∫_Ω |∇u|^p` evaluated directly on the whole domain.
    pub direct_grad_p: f64,
    /// `|Σ_pieces − direct| / direct` for `∫|∇u|^p`.
    pub additivity_error: f64,
}

/// Cells per piece in `θ` and `z`, and through the thickness.
pub const CELLS_PER_PIECE: usize = 2;
pub const THICKNESS_CELLS: usize = 4;

pub fn subdivision_run(d: &ThinDomain, field: &dyn ShellField, p: f64) -> Result<SubdivisionReport> {
    subdivision_run_with(d, field, p, CELLS_PER_PIECE, THICKNESS_CELLS)
}

/// Pieces are the images of the `N × N` squares of the normalized
/// `(θ/ω, s)` square; each is covered by `m × m × n_t` quadrature cells.
pub fn subdivision_run_with(
    d: &ThinDomain,
    field: &dyn ShellField,
    p: f64,
    m: usize,
    n_t: usize,
) -> Result<SubdivisionReport> {
    check_exponent(p)?;
    if m == 0 || n_t == 0 {
        return Err(Error::Resolution(format!("piece grid {m}×{m}×{n_t} is empty")));
    }
    let h = d.h();
    let n = (1.0 / h).floor() as usize + 1;
    let res = Resolution::new(n * m, n * m, n_t);
    let full = QuadratureGrid::new(d, res)?;
    let inner = QuadratureGrid::over_region(d, Region { t_window: Some((-h, h)), ..Region::default() }, res)?;

    let values = |grid: &QuadratureGrid, with_strain: bool| -> Result<Vec<[f64; 2]>> {
        grid.points()
            .par_iter()
            .map(|q| {
                let g = eval_gradient(field, d, (q.t, q.theta, q.z))?;
                let e = if with_strain { g.symmetrize().frobenius().powf(p) } else { 0.0 };
                let v = [q.weight * g.frobenius().powf(p), q.weight * e];
                if v.iter().all(|x| x.is_finite()) {
                    Ok(v)
                } else {
                    Err(Error::Evaluation { t: q.t, theta: q.theta, z: q.z })
                }
            })
            .collect()
    };
    let vf = values(&full, true)?;
    let vi = values(&inner, false)?;

    let piece_of = |cell: [u32; 3]| (cell[0] as usize / m) * n + cell[1] as usize / m;
    let mut buckets = vec![[Vec::new(), Vec::new(), Vec::new()]; n * n];
    for (q, v) in full.points().iter().zip(&vf) {
        let b = &mut buckets[piece_of(q.cell)];
        b[0].push(v[0]);
        b[2].push(v[1]);
    }
    for (q, v) in inner.points().iter().zip(&vi) {
        buckets[piece_of(q.cell)][1].push(v[0]);
    }
    let pieces: Vec<PieceStats> = buckets
        .iter()
        .enumerate()
        .map(|(k, b)| {
            if b[0].is_empty() || b[1].is_empty() {
                return Err(Error::Resolution(format!("piece ({}, {}) has an empty grid", k / n, k % n)));
            }
            Ok(PieceStats {
                i: k / n,
                j: k % n,
                grad_p: pairwise_sum(&b[0]),
                inner_grad_p: pairwise_sum(&b[1]),
                strain_p: pairwise_sum(&b[2]),
            })
        })
        .collect::<Result<_>>()?;

    let total = |f: fn(&PieceStats) -> f64| pairwise_sum(&pieces.iter().map(f).collect::<Vec<_>>());
    let (sg, si, se) = (total(|s| s.grad_p), total(|s| s.inner_grad_p), total(|s| s.strain_p));
    let direct = pairwise_sum(&vf.iter().map(|v| v[0]).collect::<Vec<_>>());
    let r = |x: f64| x.powf(1.0 / p);
    let (lhs, rhs) = (r(sg), r(si) + r(se));
    if !(rhs > 0.0) {
        return Err(Error::Degenerate("field has zero gradient on every inner shell and zero strain".into()));
    }
    let c_max_piece = pieces.iter().filter_map(|s| s.ratio(p)).fold(0.0, f64::max);
    Ok(SubdivisionReport {
        h,
        p,
        n,
        lhs,
        rhs,
        c_aggregate: lhs / rhs,
        c_max_piece,
        direct_grad_p: direct,
        additivity_error: if direct > 0.0 { (sg - direct).abs() / direct } else { (sg - direct).abs() },
        pieces,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ansatz::{make_ansatz, BumpProfile};
    use crate::geometry::{default_surface, make_thin_domain, ProfileKind, SurfaceKind};
    use crate::shellfield::{rigid_field_at, BumpField};

    fn domain(kind: SurfaceKind, h: f64) -> ThinDomain {
        make_thin_domain(&default_surface(kind), h, ProfileKind::Tilted, 2.0, 1.0).unwrap()
    }

    #[test]
    fn ansatz_partition_is_additive() {
        let d = domain(SurfaceKind::Cylinder, 0.05);
        let f = make_ansatz(BumpProfile::for_surface(d.surface()), &d).unwrap();
        let r = subdivision_run(&d, &f, 2.0).unwrap();
        assert_eq!(r.n, 21);
        assert_eq!(r.pieces.len(), 21 * 21);
        assert!(r.additivity_error <= 1e-10, "{}", r.additivity_error);
        assert!(r.c_aggregate <= r.c_max_piece * (1.0 + 1e-12));
    }

    #[test]
    fn rigid_pieces_are_kernel_cases() {
        let d = domain(SurfaceKind::Plate, 0.1);
        let res = Resolution::new(2 * 11, 2 * 11, 4);
        let f = rigid_field_at([0.2, -0.4, 1.0], [0.5, 0.5, 0.0], &d, res);
        let r = subdivision_run(&d, &f, 2.0).unwrap();
        for s in &r.pieces {
            assert!(s.strain_p <= 1e-20 * s.grad_p);
        }
        // on the plate the rigid gradient is constant: the ratio is the volume ratio
        let vol_ratio = (QuadratureGrid::new(&d, res).unwrap().volume() / (2.0 * d.h() * 1.0)).sqrt();
        assert!((r.c_aggregate - vol_ratio).abs() < 1e-10 * vol_ratio);
    }

    #[test]
    fn bump_field_constant_is_stable() {
        let mut cs = Vec::new();
        for h in [0.1, 0.05, 0.025] {
            let d = domain(SurfaceKind::Cylinder, h);
            let f = BumpField::random(&mut crate::testing::rng(4), d.surface(), 3);
            let r = subdivision_run(&d, &f, 2.0).unwrap();
            assert!(r.additivity_error <= 1e-10);
            cs.push(r.c_aggregate);
        }
        let (lo, hi) = (cs.iter().cloned().fold(f64::MAX, f64::min), cs.iter().cloned().fold(0.0, f64::max));
        assert!(hi <= 2.0 * lo, "{cs:?}");
    }

    #[test]
    fn empty_piece_grid() {
        let d = domain(SurfaceKind::Plate, 0.1);
        let f = BumpField::random(&mut crate::testing::rng(1), d.surface(), 1);
        assert!(matches!(subdivision_run_with(&d, &f, 2.0, 0, 4), Err(Error::Resolution(_))));
    }
}
