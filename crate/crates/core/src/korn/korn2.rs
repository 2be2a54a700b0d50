//! Optimal constant of the second Korn inequality for `p = 2` and sampled
//! lower bounds for the interpolation inequality.

use std::sync::Arc;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use super::eigen::{dense_top, lanczos_top, TopEigen};
use super::nodal::{NodalSpace, MIN_DIM};
use crate::ansatz::{ratio_report, ratio_resolution};
use crate::error::{Error, Result};
use crate::geometry::ThinDomain;
use crate::numerics::pairwise_sum;
use crate::shellfield::{gradient_from_jet, stretch_factors, QuadratureGrid, ShellField};

/// Discrete test space for the eigenvalue estimate.
#[derive(Clone)]
pub enum FieldSpace {
    /// Trilinear nodal fields; the dimension must be at least [`MIN_DIM`].
    Nodal(NodalSpace),
    /// Span of a few given fields, integrated on the default whole-patch grid.
    Span(Vec<Arc<dyn ShellField>>),
}

impl FieldSpace {
    pub fn dim(&self) -> usize {
        match self {
            FieldSpace::Nodal(s) => s.dim(),
            FieldSpace::Span(v) => v.len(),
        }
    }
}

/// Largest Rayleigh quotient `‖∇u‖² / (‖u‖² + ‖e(u)‖²)` over the space.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Korn2Estimate {
    pub h: f64,
    pub value: f64,
    pub dim: usize,
    pub iterations: usize,
    pub method: &'static str,
}

/// Relative eigenvalue tolerance of the Krylov solve.
pub const EIGEN_TOL: f64 = 1e-6;
const DENSE_LIMIT: usize = 3000;

pub fn korn2_constant_p2(d: &ThinDomain, space: &FieldSpace) -> Result<f64> {
    Ok(korn2_estimate(d, space)?.value)
}

/// As [`korn2_constant_p2`] with solver diagnostics.
pub fn korn2_estimate(d: &ThinDomain, space: &FieldSpace) -> Result<Korn2Estimate> {
    let (top, method) = match space {
        FieldSpace::Nodal(sp) => {
            if sp.dim() < MIN_DIM {
                return Err(Error::InvalidArgument(format!("space dimension {} below {MIN_DIM}", sp.dim())));
            }
            let a = sp.assemble(d)?;
            match lanczos_top(&a.k, &a.m, EIGEN_TOL, 1000) {
                Ok(t) => (t, "lanczos"),
                Err(Error::NonConvergence { message, history }) if sp.dim() <= DENSE_LIMIT => {
                    log::warn!("{message}; falling back to dense solve (history {history:?})");
                    (dense_top(&a.k.to_dense(), &a.m.to_dense())?, "dense")
                }
                Err(e) => return Err(e),
            }
        }
        FieldSpace::Span(fields) => {
            if fields.is_empty() {
                return Err(Error::InvalidArgument("empty field space".into()));
            }
            let (k, m) = span_forms(d, fields)?;
            (dense_top(&k, &m)?, "dense")
        }
    };
    let TopEigen { value, iterations, .. } = top;
    Ok(Korn2Estimate { h: d.h(), value: value.max(0.0), dim: space.dim(), iterations, method })
}

/// Gram matrices of `∇u : ∇v` and `u·v + e(u) : e(v)` over a field list.
pub fn span_forms(d: &ThinDomain, fields: &[Arc<dyn ShellField>]) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let n = fields.len();
    let grid = QuadratureGrid::new(d, ratio_resolution(d))?;
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..=i).map(move |j| (i, j))).collect();
    let per_point: Vec<Vec<[f64; 2]>> = grid
        .points()
        .par_iter()
        .map(|q| {
            let sp = d.surface().point(q.theta, q.z);
            let (ft, fz) = stretch_factors(&sp, q.t, q.theta, q.z)?;
            let jets: Vec<_> = fields.iter().map(|f| f.jet(q.t, q.theta, q.z)).collect();
            let g: Vec<_> = jets.iter().map(|j| gradient_from_jet(j, &sp, ft, fz)).collect();
            let e: Vec<_> = g.iter().map(|m| m.symmetrize()).collect();
            Ok(pairs
                .iter()
                .map(|&(i, j)| {
                    let gg: f64 = (0..3)
                        .flat_map(|a| (0..3).map(move |b| (a, b)))
                        .map(|(a, b)| g[i].0[a][b] * g[j].0[a][b])
                        .sum();
                    let ee: f64 = (0..3)
                        .flat_map(|a| (0..3).map(move |b| (a, b)))
                        .map(|(a, b)| e[i].0[a][b] * e[j].0[a][b])
                        .sum();
                    let uu: f64 = (0..3).map(|a| jets[i].value[a] * jets[j].value[a]).sum();
                    [q.weight * gg, q.weight * (uu + ee)]
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    let mut k = DMatrix::zeros(n, n);
    let mut m = DMatrix::zeros(n, n);
    let mut col = vec![0.0; per_point.len()];
    for (idx, &(i, j)) in pairs.iter().enumerate() {
        for c in 0..2 {
            for (slot, row) in col.iter_mut().zip(&per_point) {
                *slot = row[idx][c];
            }
            let s = pairwise_sum(&col);
            let target = if c == 0 { &mut k } else { &mut m };
            target[(i, j)] = s;
            target[(j, i)] = s;
        }
    }
    Ok((k, m))
}

/// Largest interpolation ratio over `family`, a lower bound for the optimal
/// constant. Degenerate members are skipped with a warning.
pub fn interpolation_constant(d: &ThinDomain, p: f64, family: &[&dyn ShellField]) -> Result<f64> {
    if family.is_empty() {
        return Err(Error::InvalidArgument("empty field family".into()));
    }
    let mut best: Option<f64> = None;
    for (i, f) in family.iter().enumerate() {
        match ratio_report(*f, d, p) {
            Ok(r) => best = Some(best.map_or(r.interpolation_ratio, |b| b.max(r.interpolation_ratio))),
            Err(Error::Degenerate(msg)) => log::warn!("family member {i} skipped: {msg}"),
            Err(e) => return Err(e),
        }
    }
    best.ok_or_else(|| Error::Degenerate("every family member is degenerate".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ansatz::{make_ansatz, BumpProfile};
    use crate::geometry::{default_surface, make_thin_domain, ProfileKind, SurfaceKind};
    use crate::numerics::banded::SymBand;
    use crate::shellfield::{field_norms, rigid_field, AnalyticField, Jet, ZeroField};
    use rand::Rng;

    fn plate(h: f64) -> ThinDomain {
        make_thin_domain(&default_surface(SurfaceKind::Plate), h, ProfileKind::Constant, 2.0, 1.0).unwrap()
    }

    fn constant(v: [f64; 3]) -> Arc<dyn ShellField> {
        Arc::new(AnalyticField::new(move |_, _, _| Jet { value: v, grad: [[0.0; 3]; 3] }))
    }

    #[test]
    fn constant_span_gives_zero() {
        let d = plate(0.05);
        let space =
            FieldSpace::Span(vec![constant([1.0, 0.0, 0.0]), constant([0.0, 1.0, 0.0]), constant([0.0, 0.0, 1.0])]);
        assert!(korn2_constant_p2(&d, &space).unwrap().abs() < 1e-14);
    }

    #[test]
    fn rigid_span_gives_gradient_to_mass_ratio() {
        let d =
            make_thin_domain(&default_surface(SurfaceKind::Cylinder), 0.05, ProfileKind::Constant, 2.0, 1.0).unwrap();
        let r: Arc<dyn ShellField> = Arc::new(rigid_field([0.0, 0.0, 1.0], [0.0; 3], &d));
        let c = korn2_constant_p2(&d, &FieldSpace::Span(vec![r.clone()])).unwrap();
        let n = field_norms(r.as_ref(), &d, &QuadratureGrid::new(&d, ratio_resolution(&d)).unwrap(), 2.0).unwrap();
        let expect = n.grad.powi(2) / (n.u.powi(2) + n.strain.powi(2));
        assert!(c > 0.0 && (c - expect).abs() < 1e-10 * expect);
    }

    #[test]
    fn zero_field_span_is_degenerate() {
        let d = plate(0.05);
        let space = FieldSpace::Span(vec![Arc::new(ZeroField)]);
        assert!(matches!(korn2_constant_p2(&d, &space), Err(Error::Degenerate(_))));
    }

    #[test]
    fn nodal_space_too_small() {
        let d = plate(0.05);
        let space = FieldSpace::Nodal(NodalSpace::new(2, 2, 1).unwrap());
        assert!(matches!(korn2_constant_p2(&d, &space), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn eigenvalue_dominates_sampled_quotients() {
        let d = plate(0.05);
        let sp = NodalSpace::for_domain(&d);
        let est = korn2_estimate(&d, &FieldSpace::Nodal(sp)).unwrap();
        let a = sp.assemble(&d).unwrap();
        let mut rng = crate::testing::rng(5);
        for _ in 0..20 {
            let x: Vec<f64> = (0..sp.dim()).map(|_| rng.random_range(-1.0..1.0)).collect();
            assert!(a.rayleigh_quotient(&x) <= est.value * (1.0 + 1e-6));
        }
        let ansatz = make_ansatz(BumpProfile::for_surface(d.surface()), &d).unwrap();
        let x = sp.interpolate(&d, &ansatz);
        assert!(a.rayleigh_quotient(&x) <= est.value * (1.0 + 1e-6));
        // dense oracle on the same pencil
        let dense = dense_top(&a.k.to_dense(), &a.m.to_dense()).unwrap();
        assert!((dense.value - est.value).abs() <= 1e-6 * dense.value);
    }

    #[test]
    fn interpolation_constant_over_family() {
        let d = plate(0.05);
        let r = rigid_field([1.0, 0.0, 0.0], [0.5, 0.5, 0.0], &d);
        let rr = ratio_report(&r, &d, 2.0).unwrap();
        assert_eq!(interpolation_constant(&d, 2.0, &[&r]).unwrap(), rr.interpolation_ratio);
        assert!(
            (rr.interpolation_ratio - rr.norms.grad.powi(2) / rr.norms.u.powi(2)).abs() < 1e-8 * rr.interpolation_ratio
        );
        assert!(interpolation_constant(&d, 2.0, &[]).is_err());
        assert!(matches!(interpolation_constant(&d, 2.0, &[&ZeroField]), Err(Error::Degenerate(_))));
        let both = interpolation_constant(&d, 2.0, &[&ZeroField, &r]).unwrap();
        assert_eq!(both, rr.interpolation_ratio);
    }

    #[test]
    fn dense_pencil_sanity() {
        let mut k = SymBand::zeros(2, 1);
        let mut m = SymBand::zeros(2, 1);
        k.add(0, 0, 2.0);
        k.add(1, 1, 6.0);
        m.add(0, 0, 1.0);
        m.add(1, 1, 2.0);
        assert!((dense_top(&k.to_dense(), &m.to_dense()).unwrap().value - 3.0).abs() < 1e-14);
    }
}
