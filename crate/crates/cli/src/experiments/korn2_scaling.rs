use korn_core::ansatz::{make_ansatz, BumpProfile};
use korn_core::geometry::ThinDomain;
use korn_core::korn::{korn2_estimate, FieldSpace, Korn2Estimate, NodalSpace, EIGEN_TOL};
use korn_core::shellfield::{rigid_field, BumpField, ShellField};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{Outcome, RunSettings};
use crate::config::ExperimentConfig;
use crate::error::{Context, Result};
use crate::report::{Assertion, FitSummary, Series};
use crate::table::Table;

/// Accepted range of the fitted exponent and the largest log-log residual.
pub const ALPHA_RANGE: (f64, f64) = (0.7, 1.3);
pub const MAX_RESIDUAL: f64 = 0.15;

/// Random bump fields in the comparison family when `cases` is not set.
const DEFAULT_BUMPS: usize = 3;

struct Point {
    est: Korn2Estimate,
    space: NodalSpace,
    family_lower: f64,
}

pub(super) fn run(cfg: &ExperimentConfig, s: &RunSettings) -> Result<Outcome> {
    let ladder = cfg.ladder();
    let domains: Vec<ThinDomain> = ladder.iter().map(|&h| cfg.thin_domain(h)).collect::<Result<_>>()?;
    let points: Vec<Point> = domains
        .par_iter()
        .enumerate()
        .map(|(i, d)| {
            let space = match cfg.resolution.nodal {
                Some(r) => NodalSpace::new(s.count(r.n_theta), s.count(r.n_z), s.count(r.n_t)),
                None => {
                    let base = NodalSpace::for_domain(d);
                    NodalSpace::new(s.count(base.n_theta), s.count(base.n_z), s.count(base.n_t))
                }
            }
            .context(|| format!("nodal space at h = {}", d.h()))?;
            let est =
                korn2_estimate(d, &FieldSpace::Nodal(space)).context(|| format!("Korn constant at h = {}", d.h()))?;
            let family_lower = family_lower_bound(cfg, d, &space, i)?;
            Ok(Point { est, space, family_lower })
        })
        .collect::<Result<_>>()?;

    let mut table = Table::new(
        cfg.seed,
        &["surface", "h", "n_theta", "n_z", "n_t", "dim", "c2", "iterations", "method", "family_lower"],
    );
    for pt in &points {
        table.push(vec![
            cfg.surface.kind.name().into(),
            pt.est.h.into(),
            pt.space.n_theta.into(),
            pt.space.n_z.into(),
            pt.space.n_t.into(),
            pt.est.dim.into(),
            pt.est.value.into(),
            pt.est.iterations.into(),
            pt.est.method.into(),
            pt.family_lower.into(),
        ]);
    }
    let series = Series::new("korn2_constant", points.iter().map(|p| (p.est.h, p.est.value)).collect());
    let mut assertions = Vec::new();
    match FitSummary::of(&series) {
        Some(fit) => {
            assertions.push(Assertion::within("fitted alpha", fit.alpha, ALPHA_RANGE.0, ALPHA_RANGE.1));
            assertions.push(Assertion::at_most(
                "fit residual",
                "log-log RMS residual ≤ 0.15",
                fit.residual,
                MAX_RESIDUAL,
            ));
        }
        None => assertions.push(Assertion::holds("fitted alpha", "fit exists (≥ 3 positive samples)", false)),
    }
    let worst_drop = points.windows(2).map(|w| (w[0].est.value - w[1].est.value) / w[0].est.value).fold(0.0, f64::max);
    assertions.push(Assertion::at_most(
        "C2 nonincreasing in h",
        "max relative drop of C2 as h decreases ≤ eigen tolerance",
        worst_drop,
        EIGEN_TOL,
    ));
    let worst_excess =
        points.iter().map(|p| (p.family_lower - p.est.value) / p.est.value).fold(f64::NEG_INFINITY, f64::max);
    assertions.push(Assertion::at_most(
        "C2 dominates family ratios",
        "max (family ratio − C2)/C2 ≤ eigen tolerance",
        worst_excess,
        EIGEN_TOL,
    ));
    Ok(Outcome { table, series: vec![series], assertions, gradient_dump: None })
}

/// Largest `‖∇u‖²/(‖u‖² + ‖e(u)‖²)` over the nodal interpolants of the
/// Ansatz, three rigid motions and random bump fields.
fn family_lower_bound(cfg: &ExperimentConfig, d: &ThinDomain, space: &NodalSpace, index: usize) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(index as u64));
    let mut family: Vec<Box<dyn ShellField>> = Vec::new();
    match make_ansatz(BumpProfile::for_surface(d.surface()), d) {
        Ok(f) => family.push(Box::new(f)),
        Err(e) => log::warn!("Ansatz skipped at h = {}: {e}", d.h()),
    }
    for _ in 0..3 {
        let axis: [f64; 3] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        let center: [f64; 3] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        family.push(Box::new(rigid_field(axis, center, d)));
    }
    for _ in 0..cfg.cases.unwrap_or(DEFAULT_BUMPS) {
        family.push(Box::new(BumpField::random(&mut rng, d.surface(), 3)));
    }
    let forms = space.assemble(d).context(|| format!("assembly at h = {}", d.h()))?;
    Ok(family
        .iter()
        .map(|f| forms.rayleigh_quotient(&space.interpolate(d, f.as_ref())))
        .filter(|r| r.is_finite())
        .fold(0.0, f64::max))
}
