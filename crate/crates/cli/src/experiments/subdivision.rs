use korn_core::ansatz::{make_ansatz, BumpProfile};
use korn_core::geometry::ThinDomain;
use korn_core::korn::{subdivision_run_with, SubdivisionReport, CELLS_PER_PIECE, THICKNESS_CELLS};
use korn_core::shellfield::{rigid_field, BumpField, ShellField};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{gradient_dump, Outcome, RunSettings};
use crate::config::{ExperimentConfig, SubdivisionField};
use crate::error::{Context, Result};
use crate::report::{Assertion, Series};
use crate::table::Table;

/// Largest relative mismatch between summed pieces and the direct integral.
pub const ADDITIVITY_TOL: f64 = 1e-10;
/// Largest admitted max/min of the aggregate constant over the ladder.
pub const BAND: f64 = 2.0;
const BUMPS: usize = 3;

pub(super) fn run(cfg: &ExperimentConfig, s: &RunSettings) -> Result<Outcome> {
    let ladder = cfg.ladder();
    let p = cfg.p;
    let m = s.count(cfg.resolution.piece_cells.unwrap_or(CELLS_PER_PIECE));
    let n_t = s.count(cfg.resolution.thickness_cells.unwrap_or(THICKNESS_CELLS));
    let domains: Vec<ThinDomain> = ladder.iter().map(|&h| cfg.thin_domain(h)).collect::<Result<_>>()?;

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let surface = cfg.mid_surface()?;
    let bump = BumpField::random(&mut rng, &surface, BUMPS);
    let axis: [f64; 3] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
    let center: [f64; 3] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
    let field_on = |d: &ThinDomain| -> Result<Box<dyn ShellField>> {
        Ok(match cfg.field {
            SubdivisionField::Bump => Box::new(bump.clone()),
            SubdivisionField::Ansatz => Box::new(
                make_ansatz(BumpProfile::for_surface(d.surface()), d).context(|| format!("Ansatz at h = {}", d.h()))?,
            ),
            SubdivisionField::Rigid => Box::new(rigid_field(axis, center, d)),
        })
    };

    let reports: Vec<SubdivisionReport> = domains
        .par_iter()
        .map(|d| {
            let f = field_on(d)?;
            subdivision_run_with(d, f.as_ref(), p, m, n_t).context(|| format!("subdivision at h = {}", d.h()))
        })
        .collect::<Result<_>>()?;

    let field_name = match cfg.field {
        SubdivisionField::Bump => "bump",
        SubdivisionField::Ansatz => "ansatz",
        SubdivisionField::Rigid => "rigid",
    };
    let mut table = Table::new(
        cfg.seed,
        &[
            "surface",
            "field",
            "p",
            "h",
            "n",
            "lhs",
            "rhs",
            "c_aggregate",
            "c_max_piece",
            "direct_grad_p",
            "additivity_error",
        ],
    );
    for r in &reports {
        table.push(vec![
            cfg.surface.kind.name().into(),
            field_name.into(),
            p.into(),
            r.h.into(),
            r.n.into(),
            r.lhs.into(),
            r.rhs.into(),
            r.c_aggregate.into(),
            r.c_max_piece.into(),
            r.direct_grad_p.into(),
            r.additivity_error.into(),
        ]);
    }
    let worst_additivity = reports.iter().map(|r| r.additivity_error).fold(0.0, f64::max);
    let c: Vec<f64> = reports.iter().map(|r| r.c_aggregate).collect();
    let assertions = vec![
        Assertion::at_most(
            "partition additivity",
            "max |Σ pieces − direct|/direct ≤ 1e-10",
            worst_additivity,
            ADDITIVITY_TOL,
        ),
        Assertion::band("aggregate constant stable in h", &c, BAND),
    ];
    let gradient = match (s.dump_gradient, domains.last()) {
        (true, Some(d)) => Some(gradient_dump(field_on(d)?.as_ref(), d)?),
        _ => None,
    };
    Ok(Outcome {
        table,
        series: vec![Series::new("subdivision_c_aggregate", reports.iter().map(|r| (r.h, r.c_aggregate)).collect())],
        assertions,
        gradient_dump: gradient,
    })
}
