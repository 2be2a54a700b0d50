use korn_core::ansatz::{make_ansatz, sharpness_sweep, BumpProfile, SWEEP_RESOLUTION};

use super::{gradient_dump, Outcome, RunSettings};
use crate::config::ExperimentConfig;
use crate::error::{Context, Result};
use crate::report::{Assertion, Series};
use crate::table::Table;

/// Largest admitted spread `max/min` of either ratio over the ladder.
pub const BAND: f64 = 4.0;

pub(super) fn run(cfg: &ExperimentConfig, s: &RunSettings) -> Result<Outcome> {
    let ladder = cfg.ladder();
    let d = cfg.thin_domain(ladder[0])?;
    let profile = BumpProfile::for_surface(d.surface());
    let res = s.res(cfg.resolution.quadrature.unwrap_or(SWEEP_RESOLUTION));
    let reports = sharpness_sweep(&profile, &d, cfg.p, &ladder, res).context(|| "Ansatz sweep".into())?;

    let mut table = Table::new(
        cfg.seed,
        &["surface", "p", "h", "grad_norm", "u_norm", "u_t_norm", "strain_norm", "interpolation_ratio", "second_ratio"],
    );
    for r in &reports {
        let n = &r.norms;
        table.push(vec![
            d.surface().kind().name().into(),
            r.p.into(),
            r.h.into(),
            n.grad.into(),
            n.u.into(),
            n.u_t.into(),
            n.strain.into(),
            r.interpolation_ratio.into(),
            r.second_ratio.into(),
        ]);
    }
    let interp: Vec<f64> = reports.iter().map(|r| r.interpolation_ratio).collect();
    let second: Vec<f64> = reports.iter().map(|r| r.second_ratio).collect();
    let gradient_dump = if s.dump_gradient {
        Some(gradient_dump(&make_ansatz(profile, &d).context(|| "Ansatz field".into())?, &d)?)
    } else {
        None
    };
    Ok(Outcome {
        table,
        series: vec![
            Series::new("interpolation_ratio", ladder.iter().copied().zip(interp.iter().copied()).collect()),
            Series::new("second_ratio", ladder.iter().copied().zip(second.iter().copied()).collect()),
        ],
        assertions: vec![
            Assertion::band("interpolation_ratio band", &interp, BAND),
            Assertion::band("second_ratio band", &second, BAND),
        ],
        gradient_dump,
    })
}
