//! One module per experiment; each turns a validated config into a table,
//! observed-constant series and checked assertions.

mod ansatz_sweep;
mod extension;
mod korn2_scaling;
mod lemma2d;
mod lemma44;
mod subdivision;

use korn_core::geometry::ThinDomain;
use korn_core::shellfield::{dump_gradient_csv, QuadratureGrid, Resolution, ShellField};

use crate::config::{ExperimentConfig, ExperimentKind};
use crate::error::{Context, Result};
use crate::report::{Assertion, Series};
use crate::table::Table;

/// Run-time knobs that are not part of the config file.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunSettings {
    /// Multiplies every cell count (rounded up).
    pub resolution_scale: f64,
    /// Also write the frame gradient of the experiment's field as CSV.
    pub dump_gradient: bool,
}

impl Default for RunSettings {
    fn default() -> Self {
        Self { resolution_scale: 1.0, dump_gradient: false }
    }
}

impl RunSettings {
    pub(crate) fn count(&self, n: usize) -> usize {
        ((n as f64 * self.resolution_scale).ceil() as usize).max(1)
    }

    pub(crate) fn res(&self, r: Resolution) -> Resolution {
        r.scaled(self.resolution_scale)
    }
}

pub(crate) struct Outcome {
    pub table: Table,
    pub series: Vec<Series>,
    pub assertions: Vec<Assertion>,
    /// Gradient CSV, when requested and the experiment has a shell field.
    pub gradient_dump: Option<Vec<u8>>,
}

pub(crate) fn dispatch(cfg: &ExperimentConfig, s: &RunSettings) -> Result<Outcome> {
    match cfg.experiment {
        ExperimentKind::AnsatzSweep => ansatz_sweep::run(cfg, s),
        ExperimentKind::Korn2Scaling => korn2_scaling::run(cfg, s),
        ExperimentKind::Lemma2dSuite => lemma2d::run(cfg, s),
        ExperimentKind::Lemma44Sweep => lemma44::run(cfg, s),
        ExperimentKind::Subdivision => subdivision::run(cfg, s),
        ExperimentKind::Extension => extension::run(cfg, s),
    }
}

/// Gradient dump on a coarse whole-patch grid.
pub(crate) fn gradient_dump(f: &dyn ShellField, d: &ThinDomain) -> Result<Vec<u8>> {
    let grid = QuadratureGrid::new(d, Resolution::new(16, 16, 4)).context(|| "gradient dump grid".into())?;
    let mut out = Vec::new();
    dump_gradient_csv(f, d, &grid, &mut out).expect("writing to memory cannot fail");
    Ok(out)
}
