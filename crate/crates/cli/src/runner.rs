//! Runs one experiment end to end and writes its artifacts.

use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::config::ExperimentConfig;
use crate::error::{LabError, Result};
use crate::experiments::{dispatch, RunSettings};
use crate::plot::emit_plotdata;
use crate::report::{FitSummary, RunReport};
use crate::table::write_atomic;

/// Output directory when neither the command line nor the config names one.
pub const DEFAULT_OUTPUT_DIR: &str = "results";

/// Validates `cfg`, runs it, and writes into the output directory:
/// `<experiment>.csv`, `<experiment>.report.json`, plot data when the
/// experiment produces series, and `<experiment>_gradient.csv` on request.
pub fn run(cfg: &ExperimentConfig, settings: &RunSettings, out: Option<&Path>) -> Result<RunReport> {
    cfg.validate()?;
    if !(settings.resolution_scale > 0.0 && settings.resolution_scale.is_finite()) {
        return Err(LabError::Usage(format!("resolution scale must be positive, got {}", settings.resolution_scale)));
    }
    let dir: PathBuf = out
        .map(Path::to_path_buf)
        .or_else(|| cfg.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR));
    let name = cfg.experiment.name();
    log::info!("running {name} (seed {}) into {}", cfg.seed, dir.display());

    let start = Instant::now();
    let outcome = dispatch(cfg, settings)?;
    let wall_time_s = start.elapsed().as_secs_f64();

    let fits: Vec<FitSummary> = outcome.series.iter().filter_map(FitSummary::of).collect();
    let passed = outcome.assertions.iter().all(|a| a.passed);
    let mut report = RunReport {
        experiment: name.to_string(),
        seed: cfg.seed,
        config: cfg.clone(),
        resolution_scale: settings.resolution_scale,
        threads: rayon::current_num_threads(),
        cases: outcome.table.to_json(),
        series: outcome.series,
        fits,
        assertions: outcome.assertions,
        passed,
        wall_time_s,
        artifacts: Vec::new(),
    };

    report.artifacts.push(write_atomic(&dir.join(format!("{name}.csv")), &outcome.table.to_csv())?);
    if let Some(bytes) = &outcome.gradient_dump {
        report.artifacts.push(write_atomic(&dir.join(format!("{name}_gradient.csv")), bytes)?);
    }
    if report.series.iter().any(|s| !s.samples.is_empty()) {
        report.artifacts.extend(emit_plotdata(&report, &dir)?);
    }
    let report_path = dir.join(format!("{name}.report.json"));
    report.artifacts.push(report_path.clone());
    let json = serde_json::to_vec_pretty(&report).expect("reports serialize");
    write_atomic(&report_path, &json)?;
    Ok(report)
}
