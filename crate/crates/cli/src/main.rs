use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use korn_lab::{run, ExperimentConfig, ExperimentKind, LabError, RunSettings};

#[derive(Debug, Parser)]
#[command(name = "korn-lab", version, about = "Numerical experiments on Korn inequalities in thin domains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one experiment and write its CSV, JSON report and plot data.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; overrides `output_dir` of the config.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads; defaults to the number of cores.
        #[arg(long, env = "KORNLAB_THREADS")]
        threads: Option<usize>,
        /// Multiplies every cell count of the experiment.
        #[arg(long, default_value_t = 1.0)]
        resolution_scale: f64,
        /// Also write the frame gradient of the experiment's field.
        #[arg(long)]
        dump_gradient: bool,
    },
    /// List the available experiments.
    ListExperiments,
    /// Parse and validate a config without running it.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match execute(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn execute(command: Command) -> Result<u8, LabError> {
    let mut stdout = std::io::stdout().lock();
    match command {
        Command::ListExperiments => {
            for k in ExperimentKind::ALL {
                let _ = writeln!(stdout, "{:<15} {}", k.name(), k.summary());
            }
            Ok(0)
        }
        Command::Validate { config } => {
            let cfg = ExperimentConfig::load(&config)?;
            let _ = writeln!(stdout, "{}: valid {} config", config.display(), cfg.experiment);
            Ok(0)
        }
        Command::Run { config, out, threads, resolution_scale, dump_gradient } => {
            let cfg = ExperimentConfig::load(&config)?;
            if let Some(n) = threads {
                if n == 0 {
                    return Err(LabError::Usage("--threads must be at least 1".into()));
                }
                rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global()
                    .map_err(|e| LabError::Usage(format!("cannot start thread pool: {e}")))?;
            }
            let settings = RunSettings { resolution_scale, dump_gradient };
            let report = run(&cfg, &settings, out.as_deref())?;
            for a in &report.assertions {
                let status = if a.passed { "PASS" } else { "FAIL" };
                let _ = writeln!(
                    stdout,
                    "{status} {}: {} (lhs = {:.6e}, rhs = {:.6e})",
                    a.name, a.inequality, a.lhs, a.rhs
                );
            }
            let _ = writeln!(stdout, "{} finished in {:.2} s; artifacts:", report.experiment, report.wall_time_s);
            for p in &report.artifacts {
                let _ = writeln!(stdout, "  {}", p.display());
            }
            Ok(if report.passed { 0 } else { 1 })
        }
    }
}
