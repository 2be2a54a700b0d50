//! The acceptance suite: nine checks, one PASS/FAIL line each, with the
//! tolerances pinned below. Exits non-zero if any check fails.

use std::path::Path;
use std::time::{Duration, Instant};

use korn_core::geometry::{default_surface, make_thin_domain, ProfileKind, SurfaceKind, ThinDomain};
use korn_core::shellfield::{eval_gradient, field_norms, rigid_field_at, BumpField, QuadratureGrid, Resolution};
use korn_core::testing::{cartesian_gradient, rng};
use korn_lab::{run, Assertion, ExperimentConfig, ExperimentKind, RunReport, RunSettings};
use rand::Rng;
use serde_json::Value;

const RIGID_H: f64 = 0.02;
const RIGID_FIELDS: usize = 5;
const RIGID_RES: (usize, usize, usize) = (64, 64, 8);
const RIGID_MAX: f64 = 1e-5;
const RIGID_SHRINK: f64 = 3.0;
/// Ratios this small are at roundoff and cannot shrink further.
const RIGID_FLOOR: f64 = 1e-12;

const GRADIENT_POINTS: usize = 1000;
const GRADIENT_TOL: f64 = 1e-4;
const GRADIENT_STEP: f64 = 1e-4;

const SHARPNESS_LADDER: [f64; 4] = [0.1, 0.05, 0.025, 0.0125];
const SHARPNESS_P: [f64; 3] = [1.5, 2.0, 3.0];
const SHARPNESS_BAND: f64 = 4.0;

const ALPHA_RANGE: (f64, f64) = (0.7, 1.3);
const ALPHA_RESIDUAL: f64 = 0.15;
const MAX_DIM: u64 = 3000;

const SWEEP_CASES: usize = 100;
const SWEEP_SLACK: f64 = 1e-7;
const CLOSED_FORM_TOL: f64 = 1e-10;

const IDENTITY_TOL: f64 = 1e-3;
const IDENTITY_SHRINK: f64 = 3.0;
const IDENTITY_H: f64 = 0.01;

const UNIFORMITY_LADDER: [f64; 4] = [0.1, 0.05, 0.02, 0.01];
const UNIFORMITY_FACTOR: f64 = 4.0;

const ADDITIVITY_TOL: f64 = 1e-10;
const SUBDIVISION_BAND: f64 = 2.0;

struct Check {
    name: &'static str,
    budget: Duration,
    run: fn(&Path) -> Result<String, String>,
}

fn main() {
    let dir = tempfile::tempdir().expect("temporary directory");
    let checks = [
        Check { name: "rigid kernel", budget: Duration::from_secs(30), run: rigid_kernel },
        Check { name: "gradient formula", budget: Duration::from_secs(10), run: gradient_formula },
        Check { name: "Ansatz sharpness", budget: Duration::from_secs(300), run: ansatz_sharpness },
        Check { name: "second Korn scaling", budget: Duration::from_secs(600), run: korn_second_scaling },
        Check { name: "one-dimensional sweep", budget: Duration::from_secs(20), run: one_dimensional_sweep },
        Check { name: "conjugate identity", budget: Duration::from_secs(60), run: conjugate_identity },
        Check { name: "planar uniformity", budget: Duration::from_secs(180), run: planar_uniformity },
        Check { name: "subdivision", budget: Duration::from_secs(120), run: subdivision },
        Check { name: "determinism", budget: Duration::from_secs(600), run: determinism },
    ];
    let mut failed = 0;
    for (i, c) in checks.iter().enumerate() {
        let start = Instant::now();
        let result = (c.run)(&dir.path().join(format!("check{}", i + 1)));
        let took = start.elapsed();
        let (ok, detail) = match result {
            Ok(d) if took <= c.budget => (true, d),
            Ok(d) => (false, format!("{d}; over time budget")),
            Err(d) => (false, d),
        };
        failed += usize::from(!ok);
        println!(
            "{} [{}/9] {}: {detail} ({:.2} s of {} s)",
            if ok { "PASS" } else { "FAIL" },
            i + 1,
            c.name,
            took.as_secs_f64(),
            c.budget.as_secs()
        );
    }
    println!("acceptance: {} of 9 passed", 9 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

fn domain(kind: SurfaceKind, h: f64) -> ThinDomain {
    make_thin_domain(&default_surface(kind), h, ProfileKind::Constant, 2.0, 1.0).expect("default domain")
}

fn ensure(ok: bool, detail: String) -> Result<String, String> {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn rigid_kernel(_: &Path) -> Result<String, String> {
    let mut r = rng(101);
    let (n1, n2, n3) = RIGID_RES;
    let (coarse_res, fine_res) = (Resolution::new(n1, n2, n3), Resolution::new(2 * n1, 2 * n2, 2 * n3));
    let (mut worst, mut min_shrink) = (0.0f64, f64::INFINITY);
    for kind in SurfaceKind::ALL {
        let d = domain(kind, RIGID_H);
        let grids = [QuadratureGrid::new(&d, coarse_res).unwrap(), QuadratureGrid::new(&d, fine_res).unwrap()];
        for _ in 0..RIGID_FIELDS {
            let axis: [f64; 3] = std::array::from_fn(|_| r.random_range(-1.0..1.0));
            let center: [f64; 3] = std::array::from_fn(|_| r.random_range(-1.0..1.0));
            let ratio = |k: usize, res: Resolution| {
                let n = field_norms(&rigid_field_at(axis, center, &d, res), &d, &grids[k], 2.0).unwrap();
                n.strain / n.grad
            };
            let (coarse, fine) = (ratio(0, coarse_res), ratio(1, fine_res));
            worst = worst.max(coarse);
            if coarse > RIGID_FLOOR {
                min_shrink = min_shrink.min(coarse / fine);
            }
        }
    }
    ensure(
        worst <= RIGID_MAX && min_shrink >= RIGID_SHRINK,
        format!("max ‖e‖/‖∇u‖ = {worst:.3e} ≤ {RIGID_MAX:e}, min shrink = {min_shrink:.2} ≥ {RIGID_SHRINK}"),
    )
}

fn gradient_formula(_: &Path) -> Result<String, String> {
    let mut worst = 0.0f64;
    for (k, kind) in SurfaceKind::ALL.into_iter().enumerate() {
        let d = domain(kind, 0.05);
        let s = d.surface();
        let mut r = rng(200 + k as u64);
        let f = BumpField::random(&mut r, s, 3);
        for _ in 0..GRADIENT_POINTS {
            let theta = s.omega() * r.random_range(0.02..0.98);
            let (z0, z1) = s.z_range(theta);
            let z = z0 + (z1 - z0) * r.random_range(0.02..0.98);
            let (g1, g2) = d.thickness(theta, z);
            let t = -g1 + (g1 + g2) * r.random_range(0.0..1.0);
            let exact = eval_gradient(&f, &d, (t, theta, z)).map_err(|e| e.to_string())?;
            let oracle = cartesian_gradient(&f, s, (t, theta, z), GRADIENT_STEP);
            worst = worst.max((exact - oracle).frobenius() / oracle.frobenius());
        }
    }
    ensure(
        worst <= GRADIENT_TOL,
        format!("max relative error {worst:.3e} ≤ {GRADIENT_TOL:e} over 4 × {GRADIENT_POINTS} points"),
    )
}

fn run_config(cfg: &ExperimentConfig, out: &Path) -> Result<RunReport, String> {
    run(cfg, &RunSettings::default(), Some(out)).map_err(|e| e.to_string())
}

fn assertion<'a>(report: &'a RunReport, name: &str) -> Result<&'a Assertion, String> {
    report.assertions.iter().find(|a| a.name == name).ok_or_else(|| format!("report lacks assertion `{name}`"))
}

fn column(report: &RunReport, key: &str, filter: impl Fn(&Value) -> bool) -> Vec<f64> {
    report.cases.as_array().unwrap().iter().filter(|r| filter(r)).filter_map(|r| r[key].as_f64()).collect()
}

fn max_over_min(v: &[f64]) -> f64 {
    let (lo, hi) = v.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &x| (a.min(x), b.max(x)));
    if lo > 0.0 {
        hi / lo
    } else {
        f64::INFINITY
    }
}

fn ansatz_sharpness(out: &Path) -> Result<String, String> {
    let (mut worst_interp, mut worst_second) = (0.0f64, 0.0f64);
    for kind in [SurfaceKind::Plate, SurfaceKind::Cylinder] {
        for p in SHARPNESS_P {
            let mut cfg = ExperimentConfig::new(ExperimentKind::AnsatzSweep);
            cfg.surface.kind = kind;
            cfg.p = p;
            cfg.h_ladder = Some(SHARPNESS_LADDER.to_vec());
            let report = run_config(&cfg, &out.join(format!("{kind}_{p}")))?;
            let rows = report.cases.as_array().unwrap().len();
            if rows != SHARPNESS_LADDER.len() {
                return Err(format!("{kind}, p = {p}: {rows} rows"));
            }
            worst_interp = worst_interp.max(max_over_min(&column(&report, "interpolation_ratio", |_| true)));
            worst_second = worst_second.max(max_over_min(&column(&report, "second_ratio", |_| true)));
        }
    }
    ensure(
        worst_interp <= SHARPNESS_BAND && worst_second <= SHARPNESS_BAND,
        format!("worst max/min: interpolation {worst_interp:.3}, second {worst_second:.3} ≤ {SHARPNESS_BAND}"),
    )
}

fn korn_second_scaling(out: &Path) -> Result<String, String> {
    let mut cfg = ExperimentConfig::new(ExperimentKind::Korn2Scaling);
    cfg.surface.kind = SurfaceKind::Plate;
    cfg.h_ladder = Some(SHARPNESS_LADDER.to_vec());
    let report = run_config(&cfg, out)?;
    let fit = report.fits.first().ok_or("no scaling fit")?;
    let dim = report.cases.as_array().unwrap().iter().filter_map(|r| r["dim"].as_u64()).max().unwrap_or(0);
    ensure(
        (ALPHA_RANGE.0..=ALPHA_RANGE.1).contains(&fit.alpha) && fit.residual <= ALPHA_RESIDUAL && dim <= MAX_DIM,
        format!(
            "α = {:.4} in [{}, {}], residual {:.4} ≤ {ALPHA_RESIDUAL}, max dimension {dim} ≤ {MAX_DIM}",
            fit.alpha, ALPHA_RANGE.0, ALPHA_RANGE.1, fit.residual
        ),
    )
}

/// Sides of the one-dimensional inequality for `f(t) = t` on `[0, 1]`,
/// `λ = ½`, `p = 2`, integrated by hand.
fn closed_form() -> (f64, f64) {
    let lhs = (1.0 - 0.125) / 3.0;
    let head = 0.125 / 3.0;
    let tail = 1.0 / 3.0;
    (lhs, (2.0 + 0.5) / 0.5 * head + 4.0 * tail)
}

fn one_dimensional_sweep(out: &Path) -> Result<String, String> {
    let mut cfg = ExperimentConfig::new(ExperimentKind::Lemma44Sweep);
    cfg.cases = Some(SWEEP_CASES);
    cfg.seed = 7;
    let report = run_config(&cfg, out)?;
    let rows = report.cases.as_array().unwrap();
    let worst = rows.iter().map(|r| r["lhs"].as_f64().unwrap() / r["rhs"].as_f64().unwrap()).fold(0.0, f64::max);
    let (l, r) = closed_form();
    let first = &rows[0];
    let err = (first["lhs"].as_f64().unwrap() - l).abs().max((first["rhs"].as_f64().unwrap() - r).abs());
    ensure(
        rows.len() == SWEEP_CASES + 1 && worst <= 1.0 + SWEEP_SLACK && err <= CLOSED_FORM_TOL,
        format!("{} cases, max lhs/rhs = {worst:.4} ≤ 1 + {SWEEP_SLACK:e}, closed-form error {err:.1e}", rows.len()),
    )
}

fn lemma2d_report(out: &Path) -> Result<RunReport, String> {
    let mut cfg = ExperimentConfig::new(ExperimentKind::Lemma2dSuite);
    cfg.h_ladder = Some(UNIFORMITY_LADDER.to_vec());
    run_config(&cfg, out)
}

fn conjugate_identity(out: &Path) -> Result<String, String> {
    let report = lemma2d_report(out)?;
    let rows = |k: usize| -> Vec<(String, f64, f64)> {
        let all: Vec<&Value> =
            report.cases.as_array().unwrap().iter().filter(|r| r["check"] == "conjugate_identity").collect();
        all.iter()
            .skip(k)
            .step_by(2)
            .map(|r| (r["case"].as_str().unwrap().to_string(), r["lhs"].as_f64().unwrap(), r["rhs"].as_f64().unwrap()))
            .collect()
    };
    let (coarse, fine) = (rows(0), rows(1));
    let h_ok =
        report.cases.as_array().unwrap().iter().any(|r| r["check"] == "conjugate_identity" && r["h"] == IDENTITY_H);
    let sup = coarse.iter().map(|r| r.1.max(r.2)).fold(0.0, f64::max);
    let shrink = |a: f64, b: f64| if a <= 1e-10 { f64::INFINITY } else { a / b };
    let min_shrink =
        coarse.iter().zip(&fine).map(|(c, f)| shrink(c.1, f.1).min(shrink(c.2, f.2))).fold(f64::INFINITY, f64::min);
    ensure(
        coarse.len() == 10 && h_ok && sup <= IDENTITY_TOL && min_shrink >= IDENTITY_SHRINK,
        format!(
            "{} fields, max defect {sup:.3e} ≤ {IDENTITY_TOL:e}, min shrink {min_shrink:.2} ≥ {IDENTITY_SHRINK}",
            coarse.len()
        ),
    )
}

fn planar_uniformity(out: &Path) -> Result<String, String> {
    let report = lemma2d_report(out)?;
    let spread = |check: &str| -> Vec<f64> {
        UNIFORMITY_LADDER
            .iter()
            .map(|&h| {
                column(&report, "c_obs", |r| r["check"] == check && r["h"] == h).first().copied().unwrap_or(f64::NAN)
            })
            .collect()
    };
    let worst_vs_median = |v: Vec<f64>| {
        let mut s = v.clone();
        s.sort_by(f64::total_cmp);
        let med = 0.5 * (s[1] + s[2]);
        v.iter().map(|&c| if c > 0.0 { (c / med).max(med / c) } else { f64::INFINITY }).fold(1.0, f64::max)
    };
    let members = column(&report, "ratio", |r| r["check"] == "shifted_tangential" && r["h"] == 0.1).len();
    let (a, b) = (worst_vs_median(spread("shifted_tangential")), worst_vs_median(spread("tangential_interpolation")));
    let passed = assertion(&report, "shifted tangential C_obs uniform in h")?.passed
        && assertion(&report, "tangential interpolation C_obs uniform in h")?.passed;
    ensure(
        passed && a <= UNIFORMITY_FACTOR && b <= UNIFORMITY_FACTOR && members == 6,
        format!("{members} members, worst C_obs/median: shifted {a:.3}, interpolation {b:.3} ≤ {UNIFORMITY_FACTOR}"),
    )
}

fn subdivision(out: &Path) -> Result<String, String> {
    let (mut additivity, mut band) = (0.0f64, 0.0f64);
    for kind in [SurfaceKind::Plate, SurfaceKind::Cylinder] {
        let mut cfg = ExperimentConfig::new(ExperimentKind::Subdivision);
        cfg.surface.kind = kind;
        cfg.seed = 8;
        let report = run_config(&cfg, &out.join(kind.name()))?;
        additivity = column(&report, "additivity_error", |_| true).into_iter().fold(additivity, f64::max);
        band = band.max(max_over_min(&column(&report, "c_aggregate", |_| true)));
    }
    ensure(
        additivity <= ADDITIVITY_TOL && band <= SUBDIVISION_BAND,
        format!("additivity {additivity:.2e} ≤ {ADDITIVITY_TOL:e}, aggregate max/min {band:.4} ≤ {SUBDIVISION_BAND}"),
    )
}

fn determinism(out: &Path) -> Result<String, String> {
    let mut compared = 0;
    for kind in ExperimentKind::ALL {
        let mut cfg = ExperimentConfig::new(kind);
        cfg.seed = 11;
        let csvs: Vec<Vec<u8>> = [1usize, 3]
            .iter()
            .map(|&threads| {
                let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().map_err(|e| e.to_string())?;
                let dir = out.join(format!("{kind}_{threads}"));
                pool.install(|| run_config(&cfg, &dir))?;
                std::fs::read(dir.join(format!("{kind}.csv"))).map_err(|e| e.to_string())
            })
            .collect::<Result<_, String>>()?;
        if csvs[0] != csvs[1] {
            return Err(format!("{kind}: CSV differs between reruns"));
        }
        compared += 1;
    }
    Ok(format!("{compared} experiments byte-identical across reruns on 1 and 3 threads"))
}
