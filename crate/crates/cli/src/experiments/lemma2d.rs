use std::f64::consts::PI;

use korn_core::harmonic2d::{
    check_lemma41, check_lemma42, check_lemma43, conjugate_field, solve_harmonic, strip_chain, Harmonic2DSolution,
};
use rayon::prelude::*;

use super::{Outcome, RunSettings};
use crate::config::{ExperimentConfig, Grid2DSpec};
use crate::error::{Context, Result};
use crate::report::{Assertion, Series};
use crate::table::{Cell, Table};

/// Default grid of the rigidity checks; the conjugate identity also uses its
/// doubling.
pub const GRID: Grid2DSpec = Grid2DSpec { n_s: 16, n_y: 512 };
/// Largest admitted spread of an observed constant around its median.
pub const MEDIAN_FACTOR: f64 = 4.0;
/// Bound on `‖e₁₂‖_∞` and `‖e₁₁ − e₂₂‖_∞` of the conjugate field.
pub const IDENTITY_TOL: f64 = 1e-3;
/// Required shrink factor of the identity defects under grid doubling.
pub const IDENTITY_SHRINK: f64 = 3.0;
/// Defects below this are at the solver's residual level and count as
/// converged.
pub const CONVERGED_FLOOR: f64 = 1e-10;

type Data = fn(f64, f64) -> f64;

/// Boundary data of the uniformity checks.
pub const FAMILY: [(&str, Data); 6] = [
    ("cos(pi y)", |_, y| (PI * y).cos()),
    ("cos(2 pi y)", |_, y| (2.0 * PI * y).cos()),
    ("y^2", |_, y| y * y),
    ("exp(y)(1+x)", |x, y| y.exp() * (1.0 + x)),
    ("sin(3 pi y)+x", |x, y| (3.0 * PI * y).sin() + x),
    ("xy+cos(pi y/2)", |x, y| x * y + (0.5 * PI * y).cos()),
];

/// `Re` and `Im` of `(x + i(y − b/2))ⁿ`, `n = 1, …, 5`.
fn harmonic_polynomial(n: u32, imaginary: bool, mid: f64) -> impl Fn(f64, f64) -> f64 + Sync {
    move |x, y| {
        let (mut re, mut im) = (1.0, 0.0);
        let yc = y - mid;
        for _ in 0..n {
            (re, im) = (re * x - im * yc, re * yc + im * x);
        }
        if imaginary {
            im
        } else {
            re
        }
    }
}

struct RigidityCase {
    h: f64,
    member: usize,
    shifted: (f64, f64, Option<f64>),
    interp: f64,
    weight: f64,
    chain: (f64, f64, bool),
}

pub(super) fn run(cfg: &ExperimentConfig, s: &RunSettings) -> Result<Outcome> {
    let ladder = cfg.ladder();
    let p = cfg.p;
    let g = cfg.resolution.grid2d.unwrap_or(GRID);
    let (n_s, n_y) = (s.count(g.n_s), s.count(g.n_y));

    let jobs: Vec<(f64, usize)> = ladder.iter().flat_map(|&h| (0..FAMILY.len()).map(move |m| (h, m))).collect();
    let cases: Vec<RigidityCase> = jobs
        .par_iter()
        .map(|&(h, member)| {
            let d = cfg.domain2d(h)?;
            let ctx = || format!("{} at h = {h}", FAMILY[member].0);
            let sol = solve_harmonic(&d, &FAMILY[member].1, n_s, n_y).context(ctx)?;
            let shifted = check_lemma41(&sol, p).context(ctx)?;
            let chain = strip_chain(&conjugate_field(&sol), p).context(ctx)?;
            Ok(RigidityCase {
                h,
                member,
                shifted: (shifted.lhs, shifted.rhs_factor, shifted.ratio()),
                interp: check_lemma42(&sol, p).context(ctx)?,
                weight: check_lemma43(&sol, p).context(ctx)?,
                chain: (chain.max_deviation, chain.strain_sum, chain.single_strip),
            })
        })
        .collect::<Result<_>>()?;

    let c_obs = |f: &dyn Fn(&RigidityCase) -> Option<f64>| -> Vec<f64> {
        ladder.iter().map(|&h| cases.iter().filter(|c| c.h == h).filter_map(f).fold(0.0, f64::max)).collect()
    };
    let c_shift = c_obs(&|c| c.shifted.2);
    let c_interp = c_obs(&|c| Some(c.interp));
    let c_weight = c_obs(&|c| Some(c.weight));
    let c_at = |cs: &[f64], h: f64| cs[ladder.iter().position(|&x| x == h).expect("h from ladder")];

    let mut table = Table::new(cfg.seed, &["check", "h", "p", "case", "n_s", "n_y", "lhs", "rhs", "ratio", "c_obs"]);
    for c in &cases {
        let name = FAMILY[c.member].0;
        let common = |check: &str| -> Vec<Cell> {
            vec![check.into(), c.h.into(), p.into(), name.into(), n_s.into(), n_y.into()]
        };
        let mut row = common("shifted_tangential");
        row.extend([c.shifted.0.into(), c.shifted.1.into(), c.shifted.2.into(), c_at(&c_shift, c.h).into()]);
        table.push(row);
        let mut row = common("tangential_interpolation");
        row.extend([Cell::Empty, Cell::Empty, c.interp.into(), c_at(&c_interp, c.h).into()]);
        table.push(row);
        let mut row = common("weighted_gradient");
        row.extend([Cell::Empty, Cell::Empty, c.weight.into(), c_at(&c_weight, c.h).into()]);
        table.push(row);
        let ratio = if c.chain.1 > 0.0 { Some(c.chain.0 / c.chain.1) } else { None };
        let mut row = common(if c.chain.2 { "strip_chain_single" } else { "strip_chain" });
        row.extend([c.chain.0.into(), c.chain.1.into(), ratio.into(), Cell::Empty]);
        table.push(row);
    }

    let h_conj = *ladder.last().expect("validated ladder is nonempty");
    let identity = conjugate_identity(cfg, h_conj, (n_s, n_y))?;
    for r in &identity {
        for (k, &(ns, ny)) in [(n_s, n_y), (2 * n_s, 2 * n_y)].iter().enumerate() {
            table.push(vec![
                "conjugate_identity".into(),
                h_conj.into(),
                p.into(),
                r.name.clone().into(),
                ns.into(),
                ny.into(),
                r.e12[k].into(),
                r.ediff[k].into(),
                Cell::Empty,
                Cell::Empty,
            ]);
        }
    }

    let shrink = |v: [f64; 2]| if v[0] <= CONVERGED_FLOOR { f64::INFINITY } else { v[0] / v[1] };
    let sup = |f: fn(&IdentityCase) -> [f64; 2]| identity.iter().map(|r| f(r)[0]).fold(0.0, f64::max);
    let min_shrink =
        |f: fn(&IdentityCase) -> [f64; 2]| identity.iter().map(|r| shrink(f(r))).fold(f64::INFINITY, f64::min);
    let chains_finite = cases.iter().all(|c| c.chain.0.is_finite() && c.chain.1.is_finite());
    let assertions = vec![
        Assertion::near_median("shifted tangential C_obs uniform in h", &c_shift, MEDIAN_FACTOR),
        Assertion::near_median("tangential interpolation C_obs uniform in h", &c_interp, MEDIAN_FACTOR),
        Assertion::at_most("conjugate e12 sup", "max ‖e(W)₁₂‖_∞ ≤ 1e-3", sup(|r| r.e12), IDENTITY_TOL),
        Assertion::at_most("conjugate e11-e22 sup", "max ‖e(W)₁₁ − e(W)₂₂‖_∞ ≤ 1e-3", sup(|r| r.ediff), IDENTITY_TOL),
        Assertion::at_least("conjugate e12 shrink", "min coarse/fine ≥ 3", min_shrink(|r| r.e12), IDENTITY_SHRINK),
        Assertion::at_least(
            "conjugate e11-e22 shrink",
            "min coarse/fine ≥ 3",
            min_shrink(|r| r.ediff),
            IDENTITY_SHRINK,
        ),
        Assertion::holds("strip chain finite", "max |a₁ − a_k| and Σ‖e(W)‖ finite", chains_finite),
    ];
    let samples = |cs: &[f64]| ladder.iter().copied().zip(cs.iter().copied()).collect();
    Ok(Outcome {
        table,
        series: vec![
            Series::new("shifted_tangential_c_obs", samples(&c_shift)),
            Series::new("tangential_interpolation_c_obs", samples(&c_interp)),
            Series::new("weighted_gradient_c_obs", samples(&c_weight)),
        ],
        assertions,
        gradient_dump: None,
    })
}

struct IdentityCase {
    name: String,
    e12: [f64; 2],
    ediff: [f64; 2],
}

/// Identity defects of the conjugate field for ten harmonic polynomials on
/// the base grid and its doubling.
fn conjugate_identity(cfg: &ExperimentConfig, h: f64, (n_s, n_y): (usize, usize)) -> Result<Vec<IdentityCase>> {
    let d = cfg.domain2d(h)?;
    let jobs: Vec<(u32, bool)> = (1..=5).flat_map(|n| [(n, false), (n, true)]).collect();
    jobs.par_iter()
        .map(|&(n, im)| {
            let name = format!("{}(z^{n})", if im { "Im" } else { "Re" });
            let data = harmonic_polynomial(n, im, 0.5 * d.b);
            let mut e12 = [0.0; 2];
            let mut ediff = [0.0; 2];
            for (k, scale) in [1, 2].into_iter().enumerate() {
                let sol: Harmonic2DSolution =
                    solve_harmonic(&d, &data, scale * n_s, scale * n_y).context(|| format!("{name} at h = {h}"))?;
                let w = conjugate_field(&sol);
                let sup = |v: Vec<f64>| v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
                e12[k] = sup(w.e12());
                ediff[k] = sup(w.e_diff());
            }
            Ok(IdentityCase { name, e12, ediff })
        })
        .collect()
}
