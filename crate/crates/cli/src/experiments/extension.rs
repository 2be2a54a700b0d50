use korn_core::korn::{
    extension_check_with, Box3, CartesianField, ExtensionReport, HarmonicGradient, NestedBoxPair, Rescaled,
    RigidMotion, ShearedRotation, EXTENSION_CELLS,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{Outcome, RunSettings};
use crate::config::ExperimentConfig;
use crate::error::{Context, Result};
use crate::report::Assertion;
use crate::table::{Cell, Table};

/// Scale factors of `x → λx`.
pub const SCALES: [f64; 2] = [1.0, 2.0];
/// Largest relative change of a constant under rescaling.
pub const SCALE_TOL: f64 = 0.1;
/// Relative tolerance of the rigid kernel identity.
pub const RIGID_TOL: f64 = 1e-10;
const DEFAULT_DRAWS: usize = 2;

#[derive(Debug, Clone, Copy)]
enum Member {
    Rigid(RigidMotion),
    Harmonic(HarmonicGradient),
    Sheared(ShearedRotation),
}

impl Member {
    fn name(&self) -> &'static str {
        match self {
            Member::Rigid(_) => "rigid",
            Member::Harmonic(_) => "harmonic_gradient",
            Member::Sheared(_) => "sheared_rotation",
        }
    }

    fn check(&self, pair: &NestedBoxPair, lambda: f64, p: f64, n: usize) -> korn_core::Result<ExtensionReport> {
        let scaled = pair.scaled(lambda)?;
        fn go<F: CartesianField>(
            pair: &NestedBoxPair,
            lambda: f64,
            inner: F,
            p: f64,
            n: usize,
        ) -> korn_core::Result<ExtensionReport> {
            extension_check_with(pair, &Rescaled { lambda, inner }, p, n)
        }
        match *self {
            Member::Rigid(f) => go(&scaled, lambda, f, p, n),
            Member::Harmonic(f) => go(&scaled, lambda, f, p, n),
            Member::Sheared(f) => go(&scaled, lambda, f, p, n),
        }
    }
}

/// `D₁ = [0,1]²×[0,½] ⊂ D₂ = [0,2]×[0,1]²`.
pub fn reference_pair() -> NestedBoxPair {
    let inner = Box3::new([0.0, 0.0, 0.0], [1.0, 1.0, 0.5]).expect("valid box");
    let outer = Box3::new([0.0, 0.0, 0.0], [2.0, 1.0, 1.0]).expect("valid box");
    NestedBoxPair::new(inner, outer).expect("nested boxes")
}

fn family(rng: &mut impl Rng, draws: usize) -> Vec<Member> {
    let mut out = Vec::new();
    for _ in 0..draws {
        let mut v = || -> [f64; 3] { std::array::from_fn(|_| rng.random_range(-1.0..1.0)) };
        out.push(Member::Rigid(RigidMotion { axis: v(), center: v(), shift: v() }));
    }
    for _ in 0..draws {
        let pole = [-0.5 - rng.random_range(0.0..0.5), rng.random_range(0.0..1.0), rng.random_range(0.0..1.0)];
        out.push(Member::Harmonic(HarmonicGradient { pole }));
    }
    for _ in 0..draws {
        out.push(Member::Sheared(ShearedRotation { eps: rng.random_range(0.2..1.0) }));
    }
    out
}

pub(super) fn run(cfg: &ExperimentConfig, s: &RunSettings) -> Result<Outcome> {
    let p = cfg.p;
    let n = s.count(cfg.resolution.box_cells.unwrap_or(EXTENSION_CELLS));
    let pair = reference_pair();
    let members = family(&mut ChaCha8Rng::seed_from_u64(cfg.seed), cfg.cases.unwrap_or(DEFAULT_DRAWS));
    let reports: Vec<[ExtensionReport; 2]> = members
        .par_iter()
        .enumerate()
        .map(|(i, m)| {
            let one = |l: f64| m.check(&pair, l, p, n).context(|| format!("{} #{i} at λ = {l}", m.name()));
            Ok([one(SCALES[0])?, one(SCALES[1])?])
        })
        .collect::<Result<_>>()?;

    let root = pair.volume_ratio().powf(1.0 / p);
    let mut table = Table::new(
        cfg.seed,
        &["case", "field", "lambda", "p", "cells", "lhs", "rhs", "grad_inner", "strain_outer", "ratio"],
    );
    let mut rigid_err: f64 = 0.0;
    let mut rigid_strain: f64 = 0.0;
    let mut scale_change: f64 = 0.0;
    let mut finite = true;
    for (i, (m, r)) in members.iter().zip(&reports).enumerate() {
        for (&l, rep) in SCALES.iter().zip(r) {
            table.push(vec![
                i.into(),
                m.name().into(),
                l.into(),
                p.into(),
                n.into(),
                rep.lhs.into(),
                rep.rhs.into(),
                rep.grad_inner.into(),
                rep.strain_outer.into(),
                rep.ratio().map_or(Cell::Empty, Cell::Num),
            ]);
        }
        let ratios = r.map(|rep| rep.ratio());
        finite &= ratios.iter().all(|c| c.is_some_and(f64::is_finite));
        match m {
            Member::Rigid(_) => {
                for rep in r {
                    rigid_err = rigid_err.max((rep.lhs / rep.grad_inner - root).abs() / root);
                    rigid_strain = rigid_strain.max(rep.strain_outer / rep.lhs);
                }
            }
            _ => {
                if let [Some(a), Some(b)] = ratios {
                    scale_change = scale_change.max((b / a - 1.0).abs());
                }
            }
        }
    }
    let assertions = vec![
        Assertion::at_most(
            "rigid gradient ratio",
            "max |‖∇U‖_D₂/‖∇U‖_D₁ − (|D₂|/|D₁|)^{1/p}| relative ≤ 1e-10",
            rigid_err,
            RIGID_TOL,
        ),
        Assertion::at_most("rigid strain vanishes", "max ‖e(U)‖_D₂/‖∇U‖_D₂ ≤ 1e-10", rigid_strain, RIGID_TOL),
        Assertion::at_most("constant stable under x → 2x", "max |C(2)/C(1) − 1| ≤ 0.1", scale_change, SCALE_TOL),
        Assertion::holds("constants finite", "every lhs/rhs finite", finite),
    ];
    Ok(Outcome { table, series: Vec::new(), assertions, gradient_dump: None })
}
