use korn_core::harmonic2d::check_lemma44;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{Outcome, RunSettings};
use crate::config::ExperimentConfig;
use crate::error::{Context, Result};
use crate::report::Assertion;
use crate::table::Table;

/// Relative slack admitted on the right-hand side.
pub const SLACK: f64 = 1e-7;
/// Closed-form sides for `f(t) = t` on `[0, 1]`, `λ = ½`, `p = 2`.
pub const CLOSED_FORM: (f64, f64) = (7.0 / 24.0, 37.0 / 24.0);
const CLOSED_FORM_TOL: f64 = 1e-10;

/// `c₀ + Σₖ (aₖ cos kt + bₖ sin kt)`.
#[derive(Debug, Clone, PartialEq)]
struct TrigPolynomial {
    c0: f64,
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl TrigPolynomial {
    fn random(rng: &mut impl Rng) -> Self {
        let degree = rng.random_range(1..=4);
        let mut coeff = || rng.random_range(-1.0..1.0);
        let c0 = coeff();
        let cos = (0..degree).map(|_| coeff()).collect();
        let sin = (0..degree).map(|_| coeff()).collect();
        Self { c0, cos, sin }
    }

    fn degree(&self) -> usize {
        self.cos.len()
    }

    fn value(&self, t: f64) -> f64 {
        self.c0
            + (1..=self.degree())
                .map(|k| {
                    let (s, c) = (k as f64 * t).sin_cos();
                    self.cos[k - 1] * c + self.sin[k - 1] * s
                })
                .sum::<f64>()
    }

    fn derivative(&self, t: f64) -> f64 {
        (1..=self.degree())
            .map(|k| {
                let kf = k as f64;
                let (s, c) = (kf * t).sin_cos();
                kf * (self.sin[k - 1] * c - self.cos[k - 1] * s)
            })
            .sum()
    }
}

struct Case {
    f: Option<TrigPolynomial>,
    a: f64,
    b: f64,
    lambda: f64,
    p: f64,
}

pub(super) fn run(cfg: &ExperimentConfig, _: &RunSettings) -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut cases = vec![Case { f: None, a: 0.0, b: 1.0, lambda: 0.5, p: 2.0 }];
    for _ in 0..cfg.cases() {
        let f = TrigPolynomial::random(&mut rng);
        let a = rng.random_range(-1.0..1.0);
        let b = a + rng.random_range(0.5..3.0);
        let lambda = rng.random_range(0.05..0.95);
        let p = rng.random_range(1.1..5.0);
        cases.push(Case { f: Some(f), a, b, lambda, p });
    }
    let sides: Vec<(f64, f64)> = cases
        .par_iter()
        .enumerate()
        .map(|(i, c)| {
            let ctx = || format!("case {i}");
            match &c.f {
                Some(f) => check_lemma44(&|t| f.value(t), &|t| f.derivative(t), c.a, c.b, c.lambda, c.p).context(ctx),
                None => check_lemma44(&|t| t, &|_| 1.0, c.a, c.b, c.lambda, c.p).context(ctx),
            }
        })
        .collect::<Result<_>>()?;

    let mut table =
        Table::new(cfg.seed, &["case", "function", "degree", "a", "b", "lambda", "p", "lhs", "rhs", "ratio"]);
    for (i, (c, &(lhs, rhs))) in cases.iter().zip(&sides).enumerate() {
        let (name, degree) = match &c.f {
            Some(f) => ("trig".to_string(), f.degree()),
            None => ("t".to_string(), 1),
        };
        table.push(vec![
            i.into(),
            name.into(),
            degree.into(),
            c.a.into(),
            c.b.into(),
            c.lambda.into(),
            c.p.into(),
            lhs.into(),
            rhs.into(),
            (lhs / rhs).into(),
        ]);
    }
    let worst = sides.iter().map(|&(l, r)| l / r).fold(0.0, f64::max);
    let (l0, r0) = sides[0];
    let closed_err = (l0 - CLOSED_FORM.0).abs().max((r0 - CLOSED_FORM.1).abs());
    let assertions = vec![
        Assertion::at_most("lhs ≤ rhs (1 + 1e-7)", "max lhs/rhs ≤ 1 + 1e-7", worst, 1.0 + SLACK),
        Assertion::at_most(
            "closed form f(t) = t",
            "max(|lhs − 7/24|, |rhs − 37/24|) ≤ 1e-10",
            closed_err,
            CLOSED_FORM_TOL,
        ),
    ];
    Ok(Outcome { table, series: Vec::new(), assertions, gradient_dump: None })
}
