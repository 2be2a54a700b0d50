//! The in-memory and JSON form of a run.

use std::path::PathBuf;

use korn_core::korn::{fit_scaling, ScalingFit};
use serde::Serialize;

use crate::config::ExperimentConfig;

/// A checked inequality with both sides.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Assertion {
    pub name: String,
    /// The inequality in words, e.g. `max/min ≤ 4`.
    pub inequality: String,
    pub lhs: f64,
    pub rhs: f64,
    pub passed: bool,
}

impl Assertion {
    /// `lhs ≤ rhs`
    pub fn at_most(name: impl Into<String>, inequality: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        Self { name: name.into(), inequality: inequality.into(), lhs, rhs, passed: lhs <= rhs }
    }

    /// `lhs ≥ rhs`
    pub fn at_least(name: impl Into<String>, inequality: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        Self { name: name.into(), inequality: inequality.into(), lhs, rhs, passed: lhs >= rhs }
    }

    /// `lo ≤ value ≤ hi`, reported against the violated side.
    pub fn within(name: impl Into<String>, value: f64, lo: f64, hi: f64) -> Self {
        let passed = value >= lo && value <= hi;
        let rhs = if value < lo { lo } else { hi };
        Self { name: name.into(), inequality: format!("{lo} ≤ value ≤ {hi}"), lhs: value, rhs, passed }
    }

    /// Records a condition that has no natural numeric sides.
    pub fn holds(name: impl Into<String>, inequality: impl Into<String>, passed: bool) -> Self {
        let v = if passed { 1.0 } else { 0.0 };
        Self { name: name.into(), inequality: inequality.into(), lhs: v, rhs: 1.0, passed }
    }

    /// `max/min ≤ factor` over a sample; non-positive samples fail.
    pub fn band(name: impl Into<String>, values: &[f64], factor: f64) -> Self {
        let (lo, hi) = min_max(values);
        let spread = if lo > 0.0 { hi / lo } else { f64::INFINITY };
        Self::at_most(name, format!("max/min ≤ {factor}"), spread, factor)
    }

    /// Every value within `factor` of the median: `max(v/med, med/v) ≤ factor`.
    pub fn near_median(name: impl Into<String>, values: &[f64], factor: f64) -> Self {
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let n = sorted.len();
        let med = if n == 0 {
            f64::NAN
        } else if n % 2 == 1 {
            sorted[n / 2]
        } else {
            0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
        };
        let worst = values
            .iter()
            .map(|&v| if v > 0.0 && med > 0.0 { (v / med).max(med / v) } else { f64::INFINITY })
            .fold(if n == 0 { f64::INFINITY } else { 1.0 }, f64::max);
        Self::at_most(name, format!("max(C/median, median/C) ≤ {factor}"), worst, factor)
    }
}

pub(crate) fn min_max(values: &[f64]) -> (f64, f64) {
    values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
}

/// Observed constants `C(h)` along a ladder.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Series {
    pub name: String,
    pub samples: Vec<(f64, f64)>,
}

impl Series {
    pub fn new(name: impl Into<String>, samples: Vec<(f64, f64)>) -> Self {
        Self { name: name.into(), samples }
    }
}

/// A power-law fit of one series.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitSummary {
    pub series: String,
    pub c: f64,
    pub alpha: f64,
    pub residual: f64,
}

impl FitSummary {
    /// `None` when the series cannot be fitted (fewer than three samples or
    /// non-positive constants).
    pub fn of(series: &Series) -> Option<Self> {
        let ScalingFit { c, alpha, residual, .. } = fit_scaling(&series.samples).ok()?;
        Some(Self { series: series.name.clone(), c, alpha, residual })
    }

    pub fn predict(&self, h: f64) -> f64 {
        self.c * h.powf(-self.alpha)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub experiment: String,
    pub seed: u64,
    pub config: ExperimentConfig,
    pub resolution_scale: f64,
    pub threads: usize,
    /// One object per CSV row.
    pub cases: serde_json::Value,
    pub series: Vec<Series>,
    pub fits: Vec<FitSummary>,
    pub assertions: Vec<Assertion>,
    pub passed: bool,
    pub wall_time_s: f64,
    pub artifacts: Vec<PathBuf>,
}

impl RunReport {
    pub fn failures(&self) -> impl Iterator<Item = &Assertion> {
        self.assertions.iter().filter(|a| !a.passed)
    }
}
