//! Experiment configuration files.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use korn_core::geometry::{
    default_surface, h_max, make_surface, make_thin_domain, MidSurface, ProfileKind, SurfaceKind, ThinDomain,
};
use korn_core::harmonic2d::{Profile1D, ThinDomain2D};
use korn_core::shellfield::Resolution;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    AnsatzSweep,
    Korn2Scaling,
    Lemma2dSuite,
    Lemma44Sweep,
    Subdivision,
    Extension,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 6] = [
        ExperimentKind::AnsatzSweep,
        ExperimentKind::Korn2Scaling,
        ExperimentKind::Lemma2dSuite,
        ExperimentKind::Lemma44Sweep,
        ExperimentKind::Subdivision,
        ExperimentKind::Extension,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::AnsatzSweep => "ansatz_sweep",
            ExperimentKind::Korn2Scaling => "korn2_scaling",
            ExperimentKind::Lemma2dSuite => "lemma2d_suite",
            ExperimentKind::Lemma44Sweep => "lemma44_sweep",
            ExperimentKind::Subdivision => "subdivision",
            ExperimentKind::Extension => "extension",
        }
    }

    pub fn summary(self) -> &'static str {
        match self {
            ExperimentKind::AnsatzSweep => "interpolation and second ratios of the Ansatz field over an h-ladder",
            ExperimentKind::Korn2Scaling => "p = 2 Korn constant by generalized eigenvalues, with a log-log fit in h",
            ExperimentKind::Lemma2dSuite => "planar harmonic rigidity checks, conjugate field and strip chain",
            ExperimentKind::Lemma44Sweep => "one-dimensional weighted inequality over random trigonometric polynomials",
            ExperimentKind::Subdivision => "piecewise extension bounds and partition additivity over an h-ladder",
            ExperimentKind::Extension => "extension constants on nested boxes under rescaling",
        }
    }

    /// Default h-ladder; empty when the experiment has none.
    pub fn default_ladder(self) -> Vec<f64> {
        match self {
            ExperimentKind::Lemma2dSuite => vec![0.1, 0.05, 0.02, 0.01],
            ExperimentKind::Lemma44Sweep | ExperimentKind::Extension => Vec::new(),
            _ => vec![0.1, 0.05, 0.025, 0.0125],
        }
    }

    fn uses_ladder(self) -> bool {
        !matches!(self, ExperimentKind::Lemma44Sweep | ExperimentKind::Extension)
    }

    fn uses_surface(self) -> bool {
        matches!(self, ExperimentKind::AnsatzSweep | ExperimentKind::Korn2Scaling | ExperimentKind::Subdivision)
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        ExperimentKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| LabError::config("experiment", format!("unknown experiment `{s}`")))
    }
}

/// Mid-surface and thickness profile of a three-dimensional thin domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceSpec {
    pub kind: SurfaceKind,
    /// Named surface parameters; the built-in instance of `kind` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<BTreeMap<String, f64>>,
    #[serde(default = "default_profile")]
    pub profile: ProfileKind,
    #[serde(default = "default_c1")]
    pub c1: f64,
    #[serde(default = "default_c2")]
    pub c2: f64,
}

impl Default for SurfaceSpec {
    fn default() -> Self {
        Self { kind: SurfaceKind::Plate, params: None, profile: default_profile(), c1: default_c1(), c2: default_c2() }
    }
}

fn default_profile() -> ProfileKind {
    ProfileKind::Constant
}

fn default_c1() -> f64 {
    2.0
}

fn default_c2() -> f64 {
    1.0
}

/// Planar domain `{0 < y < b, −φ₁ < x < φ₂}` of the harmonic suite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Domain2DSpec {
    pub b: f64,
    pub phi1: Profile1D,
    pub phi2: Profile1D,
    pub c1: f64,
    pub c2: f64,
}

impl Default for Domain2DSpec {
    fn default() -> Self {
        Self {
            b: 1.0,
            phi1: Profile1D::Tilted { rise: 0.5 },
            phi2: Profile1D::Wavy { amp: 0.5, k: 1.0 },
            c1: 2.0,
            c2: 2.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid2DSpec {
    pub n_s: usize,
    pub n_y: usize,
}

/// Optional discretization overrides; each applies to some experiments only.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResolutionOverrides {
    /// Base quadrature of `ansatz_sweep`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quadrature: Option<Resolution>,
    /// Fixed nodal space of `korn2_scaling` (otherwise sized per `h`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nodal: Option<Resolution>,
    /// Grid of `lemma2d_suite`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid2d: Option<Grid2DSpec>,
    /// Cells per piece side in `subdivision`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub piece_cells: Option<usize>,
    /// Cells through the thickness in `subdivision`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thickness_cells: Option<usize>,
    /// Cells per axis of the box quadrature in `extension`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub box_cells: Option<usize>,
}

/// Field analysed by `subdivision`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubdivisionField {
    #[default]
    Bump,
    Ansatz,
    Rigid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    #[serde(default)]
    pub surface: SurfaceSpec,
    #[serde(default)]
    pub domain2d: Domain2DSpec,
    #[serde(default = "default_p")]
    pub p: f64,
    /// Strictly decreasing thicknesses; the experiment default when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h_ladder: Option<Vec<f64>>,
    #[serde(default)]
    pub resolution: ResolutionOverrides,
    #[serde(default)]
    pub seed: u64,
    /// Number of random cases (`lemma44_sweep`) or random fields.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cases: Option<usize>,
    #[serde(default)]
    pub field: SubdivisionField,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

fn default_p() -> f64 {
    2.0
}

impl ExperimentConfig {
    /// A config with every optional field at its default.
    pub fn new(experiment: ExperimentKind) -> Self {
        Self {
            experiment,
            surface: SurfaceSpec::default(),
            domain2d: Domain2DSpec::default(),
            p: default_p(),
            h_ladder: None,
            resolution: ResolutionOverrides::default(),
            seed: 0,
            cases: None,
            field: SubdivisionField::default(),
            output_dir: None,
        }
    }

    /// Parses JSON, reporting the path of the offending field.
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let path = if path == "." { "<root>".to_string() } else { path };
            LabError::config(path, e.into_inner().to_string())
        })
    }

    /// Reads and validates a config file.
    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|source| LabError::Read { path: path.to_path_buf(), source })?;
        let cfg = Self::from_json(&text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn ladder(&self) -> Vec<f64> {
        self.h_ladder.clone().unwrap_or_else(|| self.experiment.default_ladder())
    }

    pub fn cases(&self) -> usize {
        self.cases.unwrap_or(100)
    }

    pub fn mid_surface(&self) -> Result<MidSurface> {
        match &self.surface.params {
            None => Ok(default_surface(self.surface.kind)),
            Some(params) => {
                make_surface(self.surface.kind, params).map_err(|e| LabError::config("surface.params", e.to_string()))
            }
        }
    }

    pub fn thin_domain(&self, h: f64) -> Result<ThinDomain> {
        let s = self.mid_surface()?;
        make_thin_domain(&s, h, self.surface.profile, self.surface.c1, self.surface.c2)
            .map_err(|e| LabError::config("surface", e.to_string()))
    }

    pub fn domain2d(&self, h: f64) -> Result<ThinDomain2D> {
        let d = &self.domain2d;
        ThinDomain2D::new(d.b, h, d.phi1, d.phi2, d.c1, d.c2).map_err(|e| LabError::config("domain2d", e.to_string()))
    }

    /// Checks every invariant of the config; errors name the field path.
    pub fn validate(&self) -> Result<()> {
        let kind = self.experiment;
        if !(self.p.is_finite() && self.p > 1.0) {
            return Err(LabError::config("p", format!("p must lie in (1, ∞), got {}", self.p)));
        }
        if kind == ExperimentKind::Korn2Scaling && self.p != 2.0 {
            return Err(LabError::config("p", format!("korn2_scaling needs p = 2, got {}", self.p)));
        }
        if self.cases == Some(0) {
            return Err(LabError::config("cases", "must be at least 1"));
        }
        self.validate_overrides()?;
        let ladder = self.ladder();
        if !kind.uses_ladder() {
            if self.h_ladder.as_ref().is_some_and(|l| !l.is_empty()) {
                return Err(LabError::config("h_ladder", format!("not used by {kind}")));
            }
            return Ok(());
        }
        let min_len = if kind == ExperimentKind::Korn2Scaling { 3 } else { 2 };
        if ladder.len() < min_len {
            return Err(LabError::config("h_ladder", format!("{kind} needs at least {min_len} values")));
        }
        if let Some(i) = (1..ladder.len()).find(|&i| !(ladder[i] < ladder[i - 1])) {
            return Err(LabError::config(format!("h_ladder[{i}]"), "ladder must be strictly decreasing"));
        }
        let upper = if kind.uses_surface() {
            let s = self.mid_surface()?;
            if !(self.surface.c1.is_finite() && self.surface.c1 >= 1.0) {
                return Err(LabError::config("surface.c1", format!("must be ≥ 1, got {}", self.surface.c1)));
            }
            h_max(&s, self.surface.c1).map_err(|e| LabError::config("surface", e.to_string()))?
        } else {
            self.domain2d.b / 8.0
        };
        for (i, &h) in ladder.iter().enumerate() {
            if !(h > 0.0 && h < upper) {
                return Err(LabError::config(
                    format!("h_ladder[{i}]"),
                    format!("h = {h} outside (0, h_max = {upper})"),
                ));
            }
            if kind.uses_surface() {
                self.thin_domain(h)?;
            } else {
                self.domain2d(h)?;
            }
        }
        Ok(())
    }

    fn validate_overrides(&self) -> Result<()> {
        use ExperimentKind::*;
        let r = &self.resolution;
        let kind = self.experiment;
        let checks: [(&str, bool, &[ExperimentKind]); 6] = [
            ("quadrature", r.quadrature.is_some(), &[AnsatzSweep]),
            ("nodal", r.nodal.is_some(), &[Korn2Scaling]),
            ("grid2d", r.grid2d.is_some(), &[Lemma2dSuite]),
            ("piece_cells", r.piece_cells.is_some(), &[Subdivision]),
            ("thickness_cells", r.thickness_cells.is_some(), &[Subdivision]),
            ("box_cells", r.box_cells.is_some(), &[Extension]),
        ];
        for (name, set, users) in checks {
            if set && !users.contains(&kind) {
                return Err(LabError::config(format!("resolution.{name}"), format!("not used by {kind}")));
            }
        }
        for (name, res) in [("quadrature", r.quadrature), ("nodal", r.nodal)] {
            if let Some(res) = res {
                if res.n_theta == 0 || res.n_z == 0 || res.n_t == 0 {
                    return Err(LabError::config(format!("resolution.{name}"), "cell counts must be positive"));
                }
            }
        }
        if let Some(g) = r.grid2d {
            if g.n_s < 8 || g.n_y < 64 {
                return Err(LabError::config(
                    "resolution.grid2d",
                    format!("need n_s ≥ 8 and n_y ≥ 64, got ({}, {})", g.n_s, g.n_y),
                ));
            }
        }
        for (name, v) in
            [("piece_cells", r.piece_cells), ("thickness_cells", r.thickness_cells), ("box_cells", r.box_cells)]
        {
            if v == Some(0) {
                return Err(LabError::config(format!("resolution.{name}"), "must be positive"));
            }
        }
        if self.field != SubdivisionField::default() && kind != Subdivision {
            return Err(LabError::config("field", format!("not used by {kind}")));
        }
        Ok(())
    }
}
