//! Run configuration, read from TOML.
//!
//! ```toml
//! [model]
//! N = 30
//! J = 0.3
//! Omega = -1.0
//! omega = -0.13
//! long_range = [{ d = 2, J = 0.05 }]   # optional
//!
//! [sector]
//! m = 3
//!
//! [initial]
//! sites = [1, 2, 3]                    # 1-based, one entry per raised magnon
//!
//! [grid]
//! t_max = 30.0                         # units of 1/J, default N
//! steps = 2000
//! ```
//!
//! `[analyses]`, `[output]` and `[wavefront]` are optional; see the field
//! defaults below.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use spinrelax::basis::{DEFAULT_MAX_DIM, MIN_SITES};
use spinrelax::hamiltonian::ModelParams;
use spinrelax::wavefront::FitSites;

use crate::CliError;

pub const DEFAULT_STEPS: usize = 2000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: Model,
    pub sector: Sector,
    pub initial: Initial,
    #[serde(default)]
    pub grid: Grid,
    #[serde(default)]
    pub analyses: Analyses,
    #[serde(default)]
    pub output: Output,
    #[serde(default)]
    pub wavefront: Wavefront,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Model {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "J")]
    pub j: f64,
    #[serde(rename = "Omega")]
    pub quadratic: f64,
    #[serde(rename = "omega")]
    pub linear: f64,
    #[serde(default)]
    pub long_range: Vec<LongRange>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LongRange {
    pub d: usize,
    #[serde(rename = "J")]
    pub j: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sector {
    pub m: usize,
    #[serde(default = "default_max_dim")]
    pub max_dim: usize,
}

fn default_max_dim() -> usize {
    DEFAULT_MAX_DIM
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Initial {
    pub sites: Vec<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    /// In units of `1/J`.
    pub t_max: Option<f64>,
    pub steps: Option<usize>,
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Analyses {
    #[serde(default = "yes")]
    pub evolve: bool,
    #[serde(default = "yes")]
    pub steady: bool,
    #[serde(default = "yes")]
    pub gobbs: bool,
    #[serde(default = "yes")]
    pub wavefront: bool,
}

impl Default for Analyses {
    fn default() -> Self {
        Self {
            evolve: true,
            steady: true,
            gobbs: true,
            wavefront: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Output {
    #[serde(default = "default_directory")]
    pub directory: PathBuf,
    #[serde(default = "yes")]
    pub csv: bool,
    #[serde(default = "yes")]
    pub json: bool,
    #[serde(default = "yes")]
    pub svg: bool,
}

fn default_directory() -> PathBuf {
    PathBuf::from("spinrelax-out")
}

impl Default for Output {
    fn default() -> Self {
        Self {
            directory: default_directory(),
            csv: true,
            json: true,
            svg: true,
        }
    }
}

/// Front-fit overrides. Times are in units of `1/J`, sites are 1-based.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Wavefront {
    pub window: Option<[f64; 2]>,
    pub fit_distances: Option<[usize; 2]>,
    pub fit_sites: Option<Vec<usize>>,
}

fn invalid(field: &str, message: impl Into<String>) -> CliError {
    CliError::Invalid {
        field: field.to_string(),
        message: message.into(),
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Parse(e.to_string()))
    }

    /// Check every field and fill in grid defaults.
    pub fn resolve(mut self) -> Result<Self, CliError> {
        let n = self.model.n;
        if n < MIN_SITES {
            return Err(invalid("model.N", format!("need at least {MIN_SITES} sites, got {n}")));
        }
        for (field, value) in [
            ("model.J", self.model.j),
            ("model.Omega", self.model.quadratic),
            ("model.omega", self.model.linear),
        ] {
            if !value.is_finite() {
                return Err(invalid(field, format!("must be finite, got {value}")));
            }
        }
        if self.model.j == 0.0 {
            return Err(invalid("model.J", "must be nonzero (times are measured in 1/J)"));
        }
        for (k, lr) in self.model.long_range.iter().enumerate() {
            if lr.d < 2 || lr.d > n / 2 {
                return Err(invalid(
                    &format!("model.long_range[{k}].d"),
                    format!("distance must lie in 2..={}, got {}", n / 2, lr.d),
                ));
            }
            if !lr.j.is_finite() {
                return Err(invalid(&format!("model.long_range[{k}].J"), "must be finite"));
            }
        }

        let m = self.sector.m;
        if m > 2 * n {
            return Err(invalid("sector.m", format!("at most 2N = {} magnons fit, got {m}", 2 * n)));
        }
        let sites = &self.initial.sites;
        if sites.len() != m {
            return Err(invalid(
                "initial.sites",
                format!("lists {} raisings but sector.m = {m}", sites.len()),
            ));
        }
        for &s in sites {
            if s == 0 || s > n {
                return Err(invalid("initial.sites", format!("site {s} outside 1..={n}")));
            }
            let count = sites.iter().filter(|&&x| x == s).count();
            if count > 2 {
                return Err(invalid(
                    "initial.sites",
                    format!("site {s} raised {count} times, but (S+)^3 = 0 on spin-1"),
                ));
            }
        }

        let t_max = self.grid.t_max.unwrap_or(n as f64);
        if !(t_max > 0.0) || !t_max.is_finite() {
            return Err(invalid("grid.t_max", format!("must be positive, got {t_max}")));
        }
        let steps = self.grid.steps.unwrap_or(DEFAULT_STEPS);
        if steps < 2 {
            return Err(invalid("grid.steps", format!("need at least 2, got {steps}")));
        }
        self.grid = Grid {
            t_max: Some(t_max),
            steps: Some(steps),
        };

        if let Some([lo, hi]) = self.wavefront.window {
            if !(lo >= 0.0 && hi > lo) {
                return Err(invalid("wavefront.window", format!("need 0 <= lo < hi, got [{lo}, {hi}]")));
            }
        }
        if self.wavefront.fit_distances.is_some() && self.wavefront.fit_sites.is_some() {
            return Err(invalid("wavefront", "set at most one of fit_distances and fit_sites"));
        }
        if let Some([lo, hi]) = self.wavefront.fit_distances {
            if lo > hi {
                return Err(invalid("wavefront.fit_distances", format!("empty range [{lo}, {hi}]")));
            }
        }
        if let Some(fit) = &self.wavefront.fit_sites {
            if let Some(&s) = fit.iter().find(|&&s| s == 0 || s > n) {
                return Err(invalid("wavefront.fit_sites", format!("site {s} outside 1..={n}")));
            }
        }
        Ok(self)
    }

    pub fn params(&self) -> ModelParams {
        self.model.long_range.iter().fold(
            ModelParams::new(self.model.n, self.model.j, self.model.quadratic, self.model.linear),
            |p, lr| p.with_long_range(lr.d, lr.j),
        )
    }

    /// 0-based raised sites.
    pub fn raised_sites(&self) -> Vec<usize> {
        self.initial.sites.iter().map(|s| s - 1).collect()
    }

    /// Absolute times `t = (J t) / J`.
    pub fn times(&self) -> Vec<f64> {
        let t_max = self.grid.t_max.unwrap_or(self.model.n as f64) / self.model.j.abs();
        spinrelax::evolve::time_grid(t_max, self.grid.steps.unwrap_or(DEFAULT_STEPS))
    }

    pub fn fit_sites(&self) -> FitSites {
        match (&self.wavefront.fit_distances, &self.wavefront.fit_sites) {
            (Some([min, max]), _) => FitSites::Distances { min: *min, max: *max },
            (None, Some(sites)) => FitSites::Sites(sites.iter().map(|s| s - 1).collect()),
            (None, None) => FitSites::Auto,
        }
    }

    pub fn front_window(&self) -> Option<(f64, f64)> {
        let j = self.model.j.abs();
        self.wavefront.window.map(|[lo, hi]| (lo / j, hi / j))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).unwrap_or_default()
    }
}
