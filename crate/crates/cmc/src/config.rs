//! JSON run configuration and its translation into core types.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use cmc_core::grid::GridSpec;
use cmc_core::laxpair::DifferenceScheme;
use cmc_core::magnus::IntegratorConfig;
use cmc_core::seeds::{
    connection_from_seed, ConnectionField, FixedNilpotent, OdeProfile, OdeProfileSpec, OuterProduct, RankOneSeed,
    TanProfile, DEFAULT_POLE_MARGIN,
};
use cmc_core::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Largest accepted grid dimension.
pub const MAX_GRID_POINTS: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexValue {
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

impl From<ComplexValue> for Complex64 {
    fn from(c: ComplexValue) -> Self {
        Complex64::new(c.re, c.im)
    }
}

fn default_pole_margin() -> f64 {
    DEFAULT_POLE_MARGIN
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case", deny_unknown_fields)]
pub enum SeedConfig {
    Tan {
        #[serde(rename = "C")]
        c: f64,
        delta: f64,
        lambda: ComplexValue,
        #[serde(default = "default_pole_margin")]
        pole_margin: f64,
    },
    Ode {
        g0: f64,
        rho0: f64,
        lambda: ComplexValue,
        x0: f64,
        x_min: f64,
        x_max: f64,
        #[serde(default)]
        step: Option<f64>,
    },
    FixedNilpotent {
        a: ComplexValue,
        lambda: ComplexValue,
    },
    OuterProduct {
        v: [ComplexValue; 2],
        w: [ComplexValue; 2],
        lambda: ComplexValue,
    },
}

/// Profile seeds are only flat for real `λ > 0`.
fn real_profile_lambda(lambda: ComplexValue) -> Result<f64, CliError> {
    if lambda.im != 0.0 || !(lambda.re > 0.0) {
        return Err(CliError::Config("profile seeds need a real lambda > 0".into()));
    }
    Ok(lambda.re)
}

impl SeedConfig {
    pub fn lambda(&self) -> Complex64 {
        match self {
            SeedConfig::Tan { lambda, .. }
            | SeedConfig::Ode { lambda, .. }
            | SeedConfig::FixedNilpotent { lambda, .. }
            | SeedConfig::OuterProduct { lambda, .. } => (*lambda).into(),
        }
    }

    pub fn connection(&self) -> Result<ConnectionField, CliError> {
        let seed = match *self {
            SeedConfig::Tan { c, delta, lambda, pole_margin } => {
                let l = real_profile_lambda(lambda)?;
                RankOneSeed::Tan(TanProfile::with_pole_margin(c, delta, l, pole_margin).map_err(CliError::config)?)
            }
            SeedConfig::Ode { g0, rho0, lambda, x0, x_min, x_max, step } => {
                let l = real_profile_lambda(lambda)?;
                let spec = OdeProfileSpec { g0, rho0, lambda: l, x0, x_min, x_max, step: step.unwrap_or(1e-3) };
                RankOneSeed::Ode(Arc::new(OdeProfile::build(spec).map_err(CliError::config)?))
            }
            SeedConfig::FixedNilpotent { a, .. } => RankOneSeed::FixedNilpotent(FixedNilpotent::constant(a.into())),
            SeedConfig::OuterProduct { v, w, .. } => {
                RankOneSeed::OuterProduct(OuterProduct::constant([v[0].into(), v[1].into()], [w[0].into(), w[1].into()]))
            }
        };
        connection_from_seed(seed, self.lambda()).map_err(CliError::config)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
    pub nx: usize,
    pub ny: usize,
}

impl GridConfig {
    pub fn spec(&self) -> Result<GridSpec, CliError> {
        for (name, n) in [("nx", self.nx), ("ny", self.ny)] {
            if !(2..=MAX_GRID_POINTS).contains(&n) {
                return Err(CliError::Config(format!("{name} = {n} is outside [2, {MAX_GRID_POINTS}]")));
            }
        }
        GridSpec::new(self.x0, self.x1, self.y0, self.y1, self.nx, self.ny).map_err(CliError::config)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorSection {
    pub atol: Option<f64>,
    pub h0: Option<f64>,
    pub hmin: Option<f64>,
    pub hmax: Option<f64>,
    pub safety: Option<f64>,
    pub renormalize_every: Option<usize>,
}

impl IntegratorSection {
    pub fn config(&self) -> Result<IntegratorConfig, CliError> {
        let d = IntegratorConfig::default();
        let cfg = IntegratorConfig {
            atol: self.atol.unwrap_or(d.atol),
            h0: self.h0.unwrap_or(d.h0),
            hmin: self.hmin.unwrap_or(d.hmin),
            hmax: self.hmax.unwrap_or(d.hmax),
            safety: self.safety.unwrap_or(d.safety),
            renormalize_every: self.renormalize_every.unwrap_or(d.renormalize_every),
        };
        cfg.validate().map_err(CliError::config)?;
        Ok(cfg)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verbosity {
    #[default]
    Summary,
    Full,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeConfig {
    #[default]
    Central,
    Richardson,
}

impl From<SchemeConfig> for DifferenceScheme {
    fn from(s: SchemeConfig) -> Self {
        match s {
            SchemeConfig::Central => DifferenceScheme::Central,
            SchemeConfig::Richardson => DifferenceScheme::Richardson,
        }
    }
}

fn default_period() -> f64 {
    2.0 * PI
}

fn default_pieces() -> usize {
    8
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum LoopConfig {
    /// Closed polyline given as `[x, y]` pairs.
    Polyline { points: Vec<[f64; 2]> },
    Rectangle { x0: f64, y0: f64, width: f64, height: f64 },
    /// `y ↦ y + period` at fixed `x`, for connections periodic in `y`.
    Periodic {
        x: f64,
        #[serde(default)]
        y0: f64,
        #[serde(default = "default_period")]
        period: f64,
        #[serde(default = "default_pieces")]
        pieces: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RealProfile {
    Constant { value: f64 },
    Linear { intercept: f64, slope: f64 },
    /// Values at the interior nodes.
    Samples { values: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ComplexProfile {
    Constant { value: ComplexValue },
    /// Values at the interior nodes.
    Samples { values: Vec<ComplexValue> },
}

fn default_intervals() -> usize {
    200
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JacobiConfig {
    pub s_min: f64,
    pub s_max: f64,
    /// Number of grid intervals; potentials live on the interior nodes.
    #[serde(default = "default_intervals")]
    pub intervals: usize,
    #[serde(rename = "H")]
    pub h: f64,
    pub modes: Vec<i64>,
    pub u: RealProfile,
    #[serde(rename = "Q")]
    pub q: ComplexProfile,
}

impl JacobiConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        if !(self.s_min.is_finite() && self.s_max.is_finite() && self.s_max > self.s_min) {
            return Err(CliError::Config("jacobi needs finite s_min < s_max".into()));
        }
        if !(2..=100_000).contains(&self.intervals) {
            return Err(CliError::Config("jacobi intervals must lie in [2, 100000]".into()));
        }
        if !(0.0..1.0).contains(&self.h) {
            return Err(CliError::Config(format!("H = {} is outside [0, 1)", self.h)));
        }
        if self.modes.is_empty() {
            return Err(CliError::Config("jacobi needs at least one mode".into()));
        }
        let interior = self.intervals - 1;
        let lengths = [
            match &self.u {
                RealProfile::Samples { values } => Some(values.len()),
                _ => None,
            },
            match &self.q {
                ComplexProfile::Samples { values } => Some(values.len()),
                _ => None,
            },
        ];
        if lengths.iter().flatten().any(|&n| n != interior) {
            return Err(CliError::Config(format!("profile samples must have {interior} entries")));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProjectionConfig {
    /// North pole first, south pole if that fails.
    #[default]
    Auto,
    North,
    South,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum NuSource {
    /// `ν = z̄/2`.
    HalfConjugate,
    Constant { value: ComplexValue },
    /// CSV with columns `x, y, Re ν, Im ν` on a rectangular grid; relative
    /// paths are resolved against the config file.
    Csv { path: PathBuf },
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AaConfig {
    #[serde(default)]
    pub projection: ProjectionConfig,
    /// Mean curvature; defaults to the one attached to the seed's `λ`.
    #[serde(rename = "H")]
    pub h: Option<f64>,
    pub nu: Option<NuSource>,
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub seed: Option<SeedConfig>,
    pub grid: Option<GridConfig>,
    #[serde(default)]
    pub integrator: IntegratorSection,
    /// Output directory.
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub verbosity: Verbosity,
    /// Threshold of the command's pass/fail decision.
    pub tolerance: Option<f64>,
    #[serde(default)]
    pub scheme: SchemeConfig,
    #[serde(rename = "loop")]
    pub loop_: Option<LoopConfig>,
    pub jacobi: Option<JacobiConfig>,
    pub aa: Option<AaConfig>,
    /// Directory of the config file, for resolving relative paths.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("invalid config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::from_json(&text)?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(cfg)
    }

    pub fn seed(&self) -> Result<&SeedConfig, CliError> {
        self.seed.as_ref().ok_or_else(|| CliError::Config("config needs a seed section".into()))
    }

    pub fn grid_spec(&self) -> Result<GridSpec, CliError> {
        self.grid.as_ref().ok_or_else(|| CliError::Config("config needs a grid section".into()))?.spec()
    }

    pub fn resolve(&self, path: &Path) -> PathBuf {
        if path.is_absolute() {
            path.to_path_buf()
        } else {
            self.base_dir.join(path)
        }
    }
}
