//! Run configuration files.
//!
//! ```toml
//! [model]
//! name = "quadratic"
//! gp0 = 1.0
//! gpp0 = -0.6
//!
//! [wave]
//! nu = [0.25, 0.5, 1.0]   # or a single number; default 0.5
//! t_minus = 1.0           # default
//! t_plus = 0.0            # default
//! c_sign = 1              # optional; default: whichever sign admits a wave
//!
//! [numeric]
//! method = "ode"          # closed-form | ode | quadrature; default closed-form when available
//! rel_tol = 1e-10
//! abs_tol = 1e-10
//! samples = 4001
//!
//! [output]
//! out_dir = "profiles"
//! ```
//!
//! Unknown keys are rejected. Model parameters left out take catalog defaults.

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::constitutive::{ConstitutiveModel, ModelSpec};
use crate::error::{Error, Result};
use crate::profile::{IntegratorConfig, Method, DEFAULT_SAMPLES, DEFAULT_SPAN_WIDTHS, DEFAULT_TOL};
use crate::wave::{BoundaryStates, ReducedField, SpeedSign};

pub const DEFAULT_NU: f64 = 0.5;
pub const DEFAULT_SWEEP: [f64; 3] = [0.25, 0.5, 1.0];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelSection,
    #[serde(default)]
    pub wave: WaveSection,
    #[serde(default)]
    pub numeric: NumericSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSection {
    pub name: String,
    #[serde(flatten)]
    pub params: BTreeMap<String, f64>,
}

impl ModelSection {
    pub fn spec(&self) -> ModelSpec {
        ModelSpec { model: self.name.clone(), params: self.params.clone() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NuSetting {
    One(f64),
    Many(Vec<f64>),
}

impl NuSetting {
    pub fn values(&self) -> Vec<f64> {
        match self {
            NuSetting::One(v) => vec![*v],
            NuSetting::Many(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaveSection {
    #[serde(default = "default_nu")]
    pub nu: NuSetting,
    #[serde(default = "one")]
    pub t_minus: f64,
    #[serde(default)]
    pub t_plus: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_sign: Option<i8>,
}

fn default_nu() -> NuSetting {
    NuSetting::One(DEFAULT_NU)
}

fn one() -> f64 {
    1.0
}

impl Default for WaveSection {
    fn default() -> Self {
        WaveSection { nu: default_nu(), t_minus: 1.0, t_plus: 0.0, c_sign: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NumericSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<Method>,
    #[serde(default = "default_tol")]
    pub rel_tol: f64,
    #[serde(default = "default_tol")]
    pub abs_tol: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_step: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xi_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xi_max: Option<f64>,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_tol")]
    pub equilibrium_cutoff: f64,
}

fn default_tol() -> f64 {
    DEFAULT_TOL
}

fn default_samples() -> usize {
    DEFAULT_SAMPLES
}

impl Default for NumericSection {
    fn default() -> Self {
        NumericSection {
            method: None,
            rel_tol: DEFAULT_TOL,
            abs_tol: DEFAULT_TOL,
            max_step: None,
            xi_min: None,
            xi_max: None,
            samples: DEFAULT_SAMPLES,
            equilibrium_cutoff: DEFAULT_TOL,
        }
    }
}

impl NumericSection {
    /// The integrator settings for `field`: unset domain bounds default to
    /// `±20d` and the step cap to `d`, with `d` the field's exact width.
    pub fn integrator(&self, field: &ReducedField) -> Result<IntegratorConfig> {
        let d = field.width()?;
        let cfg = IntegratorConfig {
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            max_step: self.max_step.unwrap_or(d),
            xi_min: self.xi_min.unwrap_or(-DEFAULT_SPAN_WIDTHS * d),
            xi_max: self.xi_max.unwrap_or(DEFAULT_SPAN_WIDTHS * d),
            samples: self.samples,
            equilibrium_cutoff: self.equilibrium_cutoff,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plot_script: Option<PathBuf>,
}

impl RunConfig {
    /// A config for `model` with every other setting at its default.
    pub fn for_model(model: &ConstitutiveModel) -> Self {
        let spec = ModelSpec::from(model);
        RunConfig {
            model: ModelSection { name: spec.model, params: spec.params },
            wave: WaveSection::default(),
            numeric: NumericSection::default(),
            output: OutputSection::default(),
        }
    }

    pub fn build_model(&self) -> Result<ConstitutiveModel> {
        self.model.spec().build()
    }

    pub fn boundary(&self) -> Result<BoundaryStates> {
        BoundaryStates::new(self.wave.t_minus, self.wave.t_plus)
    }

    pub fn c_sign(&self) -> Option<SpeedSign> {
        self.wave.c_sign.and_then(SpeedSign::from_i8)
    }

    pub fn nu_values(&self) -> Vec<f64> {
        self.wave.nu.values()
    }

    pub fn validate(&self) -> Result<()> {
        self.build_model()?;
        self.boundary()?;
        let nus = self.nu_values();
        if nus.is_empty() {
            return Err(Error::Config("wave.nu: need at least one viscosity".into()));
        }
        if let Some(v) = nus.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::Config(format!("wave.nu: viscosity must be finite and non-negative, got {v}")));
        }
        if let Some(s) = self.wave.c_sign {
            if SpeedSign::from_i8(s).is_none() {
                return Err(Error::Config(format!("wave.c_sign: must be 1 or -1, got {s}")));
            }
        }
        let n = &self.numeric;
        for (field, v) in [("rel_tol", n.rel_tol), ("abs_tol", n.abs_tol)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("numeric.{field}: must be positive, got {v}")));
            }
        }
        if !(n.equilibrium_cutoff >= 0.0 && n.equilibrium_cutoff.is_finite()) {
            return Err(Error::Config(format!(
                "numeric.equilibrium_cutoff: must be non-negative, got {}",
                n.equilibrium_cutoff
            )));
        }
        if let Some(v) = n.max_step.filter(|v| !(*v > 0.0 && v.is_finite())) {
            return Err(Error::Config(format!("numeric.max_step: must be positive, got {v}")));
        }
        if let Some(v) = n.xi_min.filter(|v| !(*v < 0.0 && v.is_finite())) {
            return Err(Error::Config(format!("numeric.xi_min: must be negative, got {v}")));
        }
        if let Some(v) = n.xi_max.filter(|v| !(*v > 0.0 && v.is_finite())) {
            return Err(Error::Config(format!("numeric.xi_max: must be positive, got {v}")));
        }
        if n.samples < 3 {
            return Err(Error::Config(format!("numeric.samples: need at least 3, got {}", n.samples)));
        }
        Ok(())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

/// Parses and validates a config file.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}
