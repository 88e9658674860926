// Copyright 2026 Pblockade Contributors
// SPDX-License-Identifier: Apache-2.0

//! Run configuration with explicit unit tags.
//!
//! Frequencies are written as `{ value = 1.1, unit = "2pi_hz" }`. Accepted
//! units: `rad_s`, `2pi_hz`, and the model scales `g`, `g_eff`,
//! `gamma_m_eff`. Lengths take `m`, `um` or `nm`.

use std::f64::consts::PI;

use pblockade::device::DeviceGeometry;
use pblockade::model::{Coupling, ModelParams, SqueezeTransform};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const DEFAULT_FOCK_DIM: usize = 15;
/// Default `δ_s` in units of `g_eff`.
pub const DEFAULT_DELTA_S: f64 = 500.0;
pub const MAX_SWEEP_AXES: usize = 2;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{0}")]
    Parse(#[from] toml::de::Error),
    #[error("field `{field}`: {reason}")]
    Invalid { field: String, reason: String },
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
    #[error(transparent)]
    Model(#[from] pblockade::model::ModelError),
}

fn invalid(field: impl Into<String>, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        field: field.into(),
        reason: reason.into(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FreqUnit {
    #[serde(rename = "rad_s")]
    RadPerSecond,
    #[serde(rename = "2pi_hz")]
    TwoPiHz,
    #[serde(rename = "g")]
    G,
    #[serde(rename = "g_eff")]
    GEff,
    #[serde(rename = "gamma_m_eff")]
    GammaMEff,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Frequency {
    pub value: f64,
    pub unit: FreqUnit,
}

impl Frequency {
    pub fn new(value: f64, unit: FreqUnit) -> Self {
        Self { value, unit }
    }
}

/// Scales available when converting a [`Frequency`] to rad/s.
#[derive(Clone, Copy, Debug, Default)]
struct Scales {
    g: Option<f64>,
    g_eff: Option<f64>,
    gamma_m_eff: Option<f64>,
}

impl Scales {
    fn resolve(&self, field: &str, f: Frequency) -> Result<f64, ConfigError> {
        let scale = match f.unit {
            FreqUnit::RadPerSecond => Some(1.0),
            FreqUnit::TwoPiHz => Some(2.0 * PI),
            FreqUnit::G => self.g,
            FreqUnit::GEff => self.g_eff,
            FreqUnit::GammaMEff => self.gamma_m_eff,
        };
        let scale = scale.ok_or_else(|| invalid(field, format!("unit {:?} is not available here", f.unit)))?;
        let v = f.value * scale;
        if !v.is_finite() {
            return Err(invalid(field, "value must be finite"));
        }
        Ok(v)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LengthUnit {
    #[serde(rename = "m")]
    Meter,
    #[serde(rename = "um")]
    Micrometer,
    #[serde(rename = "nm")]
    Nanometer,
}

impl LengthUnit {
    fn scale(self) -> f64 {
        match self {
            Self::Meter => 1.0,
            Self::Micrometer => 1e-6,
            Self::Nanometer => 1e-9,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Length {
    pub value: f64,
    pub unit: LengthUnit,
}

impl Length {
    pub fn meters(&self) -> f64 {
        self.value * self.unit.scale()
    }
}

/// Model parameters as written in a config file.
///
/// Damping is given either directly as `gamma_m_eff` or as `q_factor`
/// together with `omega_m`, using `γ_m_eff = n_th ω_m / Q`. The drive is
/// given as the bare `eps_l` or the squeezed-frame `eps_l_eff = ε_L cosh r_p`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    #[serde(default)]
    pub coupling: Coupling,
    pub g: Frequency,
    #[serde(default)]
    pub r_p: f64,
    pub eps_l: Option<Frequency>,
    pub eps_l_eff: Option<Frequency>,
    pub delta: Option<Frequency>,
    pub delta_s: Option<Frequency>,
    pub delta_ed: Option<Frequency>,
    pub gamma_m_eff: Option<Frequency>,
    pub q_factor: Option<f64>,
    pub omega_m: Option<Frequency>,
    pub gamma_z: Frequency,
    pub n_th: f64,
}

/// Names accepted as model sweep parameters.
pub const MODEL_PARAMS: &[&str] = &[
    "g", "r_p", "eps_l", "eps_l_eff", "delta", "delta_s", "delta_ed", "gamma_m_eff", "q_factor",
    "omega_m", "gamma_z", "n_th",
];

/// Names accepted as device sweep parameters (lengths).
pub const DEVICE_PARAMS: &[&str] = &[
    "length", "width", "thickness", "magnet_radius", "magnet_height", "gap",
];

impl ModelSpec {
    /// Converts to solver parameters in rad/s.
    pub fn resolve(&self, fock_dim: usize) -> Result<ModelParams, ConfigError> {
        let coupling = self.coupling;
        let mut scales = Scales::default();
        let g = scales.resolve("g", self.g)?;
        let squeeze = SqueezeTransform::new(self.r_p)?;
        let g_eff = match coupling {
            Coupling::TwoPhonon => g * squeeze.u().powi(2),
            Coupling::SinglePhonon => g * squeeze.u(),
        };
        scales.g = Some(g);
        scales.g_eff = Some(g_eff);

        let gamma_m_eff = match (self.gamma_m_eff, self.q_factor) {
            (Some(f), None) => scales.resolve("gamma_m_eff", f)?,
            (None, Some(q)) => {
                let w = self
                    .omega_m
                    .ok_or_else(|| invalid("omega_m", "required together with q_factor"))?;
                let w = scales.resolve("omega_m", w)?;
                if !(q > 0.0) {
                    return Err(invalid("q_factor", "must be positive"));
                }
                pblockade::device::q_to_gamma(q, self.n_th, w)
            }
            _ => return Err(invalid("gamma_m_eff", "give exactly one of gamma_m_eff or q_factor")),
        };
        scales.gamma_m_eff = Some(gamma_m_eff);

        let eps_l = match (self.eps_l, self.eps_l_eff) {
            (Some(f), None) => scales.resolve("eps_l", f)?,
            (None, Some(f)) => scales.resolve("eps_l_eff", f)? / squeeze.u(),
            _ => return Err(invalid("eps_l", "give exactly one of eps_l or eps_l_eff")),
        };
        let opt = |name: &str, f: Option<Frequency>| -> Result<Option<f64>, ConfigError> {
            f.map(|f| scales.resolve(name, f)).transpose()
        };
        let delta = opt("delta", self.delta)?.unwrap_or(0.0);
        let delta_s = opt("delta_s", self.delta_s)?.unwrap_or(DEFAULT_DELTA_S * g_eff);
        let exchanged = match coupling {
            Coupling::TwoPhonon => 2.0,
            Coupling::SinglePhonon => 1.0,
        };
        let delta_ed = opt("delta_ed", self.delta_ed)?.unwrap_or(exchanged * delta_s);
        let p = ModelParams {
            coupling,
            g,
            squeeze,
            eps_l,
            delta,
            delta_s,
            delta_ed,
            gamma_m_eff,
            gamma_z: scales.resolve("gamma_z", self.gamma_z)?,
            n_th: self.n_th,
            fock_dim,
        };
        p.validate()?;
        Ok(p)
    }

    /// Overwrites one parameter. Frequencies need a unit; `r_p`, `q_factor`
    /// and `n_th` are dimensionless.
    pub fn set(&mut self, param: &str, value: f64, unit: Option<FreqUnit>) -> Result<(), ConfigError> {
        let freq = || {
            unit.map(|u| Frequency::new(value, u))
                .ok_or_else(|| invalid(param, "frequency parameter needs a unit"))
        };
        let plain = || match unit {
            None => Ok(value),
            Some(_) => Err(invalid(param, "parameter is dimensionless")),
        };
        match param {
            "g" => self.g = freq()?,
            "r_p" => self.r_p = plain()?,
            "eps_l" => {
                self.eps_l = Some(freq()?);
                self.eps_l_eff = None;
            }
            "eps_l_eff" => {
                self.eps_l_eff = Some(freq()?);
                self.eps_l = None;
            }
            "delta" => self.delta = Some(freq()?),
            "delta_s" => self.delta_s = Some(freq()?),
            "delta_ed" => self.delta_ed = Some(freq()?),
            "gamma_m_eff" => {
                self.gamma_m_eff = Some(freq()?);
                self.q_factor = None;
            }
            "q_factor" => {
                self.q_factor = Some(plain()?);
                self.gamma_m_eff = None;
            }
            "omega_m" => self.omega_m = Some(freq()?),
            "gamma_z" => self.gamma_z = freq()?,
            "n_th" => self.n_th = plain()?,
            _ => return Err(invalid(param, "unknown model parameter")),
        }
        Ok(())
    }
}

/// Device geometry as written in a config file. Missing fields take the
/// values of [`DeviceGeometry::reference`].
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviceSpec {
    pub length: Option<Length>,
    pub width: Option<Length>,
    pub thickness: Option<Length>,
    pub magnet_radius: Option<Length>,
    pub magnet_height: Option<Length>,
    pub gap: Option<Length>,
    /// Tesla.
    pub mu0_ms: Option<f64>,
    /// Pascal.
    pub youngs_modulus: Option<f64>,
    /// kg/m³.
    pub density: Option<f64>,
    /// Kelvin.
    pub temperature: Option<f64>,
    /// Degrees.
    pub misalignment_deg: Option<f64>,
}

impl DeviceSpec {
    pub fn resolve(&self) -> Result<DeviceGeometry, ConfigError> {
        let base = DeviceGeometry::reference();
        let len = |l: Option<Length>, d: f64| l.map_or(d, |l| l.meters());
        let geom = DeviceGeometry {
            length: len(self.length, base.length),
            width: len(self.width, base.width),
            thickness: len(self.thickness, base.thickness),
            magnet_radius: len(self.magnet_radius, base.magnet_radius),
            magnet_height: len(self.magnet_height, base.magnet_height),
            gap: len(self.gap, base.gap),
            mu0_ms: self.mu0_ms.unwrap_or(base.mu0_ms),
            youngs_modulus: self.youngs_modulus.unwrap_or(base.youngs_modulus),
            density: self.density.unwrap_or(base.density),
            temperature: self.temperature.unwrap_or(base.temperature),
            misalignment: self.misalignment_deg.map_or(0.0, f64::to_radians),
        };
        geom.validate().map_err(|e| invalid("device", e.to_string()))?;
        Ok(geom)
    }

    pub fn set(&mut self, param: &str, value: f64, unit: Option<LengthUnit>) -> Result<(), ConfigError> {
        let unit = unit.ok_or_else(|| invalid(param, "length parameter needs a unit"))?;
        let l = Some(Length { value, unit });
        match param {
            "length" => self.length = l,
            "width" => self.width = l,
            "thickness" => self.thickness = l,
            "magnet_radius" => self.magnet_radius = l,
            "magnet_height" => self.magnet_height = l,
            "gap" => self.gap = l,
            _ => return Err(invalid(param, "unknown device parameter")),
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisScale {
    #[default]
    Linear,
    Log,
}

/// One sweep axis. `unit` is a frequency or length unit name, or absent for
/// dimensionless parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxis {
    pub param: String,
    pub min: f64,
    pub max: f64,
    pub count: usize,
    #[serde(default)]
    pub scale: AxisScale,
    pub unit: Option<String>,
}

impl SweepAxis {
    pub fn values(&self) -> Vec<f64> {
        let n = self.count;
        if n == 1 {
            return vec![self.min];
        }
        (0..n)
            .map(|k| {
                let t = k as f64 / (n - 1) as f64;
                match self.scale {
                    AxisScale::Linear => self.min + t * (self.max - self.min),
                    AxisScale::Log => (self.min.ln() + t * (self.max.ln() - self.min.ln())).exp(),
                }
            })
            .collect()
    }

    pub fn is_device(&self) -> bool {
        DEVICE_PARAMS.contains(&self.param.as_str())
    }

    pub fn freq_unit(&self) -> Result<Option<FreqUnit>, ConfigError> {
        self.unit
            .as_deref()
            .map(|u| {
                toml::Value::String(u.to_string())
                    .try_into()
                    .map_err(|_| invalid(&self.param, format!("unknown frequency unit `{u}`")))
            })
            .transpose()
    }

    pub fn length_unit(&self) -> Result<Option<LengthUnit>, ConfigError> {
        self.unit
            .as_deref()
            .map(|u| {
                toml::Value::String(u.to_string())
                    .try_into()
                    .map_err(|_| invalid(&self.param, format!("unknown length unit `{u}`")))
            })
            .transpose()
    }

    /// Column header, e.g. `delta[g_eff]`.
    pub fn column(&self) -> String {
        match &self.unit {
            Some(u) => format!("{}[{}]", self.param, u),
            None => self.param.clone(),
        }
    }

    fn validate(&self) -> Result<(), ConfigError> {
        let name = self.param.as_str();
        if !MODEL_PARAMS.contains(&name) && !DEVICE_PARAMS.contains(&name) {
            return Err(invalid(format!("sweep.{name}"), "unknown parameter"));
        }
        if self.count == 0 {
            return Err(invalid(format!("sweep.{name}.count"), "must be at least 1"));
        }
        if !(self.min.is_finite() && self.max.is_finite()) {
            return Err(invalid(format!("sweep.{name}"), "bounds must be finite"));
        }
        if self.scale == AxisScale::Log && !(self.min > 0.0 && self.max > 0.0) {
            return Err(invalid(format!("sweep.{name}"), "log axis needs positive bounds"));
        }
        if self.is_device() {
            self.length_unit()?;
        } else {
            self.freq_unit()?;
        }
        Ok(())
    }
}

/// Delayed-correlation grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct G2TauSpec {
    /// Largest `γ_m_eff τ`.
    #[serde(default = "default_tau_max")]
    pub tau_max: f64,
    #[serde(default = "default_tau_count")]
    pub count: usize,
    /// Squeezing values, one block each; empty means the model's `r_p`.
    #[serde(default)]
    pub r_p: Vec<f64>,
}

fn default_tau_max() -> f64 {
    20.0
}

fn default_tau_count() -> usize {
    201
}

impl Default for G2TauSpec {
    fn default() -> Self {
        Self {
            tau_max: default_tau_max(),
            count: default_tau_count(),
            r_p: Vec::new(),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Experiment label copied into the output header.
    pub name: Option<String>,
    pub model: Option<ModelSpec>,
    pub device: Option<DeviceSpec>,
    #[serde(default)]
    pub sweep: Vec<SweepAxis>,
    pub g2tau: Option<G2TauSpec>,
    pub out: Option<String>,
    pub format: Option<OutputFormat>,
    pub fock_dim: Option<usize>,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: Self = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.sweep.len() > MAX_SWEEP_AXES {
            return Err(invalid("sweep", format!("at most {MAX_SWEEP_AXES} axes")));
        }
        for axis in &self.sweep {
            axis.validate()?;
            if axis.is_device() && self.device.is_none() && self.model.is_some() {
                return Err(invalid(format!("sweep.{}", axis.param), "device parameter without [device]"));
            }
        }
        if let Some(n) = self.fock_dim {
            if n < 3 {
                return Err(invalid("fock_dim", "must be at least 3"));
            }
        }
        if let Some(m) = &self.model {
            m.resolve(self.fock_dim())?;
        }
        if let Some(d) = &self.device {
            d.resolve()?;
        }
        Ok(())
    }

    pub fn fock_dim(&self) -> usize {
        self.fock_dim.unwrap_or(DEFAULT_FOCK_DIM)
    }

    pub fn model(&self) -> Result<&ModelSpec, ConfigError> {
        self.model
            .as_ref()
            .ok_or_else(|| invalid("model", "section [model] is required"))
    }

    pub fn params(&self) -> Result<ModelParams, ConfigError> {
        self.model()?.resolve(self.fock_dim())
    }
}
