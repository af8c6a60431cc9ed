use crate::madelung::{PhysicalConstants, UnitSystem};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use thiserror::Error;

/// Named verification suites.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    CentralField,
    DiracString,
    ConformalMap,
    ContourSuite,
    BohrTable,
    PathDemo,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 6] = [
        ScenarioKind::CentralField,
        ScenarioKind::DiracString,
        ScenarioKind::ConformalMap,
        ScenarioKind::ContourSuite,
        ScenarioKind::BohrTable,
        ScenarioKind::PathDemo,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::CentralField => "central-field",
            ScenarioKind::DiracString => "dirac-string",
            ScenarioKind::ConformalMap => "conformal-map",
            ScenarioKind::ContourSuite => "contour-suite",
            ScenarioKind::BohrTable => "bohr-table",
            ScenarioKind::PathDemo => "path-demo",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            ScenarioKind::CentralField => "hydrodynamic residuals, Schrödinger identity, characteristics and momentum loops of the axis vortex",
            ScenarioKind::DiracString => "gauge field, flux and magnetic charge of the Dirac string",
            ScenarioKind::ConformalMap => "Jacobian law, univalence and area of the map e^{M/2}",
            ScenarioKind::ContourSuite => "winding numbers, path independence mod 2πi and the mirror identity",
            ScenarioKind::BohrTable => "Bohr radii and energies for k = 1..5, Z = 1..3",
            ScenarioKind::PathDemo => "evolution operator rotations and path sums",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Invalid configuration, located by a dotted field path.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("config error at `{path}`: {message}")]
pub struct ConfigError {
    pub path: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self { path: path.into(), message: message.into() }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nu: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<i32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub energy: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z: Option<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SampleCounts {
    /// Random spatial points for residual statistics.
    pub points: usize,
    /// Random path pairs for the path-independence check.
    pub paths: usize,
    /// Random M points for the Jacobian law.
    pub jacobian_points: usize,
    pub steps_per_revolution: usize,
    /// Members of the rotation family.
    pub family: usize,
}

impl Default for SampleCounts {
    fn default() -> Self {
        Self { points: 1000, paths: 100, jacobian_points: 10_000, steps_per_revolution: 1024, family: 128 }
    }
}

fn default_scale() -> f64 {
    1.0
}

fn default_seed() -> u64 {
    20_240_601
}

fn default_units() -> UnitSystem {
    UnitSystem::Natural
}

/// One run of one scenario, read from a single JSON document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub scenario: Option<ScenarioKind>,
    #[serde(default)]
    pub model: ModelParams,
    #[serde(default = "default_units")]
    pub units: UnitSystem,
    /// Per-check tolerance overrides by check name.
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default = "default_scale")]
    pub tolerance_scale: f64,
    #[serde(default)]
    pub samples: SampleCounts,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Not echoed into the report so that runs into different directories
    /// stay comparable.
    #[serde(default, skip_serializing)]
    pub output_dir: Option<PathBuf>,
}

impl ScenarioConfig {
    /// The configuration used when only a scenario name is given.
    pub fn default_for(kind: ScenarioKind) -> Self {
        let model = match kind {
            ScenarioKind::CentralField | ScenarioKind::DiracString => {
                ModelParams { nu: Some(1.0), kappa: Some(1.0), k: Some(1), energy: None, z: None }
            }
            _ => ModelParams::default(),
        };
        let units = if kind == ScenarioKind::BohrTable { UnitSystem::Si } else { UnitSystem::Natural };
        Self {
            scenario: Some(kind),
            model,
            units,
            tolerances: BTreeMap::new(),
            tolerance_scale: 1.0,
            samples: SampleCounts::default(),
            seed: default_seed(),
            output_dir: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            ConfigError::new(if path == "." { "$".to_string() } else { path }, e.into_inner().to_string())
        })
    }

    pub fn constants(&self) -> PhysicalConstants {
        PhysicalConstants::for_units(self.units)
    }

    pub fn kind(&self) -> Result<ScenarioKind, ConfigError> {
        self.scenario.ok_or_else(|| ConfigError::new("scenario", "missing scenario name"))
    }

    /// Checks completeness for the chosen scenario and fills derived
    /// defaults. Runs before any computation.
    pub fn validated(mut self) -> Result<Self, ConfigError> {
        let kind = self.kind()?;
        if !(self.tolerance_scale > 0.0 && self.tolerance_scale.is_finite()) {
            return Err(ConfigError::new("tolerance_scale", format!("must be positive, got {}", self.tolerance_scale)));
        }
        let s = &self.samples;
        for (name, value, min) in [
            ("points", s.points, 1),
            ("paths", s.paths, 1),
            ("jacobian_points", s.jacobian_points, 1),
            ("steps_per_revolution", s.steps_per_revolution, 64),
            ("family", s.family, 1),
        ] {
            if value < min || value > 10_000_000 {
                return Err(ConfigError::new(format!("samples.{name}"), format!("must lie in [{min}, 10000000], got {value}")));
            }
        }
        let consts = self.constants();
        let m = &mut self.model;
        match kind {
            ScenarioKind::CentralField | ScenarioKind::DiracString => {
                let nu = m.nu.ok_or_else(|| ConfigError::new("model.nu", "required for this scenario"))?;
                let kappa = m.kappa.ok_or_else(|| ConfigError::new("model.kappa", "required for this scenario"))?;
                let k = m.k.ok_or_else(|| ConfigError::new("model.k", "required for this scenario"))?;
                if !(nu > -3.0 && nu.is_finite()) {
                    return Err(ConfigError::new("model.nu", format!("must exceed -3, got {nu}")));
                }
                if !(kappa > 0.0 && kappa.is_finite()) {
                    return Err(ConfigError::new("model.kappa", format!("must be positive, got {kappa}")));
                }
                if k == 0 {
                    return Err(ConfigError::new("model.k", "the vortex needs a non-zero winding"));
                }
                if k.unsigned_abs() > 1000 {
                    return Err(ConfigError::new("model.k", format!("|k| above 1000 is not supported, got {k}")));
                }
                match m.energy {
                    Some(e) if !e.is_finite() => return Err(ConfigError::new("model.energy", "must be finite")),
                    Some(_) => {}
                    None => m.energy = Some(-consts.hbar * consts.hbar * kappa * kappa / (2.0 * consts.mass)),
                }
                if m.z.is_some() {
                    return Err(ConfigError::new("model.z", "not used by this scenario"));
                }
            }
            ScenarioKind::BohrTable => {
                if self.units != UnitSystem::Si {
                    return Err(ConfigError::new("units", "the Bohr table is tabulated in SI units"));
                }
                if let Some(z) = m.z {
                    if !(1..=3).contains(&z) {
                        return Err(ConfigError::new("model.z", format!("must be 1, 2 or 3, got {z}")));
                    }
                }
                if m.nu.is_some() || m.kappa.is_some() || m.k.is_some() || m.energy.is_some() {
                    return Err(ConfigError::new("model", "only `z` is used by this scenario"));
                }
            }
            ScenarioKind::ConformalMap | ScenarioKind::ContourSuite | ScenarioKind::PathDemo => {
                if *m != ModelParams::default() {
                    return Err(ConfigError::new("model", "this scenario takes no model parameters"));
                }
            }
        }
        let names: Vec<String> = super::catalog(&self).into_iter().map(|c| c.name).collect();
        for (name, &tol) in &self.tolerances {
            if !names.contains(name) {
                return Err(ConfigError::new(format!("tolerances.{name}"), "no check of this name in the scenario"));
            }
            if !(tol >= 0.0 && tol.is_finite()) {
                return Err(ConfigError::new(format!("tolerances.{name}"), format!("must be non-negative, got {tol}")));
            }
        }
        Ok(self)
    }
}
