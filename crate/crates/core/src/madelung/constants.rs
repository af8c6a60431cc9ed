use serde::{Deserialize, Serialize};

/// Which unit system the constants are expressed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UnitSystem {
    Si,
    Natural,
}

/// Physical constants of a run. The derived coefficients `α`, `γ`, `β` are
/// computed on every read so they can never drift from `ħ`, `m`, `q_e`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    pub units: UnitSystem,
    pub hbar: f64,
    pub mass: f64,
    /// Signed particle charge.
    pub charge: f64,
    pub epsilon0: f64,
    pub mu0: f64,
    pub c: f64,
    /// Relative permittivity of the medium.
    pub epsilon_r: f64,
    /// Relative permeability of the medium.
    pub mu_r: f64,
}

impl PhysicalConstants {
    /// CODATA 2018 values with the electron mass and elementary charge.
    pub fn si() -> Self {
        Self {
            units: UnitSystem::Si,
            hbar: 1.054_571_817e-34,
            mass: 9.109_383_701_5e-31,
            charge: 1.602_176_634e-19,
            epsilon0: 8.854_187_812_8e-12,
            mu0: 1.256_637_062_12e-6,
            c: 299_792_458.0,
            epsilon_r: 1.0,
            mu_r: 1.0,
        }
    }

    /// `ħ = m = q_e = ε₀ = μ₀ = c = 1`.
    pub fn natural() -> Self {
        Self {
            units: UnitSystem::Natural,
            hbar: 1.0,
            mass: 1.0,
            charge: 1.0,
            epsilon0: 1.0,
            mu0: 1.0,
            c: 1.0,
            epsilon_r: 1.0,
            mu_r: 1.0,
        }
    }

    pub fn for_units(units: UnitSystem) -> Self {
        match units {
            UnitSystem::Si => Self::si(),
            UnitSystem::Natural => Self::natural(),
        }
    }

    /// `α = −ħ/2m`.
    pub fn alpha(&self) -> f64 {
        -self.hbar / (2.0 * self.mass)
    }

    /// `γ = −q_e/m`.
    pub fn gamma(&self) -> f64 {
        -self.charge / self.mass
    }

    /// `β = 1/ħ`.
    pub fn beta(&self) -> f64 {
        1.0 / self.hbar
    }

    /// Planck's constant `h = 2πħ`.
    pub fn planck(&self) -> f64 {
        2.0 * std::f64::consts::PI * self.hbar
    }

    pub fn validate(&self) -> Result<(), String> {
        let positive = [
            ("hbar", self.hbar),
            ("mass", self.mass),
            ("epsilon0", self.epsilon0),
            ("mu0", self.mu0),
            ("c", self.c),
            ("epsilon_r", self.epsilon_r),
            ("mu_r", self.mu_r),
        ];
        for (name, value) in positive {
            if !(value > 0.0 && value.is_finite()) {
                return Err(format!("{name} must be positive and finite, got {value}"));
            }
        }
        if !(self.charge.is_finite() && self.charge != 0.0) {
            return Err(format!("charge must be finite and non-zero, got {}", self.charge));
        }
        Ok(())
    }
}
