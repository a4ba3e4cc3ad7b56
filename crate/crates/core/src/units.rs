//! Unit systems.
//!
//! Every formula in this crate is homogeneous in ħ, c and the mirror
//! separation, so internals work with dimensionless frequencies `x = ωτ`
//! and attach the dimensional prefactor last.

use serde::{Deserialize, Serialize};

/// Reduced Planck constant, J·s (CODATA 2018 exact).
pub const HBAR_SI: f64 = 1.054_571_817e-34;
/// Speed of light in vacuum, m/s.
pub const C_SI: f64 = 299_792_458.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum UnitSystem {
    /// ħ = c = 1; lengths and times share one unit.
    #[default]
    Natural,
    /// SI: metres, seconds, kilograms, radians per second.
    Si,
}

impl UnitSystem {
    pub fn hbar(self) -> f64 {
        match self {
            UnitSystem::Natural => 1.0,
            UnitSystem::Si => HBAR_SI,
        }
    }

    pub fn c(self) -> f64 {
        match self {
            UnitSystem::Natural => 1.0,
            UnitSystem::Si => C_SI,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            UnitSystem::Natural => "natural",
            UnitSystem::Si => "si",
        }
    }
}

impl std::str::FromStr for UnitSystem {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "natural" => Ok(UnitSystem::Natural),
            "si" => Ok(UnitSystem::Si),
            other => Err(format!(
                "unknown unit system `{other}` (expected natural|si)"
            )),
        }
    }
}
