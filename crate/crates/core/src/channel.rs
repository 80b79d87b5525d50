//! Optical fiber loss.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Typical loss of telecom C-band fiber.
pub const DEFAULT_ATTENUATION_DB_PER_KM: f64 = 0.2;

/// Which portion of the fiber a photon crosses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Segment {
    /// Source to destination.
    Full,
    /// Endpoint to the midpoint station.
    Half,
}

/// A fiber of given length. The dB/km figure is primary; the attenuation
/// length `L₀ = 10 / (α ln 10)` is derived from it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FiberLink {
    length_km: f64,
    attenuation_db_per_km: f64,
}

impl Default for FiberLink {
    fn default() -> Self {
        Self {
            length_km: 0.0,
            attenuation_db_per_km: DEFAULT_ATTENUATION_DB_PER_KM,
        }
    }
}

impl FiberLink {
    pub fn new(length_km: f64, attenuation_db_per_km: f64) -> Result<Self> {
        if !(length_km >= 0.0 && length_km.is_finite()) {
            return Err(Error::Domain {
                name: "fiber_length_km",
                value: length_km,
                domain: "[0, inf)",
            });
        }
        if !(attenuation_db_per_km >= 0.0 && attenuation_db_per_km.is_finite()) {
            return Err(Error::Domain {
                name: "attenuation_db_per_km",
                value: attenuation_db_per_km,
                domain: "[0, inf)",
            });
        }
        Ok(Self {
            length_km,
            attenuation_db_per_km,
        })
    }

    /// Fiber with the default 0.2 dB/km attenuation.
    pub fn with_length(length_km: f64) -> Result<Self> {
        Self::new(length_km, DEFAULT_ATTENUATION_DB_PER_KM)
    }

    pub fn length_km(&self) -> f64 {
        self.length_km
    }

    pub fn attenuation_db_per_km(&self) -> f64 {
        self.attenuation_db_per_km
    }

    /// `L₀`, infinite for a lossless fiber.
    pub fn attenuation_length_km(&self) -> f64 {
        10.0 / (self.attenuation_db_per_km * std::f64::consts::LN_10)
    }

    /// `e^{-l/L₀}` for the full span, `e^{-l/(2L₀)}` for half of it.
    pub fn transmissivity(&self, segment: Segment) -> f64 {
        let span = match segment {
            Segment::Full => self.length_km,
            Segment::Half => 0.5 * self.length_km,
        };
        (-span * self.attenuation_db_per_km * std::f64::consts::LN_10 / 10.0).exp()
    }
}
