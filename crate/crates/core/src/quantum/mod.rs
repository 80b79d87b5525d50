//! Exact state-vector and density-matrix kernel over a handful of two-level
//! photonic modes.
//!
//! Every mode carries either zero or one photon, so a state over `k` modes is
//! a complex vector of length `2^k`. Modes are identified by [`ModeLabel`]s and
//! always stored in canonical (sorted) label order; the first label owns the
//! most significant bit of the basis index.

mod density;
pub mod gates;
mod state;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use density::DensityMatrix;
pub use state::{binary_entropy, entropy_of_entanglement, fidelity, make_bell, PureState};

/// Largest number of modes a state may hold.
pub const MAX_MODES: usize = 6;

/// Tolerance on `Σ|amplitude|² = 1`.
pub const NORM_TOLERANCE: f64 = 1e-12;

/// Tolerance on `U†U = I` for gate matrices.
pub const UNITARY_TOLERANCE: f64 = 1e-10;

/// Eigenvalues in `[-EIGEN_FLOOR, 0)` are treated as numerical jitter and
/// clamped to zero.
pub const EIGEN_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    Microwave,
    Optical,
}

impl Domain {
    pub fn flipped(self) -> Self {
        match self {
            Domain::Microwave => Domain::Optical,
            Domain::Optical => Domain::Microwave,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Location {
    Source,
    Destination,
    Midpoint,
}

/// Identifies one photonic mode: where it lives and which band it is in.
///
/// `slot` separates modes that share a location and domain (the two halves of
/// a microwave EPR pair prepared at the source, or the informational qubit
/// next to the source ebit). Field order is the canonical sort order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ModeLabel {
    pub location: Location,
    pub domain: Domain,
    #[serde(default)]
    pub slot: u8,
}

impl ModeLabel {
    pub const fn new(domain: Domain, location: Location) -> Self {
        Self {
            location,
            domain,
            slot: 0,
        }
    }

    pub const fn with_slot(self, slot: u8) -> Self {
        Self { slot, ..self }
    }

    pub const fn microwave(location: Location) -> Self {
        Self::new(Domain::Microwave, location)
    }

    pub const fn optical(location: Location) -> Self {
        Self::new(Domain::Optical, location)
    }

    pub fn with_domain(self, domain: Domain) -> Self {
        Self { domain, ..self }
    }
}

impl fmt::Display for ModeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = match self.domain {
            Domain::Microwave => 'm',
            Domain::Optical => 'o',
        };
        let l = match self.location {
            Location::Source => 's',
            Location::Destination => 'd',
            Location::Midpoint => 'x',
        };
        write!(f, "{d}@{l}")?;
        if self.slot != 0 {
            write!(f, "#{}", self.slot)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BellState {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellState {
    pub const ALL: [BellState; 4] = [
        BellState::PhiPlus,
        BellState::PhiMinus,
        BellState::PsiPlus,
        BellState::PsiMinus,
    ];
}

pub(crate) fn format_labels(labels: &[ModeLabel]) -> String {
    let parts: Vec<String> = labels.iter().map(ToString::to_string).collect();
    format!("[{}]", parts.join(", "))
}
