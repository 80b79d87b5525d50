//! Electro-optic transducer model.
//!
//! Hardware parameters set the cooperativity `C = 4 g₀² n_p / (κ_o κ_m)`,
//! which together with the extraction ratios `ζ_x = κ_{x,e} / κ_x` fixes the
//! conversion efficiency `η = 4 ζ_o ζ_m C / (1 + C)²`. The same efficiency
//! applies to up- and down-conversion. A transducer is used either to convert
//! an existing carrier (a DQT branch that succeeds with probability `η`) or to
//! generate a hybrid microwave-optical entangled pair (EGT).

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_range, Error, Result};
use crate::quantum::{Domain, ModeLabel, PureState};

/// Cooperativity at which a transducer with unit extraction ratios converts
/// with efficiency exactly one half.
pub const HALF_EFFICIENCY_COOPERATIVITY: f64 = 3.0 - 2.0 * std::f64::consts::SQRT_2;

/// Conversion efficiency, a probability in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Efficiency(f64);

impl Efficiency {
    pub const ZERO: Efficiency = Efficiency(0.0);
    pub const HALF: Efficiency = Efficiency(0.5);
    pub const ONE: Efficiency = Efficiency(1.0);

    pub fn new(value: f64) -> Result<Self> {
        check_range("efficiency", value, 0.0, 1.0, "[0, 1]").map(Efficiency)
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Efficiency {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        Efficiency::new(value)
    }
}

impl From<Efficiency> for f64 {
    fn from(e: Efficiency) -> f64 {
        e.0
    }
}

impl fmt::Display for Efficiency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Main transducer hardware parameters. Rates are in Hz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransducerParams {
    /// Single-photon electro-optic coupling rate `g₀`.
    pub g0_hz: f64,
    /// Pump photon number `n_p`.
    pub pump_photons: f64,
    /// Total optical dissipation rate `κ_o`.
    pub kappa_o_hz: f64,
    /// Total microwave dissipation rate `κ_m`.
    pub kappa_m_hz: f64,
    /// Optical external coupling rate `κ_{o,e}`.
    pub kappa_oe_hz: f64,
    /// Microwave external coupling rate `κ_{m,e}`.
    pub kappa_me_hz: f64,
}

/// Coarse device class suggested by the coupling rate `g₀/2π`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CouplingRegime {
    /// Tens of Hz, compensated by large pump photon numbers.
    BulkElectroOptic,
    /// Up to about 1 kHz.
    IntegratedElectroOptic,
    /// Around 10 kHz and above.
    IntegratedOptomechanical,
}

impl fmt::Display for CouplingRegime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CouplingRegime::BulkElectroOptic => "bulk electro-optical",
            CouplingRegime::IntegratedElectroOptic => "integrated electro-optical",
            CouplingRegime::IntegratedOptomechanical => "integrated optomechanical",
        })
    }
}

impl TransducerParams {
    pub fn validate(&self) -> Result<()> {
        let nonneg = [
            ("g0_hz", self.g0_hz),
            ("pump_photons", self.pump_photons),
            ("kappa_oe_hz", self.kappa_oe_hz),
            ("kappa_me_hz", self.kappa_me_hz),
        ];
        for (name, v) in nonneg {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::InvalidTransducer(format!("{name} = {v} must be finite and >= 0")));
            }
        }
        for (name, v) in [("kappa_o_hz", self.kappa_o_hz), ("kappa_m_hz", self.kappa_m_hz)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidTransducer(format!("{name} = {v} must be finite and > 0")));
            }
        }
        if self.kappa_oe_hz > self.kappa_o_hz {
            return Err(Error::InvalidTransducer(format!(
                "kappa_oe_hz = {} exceeds kappa_o_hz = {}",
                self.kappa_oe_hz, self.kappa_o_hz
            )));
        }
        if self.kappa_me_hz > self.kappa_m_hz {
            return Err(Error::InvalidTransducer(format!(
                "kappa_me_hz = {} exceeds kappa_m_hz = {}",
                self.kappa_me_hz, self.kappa_m_hz
            )));
        }
        Ok(())
    }

    pub fn cooperativity(&self) -> Result<f64> {
        cooperativity(self)
    }

    pub fn extraction_ratios(&self) -> Result<(f64, f64)> {
        extraction_ratios(self)
    }

    pub fn efficiency(&self) -> Result<Efficiency> {
        let (zo, zm) = self.extraction_ratios()?;
        conversion_efficiency(self.cooperativity()?, zo, zm)
    }

    /// Treats `g0_hz` as `g₀/2π`.
    pub fn coupling_regime(&self) -> CouplingRegime {
        if self.g0_hz < 100.0 {
            CouplingRegime::BulkElectroOptic
        } else if self.g0_hz <= 2.0e3 {
            CouplingRegime::IntegratedElectroOptic
        } else {
            CouplingRegime::IntegratedOptomechanical
        }
    }
}

/// `C = 4 g₀² n_p / (κ_o κ_m)`.
pub fn cooperativity(p: &TransducerParams) -> Result<f64> {
    for (name, v) in [("kappa_o_hz", p.kappa_o_hz), ("kappa_m_hz", p.kappa_m_hz)] {
        if !(v > 0.0) {
            return Err(Error::Domain {
                name,
                value: v,
                domain: "(0, inf)",
            });
        }
    }
    check_range("g0_hz", p.g0_hz, 0.0, f64::MAX, "[0, inf)")?;
    check_range("pump_photons", p.pump_photons, 0.0, f64::MAX, "[0, inf)")?;
    Ok(4.0 * p.g0_hz * p.g0_hz * p.pump_photons / (p.kappa_o_hz * p.kappa_m_hz))
}

/// `(ζ_o, ζ_m)`, each the external-to-total coupling ratio of its mode.
pub fn extraction_ratios(p: &TransducerParams) -> Result<(f64, f64)> {
    p.validate()?;
    Ok((p.kappa_oe_hz / p.kappa_o_hz, p.kappa_me_hz / p.kappa_m_hz))
}

/// `η = 4 ζ_o ζ_m C / (1 + C)²`.
pub fn conversion_efficiency(c: f64, zeta_o: f64, zeta_m: f64) -> Result<Efficiency> {
    check_range("cooperativity", c, 0.0, f64::MAX, "[0, inf)")?;
    check_range("zeta_o", zeta_o, 0.0, 1.0, "[0, 1]")?;
    check_range("zeta_m", zeta_m, 0.0, 1.0, "[0, 1]")?;
    let eta = 4.0 * zeta_o * zeta_m * c / ((1.0 + c) * (1.0 + c));
    // C/(1+C)² <= 1/4 analytically; clamp the last-ulp overshoot at C = 1
    Ok(Efficiency(eta.min(1.0)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DqtBranch {
    Converted,
    Lost,
}

/// Outcome of one conversion attempt given a uniform draw in `[0, 1)`.
pub fn dqt_branch(eta: Efficiency, draw: f64) -> DqtBranch {
    if draw < eta.value() {
        DqtBranch::Converted
    } else {
        DqtBranch::Lost
    }
}

/// A successful conversion: the mode keeps its amplitudes and changes band.
pub fn dqt_relabel(psi: &PureState, label: ModeLabel) -> Result<PureState> {
    psi.relabel(label, label.with_domain(label.domain.flipped()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EgtKind {
    TwoModeSqueezing,
    BeamSplitterInitialized,
}

/// Hybrid entanglement generator and its parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EgtSource {
    /// Blue-detuned pump, `α|0_m 0_o⟩ + β|1_m 1_o⟩` truncated at one pair.
    TwoModeSqueezing { alpha: Complex64, beta: Complex64 },
    /// Red-detuned pump on a cavity initialized with one microwave photon.
    BeamSplitter { eta_up: Efficiency },
}

impl EgtSource {
    pub fn kind(&self) -> EgtKind {
        match self {
            EgtSource::TwoModeSqueezing { .. } => EgtKind::TwoModeSqueezing,
            EgtSource::BeamSplitter { .. } => EgtKind::BeamSplitterInitialized,
        }
    }
}

/// Prepares the hybrid microwave-optical pair.
///
/// The beam-splitter branch yields `√η|0_m 1_o⟩ + √(1-η)|1_m 0_o⟩`, so the
/// optical photon is present with probability `η` and `η = ½` gives the Bell
/// state `(|0_m 1_o⟩ + |1_m 0_o⟩)/√2`.
pub fn egt_generate(source: &EgtSource, microwave: ModeLabel, optical: ModeLabel) -> Result<PureState> {
    if microwave.domain != Domain::Microwave || optical.domain != Domain::Optical {
        return Err(Error::InvalidLink(format!(
            "EGT needs a microwave and an optical mode, got {microwave} and {optical}"
        )));
    }
    let zero = Complex64::new(0.0, 0.0);
    let amps = match *source {
        EgtSource::TwoModeSqueezing { alpha, beta } => {
            let norm = alpha.norm_sqr() + beta.norm_sqr();
            if !((norm - 1.0).abs() <= 1e-10) {
                return Err(Error::NotNormalized(norm));
            }
            vec![alpha, zero, zero, beta]
        }
        EgtSource::BeamSplitter { eta_up } => {
            let eta = eta_up.value();
            vec![
                zero,
                Complex64::new(eta.sqrt(), 0.0),
                Complex64::new((1.0 - eta).sqrt(), 0.0),
                zero,
            ]
        }
    };
    PureState::normalized(vec![microwave, optical], amps)
}
