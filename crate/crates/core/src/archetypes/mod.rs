//! Closed-form EPR distribution probabilities and capacities for the three
//! source-destination link archetypes.
//!
//! * **e-DQT**: a microwave EPR pair prepared at the source; one half is
//!   up-converted, crosses the fiber and is down-converted at the destination.
//! * **EGT + DQT**: the source transducer generates a hybrid pair; its optical
//!   half crosses the fiber and is down-converted at the destination.
//! * **EGT + swapping**: both endpoints generate hybrid pairs and send the
//!   optical halves to a midpoint beam splitter, where a single click heralds
//!   microwave-microwave path entanglement.
//!
//! `p_e` is read as expected distributed ebits per attempt. Each link is an
//! erasure channel with erasure probability `1 - p_e`.

mod placement;

use serde::{Deserialize, Serialize};

pub use placement::{
    placement_variant, EntanglementType, EprFrequency, Factor, LinkComposition, Node, NodeEfficiencies,
};

use crate::channel::{FiberLink, Segment};
use crate::error::{check_range, Error, Result};
use crate::quantum::binary_entropy;
use crate::transducer::{conversion_efficiency, Efficiency};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Archetype {
    EDqt,
    EgtWithDqt,
    EgtWithSwapping,
}

impl Archetype {
    pub const ALL: [Archetype; 3] = [Archetype::EDqt, Archetype::EgtWithDqt, Archetype::EgtWithSwapping];

    /// Where entanglement is generated in the basic layout of the archetype.
    pub fn default_location(self) -> GenerationLocation {
        match self {
            Archetype::EDqt | Archetype::EgtWithDqt => GenerationLocation::Source,
            Archetype::EgtWithSwapping => GenerationLocation::BothEndpoints,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Archetype::EDqt => "edqt",
            Archetype::EgtWithDqt => "egt-dqt",
            Archetype::EgtWithSwapping => "egt-swap",
        }
    }
}

impl std::str::FromStr for Archetype {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "edqt" | "e-dqt" => Ok(Archetype::EDqt),
            "egt-dqt" | "egt_dqt" | "egt-with-dqt" => Ok(Archetype::EgtWithDqt),
            "egt-swap" | "egt_swap" | "egt-with-swapping" => Ok(Archetype::EgtWithSwapping),
            other => Err(Error::InvalidLink(format!("unknown archetype '{other}'"))),
        }
    }
}

impl std::fmt::Display for Archetype {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GenerationLocation {
    Source,
    Midpoint,
    BothEndpoints,
}

/// A source-destination link. Which efficiencies are required depends on the
/// archetype; a single value per transducer serves both conversion directions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkConfig {
    pub archetype: Archetype,
    pub eta_up_source: Option<Efficiency>,
    pub eta_down_destination: Option<Efficiency>,
    pub eta_up_destination: Option<Efficiency>,
    /// Only consulted for midpoint placements.
    #[serde(default)]
    pub eta_midpoint: Option<Efficiency>,
    pub fiber: FiberLink,
    pub generation_location: GenerationLocation,
}

impl LinkConfig {
    pub fn edqt(eta_up_source: Efficiency, eta_down_destination: Efficiency, fiber: FiberLink) -> Self {
        Self {
            archetype: Archetype::EDqt,
            eta_up_source: Some(eta_up_source),
            eta_down_destination: Some(eta_down_destination),
            eta_up_destination: None,
            eta_midpoint: None,
            fiber,
            generation_location: GenerationLocation::Source,
        }
    }

    pub fn egt_dqt(eta_up_source: Efficiency, eta_down_destination: Efficiency, fiber: FiberLink) -> Self {
        Self {
            archetype: Archetype::EgtWithDqt,
            ..Self::edqt(eta_up_source, eta_down_destination, fiber)
        }
    }

    pub fn egt_swap(eta_up_source: Efficiency, eta_up_destination: Efficiency, fiber: FiberLink) -> Self {
        Self {
            archetype: Archetype::EgtWithSwapping,
            eta_up_source: Some(eta_up_source),
            eta_down_destination: None,
            eta_up_destination: Some(eta_up_destination),
            eta_midpoint: None,
            fiber,
            generation_location: GenerationLocation::BothEndpoints,
        }
    }

    /// Builds the archetype from one (source, destination) efficiency pair,
    /// putting the destination value wherever that archetype needs it.
    pub fn symmetric(archetype: Archetype, source: Efficiency, destination: Efficiency, fiber: FiberLink) -> Self {
        match archetype {
            Archetype::EDqt => Self::edqt(source, destination, fiber),
            Archetype::EgtWithDqt => Self::egt_dqt(source, destination, fiber),
            Archetype::EgtWithSwapping => Self::egt_swap(source, destination, fiber),
        }
    }

    pub fn with_location(mut self, location: GenerationLocation) -> Self {
        self.generation_location = location;
        self
    }

    fn require(value: Option<Efficiency>, name: &str, archetype: Archetype) -> Result<Efficiency> {
        value.ok_or_else(|| Error::InvalidLink(format!("{archetype} requires {name}")))
    }

    pub fn source_up(&self) -> Result<Efficiency> {
        Self::require(self.eta_up_source, "eta_up_source", self.archetype)
    }

    pub fn destination_down(&self) -> Result<Efficiency> {
        Self::require(self.eta_down_destination, "eta_down_destination", self.archetype)
    }

    pub fn destination_up(&self) -> Result<Efficiency> {
        Self::require(self.eta_up_destination, "eta_up_destination", self.archetype)
    }

    pub fn validate(&self) -> Result<()> {
        self.source_up()?;
        match self.archetype {
            Archetype::EDqt | Archetype::EgtWithDqt => self.destination_down()?,
            Archetype::EgtWithSwapping => self.destination_up()?,
        };
        if self.generation_location != self.archetype.default_location() {
            self.placement()?;
        }
        Ok(())
    }

    /// Placement variant equivalent to this configuration.
    pub fn placement(&self) -> Result<LinkComposition> {
        let (kind, frequency) = match self.archetype {
            Archetype::EDqt => (EntanglementType::Extrinsic, EprFrequency::Microwave),
            Archetype::EgtWithDqt | Archetype::EgtWithSwapping => {
                (EntanglementType::Intrinsic, EprFrequency::Hybrid)
            }
        };
        placement_variant(self.generation_location, kind, frequency)
    }

    fn node_efficiencies(&self) -> Result<NodeEfficiencies> {
        let destination = self
            .eta_down_destination
            .or(self.eta_up_destination)
            .ok_or_else(|| Error::InvalidLink("missing destination efficiency".into()))?;
        Ok(NodeEfficiencies {
            source: self.source_up()?,
            destination,
            midpoint: self.eta_midpoint,
        })
    }

    pub fn closed_form(&self) -> Result<DistributionOutcome> {
        closed_form(self)
    }
}

/// Closed-form result for one link.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionOutcome {
    pub archetype: Archetype,
    pub p_e: f64,
    pub q_one_way: f64,
    pub q_two_way: f64,
    /// Formula that produced `p_e`.
    pub notes: String,
}

/// `η↑ˢ η↓ᵈ e^{-l/L₀}`.
pub fn p_e_edqt(eta_up_s: Efficiency, eta_down_d: Efficiency, fiber: &FiberLink) -> f64 {
    eta_up_s.value() * eta_down_d.value() * fiber.transmissivity(Segment::Full)
}

/// `S(η↑ˢ) η↓ᵈ e^{-l/L₀}`.
pub fn p_e_egt_dqt(eta_up_s: Efficiency, eta_down_d: Efficiency, fiber: &FiberLink) -> f64 {
    entropy(eta_up_s) * eta_down_d.value() * fiber.transmissivity(Segment::Full)
}

/// `S(η̃) [η↑ˢ(1-η↑ᵈ) + η↑ᵈ(1-η↑ˢ)] e^{-l/(2L₀)}`, with `η̃` whichever of the
/// two efficiencies has the smaller entropy.
pub fn p_e_egt_swap(eta_up_s: Efficiency, eta_up_d: Efficiency, fiber: &FiberLink) -> f64 {
    let (s, d) = (eta_up_s.value(), eta_up_d.value());
    let single_click = s * (1.0 - d) + d * (1.0 - s);
    entropy(least_entangled(eta_up_s, eta_up_d)) * single_click * fiber.transmissivity(Segment::Half)
}

/// The efficiency with the smaller binary entropy; ties go to the source.
pub fn least_entangled(eta_up_s: Efficiency, eta_up_d: Efficiency) -> Efficiency {
    if entropy(eta_up_d) < entropy(eta_up_s) {
        eta_up_d
    } else {
        eta_up_s
    }
}

pub(crate) fn entropy(eta: Efficiency) -> f64 {
    binary_entropy(eta.value()).expect("efficiency lies in [0, 1]")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Capacities {
    pub one_way: f64,
    pub two_way: f64,
}

/// Erasure-channel capacities with success probability `p_e`:
/// `Q₁ = max(0, 2p_e - 1)` and `Q₂ = p_e`.
pub fn capacities(p_e: f64) -> Result<Capacities> {
    check_range("p_e", p_e, 0.0, 1.0, "[0, 1]")?;
    Ok(Capacities {
        one_way: (2.0 * p_e - 1.0).max(0.0),
        two_way: p_e,
    })
}

/// Efficiency of a unit-extraction-ratio transducer run at `min(C, cap)`.
pub fn eta_from_cooperativity_capped(c: f64, cap: Option<f64>) -> Result<Efficiency> {
    let c = match cap {
        Some(cap) => c.min(check_range("cap", cap, 0.0, f64::MAX, "[0, inf)")?),
        None => c,
    };
    conversion_efficiency(c, 1.0, 1.0)
}

pub fn closed_form(config: &LinkConfig) -> Result<DistributionOutcome> {
    config.validate()?;
    let fiber = &config.fiber;
    let (p_e, notes) = if config.generation_location == config.archetype.default_location() {
        match config.archetype {
            Archetype::EDqt => (
                p_e_edqt(config.source_up()?, config.destination_down()?, fiber),
                "eta_up_s * eta_down_d * exp(-l/L0)".to_string(),
            ),
            Archetype::EgtWithDqt => (
                p_e_egt_dqt(config.source_up()?, config.destination_down()?, fiber),
                "S(eta_up_s) * eta_down_d * exp(-l/L0)".to_string(),
            ),
            Archetype::EgtWithSwapping => (
                p_e_egt_swap(config.source_up()?, config.destination_up()?, fiber),
                "S(eta_min_entropy) * [eta_s(1-eta_d) + eta_d(1-eta_s)] * exp(-l/(2 L0))".to_string(),
            ),
        }
    } else {
        let composition = config.placement()?;
        let p = composition.evaluate(&config.node_efficiencies()?, fiber)?;
        (p, composition.describe())
    };
    let q = capacities(p_e.clamp(0.0, 1.0))?;
    Ok(DistributionOutcome {
        archetype: config.archetype,
        p_e,
        q_one_way: q.one_way,
        q_two_way: q.two_way,
        notes,
    })
}
