//! Generalized link layouts: where entanglement is generated (source,
//! midpoint, both endpoints), whether it comes from a transducer (intrinsic)
//! or an external source (extrinsic), and in which band.
//!
//! A layout composes into a product of factors: one `η` per conversion, one
//! `S(η)` per intrinsic generation, and one transmissivity per fiber segment.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::{entropy, least_entangled, GenerationLocation};
use crate::channel::{FiberLink, Segment};
use crate::error::{Error, Result};
use crate::transducer::Efficiency;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EntanglementType {
    /// Generated inside a transducer (EGT).
    Intrinsic,
    /// Generated by an external entanglement source.
    Extrinsic,
}

/// Band of the generated pair. Intrinsic generation is always hybrid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EprFrequency {
    Microwave,
    Optical,
    Hybrid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Node {
    Source,
    Midpoint,
    Destination,
}

/// One transducer efficiency per node; the midpoint is optional because most
/// layouts have no transducer there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeEfficiencies {
    pub source: Efficiency,
    pub destination: Efficiency,
    pub midpoint: Option<Efficiency>,
}

impl NodeEfficiencies {
    fn at(&self, node: Node) -> Result<Efficiency> {
        match node {
            Node::Source => Ok(self.source),
            Node::Destination => Ok(self.destination),
            Node::Midpoint => self
                .midpoint
                .ok_or_else(|| Error::InvalidLink("layout needs a midpoint transducer efficiency".into())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Factor {
    UpConversion(Node),
    DownConversion(Node),
    /// `S(η)` of a hybrid pair generated by the transducer at the node.
    Generation(Node),
    /// Single-click heralding between hybrid pairs generated at both
    /// endpoints: `S(η̃) [η_s(1-η_d) + η_d(1-η_s)]`.
    SingleClickSwap,
    Fiber(Segment),
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let node = |n: &Node| match n {
            Node::Source => "s",
            Node::Midpoint => "x",
            Node::Destination => "d",
        };
        match self {
            Factor::UpConversion(n) => write!(f, "eta_up_{}", node(n)),
            Factor::DownConversion(n) => write!(f, "eta_down_{}", node(n)),
            Factor::Generation(n) => write!(f, "S(eta_{})", node(n)),
            Factor::SingleClickSwap => f.write_str("S(eta_min_entropy)*[eta_s(1-eta_d)+eta_d(1-eta_s)]"),
            Factor::Fiber(Segment::Full) => f.write_str("exp(-l/L0)"),
            Factor::Fiber(Segment::Half) => f.write_str("exp(-l/(2 L0))"),
        }
    }
}

/// A layout's `p_e` as a product of factors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkComposition {
    pub location: GenerationLocation,
    pub kind: EntanglementType,
    pub frequency: EprFrequency,
    pub factors: Vec<Factor>,
}

impl LinkComposition {
    /// Number of direct conversions (up or down) along the link.
    pub fn conversion_count(&self) -> usize {
        self.factors
            .iter()
            .filter(|f| matches!(f, Factor::UpConversion(_) | Factor::DownConversion(_)))
            .count()
    }

    pub fn evaluate(&self, eta: &NodeEfficiencies, fiber: &FiberLink) -> Result<f64> {
        self.factors.iter().try_fold(1.0, |acc, factor| {
            let value = match factor {
                Factor::UpConversion(n) | Factor::DownConversion(n) => eta.at(*n)?.value(),
                Factor::Generation(n) => entropy(eta.at(*n)?),
                Factor::SingleClickSwap => {
                    let (s, d) = (eta.source.value(), eta.destination.value());
                    entropy(least_entangled(eta.source, eta.destination)) * (s * (1.0 - d) + d * (1.0 - s))
                }
                Factor::Fiber(segment) => fiber.transmissivity(*segment),
            };
            Ok(acc * value)
        })
    }

    pub fn describe(&self) -> String {
        let parts: Vec<String> = self.factors.iter().map(ToString::to_string).collect();
        parts.join(" * ")
    }
}

/// Composes the layout for one (location, type, band) cell.
///
/// Source and destination are superconducting nodes, so every photon that
/// ends up there must be microwave and every photon crossing fiber must be
/// optical.
pub fn placement_variant(
    location: GenerationLocation,
    kind: EntanglementType,
    frequency: EprFrequency,
) -> Result<LinkComposition> {
    use EntanglementType::*;
    use EprFrequency::*;
    use Factor::*;
    use GenerationLocation as L;

    let half = Fiber(Segment::Half);
    let factors = match (kind, frequency, location) {
        // transducer pair at the source, optical half sent and down-converted
        (Intrinsic, Hybrid, L::Source) => vec![
            Generation(Node::Source),
            Fiber(Segment::Full),
            DownConversion(Node::Destination),
        ],
        // transducer pair at the midpoint: the microwave half is up-converted
        // to travel; both halves are down-converted on arrival
        (Intrinsic, Hybrid, L::Midpoint) => vec![
            Generation(Node::Midpoint),
            UpConversion(Node::Midpoint),
            half,
            DownConversion(Node::Source),
            half,
            DownConversion(Node::Destination),
        ],
        // hybrid pairs at both ends, optical halves meet at the midpoint
        (Intrinsic, Hybrid, L::BothEndpoints) => vec![SingleClickSwap, half],
        (Extrinsic, Microwave, L::Source) => vec![
            UpConversion(Node::Source),
            Fiber(Segment::Full),
            DownConversion(Node::Destination),
        ],
        (Extrinsic, Microwave, L::Midpoint) => vec![
            UpConversion(Node::Midpoint),
            half,
            DownConversion(Node::Source),
            UpConversion(Node::Midpoint),
            half,
            DownConversion(Node::Destination),
        ],
        // microwave pairs at both ends, one half of each up-converted and
        // swapped at the midpoint
        (Extrinsic, Microwave, L::BothEndpoints) => vec![
            UpConversion(Node::Source),
            half,
            UpConversion(Node::Destination),
            half,
        ],
        (Extrinsic, Optical, L::Midpoint) => vec![
            half,
            DownConversion(Node::Source),
            half,
            DownConversion(Node::Destination),
        ],
        // optical pairs from two auxiliary nodes next to the endpoints: one
        // photon of each is down-converted locally, the other is swapped
        (Extrinsic, Optical, L::BothEndpoints) => vec![
            DownConversion(Node::Source),
            half,
            DownConversion(Node::Destination),
            half,
        ],
        (Extrinsic, Optical, L::Source) => {
            return Err(Error::UnsupportedVariant(
                "extrinsic optical entanglement cannot be generated at a superconducting source".into(),
            ))
        }
        (Intrinsic, f, _) => {
            return Err(Error::UnsupportedVariant(format!(
                "intrinsic generation yields hybrid pairs, not {f:?}"
            )))
        }
        (Extrinsic, Hybrid, _) => {
            return Err(Error::UnsupportedVariant(
                "extrinsic sources produce single-band pairs".into(),
            ))
        }
    };
    Ok(LinkComposition {
        location,
        kind,
        frequency,
        factors,
    })
}
