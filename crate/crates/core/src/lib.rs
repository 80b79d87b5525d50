//! Simulation of transducer-based links that distribute entanglement between
//! superconducting nodes over optical fiber.

pub mod archetypes;
pub mod channel;
pub mod error;
pub mod figures;
pub mod montecarlo;
pub mod quantum;
pub mod teleport;
pub mod transducer;

pub use error::{Error, Result};
