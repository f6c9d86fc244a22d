//! Recycling CHSH nonlocality between Alice–Bob and Alice–Charlie when Bob
//! is restricted to projective measurements.
//!
//! Bob either projects onto a basis, does nothing, or mixes the two per
//! input; shared randomness selects among these deterministic strategies.
//! The crate evaluates the resulting CHSH values numerically (through the
//! Lüders update of Bob's qubit) and in closed form, optimises two-strategy
//! mixtures, builds the full trade-off frontier, maps double-violation
//! regions and emulates the photon-counting experiment.

pub mod chsh;
pub mod cli;
pub mod error;
pub mod frontier;
pub mod qmat;
pub mod shotsim;
pub mod states;
pub mod strategies;
pub mod table;
pub mod verify;

pub use error::{Error, Result};
