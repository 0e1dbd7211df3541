//! Simulation and analysis of distributed social-power perception in
//! Friedkin-Johnsen influence networks with stubborn individuals.

pub mod error;
pub mod fj;
pub mod network;
pub mod perception;
pub mod random;
pub mod analysis;
pub mod scenario;
pub mod simkit;

pub use error::{Error, Result};
pub use network::{InfluenceNetwork, TopologyClass};
