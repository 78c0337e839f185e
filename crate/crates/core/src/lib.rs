//! Deterministic simulator of an 18-drone swarm under malware attack, with
//! scripted and cooperative blue-team defenders.

pub mod blueteam;
pub mod env;
pub mod error;
pub mod redteam;
pub mod rng;
pub mod traffic;
pub mod world;

pub use error::{Result, SimError};
