//! Interfaces of the three-dimensional Ising model under Dobrushin boundary
//! conditions.
//!
//! The crate samples spin configurations, extracts the interface, splits it
//! into walls and ceilings, builds pillars and their increments, and applies
//! the interface maps used to compare pillar heights with and without an
//! exterior wall constraint.

pub mod lattice;
pub mod maps;
pub mod pillars;
pub mod sampler;
pub mod error;
pub mod interface;
pub mod spins;
pub mod stats;
pub mod walls;

pub use error::{IsiError, Result};
pub use interface::Interface;
pub use lattice::{c3, BoxDims, Coord, Region};
pub use spins::SpinConfig;
