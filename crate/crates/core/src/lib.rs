//! Genome-encoded evolutionary path planners for 3-D UAV missions.
//!
//! A scenario (terrain, threats, endpoints) is solved by a population-based
//! planner assembled from an operator library. Each planner is described by
//! a 64-bit genome, and a meta-level genetic algorithm evolves genomes toward
//! planners that find good paths quickly.

pub mod bench;
pub mod engine;
pub mod error;
pub mod evaluation;
pub mod evolver;
pub mod genome;
pub mod geometry;
pub mod operators;
pub mod rng;
pub mod pathmodel;
pub mod presets;
pub mod scenario;

pub use error::{Error, Result};
pub use geometry::Vec3;
