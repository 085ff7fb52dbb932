//! Symbolic regression of network generators.
//!
//! A generator is an expression tree that assigns a weight to every candidate
//! edge. Networks grow one edge at a time by sampling candidates and picking
//! one in proportion to its weight. An evolutionary search looks for the
//! smallest tree whose networks best match a target network.

pub mod config;
pub mod dsl;
mod error;
pub mod evolve;
pub mod experiment;
pub mod graph;
pub mod metrics;
pub mod netgen;

pub use error::{Error, Result};
