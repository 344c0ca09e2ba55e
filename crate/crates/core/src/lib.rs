//! Friendship-aware human mobility toolkit.
//!
//! Builds per-user empirical Markov mobility models from location-based social
//! network checkins, generates friendship-model (FMM) and random-waypoint (RWP)
//! traces, and runs a contention simulation that counts backoff events per
//! subarea of the field.

pub mod cli;
pub mod dataset;
pub mod error;
pub mod geo;
pub mod mobility;
pub mod population;
pub mod rng;
pub mod simnet;
pub mod social;
pub mod synthetic;

pub use error::{Error, ErrorClass, Result};
