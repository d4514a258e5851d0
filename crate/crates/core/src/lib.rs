//! Server-side adaptive personalized aggregation for federated learning.
//!
//! Every client splits its model into a shared feature extractor and a
//! private decision head. The server keeps the latest extractor of every
//! client together with one aggregation-weight vector per client, builds a
//! personalized extractor for each participant as a convex combination of
//! all stored extractors, and learns the weights from how far each client
//! moved away from its personalized starting point during local training.
//!
//! This crate is `no_std` (with `alloc`) and contains everything that is a
//! pure function of its inputs: flat parameter algebra, the MLP learner,
//! synthetic data and non-IID partitioning, the aggregation protocol with
//! its baselines, and a deterministic round engine. File formats, the CLI
//! and multi-threaded execution live in the `fedapa-sim` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod data;
mod error;
pub mod fl;
pub mod model;
pub mod numerics;
pub mod orchestrator;
pub mod seed;

pub use error::{Error, Result};
pub use numerics::{Layout, ParamMatrix, ParamVector, Shape};
