//! Three-point shooting analytics over player-tracking data: ingest of
//! tracking and play-by-play logs, per-play feature extraction, Boruta
//! feature selection over a random forest, and a leave-one-out gradient
//! boosting player model scoring attempt-rate deviation and propensity.

pub mod boruta;
pub mod cli;
pub mod dataset;
pub mod error;
pub mod features;
pub mod forest;
pub mod gbm;
pub mod geometry;
pub mod ingest;
pub mod model;
pub mod pipeline;
pub mod player_model;
pub mod report;
pub mod rng;
pub mod synthgen;
pub mod tree;

pub use error::{Error, Result, Warnings};
