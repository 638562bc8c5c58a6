pub mod cli;
pub mod constructions;
pub mod error;
pub mod gap_analysis;
pub mod porosity_metrics;
pub mod pretangent;
pub mod rational;
pub mod report;
pub mod sequence;
pub mod set_model;
pub mod verify;

pub use error::{Error, Result};
pub use rational::{rat, ExactRational, Extended};
