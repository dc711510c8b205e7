pub mod cli;
pub mod equilibrium;
pub mod error;
pub mod inequalities;
pub mod logpotential;
pub mod measures;
pub mod numerics;
pub mod parse;
pub mod potentials;
pub mod report;
pub mod rmt;
pub mod transport;

pub use error::{FreeError, Result};
