pub mod chsh;
pub mod cli;
pub mod error;
pub mod instanton;
mod parallel;
pub mod params;
pub mod potential;
pub mod protocol;
pub mod spectral;

pub use error::{Error, Result};
pub use params::CircuitParams;
