//! Magic (non-stabilizerness) of mixed quantum states.

pub mod bell;
pub mod circuits;
pub mod cli;
pub mod density;
pub mod error;
pub mod mps;
pub mod pauli;
pub mod rng;
pub mod stabilizer;
pub mod witness;

pub use density::DensityMatrix;
pub use error::{MagicError, Result};
pub use pauli::{Pauli, PauliSpectrum, PauliString};
