pub mod blockgeom;
pub mod counterexample;
pub mod error;
pub mod fourier;
pub mod harness;
pub mod integrate;
pub mod numeric;

pub use error::{Error, Result};
