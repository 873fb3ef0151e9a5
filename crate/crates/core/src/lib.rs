pub mod cli;
pub mod energies;
pub mod error;
pub mod fields;
pub mod model;
pub mod scf;
pub mod numerics;
pub mod sources;
pub mod tdkohn;

pub use error::{Error, Result};
