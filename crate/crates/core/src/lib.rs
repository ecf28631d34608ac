pub mod bitdesc;
pub mod classify;
pub mod cli;
pub mod cooccur;
pub mod dataset;
pub mod error;
pub mod imagecore;
pub mod infotheory;
pub mod pipeline;
pub mod pyramid;
pub mod synth;

pub use error::{Error, Result};
