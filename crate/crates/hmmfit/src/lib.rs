//! Files, bundled datasets, multi-start benchmarks and the command line
//! for `hmmfit-core`.

pub mod bench;
pub mod config;
pub mod datasets;
mod error;
pub mod io;

pub use error::Error;
