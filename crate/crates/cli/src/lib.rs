//! Front end for the `ldilp` solver: JSON instance and result files,
//! seeded instance generators, the oracle cross-check and the benchmark
//! harness. The `ldilp` binary is a thin wrapper over this library.

pub mod bench;
pub mod check;
mod error;
pub mod generate;
pub mod io;
pub mod solve;

pub use error::CliError;
