//! Command-line front end for `srlab`: matrix files, single computations,
//! theorem verification, example families, perturbation sweeps and a seeded
//! fuzz harness.

pub mod app;
pub mod condition;
pub mod error;
pub mod fuzz;
pub mod io;
pub mod output;

pub use app::{run, Cli};
pub use error::{CliError, CliResult};
