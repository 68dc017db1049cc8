//! Spec files, convergence experiments and the command-line front end for
//! `sumentropy-core`.

pub mod cells;
pub mod cli;
pub mod convergence;
pub mod error;
pub mod fit;
pub mod output;
pub mod specfile;

pub use error::{AppError, AppResult};
