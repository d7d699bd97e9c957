//! Front end for the coloc engine: job files, commands, reports and the
//! bundled example corpus.

pub mod commands;
pub mod corpus;
pub mod error;
pub mod job;
pub mod report;
pub mod suite;

pub use error::CliError;
pub use job::{BuilderSpec, JobSpec};
pub use report::{Format, Report};
