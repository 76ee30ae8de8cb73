//! Scenario runner on top of `ctrwkit-core`: TOML scenarios, CSV paths,
//! canonical JSON reports, coefficient expressions and a rayon runner.

pub mod bundle;
pub mod error;
pub mod expr;
pub mod io;
pub mod par;
pub mod report;
pub mod run;
pub mod scenario;

pub use error::CliError;
