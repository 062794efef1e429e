//! Library side of the `gpregime` binary: config parsing, the staged
//! pipeline and the lemma report.

pub mod config;
pub mod error;
pub mod report;
pub mod run;
pub mod stages;

pub use config::{RunConfig, Stage};
pub use error::CliError;
pub use report::{LemmaEntry, LemmaReportBundle, Status};
pub use run::{run, RunOutput};
