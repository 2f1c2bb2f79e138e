//! Input/output, configuration and the command-line driver for
//! `hiconvex-core`.
//!
//! Reports are emitted as one JSON [`run::Envelope`] per run, wrapping the
//! shared [`hiconvex_core::InequalityReport`].

pub mod config;
pub mod io;
pub mod oracle;
pub mod run;

pub use config::{Command, FalsifyTarget, Ineq, RunConfig};
pub use io::{ingest_samples, IngestError};
pub use run::{exit_code, load_config, run, Envelope, RunError};
