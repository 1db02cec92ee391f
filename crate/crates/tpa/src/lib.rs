//! File formats, parallel sweeps and the command-line front end built on `tpa-core`.

pub mod atom_file;
pub mod cli;
pub mod error;
pub mod output;
pub mod report;
pub mod surface;

pub use error::{Error, Result};
pub use tpa_core;
