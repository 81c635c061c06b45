//! File formats, result tables and the Monte-Carlo studies around
//! [`avauction_core`].

pub mod concurrent;
pub mod config;
pub mod document;
pub mod studies;
pub mod table;

pub use concurrent::{vcg_charges_concurrent, ChargeMode};
pub use config::ExperimentConfig;
pub use document::{parse_instance, write_instance, InstanceDocument, ParseError};
pub use studies::StudyError;
pub use table::ResultTable;
