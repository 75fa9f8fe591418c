//! File formats: TOML configuration, PFM float images, CSV tables and JSON
//! reports.

pub mod config;
pub mod csv;
pub mod pfm;
pub mod report;
pub mod units;

pub use config::{parse_config, ParsedConfig, PropagationConfig};
