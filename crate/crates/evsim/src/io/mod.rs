//! Data ingestion, scenario configuration, exports, plots, and manifests.

pub mod config;
pub mod consumption;
pub mod export;
pub mod manifest;
pub mod plot;
pub mod synth;
