//! File formats, SVG rendering and the staged end-to-end pipeline built on
//! `socmap-core`.

pub mod config;
pub mod io;
pub mod pipeline;
pub mod render;
pub mod report;
pub mod seed;

pub use config::PipelineConfig;
pub use pipeline::run_pipeline;
pub use report::Report;
