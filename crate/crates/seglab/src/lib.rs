//! File formats, pipeline driver and report writers for the
//! segmentation lab. The algorithms live in [`seglab_core`].

pub mod analysis;
pub mod config;
pub mod error;
pub mod formats;
pub mod pipeline;
pub mod plot;
pub mod reports;
pub mod synth;

pub use config::RunConfig;
pub use error::{Error, Result};
pub use pipeline::{run_pipeline, RunOutput};
