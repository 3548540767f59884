//! Batch front end for the video SAR focusing pipeline: scenario configs,
//! frame orchestration and file emission.

pub mod config;
pub mod output;
pub mod pipeline;
