//! Evaluation and ensemble toolkit for video panoptic segmentation.
//!
//! * [`vpsdata`]: category registry, panoptic/semantic video model, codecs.
//! * [`tubes`]: per-window tube overlaps from cached pair histograms.
//! * [`metrics`]: VPQ^k, PQ and STQ with mergeable accumulators.
//! * [`fusion`]: corrects a panoptic video with a semantic video.
//! * [`synth`]: deterministic synthetic videos and corruptions.
//! * [`exec`]: per-video parallel scheduling with a sequential fallback.
//! * [`evaluate`]: dataset-level evaluation built on the above.

pub mod error;
pub mod evaluate;
pub mod exec;
pub mod fusion;
pub mod metrics;
pub mod synth;
pub mod tubes;
pub mod vpsdata;

pub use error::{Error, ErrorKind, Result};
