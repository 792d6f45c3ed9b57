//! Varroa mite detection on multispectral bee captures.
//!
//! The crate provides the raster primitives ([`raster`], [`morphology`],
//! [`components`]), the conventional infrared/turquoise detector
//! ([`pipeline`]), object-level evaluation with the Satisfied Bee Metric
//! ([`metrics`], [`report`]), dataset formats ([`annotations`], [`io`]) and a
//! deterministic scene generator for testing without hardware ([`synth`]).

pub mod annotations;
pub mod components;
pub mod error;
pub mod io;
pub mod metrics;
pub mod morphology;
pub mod pipeline;
pub mod raster;
pub mod report;
pub mod synth;

pub use annotations::{ClassLabel, ClassMask, DatasetIndex};
pub use components::{connected_components, Region};
pub use error::{Error, Result};
pub use metrics::{aggregate, evaluate_image, sbm_match, EvalReport, SbmCounts};
pub use morphology::{morphological_open, StructuringElement};
pub use pipeline::{detect_mites, run_batch, CaptureTriplet, DetectionResult, PipelineConfig};
pub use raster::{BinaryMask, GrayImage, RgbImage, SignedImage};
