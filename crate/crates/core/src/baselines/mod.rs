//! The four content-agnostic baseline proposal generators.
//!
//! Uniform and Gaussian sample box parameters from training-set statistics,
//! SlidingWindow tiles a coarse grid of fixed sizes, and Superpixels turns
//! every low-level segment of a from-scratch graph segmentation into a
//! proposal.

mod random;
mod segmentation;
mod sliding;
mod stats;
mod superpixels;

pub use random::{gaussian_param_stream, sample_gaussian, sample_uniform, uniform_param_stream};
pub use segmentation::{segment_graph, LabelMap, SegParams};
pub use sliding::sliding_window;
pub use stats::{estimate_box_stats, BoxParamStats, MIN_TRAINING_ANNOTATIONS};
pub use superpixels::superpixel_proposals;
