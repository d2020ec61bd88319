//! The two headline evaluation protocols: repeatability under perturbation
//! and ground-truth recall.

mod recall;
mod repeatability;

pub use recall::{best_coverage, evaluate_recall, RecallReport};
pub use repeatability::{
    evaluate_repeatability, match_with_image_size, repeatability_from_binned, BinnedBestIous,
    ProjectionMode, RepeatabilityAccumulator, RepeatabilityResult,
};
