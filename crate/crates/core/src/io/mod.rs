//! Ingestion of annotations, proposals, detections, and blacklists, plus
//! the count-selection policies applied before evaluation.

mod blacklist;
mod detections;
mod ground_truth;
mod proposals;

pub use blacklist::{apply_blacklist, Blacklist};
pub use detections::{Detection, DetectionSet, ImageDetections};
pub use ground_truth::{
    load_ground_truth, GroundTruthFormat, GroundTruthSet, GtObject, ImageAnnotations,
};
pub use proposals::{select_proposals, ImageProposals, ProposalSet, SelectionPolicy};
