//! Benchmark harness for class-agnostic object detection proposals.
//!
//! Evaluates proposal methods along three axes: repeatability under image
//! perturbations, ground-truth recall, and impact on detection quality.
//! Includes four content-agnostic baseline generators and the full
//! perturbation suite needed for the repeatability protocol.

pub mod baselines;
pub mod detect;
pub mod error;
pub mod eval;
pub mod geometry;
pub mod io;
pub mod perturb;
pub mod report;

pub use error::{Error, Result};
