pub mod baseline;
pub mod eval_detect;
pub mod eval_recall;
pub mod eval_repeat;
pub mod perturb;
pub mod report;
