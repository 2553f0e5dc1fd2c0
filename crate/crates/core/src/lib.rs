//! Code-property-graph normalization for token-based plagiarism detection.

pub mod frontend;
pub mod evalx;
pub mod cpg;
pub mod linearize;
pub mod compare;
pub mod pattern;
pub mod catalog;
pub mod attack;
