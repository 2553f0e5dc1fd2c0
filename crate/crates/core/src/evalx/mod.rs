//! Evaluation harness: the reference interpreter, statistics, the
//! synthetic corpus generator and the attack/detect experiment.

pub mod interp;
pub mod stats;
pub mod corpus;
pub mod experiment;

pub use interp::{interpret_program, run, Fault, ProgramIO, RunOutcome};
