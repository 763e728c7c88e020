//! Trace how tabular data changes as a pipeline runs.
//!
//! A pipeline is either a script in a small language ([`dsl`], run by
//! [`runner`]) or a chain of steps in Rust code ([`chain`]). Loggers from
//! [`loggers`] attach to a frame and record each step: cell-level diffs,
//! summary expressions, change flags or whole-frame snapshots.

pub mod chain;
pub mod cli;
pub mod clock;
pub mod dsl;
pub mod loggers;
pub mod runner;
pub mod table;
