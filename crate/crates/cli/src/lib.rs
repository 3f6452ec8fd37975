//! Library surface of the analysis harness: job parsing, execution, report
//! rendering and CSV emission. The `skewflow` binary is a thin wrapper over
//! these modules.

pub mod csv;
pub mod job;
pub mod report;
pub mod runner;
