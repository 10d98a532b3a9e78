//! Batch experiment driver: config resolution, experiment orchestration,
//! CSV/SVG persistence.

pub mod commands;
pub mod output;
pub mod spec;

pub use commands::{cmd_compare, cmd_consensus_bench, cmd_run, ConsensusBenchRow};
pub use spec::{DatasetSpec, ExperimentSpec, Task};
