//! Experiment drivers behind the `canardlab` binary.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod experiments;
pub mod output;

pub use config::{ExperimentConfig, ParamDefaults, PhiChoice};
pub use error::{CliError, CliResult};
pub use experiments::{
    cmd_classify, cmd_fold_scaling, cmd_hunt, cmd_simulate, cmd_sweep, ClassifyReport,
    FoldScalingOutput, HuntOutput, HuntSummary, ScalingFit,
};
