//! Command-line front end for `regimekit`: synthetic universes, the
//! Hurst-gated pipeline, the boundary sweep and the Q-learning agent.

pub mod commands;
pub mod config;
mod output;

pub use commands::{cmd_pipeline, cmd_qeval, cmd_qtrain, cmd_sweep, cmd_synth};
pub use config::{ConfigArgs, RunConfig, SynthKind};
