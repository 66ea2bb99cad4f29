//! The guide's chapters, one module each, so `cargo test` runs every listing.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/data.md")]
pub mod data {}
#[doc = include_str!("../../../book/src/indicators.md")]
pub mod indicators {}
#[doc = include_str!("../../../book/src/hurst.md")]
pub mod hurst {}
#[doc = include_str!("../../../book/src/strategies.md")]
pub mod strategies {}
#[doc = include_str!("../../../book/src/selection.md")]
pub mod selection {}
#[doc = include_str!("../../../book/src/statistics.md")]
pub mod statistics {}
#[doc = include_str!("../../../book/src/qlearning.md")]
pub mod qlearning {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
