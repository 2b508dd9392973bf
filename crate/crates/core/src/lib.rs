//! Cycle-level simulation of SHA3-256 on a partitioned memristive crossbar.
//!
//! The [`crossbar`] module models the array and its stateful-logic gates,
//! [`microcode`] expands and packs logical operations into cycles, and
//! [`keccak`] generates the hash microcode and drives the sponge. [`reference`]
//! is a plain software SHA3-256 used as ground truth.

pub mod crossbar;
pub mod error;
pub mod keccak;
pub mod metrics;
pub mod microcode;
pub mod reference;

pub use crossbar::{
    Crossbar, CrossbarConfig, CycleBundle, ExecutionStats, Label, MicroOp, Program,
};
pub use error::{Error, Result};
pub use keccak::{Digest, HashPim, HashRun, KeccakParams};
pub use metrics::{MetricsInput, MetricsReport};
pub use microcode::{schedule, MacroKind, MacroOp, OpStream};
