use thiserror::Error;

use crate::crossbar::Violation;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("address out of bounds: {what} {index} (limit {limit})")]
    Address {
        what: &'static str,
        index: usize,
        limit: usize,
    },

    #[error("read of uninitialized cell ({row}, {col})")]
    Uninitialized { row: usize, col: usize },

    #[error("illegal bundle: {0}")]
    Scheduling(Violation),

    #[error("malformed op: {0}")]
    Shape(String),

    #[error("scratch exhausted: macro needs {needed} temporaries, {available} left in pool")]
    Allocation { needed: usize, available: usize },

    #[error("capacity exceeded: {messages} messages for {capacity} units")]
    Capacity { messages: usize, capacity: usize },

    #[error("round index {0} out of range")]
    Round(usize),

    #[error("invalid metrics input: {0}")]
    Metrics(&'static str),

    #[error("program was compiled for a {expected:?} crossbar, got {actual:?}")]
    ProgramMismatch {
        expected: (usize, usize),
        actual: (usize, usize),
    },

    #[error("trace output failed: {0}")]
    Trace(#[from] std::io::Error),
}
