//! Simulation and optimization of a multi-path quantum repeater network whose
//! repeaters buffer qubits in finite quantum memories.
//!
//! The pipeline per path: fiber and memory Pauli noise give an edge cost,
//! edges are joined by entanglement swapping, queueing in the repeater memory
//! adds dwell time, and K paths carry a bit-flip repetition code whose
//! decoded failure probability discounts the raw transmission rate.

// `!(x > 0.0)` is used on purpose so NaN inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod code;
pub mod error;
pub mod experiment;
pub mod optimizer;
pub mod output;
pub mod path;
pub mod queue;
pub mod registry;
pub mod swap;

pub use error::{Error, Result};
