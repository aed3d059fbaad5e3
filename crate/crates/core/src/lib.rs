//! Flying-ancilla compilation for field-programmable qubit arrays.
//!
//! Data qubits live in fixed SLM traps and never move. Two-qubit gates are
//! routed through movable AOD atoms that carry Z-basis copies of data qubits:
//! an ancilla is created with a CNOT from its source, flown next to the gate
//! partner, interacts under the global Rydberg pulse and is recycled to |0>
//! with a second CNOT.
//!
//! The crate is `no_std` (it needs `alloc`) and contains no IO. It provides:
//!
//! * [`circuit`]: gate IR, basis decomposition and dependency front layers.
//! * [`arch`]: trap geometry, AOD ordering rules and Rydberg coupling checks.
//! * [`schedule`]: typed stage programs and an end-to-end replay validator.
//! * [`ancilla`]: the copy / variant-CZ / recycle primitive.
//! * [`generic`], [`qsim`], [`qaoa`]: the three routers.
//! * [`metrics`]: depth, gate counts, movement and the error-rate model.
//! * [`oracle`]: a dense statevector simulator used to prove schedules
//!   equivalent to their source circuits.

#![no_std]
#![forbid(unsafe_code)]
// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod ancilla;
pub mod arch;
pub mod circuit;
mod error;
pub mod generic;
pub mod metrics;
pub mod oracle;
pub mod qaoa;
pub mod qsim;
pub mod schedule;
#[cfg(test)]
mod testutil;

pub use error::{Error, Result};
