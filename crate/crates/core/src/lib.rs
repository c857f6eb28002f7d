//! Multiparticle recurrence purification of two-colorable graph states.
//!
//! States are kept diagonal in the graph-state basis of a bipartite graph, so
//! an `n`-qubit mixed state is a probability vector over `2^n` syndrome
//! patterns and both purification sub-protocols become exact, cheap maps on
//! that vector. A dense density-matrix simulator ([`oracle`]) certifies those
//! maps on small systems, and [`analysis`] turns them into thresholds and
//! fixed points.

pub mod analysis;
pub mod error;
pub mod graph;
pub mod oracle;
pub mod purify;
pub mod state;
pub mod wht;

pub use error::{Error, Result};
pub use graph::{Color, Graph, StandardGraph, SyndromeIndex};
pub use purify::{
    iterate, p1_step, p2_step, step, xor_square_over_b, GateNoise, KernelMode, Protocol,
    PurificationTrace, StepConfig, StepResult, StopCriteria, Verdict, ALTERNATING,
};
pub use state::{pauli_flip_mask, GdState, PauliAxis};

/// Formats a float with 17 significant digits, enough to round-trip an `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}
