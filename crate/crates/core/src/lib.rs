//! Desk-scale benchmark harness for quantum optimization heuristics on Max-Cut.
//!
//! The crate runs the iterative QAOA loop against an exact statevector
//! simulator and the anneal-time sweep against a transverse-field Ising
//! evolver, scores every execution with the usual solution-quality ratios,
//! converts shot counts into modeled device time, and turns the resulting
//! metric records into area plots, optimality-gap summaries, cut-size
//! distributions, volumetric fidelity grids and parameter-strategy curves.
//!
//! Bit convention used everywhere: node `i` of a graph is qubit `i`, which is
//! bit `i` (least significant first) of a computational-basis index.

pub mod annealer;
pub mod bits;
pub mod error;
pub mod graphs;
pub mod hamiltonian;
pub mod metrics;
pub mod optimizer;
pub mod qaoa;
pub mod report;
pub mod runner;
pub mod seeds;
pub mod strategy;

pub use bits::Bitstring;
pub use error::{Error, Result};
pub use graphs::GraphInstance;
pub use qaoa::{AnsatzParams, SampleSet, Statevector};

/// Version string embedded in run headers and manifests.
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Version of every JSON document this crate writes.
pub const SCHEMA_VERSION: u32 = 1;
