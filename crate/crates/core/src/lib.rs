//! Multi-objective QUBO annealing.
//!
//! * [`qubo`]: QUBO matrices, energies and incremental flip deltas.
//! * [`qap`]: bi-objective quadratic assignment instances and their QUBO
//!   encodings, penalty weights and normalisation.
//! * [`anneal`]: the single-objective digital-annealer style solver.
//! * [`archive`]: Pareto dominance and the bounded archive.
//! * [`mda`]: the multi-objective annealer.
//! * [`sbda`]: the scalarisation driver built on the single-objective solver.
//! * [`metrics`]: two-objective hypervolume and normalisation.

pub mod anneal;
pub mod archive;
pub mod error;
pub mod mda;
pub mod metrics;
pub mod qap;
pub mod qubo;
pub mod sbda;

pub use error::{Error, ParseErrorKind, Result};
