//! Benchmark harness for the multi-objective QUBO annealers: run
//! configuration, seeded repeated runs, result files, comparison and
//! exhaustive reference fronts.

pub mod cli;
pub mod compare;
pub mod config;
pub mod enumerate;
pub mod output;
pub mod run;
