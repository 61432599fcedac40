//! Benchmark harness for the Stiefel-manifold quadratic solver: instance
//! generation, single solves, shift-parameter sweeps, and CPU-time tables,
//! all emitting plot-ready CSV and JSON.

pub mod commands;
pub mod error;
pub mod experiments;
pub mod mat_io;
pub mod report;
pub mod table;
pub mod timing;
