//! Variational quantum circuit scoring for knowledge graph embeddings.
//!
//! Entities are encoded as states `|e> = V(theta_e) H^n |0>` and relations as
//! unitaries `U(theta_r)`; a triple `(h, r, t)` is scored by how well
//! `U(theta_r)|h>` matches `|t>`. Three circuits estimate that match:
//! the switch test, the swap test, and compute-uncompute. Everything runs on
//! an exact dense statevector simulator, with optional shot sampling and a
//! distribution-level noise model.

pub mod ansatz;
pub mod circuit;
pub mod cli;
pub mod error;
pub mod evaluation;
pub mod io;
pub mod noise;
pub mod resources;
pub mod scoring;
pub mod statevector;
pub mod training;

pub use error::{Error, Result};
