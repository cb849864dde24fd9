//! Decimated homotopy solver for near-colliding confluent Prony systems.
//!
//! Given measurements `m_k = sum_j z_j^k sum_l a_{l,j} k^l` of nodes on the
//! unit circle, the solver decimates the data, turns node recovery into a
//! small square polynomial system, solves that system by homotopy
//! continuation and then resolves the aliasing introduced by decimation.
//! Classical Prony, a single-node algebraic method and an ESPRIT baseline are
//! included for comparison, along with sensitivity diagnostics and an
//! experiment harness.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classical;
pub mod conditioning;
pub mod error;
pub mod esprit;
pub mod experiment;
pub mod hankelize;
pub mod linalg;
pub mod model;
pub mod pipeline;
pub mod polysolve;
pub mod pruning;

pub use error::{Error, Result};
pub use model::{MeasurementSequence, MultiplicityVector, NoiseKind, NoiseSpec, PronyParameters};
