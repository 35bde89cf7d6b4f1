//! Precision limits of noisy quantum metrology with error correction.
//!
//! The crate is organised bottom-up:
//!
//! - [`pauli`]: phase-tracked Pauli strings and their conjugation by small
//!   Clifford circuits (Hadamard, controlled phase, controlled X).
//! - [`linalg`]: dense complex matrices, a cyclic Jacobi eigensolver for
//!   Hermitian matrices, and unitary evolution.
//! - [`channels`]: Lindblad noise specifications, single-qubit Pauli channels
//!   and a first-order Trotter solver for the master equation.
//! - [`codes`]: repetition phase code, ring-graph five-qubit code and its
//!   concatenation, the two-qubit demonstration code, and syndrome correction.
//! - [`qfi`]: quantum Fisher information, both the spectral (SLD) formula and
//!   the GHZ closed forms for dephasing and depolarizing noise.
//! - [`estimation`]: Cramér–Rao bounds, interrogation-time optimisation,
//!   baseline bounds and scaling sweeps.
//! - [`scenario`]: end-to-end density-matrix pipelines cross-checked against
//!   the closed forms.
//!
//! Data-parallel loops (sweeps, error-pattern enumeration, spectral pair sums)
//! run on rayon when the `parallel` feature is enabled and fall back to plain
//! iteration otherwise; see [`Execution`].

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channels;
pub mod codes;
mod error;
pub mod estimation;
mod exec;
pub mod linalg;
pub mod numeric;
pub mod pauli;
pub mod qfi;
pub mod scenario;

pub use error::{Error, Result};
pub use exec::Execution;
