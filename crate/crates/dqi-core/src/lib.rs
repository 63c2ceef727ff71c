//! Circuit synthesis, exact simulation, and resource analysis for decoded
//! quantum interferometry (DQI) on Max-XORSAT and MaxCut instances.
//!
//! The crate is organized around the stages of the DQI pipeline:
//!
//! - [`f2linalg`] — GF(2) vectors and matrices, Gauss-Jordan elimination with
//!   a replayable row-operation trace, and a brute-force syndrome decoder.
//! - [`weights`] — the optimal amplitude weights `w_k`, obtained as the
//!   principal eigenvector of a symmetric tridiagonal matrix.
//! - [`instances`] — Max-XORSAT problem ingestion, the MaxCut reduction,
//!   objective tables, and the expected-satisfaction formula.
//! - [`circuit`] — the gate-level circuit IR: registers, depth analysis,
//!   gate counting, basis transpilation, and closed-form resource predictions.
//! - [`simulator`] — exact statevector simulation with a dense engine for
//!   small systems and a sparse engine that exploits the low support of DQI
//!   states, plus postselection and measurement sampling.
//! - [`builder`] — synthesis of the seven pipeline stages, their composition,
//!   and a definitional (formula-level) oracle for the ideal state after each
//!   stage.
//!
//! # Bit and qubit conventions
//!
//! One convention is used everywhere and asserted in tests:
//!
//! - Qubits are indexed globally from 0. The error register occupies qubits
//!   `0..m`, the syndrome register qubits `m..m+n`.
//! - A basis-state bitstring is written with qubit 0 leftmost, so qubit 0 is
//!   the most significant bit of a basis-state index:
//!   `index = sum_i bit_i << (qubit_count - 1 - i)`.
//! - `unary(k)` denotes the string with `k` ones in the lowest-index qubits
//!   followed by zeros, e.g. `unary(2) = 1 1 0 0 ...`.

pub mod builder;
pub mod circuit;
pub mod error;
pub mod f2linalg;
pub mod instances;
pub mod simulator;
pub mod weights;

pub use error::{Error, Result};
