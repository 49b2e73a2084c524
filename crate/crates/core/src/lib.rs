//! Classical simulation and numerical analysis of a nonbinary quantum digital
//! signature scheme built on quantum fingerprinting states.
//!
//! Every measurement probability the protocol needs is computed exactly from
//! Hamming distances, so protocol runs can be simulated at full scale without
//! materializing quantum states. The crate also derives secure parameter
//! settings, checks the combinatorial monotonicity conjecture the forgery
//! bound relies on with exact integer arithmetic, and evaluates the
//! Gottesman-Chuang baseline for qubit-cost comparisons.
//!
//! Module map:
//!
//! * [`fingerprint`]: bit strings, index sets, per-qudit acceptance
//!   probabilities and a dense-vector oracle for small dimensions.
//! * [`coding`]: Reed-Solomon encoder over GF(S) and a synthetic distance model.
//! * [`protocol`]: key generation, signing, simulated verification, trial harness.
//! * [`adversary`]: ball attacker and the single-qudit forgery bound.
//! * [`conjecture`]: exact checks of the shell-weight monotonicity conjecture.
//! * [`analysis`]: entropy, tail bounds, repudiation algebra, parameter settings.
//! * [`gc`]: Gottesman-Chuang baseline formulas.
//! * [`cli`]: the `qsig` command-line front end.

// Range checks are written `!(x > 0.0)` so that NaN fails them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod adversary;
pub mod analysis;
pub mod cli;
pub mod coding;
pub mod conjecture;
mod error;
pub mod fingerprint;
pub mod gc;
pub mod gf;
pub mod protocol;
pub mod rng;

pub use error::{Error, Result};
