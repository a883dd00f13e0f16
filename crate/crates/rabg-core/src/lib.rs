//! Core simulation library for the random access Bell game.
//!
//! A tripartite control/Alice/Bob register is pushed through the quantum
//! SWITCH of two erasure (pin) channels, the control qubit is probed with
//! sequential unsharp measurements, and the CHSH value available to Alice
//! and Bob is evaluated round by round via the Horodecki criterion.
//!
//! The crate is `no_std` (with `alloc`); all IO lives in the companion
//! `rabg` crate. Everything here is pure computation on small dense
//! complex matrices (dimension at most 8).
//!
//! Two independent routes are provided for every round of the game:
//! a brute-force density-matrix simulation ([`game`]) and closed-form
//! expressions for the round-k states and Bell values ([`oracle`]).
//! The engine cross-checks one against the other on every run.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod bell;
pub mod channel;
mod error;
pub mod game;
pub mod linalg;
pub mod measure;
pub mod oracle;
pub mod qswitch;
pub mod states;

#[cfg(test)]
pub(crate) mod testutil;

pub use error::Error;

/// Hermiticity tolerance for matrices fed to the eigensolver.
pub const HERMITICITY_TOL: f64 = 1e-10;
/// Off-diagonal Frobenius norm at which the Jacobi iteration stops.
pub const EIG_OFFDIAG_TOL: f64 = 1e-14;
/// Eigenvalues above this count as nonnegative when certifying PSD.
pub const PSD_CLAMP: f64 = -1e-12;
