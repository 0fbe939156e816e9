//! Approximate simultaneous diagonalization of square-matrix tuples.
//!
//! Given `A = (A_1, ..., A_K)`, find a nearby simultaneously diagonalizable
//! tuple `Ã` and an invertible `S` with every `S^{-1} Ã_k S` diagonal.
//!
//! * [`atds`] approximates first (structured low-rank approximation of the
//!   stacked Kronecker sums, [`cadzow`]) and then diagonalizes exactly ([`dodo`]).
//!   Exactly diagonalizable input is returned unchanged with an exact diagonalizer.
//! * [`shrt`] is the shear/rotation Jacobi-like baseline.
//! * [`experiments`] reproduces the synthetic benchmark protocol.
//!
//! Runnable walkthroughs live in this crate's `examples/` directory.

pub mod atds;
pub mod cadzow;
pub mod dodo;
pub mod error;
pub mod experiments;
pub mod io;
pub mod kron;
pub mod linalg;
pub mod shrt;
pub mod tuple;

#[cfg(test)]
mod testutil;

pub use atds::{atds_solve, pcd, AtdsOutcome, Branch};
pub use cadzow::{cadzow_run, CadzowConfig, CadzowTrace, StopReason};
pub use dodo::{dodo, group_eigenvalues, EigenGrouping};
pub use error::{Error, Result};
pub use kron::{build_xi, StructuredMatrix};
pub use linalg::CMat;
pub use num_complex::Complex64;
pub use tuple::{
    check_diagonalizable, check_essential_uniqueness, check_sd_membership, commutator_residual,
    off_objective, project_onto_sd_of, DiagonalizerResult, MatrixTuple, SdMembership,
};
