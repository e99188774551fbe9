//! Quantum transfer operators of the rational `GL(N)` spin chain and the
//! identities relating them to symmetric functions and free fermions.
//!
//! Everything here is `no_std` with `alloc`. Scalars are generic over
//! [`Scalar`]: double-precision complex numbers for numerical work, and
//! (Gaussian) rationals where identities should hold exactly.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod bridge;
pub mod combinatorics;
pub mod det;
pub mod error;
pub mod fermion;
pub mod genfun;
pub mod identities;
pub mod matrix;
pub mod report;
pub mod repn;
pub mod scalar;
pub mod symfun;
pub mod transfer;

pub use combinatorics::{straighten, ChargedPartition, MayaDiagram, Partition, SignedPartition};
pub use error::{Error, Result};
pub use matrix::{Matrix, Operator};
pub use scalar::{GaussianRational, Scalar};
