//! Sparse-recovery channel estimation for near-field widely-spaced
//! multi-subarray (WSMS) arrays.
//!
//! The crate is organised bottom-up:
//!
//! * [`numkern`]: dense complex linear algebra (SVD, QR least squares,
//!   projectors, Kronecker / vec helpers).
//! * [`geometry`]: array layout, exact and cross-field responses, channel
//!   synthesis.
//! * [`dictionary`]: angle / distance grids and the polar-domain, angular,
//!   inter-subarray and 2D dictionaries.
//! * [`measurement`]: constant-modulus combiners and pilot acquisition.
//! * [`estimators`]: PD-OMP, MAD-OMP, TS-PAD-OMP, 2D-PAD-OMP and the oracle
//!   least-squares bound.
//! * [`harness`]: scenario configuration, Monte-Carlo sweeps, CSV/JSON
//!   output and the `wsms` command line.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod dictionary;
pub mod error;
pub mod estimators;
pub mod geometry;
pub mod harness;
pub mod measurement;
pub mod numkern;

pub use error::{Error, Result};
