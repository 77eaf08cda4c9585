//! Canonical positive CDV-structures on semi-simple Frobenius manifolds.
//!
//! A manifold is given by a potential `F` in flat coordinates together with its
//! Euler data. At sample points the crate builds the canonical frame of
//! idempotents, the canonical Hermitian metric `h = diag(|η_α|)` with its real
//! structure and Chern connection, and checks every structural identity
//! numerically. The two-dimensional positivity equation is solved on a grid.
#![no_std]
// Index loops mirror the tensor notation; negated comparisons are deliberate so NaN fails guards.
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod canonical;
pub mod cdv;
pub mod lowdim;
pub mod numerics;
pub mod potential;
pub mod report;

mod error;

pub use error::Error;
pub use report::{Bound, CheckEntry, VerificationReport};
