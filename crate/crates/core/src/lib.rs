//! Numerical laboratory for Korn inequalities on thin shell domains.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod ansatz;
pub mod error;
pub mod geometry;
pub mod harmonic2d;
pub mod korn;
pub mod numerics;
pub mod shellfield;
pub mod testing;

pub use error::{Error, Result};
