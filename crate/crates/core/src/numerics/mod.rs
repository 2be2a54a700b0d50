//! Numerical building blocks shared by the domain modules.

pub mod banded;
pub mod quad1d;
pub mod shift;
pub mod sum;

pub use sum::pairwise_sum;
