//! Planar thin domains `{0 < y < b, −φ₁(y) < x < φ₂(y)}`: discrete harmonic
//! functions and numerical checks of the rigidity estimates built on them.

mod conjugate;
mod domain;
mod grid;
mod lemmas;
mod solve;

pub use conjugate::{conjugate_field, strip_chain, SkewChain, VectorField2D};
pub use domain::{Profile1D, ThinDomain2D};
pub use grid::Grid2D;
pub use lemmas::{check_lemma41, check_lemma42, check_lemma43, check_lemma44, optimal_shift, Lemma41, LEMMA44_TOL};
pub use solve::{solve_harmonic, Harmonic2DSolution};
