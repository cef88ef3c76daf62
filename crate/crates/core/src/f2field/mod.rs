//! GF(2^n) arithmetic, trace, normal bases and dense F2 linear algebra.

mod gf2n;
mod matrix;
mod normal_basis;

pub use gf2n::{is_irreducible, search_modulus, Field, FieldElement, FieldError, MAX_DEGREE};
pub use matrix::{rank_of_words, BinMatrix, BitVec, EchelonBasis, Solution, SolveError};
pub use normal_basis::NormalBasis;
