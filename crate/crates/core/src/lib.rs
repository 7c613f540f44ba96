//! Canonical forms of pairs `(A, B)` with `A` symmetric and `B` nonsingular
//! skew-symmetric under congruence, equivalently of quadratic forms and
//! Hamiltonian operators on symplectic spaces.
//!
//! Exact rational and Gaussian-rational backends reproduce structural
//! identities bit for bit; the `f64` and complex `f64` backends run the same
//! algorithms under a configurable tolerance.

pub mod blocks;
pub mod canonical;
pub mod elim;
pub mod error;
pub mod io;
pub mod matrix;
pub mod numeric;
pub mod poly;
pub mod random;
pub mod scalar;
pub mod spectra;
pub mod verify;

pub use error::{Error, ErrorKind, Result};
pub use matrix::{congruence, permutation_congruent_rearrange, Matrix, MatrixPair, Rearranged};
pub use poly::{char_poly, Polynomial};
pub use scalar::{
    rat, scalar_eq, set_tolerance, tolerance, AnyScalar, Backend, ComplexScalar, FieldClass,
    Gaussian, Rational, RealScalar, Scalar, C64,
};
