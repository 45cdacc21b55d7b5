//! Exact-arithmetic toolkit for nonnegative matrix rank.
//!
//! The crate provides, over exact rationals and the field Q(sqrt 3):
//!
//! - [`scalar`]: exact scalars, sign determination and float rationalization;
//! - [`matrix`], [`linalg`]: dense exact linear algebra, rank/basis,
//!   determinant/adjugate, and nonnegative feasibility via exact simplex;
//! - [`factor`], [`stabilize`]: the stability normal form for nonnegative
//!   factorizations and the alternating-update procedure that reaches it;
//! - [`ensemble`]: families of embedded inverses that recover one factor
//!   from the other, and the sign predicate deciding factorization validity;
//! - [`compiler`]: emission of the equivalent polynomial-inequality systems
//!   (either over ensemble entries, or over `rs + rt` anchor variables after
//!   Cramer denominator clearing) plus an exact point evaluator;
//! - [`engine`]: the outer decision procedure for `rank+(M) <= r` with
//!   exactly verified certificates;
//! - [`fragile`]: generator and exact verifier for nested-triangle gadget
//!   matrices whose nonnegative rank is invisible to row submatrices;
//! - [`io`]: text formats for matrices and polynomial systems.

pub mod compiler;
pub mod engine;
pub mod ensemble;
pub mod factor;
pub mod fragile;
pub mod io;
pub mod linalg;
pub mod matrix;
pub mod poly;
pub mod scalar;
pub mod stabilize;

pub use factor::{Factorization, SupportProfile};
pub use matrix::{IndexSet, Matrix};
pub use scalar::{Qs3, Rat, Scalar, Sign};
