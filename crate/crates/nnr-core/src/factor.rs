//! Nonnegative factorizations, the size-first lexicographic subset order,
//! admissibility search, and the stability test.
//!
//! A subset `S` of columns of `A` is admissible for a vector `v` when `v`
//! lies in the nonnegative hull of those columns. A factorization `M = AW`
//! is stable when every column of `W` is supported inside the
//! lexicographically first admissible subset for the matching column of `M`,
//! and symmetrically for rows of `A`.

use std::cmp::Ordering;

use thiserror::Error;

use crate::linalg::nonneg_solve;
use crate::matrix::{support, IndexSet, Matrix};
use crate::scalar::Scalar;

/// Subset enumeration is exponential in the inner dimension; reject anything
/// past this bound rather than silently running 2^r searches.
pub const MAX_ENUM_DIM: usize = 10;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FactorError {
    #[error("dimension mismatch: {0}")]
    DimMismatch(String),
    #[error("factor matrices must be entrywise nonnegative")]
    NotNonnegative,
    #[error("inner dimension {0} exceeds the enumeration bound {MAX_ENUM_DIM}")]
    InnerDimensionTooLarge(usize),
    #[error("factorization does not reproduce the target matrix")]
    InvalidFactorization,
}

/// A pair `(A, W)` with `A` of shape m x r and `W` of shape r x n, both
/// entrywise nonnegative.
#[derive(Clone, PartialEq, Eq)]
pub struct Factorization<T> {
    a: Matrix<T>,
    w: Matrix<T>,
}

impl<T: Scalar> std::fmt::Debug for Factorization<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Factorization").field("a", &self.a).field("w", &self.w).finish()
    }
}

impl<T: Scalar> Factorization<T> {
    pub fn new(a: Matrix<T>, w: Matrix<T>) -> Result<Factorization<T>, FactorError> {
        if a.cols() != w.rows() {
            return Err(FactorError::DimMismatch(format!(
                "A is {}x{} but W is {}x{}",
                a.rows(),
                a.cols(),
                w.rows(),
                w.cols()
            )));
        }
        if !a.is_nonnegative() || !w.is_nonnegative() {
            return Err(FactorError::NotNonnegative);
        }
        Ok(Factorization { a, w })
    }

    pub fn a(&self) -> &Matrix<T> {
        &self.a
    }

    pub fn w(&self) -> &Matrix<T> {
        &self.w
    }

    pub fn inner_dim(&self) -> usize {
        self.a.cols()
    }

    pub fn product(&self) -> Matrix<T> {
        self.a.mul(&self.w)
    }

    pub fn into_parts(self) -> (Matrix<T>, Matrix<T>) {
        (self.a, self.w)
    }
}

/// Per-column supports of `W` and per-row supports of `A`; the potential
/// function driving the stabilizer's termination argument.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportProfile {
    pub w_cols: Vec<IndexSet>,
    pub a_rows: Vec<IndexSet>,
}

impl SupportProfile {
    pub fn of<T: Scalar>(f: &Factorization<T>) -> SupportProfile {
        SupportProfile {
            w_cols: (0..f.w().cols()).map(|i| support(&f.w().col(i))).collect(),
            a_rows: (0..f.a().rows()).map(|j| support(&f.a().row(j))).collect(),
        }
    }
}

/// The total order on subsets: smaller cardinality first, then the sorted
/// index sequences lexicographically.
pub fn lex_compare_subsets(s: &IndexSet, t: &IndexSet) -> Ordering {
    assert_eq!(s.universe(), t.universe(), "subsets of different universes");
    s.cmp(t)
}

/// The lexicographically first subset of columns of `a` whose nonnegative
/// hull contains `v`; `None` when no subset (including the full set) works.
/// The empty set is admissible exactly for the zero vector.
pub fn lex_first_admissible<T: Scalar>(
    a: &Matrix<T>,
    v: &[T],
) -> Result<Option<IndexSet>, FactorError> {
    if a.cols() > MAX_ENUM_DIM {
        return Err(FactorError::InnerDimensionTooLarge(a.cols()));
    }
    assert_eq!(v.len(), a.rows(), "vector length differs from row count");
    for subset in IndexSet::all_subsets_lex(a.cols()) {
        if nonneg_solve(a, &subset, v).is_some() {
            return Ok(Some(subset));
        }
    }
    Ok(None)
}

/// True iff `A W = M` exactly with both factors entrywise nonnegative.
pub fn verify_factorization<T: Scalar>(
    m: &Matrix<T>,
    f: &Factorization<T>,
) -> Result<bool, FactorError> {
    if f.a().rows() != m.rows() || f.w().cols() != m.cols() {
        return Err(FactorError::DimMismatch(format!(
            "product is {}x{} but target is {}x{}",
            f.a().rows(),
            f.w().cols(),
            m.rows(),
            m.cols()
        )));
    }
    Ok(f.a().is_nonnegative() && f.w().is_nonnegative() && f.product() == *m)
}

/// Stability test. Requires a valid factorization of `m`.
pub fn is_stable<T: Scalar>(m: &Matrix<T>, f: &Factorization<T>) -> Result<bool, FactorError> {
    if !verify_factorization(m, f)? {
        return Err(FactorError::InvalidFactorization);
    }
    for i in 0..m.cols() {
        let target = lex_first_admissible(f.a(), &m.col(i))?;
        match target {
            Some(s) if support(&f.w().col(i)).is_subset_of(&s) => {}
            _ => return Ok(false),
        }
    }
    let wt = f.w().transpose();
    for j in 0..m.rows() {
        let target = lex_first_admissible(&wt, &m.row(j))?;
        match target {
            Some(t) if support(&f.a().row(j)).is_subset_of(&t) => {}
            _ => return Ok(false),
        }
    }
    Ok(true)
}
