//! Alternating updates that turn any nonnegative factorization into a stable
//! one of the same inner dimension.
//!
//! Each round runs a W-phase (columns of `W` in increasing index) followed by
//! an A-phase (rows of `A`), replacing a vector whenever a lexicographically
//! strictly earlier admissible support exists. Only one factor changes at a
//! time, so the product is preserved after every single update; supports only
//! ever move earlier, which bounds the total number of updates by
//! `(m + n) * 2^r`.

use std::fmt;

use crate::factor::{lex_first_admissible, verify_factorization, FactorError, Factorization};
use crate::linalg::nonneg_solve;
use crate::matrix::{support, IndexSet, Matrix};
use crate::scalar::Scalar;

/// Which factor an update touched.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    /// A column of `W` was replaced.
    W,
    /// A row of `A` was replaced.
    A,
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Phase::W => write!(f, "W-phase"),
            Phase::A => write!(f, "A-phase"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UpdateRecord {
    pub phase: Phase,
    pub index: usize,
    pub old_support: IndexSet,
    pub new_support: IndexSet,
}

/// Sequence of updates performed by [`stabilize`]; every recorded new
/// support is lexicographically strictly earlier than the old one.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StabilizeTrace {
    pub updates: Vec<UpdateRecord>,
}

impl StabilizeTrace {
    pub fn len(&self) -> usize {
        self.updates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.updates.is_empty()
    }
}

/// Stabilizes a factorization of `m`, preserving the product and the inner
/// dimension. See [`stabilize_with`] for an observed variant.
pub fn stabilize<T: Scalar>(
    m: &Matrix<T>,
    f: Factorization<T>,
) -> Result<(Factorization<T>, StabilizeTrace), FactorError> {
    stabilize_with(m, f, |_, _| {})
}

/// Like [`stabilize`], invoking `on_update` with the factors after every
/// single vector replacement; lets callers observe that the product is
/// preserved step by step.
pub fn stabilize_with<T: Scalar>(
    m: &Matrix<T>,
    f: Factorization<T>,
    mut on_update: impl FnMut(&Matrix<T>, &Matrix<T>),
) -> Result<(Factorization<T>, StabilizeTrace), FactorError> {
    if !verify_factorization(m, &f)? {
        return Err(FactorError::InvalidFactorization);
    }
    let (mut a, mut w) = f.into_parts();
    let mut trace = StabilizeTrace::default();

    loop {
        let mut updated = false;

        for i in 0..w.cols() {
            let column = m.col(i);
            let target = lex_first_admissible(&a, &column)?
                .expect("every column of a valid factorization has an admissible subset");
            let current = support(&w.col(i));
            if target < current {
                let witness = nonneg_solve(&a, &target, &column)
                    .expect("the lex-first admissible subset supports a witness");
                w.set_col(i, &witness);
                let new_support = support(&witness);
                debug_assert!(new_support < current);
                trace.updates.push(UpdateRecord {
                    phase: Phase::W,
                    index: i,
                    old_support: current,
                    new_support,
                });
                on_update(&a, &w);
                updated = true;
            }
        }

        let wt = w.transpose();
        for j in 0..a.rows() {
            let row = m.row(j);
            let target = lex_first_admissible(&wt, &row)?
                .expect("every row of a valid factorization has an admissible subset");
            let current = support(&a.row(j));
            if target < current {
                let witness = nonneg_solve(&wt, &target, &row)
                    .expect("the lex-first admissible subset supports a witness");
                a.set_row(j, &witness);
                let new_support = support(&witness);
                debug_assert!(new_support < current);
                trace.updates.push(UpdateRecord {
                    phase: Phase::A,
                    index: j,
                    old_support: current,
                    new_support,
                });
                on_update(&a, &w);
                updated = true;
            }
        }

        if !updated {
            break;
        }
    }

    let result = Factorization::new(a, w)?;
    debug_assert!(verify_factorization(m, &result)?);
    Ok((result, trace))
}
