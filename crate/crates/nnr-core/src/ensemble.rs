//! Ensembles of embedded inverses, the lexicographic-first candidate
//! selector, factor recovery, and the sign predicate that decides whether a
//! candidate pair of ensembles assembles into a factorization.
//!
//! For a factor `A` of rank `s` with anchor rows `U`, the ensemble holds one
//! `r x s` transform per size-`s` linearly independent column set `S_k`,
//! zero off the rows `S_k` and equal to the exact inverse of `A^U` restricted
//! to `S_k` there. Applied to `M_i^U`, the transforms produce every candidate
//! for column `W_i`; for a stable factorization the true column is the unique
//! nonnegative candidate of lexicographically minimal support.

use std::fmt;

use thiserror::Error;

use crate::factor::Factorization;
use crate::linalg::{det_adjugate, rank_and_basis, Axis};
use crate::matrix::{support, vec_is_nonnegative, IndexSet, Matrix};
use crate::scalar::Scalar;

/// Upper bound on the number of transforms kept per ensemble. The count is
/// at most C(r, s), which can reach the thousands only far past the inner
/// dimensions this crate accepts elsewhere.
pub const MAX_TRANSFORMS: usize = 4096;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EnsembleError {
    #[error("ensemble would need {0} transforms, above the cap {MAX_TRANSFORMS}")]
    TooManyTransforms(usize),
    #[error("anchor does not match the matrix: {0}")]
    AnchorMismatch(String),
    #[error("recovery failed at {side} index {index}: {reason}")]
    RecoverFailed { side: &'static str, index: usize, reason: FailReason },
    #[error("predicate verdict is FAIL; nothing to extract")]
    NotPass,
    #[error("ensemble sides are swapped: expected a column-side and a row-side ensemble")]
    WrongSides,
}

/// Why a candidate selection or a predicate cell failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailReason {
    /// No candidate vector is entrywise nonnegative (for denominator-cleared
    /// systems this includes the case of no invertible candidate).
    NoCandidate,
    /// Two distinct nonnegative candidates share the minimal support.
    Tie,
    /// The selected pair does not reproduce the matrix entry.
    ProductMismatch,
}

impl fmt::Display for FailReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FailReason::NoCandidate => write!(f, "no-nonnegative-candidate"),
            FailReason::Tie => write!(f, "tie"),
            FailReason::ProductMismatch => write!(f, "product-mismatch"),
        }
    }
}

/// Which factor an ensemble describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// Ensemble of the left factor `A`; recovers columns of `W`.
    ColumnSide,
    /// Ensemble of the right factor `W`; recovers rows of `A`.
    RowSide,
}

/// The list of embedded inverse transforms of one factor at its anchor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ensemble<T> {
    side: Side,
    inner_dim: usize,
    /// `U` (row indices, column side) or `V` (column indices, row side).
    anchor: IndexSet,
    /// The independent subsets `S_k` (or `T_l`) of `[r]`, in lex order.
    subsets: Vec<IndexSet>,
    /// Column side: `r x s` matrices `B_k`; row side: `t x r` matrices `C_l`.
    transforms: Vec<Matrix<T>>,
}

impl<T: Scalar> Ensemble<T> {
    /// Ensemble of the left factor `a` (shape m x r) at the lexicographically
    /// first maximal independent row set.
    pub fn for_left_factor(a: &Matrix<T>) -> Result<Ensemble<T>, EnsembleError> {
        let (anchor, subsets, transforms) = column_side_data(a)?;
        Ok(Ensemble { side: Side::ColumnSide, inner_dim: a.cols(), anchor, subsets, transforms })
    }

    /// Ensemble of the right factor `w` (shape r x n); built by transposing
    /// the column-side construction.
    pub fn for_right_factor(w: &Matrix<T>) -> Result<Ensemble<T>, EnsembleError> {
        let wt = w.transpose();
        let (anchor, subsets, transforms) = column_side_data(&wt)?;
        Ok(Ensemble {
            side: Side::RowSide,
            inner_dim: w.rows(),
            anchor,
            subsets,
            transforms: transforms.iter().map(Matrix::transpose).collect(),
        })
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn anchor(&self) -> &IndexSet {
        &self.anchor
    }

    /// Anchor size: `s = rank(A)` on the column side, `t = rank(W)` on the
    /// row side.
    pub fn anchor_rank(&self) -> usize {
        self.anchor.len()
    }

    pub fn inner_dim(&self) -> usize {
        self.inner_dim
    }

    pub fn subsets(&self) -> &[IndexSet] {
        &self.subsets
    }

    pub fn transforms(&self) -> &[Matrix<T>] {
        &self.transforms
    }

    pub fn len(&self) -> usize {
        self.transforms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transforms.is_empty()
    }

    pub fn transforms_mut(&mut self) -> &mut Vec<Matrix<T>> {
        &mut self.transforms
    }

    /// Column side: the vectors `B_k M_i^U`, candidates for column `W_i`.
    pub fn column_candidates(&self, m: &Matrix<T>, col: usize) -> Vec<Vec<T>> {
        assert_eq!(self.side, Side::ColumnSide);
        assert_eq!(self.anchor.universe(), m.rows(), "anchor does not index rows of M");
        let anchored: Vec<T> = self.anchor.iter().map(|u| m.get(u, col).clone()).collect();
        self.transforms.iter().map(|b| b.mul_vec(&anchored)).collect()
    }

    /// Row side: the vectors `M^j_V C_l`, candidates for row `A^j`.
    pub fn row_candidates(&self, m: &Matrix<T>, row: usize) -> Vec<Vec<T>> {
        assert_eq!(self.side, Side::RowSide);
        assert_eq!(self.anchor.universe(), m.cols(), "anchor does not index columns of M");
        let anchored: Vec<T> = self.anchor.iter().map(|v| m.get(row, v).clone()).collect();
        self.transforms.iter().map(|c| c.transpose().mul_vec(&anchored)).collect()
    }
}

fn column_side_data<T: Scalar>(
    a: &Matrix<T>,
) -> Result<(IndexSet, Vec<IndexSet>, Vec<Matrix<T>>), EnsembleError> {
    let r = a.cols();
    let (s, anchor) = rank_and_basis(a, Axis::Rows);
    let a_anchor = a.select_rows(&anchor);

    let mut subsets = Vec::new();
    let mut transforms = Vec::new();
    for candidate in IndexSet::subsets_of_size_lex(r, s) {
        let square = a_anchor.select_cols(&candidate);
        let (d, adj) = det_adjugate(&square);
        if d.is_zero() {
            continue;
        }
        if transforms.len() == MAX_TRANSFORMS {
            return Err(EnsembleError::TooManyTransforms(MAX_TRANSFORMS + 1));
        }
        // Embed the inverse into r x s, zero off the rows of the subset.
        let mut embedded = Matrix::zeros(r, s);
        for (pos, row) in candidate.iter().enumerate() {
            for c in 0..s {
                embedded.set(row, c, adj.get(pos, c).clone() / d.clone());
            }
        }
        subsets.push(candidate);
        transforms.push(embedded);
    }
    debug_assert!(s > 0 || (subsets.len() == 1 && subsets[0].is_empty()));
    Ok((anchor, subsets, transforms))
}

/// Among the entrywise-nonnegative candidates, the one of lexicographically
/// minimal support, with its index. Identical duplicate vectors do not
/// constitute a tie; two distinct minimal-support vectors do.
pub fn first_candidate<T: Scalar>(candidates: &[Vec<T>]) -> Result<(usize, Vec<T>), FailReason> {
    let mut best: Option<(usize, IndexSet)> = None;
    let mut tied = false;
    for (idx, cand) in candidates.iter().enumerate() {
        if !vec_is_nonnegative(cand) {
            continue;
        }
        let supp = support(cand);
        match &mut best {
            None => best = Some((idx, supp)),
            Some((best_idx, best_supp)) => {
                if supp < *best_supp {
                    best = Some((idx, supp));
                    tied = false;
                } else if supp == *best_supp && cand != &candidates[*best_idx] {
                    tied = true;
                }
            }
        }
    }
    match (best, tied) {
        (Some(_), true) => Err(FailReason::Tie),
        (Some((idx, _)), false) => Ok((idx, candidates[idx].clone())),
        (None, _) => Err(FailReason::NoCandidate),
    }
}

/// Recovers the opposite factor of a stable factorization from `m` and one
/// ensemble: the full `W` (r x n) from a column-side ensemble, or the full
/// `A` (m x r) from a row-side ensemble.
pub fn recover_factor<T: Scalar>(
    m: &Matrix<T>,
    ensemble: &Ensemble<T>,
) -> Result<Matrix<T>, EnsembleError> {
    match ensemble.side() {
        Side::ColumnSide => {
            let r = ensemble.inner_dim();
            let mut w = Matrix::zeros(r, m.cols());
            for i in 0..m.cols() {
                let (_, vec) = first_candidate(&ensemble.column_candidates(m, i)).map_err(
                    |reason| EnsembleError::RecoverFailed { side: "column", index: i, reason },
                )?;
                w.set_col(i, &vec);
            }
            Ok(w)
        }
        Side::RowSide => {
            let r = ensemble.inner_dim();
            let mut a = Matrix::zeros(m.rows(), r);
            for j in 0..m.rows() {
                let (_, vec) = first_candidate(&ensemble.row_candidates(m, j)).map_err(
                    |reason| EnsembleError::RecoverFailed { side: "row", index: j, reason },
                )?;
                a.set_row(j, &vec);
            }
            Ok(a)
        }
    }
}

/// One failed predicate cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellFailure {
    pub row: usize,
    pub col: usize,
    pub reason: FailReason,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PredicateVerdict {
    Pass,
    Fail,
}

impl fmt::Display for PredicateVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PredicateVerdict::Pass => write!(f, "PASS"),
            PredicateVerdict::Fail => write!(f, "FAIL"),
        }
    }
}

/// Outcome of the predicate: the verdict, the per-column and per-row
/// selections (index into the ensemble plus the selected vector), and every
/// failed cell with its reason.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredicateReport<T> {
    verdict: PredicateVerdict,
    col_choice: Vec<Result<(usize, Vec<T>), FailReason>>,
    row_choice: Vec<Result<(usize, Vec<T>), FailReason>>,
    failures: Vec<CellFailure>,
}

impl<T: Scalar> PredicateReport<T> {
    pub fn verdict(&self) -> PredicateVerdict {
        self.verdict
    }

    pub fn passed(&self) -> bool {
        self.verdict == PredicateVerdict::Pass
    }

    pub fn failures(&self) -> &[CellFailure] {
        &self.failures
    }

    /// The chosen transform indices `(i', j')` for cell `(i, j)`, when both
    /// selections succeeded.
    pub fn chosen(&self, col: usize, row: usize) -> Option<(usize, usize)> {
        match (&self.col_choice[col], &self.row_choice[row]) {
            (Ok((ip, _)), Ok((jp, _))) => Some((*ip, *jp)),
            _ => None,
        }
    }

    pub fn column_selection(&self, col: usize) -> Result<&(usize, Vec<T>), FailReason> {
        self.col_choice[col].as_ref().map_err(|e| *e)
    }

    pub fn row_selection(&self, row: usize) -> Result<&(usize, Vec<T>), FailReason> {
        self.row_choice[row].as_ref().map_err(|e| *e)
    }
}

/// Evaluates the predicate: select candidates by minimal support on both
/// sides, then check every product `A^j W_i = M_i^j` exactly. PASS iff every
/// cell passes.
pub fn evaluate_predicate<T: Scalar>(
    m: &Matrix<T>,
    ea: &Ensemble<T>,
    ew: &Ensemble<T>,
) -> Result<PredicateReport<T>, EnsembleError> {
    if ea.side() != Side::ColumnSide || ew.side() != Side::RowSide {
        return Err(EnsembleError::WrongSides);
    }
    if ea.anchor().universe() != m.rows() || ew.anchor().universe() != m.cols() {
        return Err(EnsembleError::AnchorMismatch(format!(
            "anchors index {}x{} but M is {}x{}",
            ea.anchor().universe(),
            ew.anchor().universe(),
            m.rows(),
            m.cols()
        )));
    }

    let col_choice: Vec<_> =
        (0..m.cols()).map(|i| first_candidate(&ea.column_candidates(m, i))).collect();
    let row_choice: Vec<_> =
        (0..m.rows()).map(|j| first_candidate(&ew.row_candidates(m, j))).collect();

    let mut failures = Vec::new();
    for i in 0..m.cols() {
        for j in 0..m.rows() {
            let reason = match (&col_choice[i], &row_choice[j]) {
                (Err(r), _) => Some(*r),
                (_, Err(r)) => Some(*r),
                (Ok((_, w_i)), Ok((_, a_j))) => {
                    let mut dot = T::zero();
                    for l in 0..w_i.len() {
                        dot = dot + a_j[l].clone() * w_i[l].clone();
                    }
                    if dot == *m.get(j, i) {
                        None
                    } else {
                        Some(FailReason::ProductMismatch)
                    }
                }
            };
            if let Some(reason) = reason {
                failures.push(CellFailure { row: j, col: i, reason });
            }
        }
    }

    let verdict =
        if failures.is_empty() { PredicateVerdict::Pass } else { PredicateVerdict::Fail };
    Ok(PredicateReport { verdict, col_choice, row_choice, failures })
}

/// Assembles the factorization selected by a PASS report.
pub fn extract_factorization<T: Scalar>(
    m: &Matrix<T>,
    report: &PredicateReport<T>,
) -> Result<Factorization<T>, EnsembleError> {
    if !report.passed() {
        return Err(EnsembleError::NotPass);
    }
    let r = report
        .col_choice
        .first()
        .and_then(|c| c.as_ref().ok().map(|(_, v)| v.len()))
        .or_else(|| report.row_choice.first().and_then(|c| c.as_ref().ok().map(|(_, v)| v.len())))
        .unwrap_or(0);
    let mut w = Matrix::zeros(r, m.cols());
    for (i, choice) in report.col_choice.iter().enumerate() {
        let (_, vec) = choice.as_ref().expect("PASS report has all columns selected");
        w.set_col(i, vec);
    }
    let mut a = Matrix::zeros(m.rows(), r);
    for (j, choice) in report.row_choice.iter().enumerate() {
        let (_, vec) = choice.as_ref().expect("PASS report has all rows selected");
        a.set_row(j, vec);
    }
    let f = Factorization::new(a, w).expect("selected vectors are nonnegative");
    debug_assert_eq!(f.product(), *m);
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factor::{is_stable, verify_factorization};
    use crate::scalar::{rat, rint, Rat};
    use crate::stabilize::stabilize;

    fn stable_pair() -> (Matrix<Rat>, Factorization<Rat>) {
        let m = Matrix::from_int_rows(&[&[1, 1], &[0, 1]]);
        let a = Matrix::from_int_rows(&[&[1, 0, 1], &[0, 0, 1]]);
        let w = Matrix::from_int_rows(&[&[1, 0], &[0, 0], &[0, 1]]);
        let f = Factorization::new(a, w).unwrap();
        assert!(is_stable(&m, &f).unwrap());
        (m, f)
    }

    #[test]
    fn build_identity_ensemble() {
        let a: Matrix<Rat> = Matrix::identity(2);
        let e = Ensemble::for_left_factor(&a).unwrap();
        assert_eq!(e.anchor_rank(), 2);
        assert_eq!(e.anchor(), &IndexSet::full(2));
        assert_eq!(e.len(), 1);
        assert_eq!(e.transforms()[0], Matrix::identity(2));
    }

    #[test]
    fn build_rank_two_of_three_columns() {
        let a: Matrix<Rat> = Matrix::from_int_rows(&[&[1, 0, 1], &[0, 1, 1]]);
        let e = Ensemble::for_left_factor(&a).unwrap();
        assert_eq!(e.anchor_rank(), 2);
        assert_eq!(e.anchor(), &IndexSet::full(2));
        assert_eq!(e.len(), 3);
        let expected: Vec<IndexSet> = [[0usize, 1], [0, 2], [1, 2]]
            .iter()
            .map(|s| IndexSet::new(s.iter().copied(), 3).unwrap())
            .collect();
        assert_eq!(e.subsets(), &expected[..]);
        // B_2 lives on rows {0,2} and inverts [[1,1],[0,1]].
        let b2 = &e.transforms()[1];
        assert_eq!(b2.row(0), vec![rint(1), rint(-1)]);
        assert_eq!(b2.row(1), vec![rint(0), rint(0)]);
        assert_eq!(b2.row(2), vec![rint(0), rint(1)]);
    }

    #[test]
    fn build_skips_dependent_and_zero_columns() {
        let a: Matrix<Rat> = Matrix::from_int_rows(&[&[1, 0, 1], &[0, 0, 1]]);
        let e = Ensemble::for_left_factor(&a).unwrap();
        assert_eq!(e.anchor_rank(), 2);
        assert_eq!(e.subsets(), &[IndexSet::new([0, 2], 3).unwrap()]);
        assert_eq!(e.len(), 1);
    }

    #[test]
    fn first_candidate_examples() {
        let c1 = vec![
            vec![rint(1), rint(0)],
            vec![rint(0), rint(1)],
            vec![rint(-1), rint(2)],
        ];
        assert_eq!(first_candidate(&c1).unwrap(), (0, vec![rint(1), rint(0)]));

        let c2 = vec![vec![rint(-1), rint(0)], vec![rint(0), rint(-1)]];
        assert_eq!(first_candidate(&c2).unwrap_err(), FailReason::NoCandidate);

        let c3 = vec![vec![rint(1), rint(0)], vec![rint(2), rint(0)]];
        assert_eq!(first_candidate(&c3).unwrap_err(), FailReason::Tie);

        // Identical duplicates are not a tie.
        let c4 = vec![vec![rint(1), rint(0)], vec![rint(1), rint(0)]];
        assert_eq!(first_candidate(&c4).unwrap(), (0, vec![rint(1), rint(0)]));

        // A later, lex-earlier candidate overrides an earlier tie pair.
        let c5 = vec![
            vec![rint(0), rint(1)],
            vec![rint(0), rint(2)],
            vec![rint(1), rint(0)],
        ];
        assert_eq!(first_candidate(&c5).unwrap_err(), FailReason::Tie);
    }

    #[test]
    fn recover_identity() {
        let m: Matrix<Rat> = Matrix::identity(2);
        let e = Ensemble::for_left_factor(&Matrix::identity(2)).unwrap();
        assert_eq!(recover_factor(&m, &e).unwrap(), Matrix::identity(2));
    }

    #[test]
    fn recover_stable_example() {
        let (m, f) = stable_pair();
        let ea = Ensemble::for_left_factor(f.a()).unwrap();
        assert_eq!(recover_factor(&m, &ea).unwrap(), *f.w());
        let ew = Ensemble::for_right_factor(f.w()).unwrap();
        assert_eq!(recover_factor(&m, &ew).unwrap(), *f.a());
    }

    #[test]
    fn recover_zero_column_gives_zero() {
        let a: Matrix<Rat> = Matrix::from_int_rows(&[&[1, 0], &[0, 1]]);
        let m: Matrix<Rat> = Matrix::from_int_rows(&[&[1, 0], &[0, 0]]);
        let e = Ensemble::for_left_factor(&a).unwrap();
        let w = recover_factor(&m, &e).unwrap();
        assert_eq!(w.col(1), vec![rint(0), rint(0)]);
    }

    #[test]
    fn predicate_passes_on_stable_ensembles() {
        let (m, f) = stable_pair();
        let ea = Ensemble::for_left_factor(f.a()).unwrap();
        let ew = Ensemble::for_right_factor(f.w()).unwrap();
        let report = evaluate_predicate(&m, &ea, &ew).unwrap();
        assert!(report.passed());
        let extracted = extract_factorization(&m, &report).unwrap();
        assert_eq!(&extracted, &f);
    }

    #[test]
    fn predicate_fails_on_zeroed_transform() {
        let m: Matrix<Rat> = Matrix::identity(2);
        let mut ea = Ensemble::for_left_factor(&Matrix::identity(2)).unwrap();
        ea.transforms_mut()[0] = Matrix::zeros(2, 2);
        let ew = Ensemble::for_right_factor(&Matrix::identity(2)).unwrap();
        let report = evaluate_predicate(&m, &ea, &ew).unwrap();
        assert!(!report.passed());
        assert!(report.failures().iter().all(|f| f.reason == FailReason::ProductMismatch));
    }

    #[test]
    fn predicate_fails_without_nonnegative_candidates() {
        let m: Matrix<Rat> = Matrix::identity(2);
        let mut ea = Ensemble::for_left_factor(&Matrix::identity(2)).unwrap();
        ea.transforms_mut()[0] = ea.transforms()[0].map(|x| -x.clone());
        let ew = Ensemble::for_right_factor(&Matrix::identity(2)).unwrap();
        let report = evaluate_predicate(&m, &ea, &ew).unwrap();
        assert!(!report.passed());
        assert!(report.failures().iter().any(|f| f.reason == FailReason::NoCandidate));
    }

    fn random_factorization(rng: &mut impl rand::Rng) -> (Matrix<Rat>, Factorization<Rat>) {
        let (mr, r, n) = (rng.gen_range(1..5), rng.gen_range(1..4), rng.gen_range(1..5));
        let choices = [rint(0), rint(0), rat(1, 2), rint(1), rint(2)];
        let mut a: Matrix<Rat> =
            Matrix::from_fn(mr, r, |_, _| choices[rng.gen_range(0..choices.len())].clone());
        // Occasionally duplicate or zero out a column to hit rank-deficient A.
        if r >= 2 && rng.gen_bool(0.3) {
            let src = a.col(0);
            a.set_col(1, &src);
        }
        if r >= 2 && rng.gen_bool(0.2) {
            a.set_col(r - 1, &vec![rint(0); mr]);
        }
        let w: Matrix<Rat> =
            Matrix::from_fn(r, n, |_, _| choices[rng.gen_range(0..choices.len())].clone());
        let f = Factorization::new(a, w).unwrap();
        let m = f.product();
        (m, f)
    }

    #[test]
    fn lemma_checks_on_random_stable_factorizations() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(41);
        for _ in 0..60 {
            let (m, f) = random_factorization(&mut rng);
            let (stable, _) = stabilize(&m, f).unwrap();
            let ea = Ensemble::for_left_factor(stable.a()).unwrap();

            for i in 0..m.cols() {
                let candidates = ea.column_candidates(&m, i);
                // Validity: every candidate reproduces the column through A.
                for cand in &candidates {
                    assert_eq!(stable.a().mul_vec(cand), m.col(i));
                }
                // Occurrence: the true column appears verbatim.
                assert!(candidates.contains(&stable.w().col(i)));
                // Independent support: recovered supports index independent
                // columns of A.
                let supp = support(&stable.w().col(i));
                let sub = stable.a().select_cols(&supp);
                assert_eq!(crate::linalg::rank(&sub), supp.len());
            }

            // Round trip: predicate passes and extraction returns the pair.
            let ew = Ensemble::for_right_factor(stable.w()).unwrap();
            let report = evaluate_predicate(&m, &ea, &ew).unwrap();
            assert!(report.passed());
            let extracted = extract_factorization(&m, &report).unwrap();
            assert_eq!(extracted, stable);
            assert!(verify_factorization(&m, &extracted).unwrap());
        }
    }

    #[test]
    fn zero_matrix_ensemble_recovers_zero() {
        let a: Matrix<Rat> = Matrix::zeros(2, 2);
        let m: Matrix<Rat> = Matrix::zeros(2, 3);
        let e = Ensemble::for_left_factor(&a).unwrap();
        assert_eq!(e.anchor_rank(), 0);
        assert_eq!(e.len(), 1);
        let w = recover_factor(&m, &e).unwrap();
        assert_eq!(w, Matrix::zeros(2, 3));
    }
}
