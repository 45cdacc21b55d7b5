//! Dense matrices over an exact scalar field, plus sorted index sets with the
//! size-first lexicographic order used for supports and column subsets.

use std::fmt;

use itertools::Itertools;
use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatrixError {
    #[error("dimension mismatch: {0}")]
    DimMismatch(String),
    #[error("index {index} out of range for universe {universe}")]
    IndexOutOfRange { index: usize, universe: usize },
    #[error("duplicate index {0}")]
    DuplicateIndex(usize),
}

/// Row-major dense matrix. Entries are exact; all operations preserve
/// exactness.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Matrix<T> {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Matrix<T> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == ncols), "ragged rows");
        Matrix { rows: nrows, cols: ncols, data: rows.into_iter().flatten().collect() }
    }

    /// Builds from integer literals; test and example convenience.
    pub fn from_int_rows(rows: &[&[i64]]) -> Matrix<T> {
        Matrix::from_rows(
            rows.iter().map(|r| r.iter().map(|&n| T::from_int(n)).collect()).collect(),
        )
    }

    pub fn zeros(rows: usize, cols: usize) -> Matrix<T> {
        Matrix::from_fn(rows, cols, |_, _| T::zero())
    }

    pub fn identity(n: usize) -> Matrix<T> {
        Matrix::from_fn(n, n, |r, c| if r == c { T::one() } else { T::zero() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &T {
        assert!(r < self.rows && c < self.cols, "entry ({r},{c}) out of range");
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, value: T) {
        assert!(r < self.rows && c < self.cols, "entry ({r},{c}) out of range");
        self.data[r * self.cols + c] = value;
    }

    pub fn row(&self, r: usize) -> Vec<T> {
        (0..self.cols).map(|c| self.get(r, c).clone()).collect()
    }

    pub fn col(&self, c: usize) -> Vec<T> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn set_row(&mut self, r: usize, values: &[T]) {
        assert_eq!(values.len(), self.cols);
        for (c, v) in values.iter().enumerate() {
            self.set(r, c, v.clone());
        }
    }

    pub fn set_col(&mut self, c: usize, values: &[T]) {
        assert_eq!(values.len(), self.rows);
        for (r, v) in values.iter().enumerate() {
            self.set(r, c, v.clone());
        }
    }

    pub fn transpose(&self) -> Matrix<T> {
        Matrix::from_fn(self.cols, self.rows, |r, c| self.get(c, r).clone())
    }

    pub fn mul(&self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.cols, rhs.rows, "inner dimensions differ in matrix product");
        Matrix::from_fn(self.rows, rhs.cols, |r, c| {
            let mut acc = T::zero();
            for k in 0..self.cols {
                acc = acc + self.get(r, k).clone() * rhs.get(k, c).clone();
            }
            acc
        })
    }

    /// Matrix-vector product.
    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|r| {
                let mut acc = T::zero();
                for k in 0..self.cols {
                    acc = acc + self.get(r, k).clone() * v[k].clone();
                }
                acc
            })
            .collect()
    }

    pub fn select_rows(&self, rows: &IndexSet) -> Matrix<T> {
        assert_eq!(rows.universe(), self.rows);
        Matrix::from_fn(rows.len(), self.cols, |r, c| self.get(rows.nth(r), c).clone())
    }

    pub fn select_cols(&self, cols: &IndexSet) -> Matrix<T> {
        assert_eq!(cols.universe(), self.cols);
        Matrix::from_fn(self.rows, cols.len(), |r, c| self.get(r, cols.nth(c)).clone())
    }

    pub fn submatrix(&self, rows: &IndexSet, cols: &IndexSet) -> Matrix<T> {
        self.select_rows(rows).select_cols(cols)
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix::from_fn(self.rows, self.cols, |r, c| f(self.get(r, c)))
    }

    pub fn entries(&self) -> impl Iterator<Item = &T> {
        self.data.iter()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.data.iter().all(|x| !x.is_negative())
    }

    pub fn min_entry(&self) -> Option<&T> {
        self.data.iter().min()
    }

    /// Block-diagonal matrix with the given blocks along the diagonal and
    /// exact zeros elsewhere.
    pub fn block_diag(blocks: &[&Matrix<T>]) -> Matrix<T> {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = Matrix::zeros(rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            for r in 0..b.rows {
                for c in 0..b.cols {
                    out.set(r0 + r, c0 + c, b.get(r, c).clone());
                }
            }
            r0 += b.rows;
            c0 += b.cols;
        }
        out
    }

    /// Largest bit length over all entries; the `L` reported by the CLI.
    pub fn bit_len(&self) -> u64 {
        self.data.iter().map(Scalar::bit_len).max().unwrap_or(0)
    }
}

impl<T: Scalar> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "  {}", (0..self.cols).map(|c| self.get(r, c).to_string()).join(" "))?;
        }
        write!(f, "]")
    }
}

/// Support of a vector: indices of its nonzero entries.
pub fn support<T: Scalar>(v: &[T]) -> IndexSet {
    IndexSet::from_sorted(
        v.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(i, _)| i).collect(),
        v.len(),
    )
}

pub fn vec_is_nonnegative<T: Scalar>(v: &[T]) -> bool {
    v.iter().all(|x| !x.is_negative())
}

/// A sorted set of distinct indices below a fixed universe size.
///
/// `Ord` is the subset order used everywhere in this crate: smaller
/// cardinality first, ties broken by comparing the sorted index sequences
/// lexicographically.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IndexSet {
    indices: Vec<usize>,
    universe: usize,
}

impl IndexSet {
    pub fn new(
        indices: impl IntoIterator<Item = usize>,
        universe: usize,
    ) -> Result<IndexSet, MatrixError> {
        let mut v: Vec<usize> = indices.into_iter().collect();
        v.sort_unstable();
        for pair in v.windows(2) {
            if pair[0] == pair[1] {
                return Err(MatrixError::DuplicateIndex(pair[0]));
            }
        }
        if let Some(&max) = v.last() {
            if max >= universe {
                return Err(MatrixError::IndexOutOfRange { index: max, universe });
            }
        }
        Ok(IndexSet { indices: v, universe })
    }

    /// Caller guarantees sortedness, distinctness and range.
    pub fn from_sorted(indices: Vec<usize>, universe: usize) -> IndexSet {
        debug_assert!(indices.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(indices.last().map_or(true, |&m| m < universe));
        IndexSet { indices, universe }
    }

    pub fn empty(universe: usize) -> IndexSet {
        IndexSet { indices: Vec::new(), universe }
    }

    pub fn full(universe: usize) -> IndexSet {
        IndexSet { indices: (0..universe).collect(), universe }
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn nth(&self, pos: usize) -> usize {
        self.indices[pos]
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.indices.iter().copied()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.indices
    }

    pub fn contains(&self, index: usize) -> bool {
        self.indices.binary_search(&index).is_ok()
    }

    /// Position of `index` within the sorted sequence, if present.
    pub fn position_of(&self, index: usize) -> Option<usize> {
        self.indices.binary_search(&index).ok()
    }

    pub fn is_subset_of(&self, other: &IndexSet) -> bool {
        self.indices.iter().all(|&i| other.contains(i))
    }

    pub fn complement(&self) -> IndexSet {
        IndexSet::from_sorted(
            (0..self.universe).filter(|&i| !self.contains(i)).collect(),
            self.universe,
        )
    }

    pub fn intersection(&self, other: &IndexSet) -> IndexSet {
        debug_assert_eq!(self.universe, other.universe);
        IndexSet::from_sorted(
            self.indices.iter().copied().filter(|&i| other.contains(i)).collect(),
            self.universe,
        )
    }

    /// All subsets of `{0..universe}` in the size-first lexicographic order:
    /// the empty set, then singletons in index order, and so on.
    pub fn all_subsets_lex(universe: usize) -> impl Iterator<Item = IndexSet> {
        (0..=universe).flat_map(move |k| Self::subsets_of_size_lex(universe, k))
    }

    /// All size-`k` subsets in lexicographic order of their sorted sequences.
    pub fn subsets_of_size_lex(universe: usize, k: usize) -> impl Iterator<Item = IndexSet> {
        (0..universe).combinations(k).map(move |c| IndexSet::from_sorted(c, universe))
    }
}

impl Ord for IndexSet {
    fn cmp(&self, other: &IndexSet) -> std::cmp::Ordering {
        self.indices.len().cmp(&other.indices.len()).then_with(|| self.indices.cmp(&other.indices))
    }
}

impl PartialOrd for IndexSet {
    fn partial_cmp(&self, other: &IndexSet) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.indices.iter().join(","))
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.indices.iter().join(","))
    }
}
