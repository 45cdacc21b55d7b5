//! Exact dense linear algebra: rank with a greedy lexicographic basis,
//! determinant and adjugate, linear solves, and exact nonnegative
//! feasibility via a phase-1 simplex with Bland's rule.

use num::bigint::BigInt;
use num::rational::Ratio;
use num::{Integer, One, Zero};

use crate::matrix::{IndexSet, Matrix};
use crate::scalar::{Rat, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Rows,
    Cols,
}

/// Exact rank together with the lexicographically first maximal independent
/// index set along the axis (greedy scan in index order).
pub fn rank_and_basis<T: Scalar>(m: &Matrix<T>, axis: Axis) -> (usize, IndexSet) {
    let (count, vector): (usize, Box<dyn Fn(usize) -> Vec<T>>) = match axis {
        Axis::Rows => (m.rows(), Box::new(|i| m.row(i))),
        Axis::Cols => (m.cols(), Box::new(|i| m.col(i))),
    };
    let mut pivots: Vec<(usize, Vec<T>)> = Vec::new();
    let mut chosen = Vec::new();
    for idx in 0..count {
        let mut v = vector(idx);
        reduce_against(&mut v, &pivots);
        if let Some(p) = v.iter().position(|x| !x.is_zero()) {
            pivots.push((p, v));
            chosen.push(idx);
        }
    }
    (chosen.len(), IndexSet::from_sorted(chosen, count))
}

pub fn rank<T: Scalar>(m: &Matrix<T>) -> usize {
    rank_and_basis(m, Axis::Cols).0
}

fn reduce_against<T: Scalar>(v: &mut [T], pivots: &[(usize, Vec<T>)]) {
    for (p, pv) in pivots {
        if !v[*p].is_zero() {
            let factor = v[*p].clone() / pv[*p].clone();
            for j in 0..v.len() {
                v[j] = v[j].clone() - factor.clone() * pv[j].clone();
            }
        }
    }
}

/// Determinant. Rational matrices run through fraction-free (Bareiss)
/// elimination on a denominator-cleared integer matrix; irrational entries
/// fall back to plain exact Gaussian elimination.
pub fn det<T: Scalar>(m: &Matrix<T>) -> T {
    assert_eq!(m.rows(), m.cols(), "determinant of a non-square matrix");
    if m.rows() == 0 {
        return T::one();
    }
    if let Some(rational) = rational_view(m) {
        return T::from_rat(det_rat_bareiss(rational));
    }
    gauss_det(m)
}

fn rational_view<T: Scalar>(m: &Matrix<T>) -> Option<Vec<Vec<Rat>>> {
    let mut rows = Vec::with_capacity(m.rows());
    for r in 0..m.rows() {
        let mut row = Vec::with_capacity(m.cols());
        for c in 0..m.cols() {
            row.push(m.get(r, c).as_rat()?.clone());
        }
        rows.push(row);
    }
    Some(rows)
}

fn det_rat_bareiss(rows: Vec<Vec<Rat>>) -> Rat {
    let n = rows.len();
    // Clear denominators row by row so elimination runs over integers.
    let mut scale = Rat::one();
    let mut m: Vec<Vec<BigInt>> = Vec::with_capacity(n);
    for row in rows {
        let lcm = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        scale *= Ratio::from_integer(lcm.clone());
        m.push(row.into_iter().map(|x| x.numer() * (&lcm / x.denom())).collect());
    }
    Ratio::from_integer(bareiss_det_int(m)) / scale
}

fn bareiss_det_int(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    let mut sign = 1i64;
    let mut prev = BigInt::one();
    for k in 0..n.saturating_sub(1) {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(k, i);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                // Exact division: the quotient is a (k+1)-minor of the input.
                m[i][j] = (&m[k][k] * &m[i][j] - &m[i][k] * &m[k][j]) / &prev;
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    let d = m[n - 1][n - 1].clone();
    if sign < 0 {
        -d
    } else {
        d
    }
}

fn gauss_det<T: Scalar>(m: &Matrix<T>) -> T {
    let n = m.rows();
    let mut a: Vec<Vec<T>> = (0..n).map(|r| m.row(r)).collect();
    let mut det = T::one();
    for k in 0..n {
        let pivot_row = match (k..n).find(|&i| !a[i][k].is_zero()) {
            Some(i) => i,
            None => return T::zero(),
        };
        if pivot_row != k {
            a.swap(k, pivot_row);
            det = -det;
        }
        let pivot = a[k][k].clone();
        det = det * pivot.clone();
        for i in k + 1..n {
            if a[i][k].is_zero() {
                continue;
            }
            let factor = a[i][k].clone() / pivot.clone();
            for j in k..n {
                a[i][j] = a[i][j].clone() - factor.clone() * a[k][j].clone();
            }
        }
    }
    det
}

/// Determinant and adjugate; `adj * R = det * I` exactly, with the usual
/// `(-1)^{i+j}` cofactor signs, and the adjugate is defined even when the
/// determinant vanishes.
pub fn det_adjugate<T: Scalar>(m: &Matrix<T>) -> (T, Matrix<T>) {
    assert_eq!(m.rows(), m.cols(), "adjugate of a non-square matrix");
    let n = m.rows();
    let d = det(m);
    if n == 0 {
        return (d, Matrix::zeros(0, 0));
    }
    let adj = Matrix::from_fn(n, n, |i, j| {
        // adj[i][j] is the (j, i) cofactor.
        let minor = Matrix::from_fn(n - 1, n - 1, |r, c| {
            let rr = if r < j { r } else { r + 1 };
            let cc = if c < i { c } else { c + 1 };
            m.get(rr, cc).clone()
        });
        let cof = det(&minor);
        if (i + j) % 2 == 0 {
            cof
        } else {
            -cof
        }
    });
    (d, adj)
}

/// Inverse via adjugate over determinant; `None` when singular.
pub fn inverse<T: Scalar>(m: &Matrix<T>) -> Option<Matrix<T>> {
    let (d, adj) = det_adjugate(m);
    if d.is_zero() {
        return None;
    }
    Some(adj.map(|x| x.clone() / d.clone()))
}

/// Some exact solution of `A x = v` (free variables pinned to zero), or
/// `None` when the system is inconsistent.
pub fn solve<T: Scalar>(a: &Matrix<T>, v: &[T]) -> Option<Vec<T>> {
    assert_eq!(v.len(), a.rows());
    let (rows, cols) = (a.rows(), a.cols());
    let mut aug: Vec<Vec<T>> = (0..rows)
        .map(|r| {
            let mut row = a.row(r);
            row.push(v[r].clone());
            row
        })
        .collect();
    let mut pivot_cols = Vec::new();
    let mut rank = 0;
    for c in 0..cols {
        let pivot_row = match (rank..rows).find(|&i| !aug[i][c].is_zero()) {
            Some(i) => i,
            None => continue,
        };
        aug.swap(rank, pivot_row);
        let pivot = aug[rank][c].clone();
        for j in c..=cols {
            aug[rank][j] = aug[rank][j].clone() / pivot.clone();
        }
        for i in 0..rows {
            if i != rank && !aug[i][c].is_zero() {
                let factor = aug[i][c].clone();
                for j in c..=cols {
                    aug[i][j] = aug[i][j].clone() - factor.clone() * aug[rank][j].clone();
                }
            }
        }
        pivot_cols.push(c);
        rank += 1;
        if rank == rows {
            break;
        }
    }
    for row in aug.iter().skip(rank) {
        if !row[cols].is_zero() {
            return None;
        }
    }
    let mut x = vec![T::zero(); cols];
    for (r, &c) in pivot_cols.iter().enumerate() {
        x[c] = aug[r][cols].clone();
    }
    Some(x)
}

/// Exact nonnegative feasibility: a witness `x >= 0` with `A x = v` and
/// support inside `support`, or `None`. Phase-1 simplex with Bland's rule,
/// so termination is guaranteed; any valid witness is acceptable.
pub fn nonneg_solve<T: Scalar>(a: &Matrix<T>, support: &IndexSet, v: &[T]) -> Option<Vec<T>> {
    assert_eq!(v.len(), a.rows(), "right-hand side length differs from row count");
    assert_eq!(support.universe(), a.cols(), "support universe differs from column count");
    let m = a.rows();
    let k = support.len();
    if m == 0 {
        return Some(vec![T::zero(); a.cols()]);
    }

    // Tableau: k structural columns, m artificial columns, rhs; b >= 0 after
    // row sign flips. Initial basis is the artificial identity.
    let total = k + m;
    let mut tab: Vec<Vec<T>> = Vec::with_capacity(m);
    for r in 0..m {
        let flip = v[r].is_negative();
        let mut row: Vec<T> = Vec::with_capacity(total + 1);
        for c in support.iter() {
            let x = a.get(r, c).clone();
            row.push(if flip { -x } else { x });
        }
        for j in 0..m {
            row.push(if j == r { T::one() } else { T::zero() });
        }
        row.push(if flip { -v[r].clone() } else { v[r].clone() });
        tab.push(row);
    }
    let mut basis: Vec<usize> = (k..total).collect();
    // Reduced costs for min sum(artificials): structural j gets -sum of its
    // column, artificials start basic at reduced cost zero.
    let mut obj: Vec<T> = vec![T::zero(); total];
    for (j, cost) in obj.iter_mut().enumerate().take(k) {
        let mut s = T::zero();
        for row in &tab {
            s = s + row[j].clone();
        }
        *cost = -s;
    }

    loop {
        let entering = match (0..total).find(|&j| obj[j].is_negative()) {
            Some(j) => j,
            None => break,
        };
        // Ratio test; ties broken by smallest basis variable (Bland).
        let mut leaving: Option<(usize, T)> = None;
        for (i, row) in tab.iter().enumerate() {
            if !row[entering].is_positive() {
                continue;
            }
            let ratio = row[total].clone() / row[entering].clone();
            let replace = match &leaving {
                None => true,
                Some((li, best)) => {
                    ratio < *best || (ratio == *best && basis[i] < basis[*li])
                }
            };
            if replace {
                leaving = Some((i, ratio));
            }
        }
        let (pivot_row, _) = leaving.expect("phase-1 objective is bounded below");
        let pivot = tab[pivot_row][entering].clone();
        for j in 0..=total {
            tab[pivot_row][j] = tab[pivot_row][j].clone() / pivot.clone();
        }
        for i in 0..m {
            if i != pivot_row && !tab[i][entering].is_zero() {
                let factor = tab[i][entering].clone();
                for j in 0..=total {
                    tab[i][j] = tab[i][j].clone() - factor.clone() * tab[pivot_row][j].clone();
                }
            }
        }
        let factor = obj[entering].clone();
        if !factor.is_zero() {
            for j in 0..total {
                obj[j] = obj[j].clone() - factor.clone() * tab[pivot_row][j].clone();
            }
        }
        basis[pivot_row] = entering;
    }

    // Feasible iff no artificial remains basic at a positive level.
    for (i, &b) in basis.iter().enumerate() {
        if b >= k && tab[i][total].is_positive() {
            return None;
        }
    }
    let mut x = vec![T::zero(); a.cols()];
    for (i, &b) in basis.iter().enumerate() {
        if b < k {
            x[support.nth(b)] = tab[i][total].clone();
        }
    }
    debug_assert_eq!(a.mul_vec(&x), v.to_vec());
    debug_assert!(x.iter().all(|e| !e.is_negative()));
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, rint, Qs3};
    use proptest::prelude::*;

    type RatMatrix = Matrix<Rat>;

    #[test]
    fn rank_examples() {
        let id: RatMatrix = Matrix::identity(3);
        assert_eq!(rank_and_basis(&id, Axis::Rows), (3, IndexSet::full(3)));

        let ones: RatMatrix = Matrix::from_int_rows(&[&[1, 1, 1], &[1, 1, 1], &[1, 1, 1]]);
        assert_eq!(rank_and_basis(&ones, Axis::Rows), (1, IndexSet::new([0], 3).unwrap()));

        let wide: RatMatrix = Matrix::from_int_rows(&[&[1, 0, 1], &[0, 1, 1]]);
        assert_eq!(rank_and_basis(&wide, Axis::Cols), (2, IndexSet::new([0, 1], 3).unwrap()));
    }

    #[test]
    fn rank_of_empty_and_zero() {
        let empty: RatMatrix = Matrix::zeros(0, 0);
        assert_eq!(rank(&empty), 0);
        let z: RatMatrix = Matrix::zeros(2, 3);
        assert_eq!(rank_and_basis(&z, Axis::Cols), (0, IndexSet::empty(3)));
    }

    #[test]
    fn det_adjugate_examples() {
        let id: RatMatrix = Matrix::identity(2);
        let (d, adj) = det_adjugate(&id);
        assert_eq!(d, rint(1));
        assert_eq!(adj, Matrix::identity(2));

        let upper: RatMatrix = Matrix::from_int_rows(&[&[1, 1], &[0, 1]]);
        let (d, adj) = det_adjugate(&upper);
        assert_eq!(d, rint(1));
        assert_eq!(adj, Matrix::from_int_rows(&[&[1, -1], &[0, 1]]));

        let diag: RatMatrix = Matrix::from_int_rows(&[&[2, 0], &[0, 3]]);
        let (d, adj) = det_adjugate(&diag);
        assert_eq!(d, rint(6));
        assert_eq!(adj, Matrix::from_int_rows(&[&[3, 0], &[0, 2]]));
    }

    #[test]
    fn det_over_quadratic_field() {
        // Rotation by 2pi/3 has determinant 1.
        let half = Qs3::from_rat(rat(1, 2));
        let s_half = Qs3::new(rat(0, 1), rat(1, 2));
        let rot = Matrix::from_rows(vec![
            vec![-half.clone(), -s_half.clone()],
            vec![s_half.clone(), -half.clone()],
        ]);
        assert_eq!(det(&rot), Qs3::one());
    }

    #[test]
    fn zero_dimensional_det() {
        let m: RatMatrix = Matrix::zeros(0, 0);
        let (d, adj) = det_adjugate(&m);
        assert_eq!(d, rint(1));
        assert_eq!(adj.rows(), 0);
    }

    #[test]
    fn solve_examples() {
        let a: RatMatrix = Matrix::from_int_rows(&[&[1, 0, 1], &[0, 1, 1]]);
        let x = solve(&a, &[rint(1), rint(1)]).unwrap();
        assert_eq!(a.mul_vec(&x), vec![rint(1), rint(1)]);
        let inconsistent: RatMatrix = Matrix::from_int_rows(&[&[1, 0], &[1, 0]]);
        assert!(solve(&inconsistent, &[rint(1), rint(2)]).is_none());
    }

    #[test]
    fn nonneg_solve_examples() {
        let id: RatMatrix = Matrix::identity(2);
        let full = IndexSet::full(2);
        assert_eq!(nonneg_solve(&id, &full, &[rint(1), rint(1)]), Some(vec![rint(1), rint(1)]));

        let only0 = IndexSet::new([0], 2).unwrap();
        assert_eq!(nonneg_solve(&id, &only0, &[rint(1), rint(1)]), None);

        let row: RatMatrix = Matrix::from_int_rows(&[&[1, 2]]);
        let x = nonneg_solve(&row, &IndexSet::full(2), &[rint(3)]).unwrap();
        assert_eq!(row.mul_vec(&x), vec![rint(3)]);
        assert!(x.iter().all(|e| !e.is_negative()));
    }

    #[test]
    fn nonneg_solve_negative_rhs_needs_sign_flip() {
        let a: RatMatrix = Matrix::from_int_rows(&[&[-1]]);
        let x = nonneg_solve(&a, &IndexSet::full(1), &[rint(-2)]).unwrap();
        assert_eq!(x, vec![rint(2)]);
    }

    #[test]
    fn nonneg_solve_empty_support() {
        let a: RatMatrix = Matrix::identity(2);
        let empty = IndexSet::empty(2);
        assert_eq!(nonneg_solve(&a, &empty, &[rint(0), rint(0)]), Some(vec![rint(0), rint(0)]));
        assert_eq!(nonneg_solve(&a, &empty, &[rint(1), rint(0)]), None);
    }

    /// Independent oracle: enumerate basic solutions over independent column
    /// subsets (Caratheodory for cones).
    fn feasible_by_enumeration(a: &RatMatrix, support: &IndexSet, v: &[Rat]) -> bool {
        let n = support.len();
        for size in 0..=n.min(a.rows()) {
            'subset: for combo in IndexSet::subsets_of_size_lex(n, size) {
                let cols =
                    IndexSet::new(combo.iter().map(|i| support.nth(i)), a.cols()).unwrap();
                let sub = a.select_cols(&cols);
                if rank(&sub) < cols.len() {
                    continue;
                }
                match solve(&sub, v) {
                    Some(x) => {
                        if x.iter().any(|e| e.is_negative()) {
                            continue 'subset;
                        }
                        if sub.mul_vec(&x) == v.to_vec() {
                            return true;
                        }
                    }
                    None => continue 'subset,
                }
            }
        }
        false
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn adjugate_inverts(n in 1usize..5, seed in 0u64..500) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let m: RatMatrix = Matrix::from_fn(n, n, |_, _| rat(rng.gen_range(-4i64..5), rng.gen_range(1i64..4)));
            let (d, adj) = det_adjugate(&m);
            let prod = adj.mul(&m);
            let expected = Matrix::from_fn(n, n, |r, c| if r == c { d.clone() } else { Rat::zero() });
            prop_assert_eq!(prod, expected);
        }

        #[test]
        fn simplex_matches_enumeration(rows in 1usize..4, cols in 1usize..5, seed in 0u64..500) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ 0xfeed);
            let a: RatMatrix = Matrix::from_fn(rows, cols, |_, _| rint(rng.gen_range(-2i64..3)));
            let v: Vec<Rat> = (0..rows).map(|_| rint(rng.gen_range(-2i64..3))).collect();
            let support = IndexSet::full(cols);
            let witness = nonneg_solve(&a, &support, &v);
            let oracle = feasible_by_enumeration(&a, &support, &v);
            prop_assert_eq!(witness.is_some(), oracle);
            if let Some(x) = witness {
                prop_assert_eq!(a.mul_vec(&x), v);
                prop_assert!(x.iter().all(|e| !e.is_negative()));
            }
        }

        #[test]
        fn rank_matches_transpose(rows in 0usize..5, cols in 0usize..5, seed in 0u64..200) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ 0xabcd);
            let m: RatMatrix = Matrix::from_fn(rows, cols, |_, _| rint(rng.gen_range(-2i64..3)));
            prop_assert_eq!(rank_and_basis(&m, Axis::Cols).0, rank_and_basis(&m.transpose(), Axis::Rows).0);
        }

        #[test]
        fn bareiss_matches_gauss(n in 1usize..5, seed in 0u64..300) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
            let m: RatMatrix = Matrix::from_fn(n, n, |_, _| rat(rng.gen_range(-6i64..7), rng.gen_range(1i64..5)));
            prop_assert_eq!(det(&m), gauss_det(&m));
        }
    }
}
