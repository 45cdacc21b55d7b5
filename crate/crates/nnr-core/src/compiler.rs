//! Compilation of the factorization decision problem into systems of
//! polynomial sign constraints, and exact evaluation of such systems at a
//! point.
//!
//! Two variable spaces are supported. The first uses every entry of the
//! candidate transforms `B_1..B_p`, `C_1..C_q` as a variable, giving degree
//! at most two but `rsp + rtq` variables. The second uses only the `rs + rt`
//! entries of the anchored factor blocks `A^U` and `W_V`: all transforms are
//! ratios of their minors, so clearing denominators by the subset
//! determinants turns every constraint into a polynomial in the shared
//! variables. Which subsets are invertible is decided at evaluation time by
//! the sign of the subset determinant.

use std::fmt;

use thiserror::Error;

use crate::ensemble::{first_candidate, CellFailure, FailReason, PredicateVerdict};
use crate::factor::Factorization;
use crate::matrix::{IndexSet, Matrix};
use crate::poly::{poly_adjugate, poly_det, Poly};
use crate::scalar::{Scalar, Sign};

/// Guard against accidentally compiling systems far past desk scale.
pub const MAX_PRODUCT_POLYS: usize = 1 << 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CompileError {
    #[error("anchor mismatch: {0}")]
    AnchorMismatch(String),
    #[error("transform count {given} exceeds the {bound} independent subsets available")]
    CapExceeded { given: usize, bound: usize },
    #[error("system would emit more than {MAX_PRODUCT_POLYS} product polynomials")]
    TooLarge,
    #[error("point has {got} coordinates but the system has {expected} variables")]
    PointLength { expected: usize, got: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Take {
    Take1,
    Take2,
}

impl fmt::Display for Take {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Take::Take1 => write!(f, "take1"),
            Take::Take2 => write!(f, "take2"),
        }
    }
}

/// What a variable of the system stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarRole {
    /// Entry of the anchored block `A^U` (row within `U`, column in `[r]`).
    AU { row: usize, col: usize },
    /// Entry of the anchored block `W_V` (row in `[r]`, column within `V`).
    WV { row: usize, col: usize },
    /// Entry of transform `B_k` (`r x s`).
    B { k: usize, row: usize, col: usize },
    /// Entry of transform `C_l` (`t x r`).
    C { l: usize, row: usize, col: usize },
}

impl fmt::Display for VarRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VarRole::AU { row, col } => write!(f, "A_U[{row},{col}]"),
            VarRole::WV { row, col } => write!(f, "W_V[{row},{col}]"),
            VarRole::B { k, row, col } => write!(f, "B[{k},{row},{col}]"),
            VarRole::C { l, row, col } => write!(f, "C[{l},{row},{col}]"),
        }
    }
}

/// Identifies one polynomial within its family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyRef {
    DetA(usize),
    DetW(usize),
    /// (column i, subset k, position)
    NumA(usize, usize, usize),
    /// (row j, subset l, position)
    NumW(usize, usize, usize),
    /// (column i, row j, subset k, subset l)
    Prod(usize, usize, usize, usize),
}

impl fmt::Display for FamilyRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilyRef::DetA(k) => write!(f, "detA[{k}]"),
            FamilyRef::DetW(l) => write!(f, "detW[{l}]"),
            FamilyRef::NumA(i, k, p) => write!(f, "numA[{i},{k},{p}]"),
            FamilyRef::NumW(j, l, p) => write!(f, "numW[{j},{l},{p}]"),
            FamilyRef::Prod(i, j, k, l) => write!(f, "prod[{i},{j},{k},{l}]"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystemMeta {
    pub m: usize,
    pub n: usize,
    pub r: usize,
    pub s: usize,
    pub t: usize,
    pub u: IndexSet,
    pub v: IndexSet,
    pub p: usize,
    pub q: usize,
}

/// A compiled system: variables with roles, and the polynomial families
/// `detA[k]`, `detW[l]`, `numA[i,k,.]`, `numW[j,l,.]`, `prod[i,j,k,l]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolySystem<T> {
    pub mode: Take,
    pub meta: SystemMeta,
    pub vars: Vec<VarRole>,
    pub det_a: Vec<Poly<T>>,
    pub det_w: Vec<Poly<T>>,
    /// `[column i][subset k][position]`; positions run over `[r]` for the
    /// transform-variable mode and over the subset for the anchored mode.
    pub num_a: Vec<Vec<Vec<Poly<T>>>>,
    /// `[row j][subset l][position]`.
    pub num_w: Vec<Vec<Vec<Poly<T>>>>,
    /// `[column i][row j][subset k][subset l]`.
    pub prod: Vec<Vec<Vec<Vec<Poly<T>>>>>,
    /// Size-`s` subsets of `[r]`, lex order (anchored mode only).
    pub subsets_a: Vec<IndexSet>,
    /// Size-`t` subsets of `[r]`, lex order (anchored mode only).
    pub subsets_w: Vec<IndexSet>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FamilyCounts {
    pub det_a: usize,
    pub det_w: usize,
    pub num_a: usize,
    pub num_w: usize,
    pub prod: usize,
}

impl FamilyCounts {
    pub fn total(&self) -> usize {
        self.det_a + self.det_w + self.num_a + self.num_w + self.prod
    }
}

impl<T: Scalar> PolySystem<T> {
    pub fn var_count(&self) -> usize {
        self.vars.len()
    }

    pub fn family_counts(&self) -> FamilyCounts {
        FamilyCounts {
            det_a: self.det_a.len(),
            det_w: self.det_w.len(),
            num_a: self.num_a.iter().flatten().map(Vec::len).sum(),
            num_w: self.num_w.iter().flatten().map(Vec::len).sum(),
            prod: self.prod.iter().flatten().flatten().map(Vec::len).sum(),
        }
    }

    /// The headline polynomial tally `r(p + q) + mnpq` quoted for the
    /// transform-variable formulation; reported as metadata alongside the
    /// exact per-family counts.
    pub fn nominal_take1_count(&self) -> usize {
        let SystemMeta { m, n, r, p, q, .. } = self.meta;
        r * (p + q) + m * n * p * q
    }

    pub fn max_degree(&self) -> u32 {
        self.polys().map(|(_, p)| p.degree()).max().unwrap_or(0)
    }

    /// Every polynomial in canonical emission order; also the order of the
    /// sign vector produced by [`evaluate_system_at`].
    pub fn polys(&self) -> impl Iterator<Item = (FamilyRef, &Poly<T>)> {
        let det_a = self.det_a.iter().enumerate().map(|(k, p)| (FamilyRef::DetA(k), p));
        let det_w = self.det_w.iter().enumerate().map(|(l, p)| (FamilyRef::DetW(l), p));
        let num_a = self.num_a.iter().enumerate().flat_map(|(i, per_subset)| {
            per_subset.iter().enumerate().flat_map(move |(k, entries)| {
                entries.iter().enumerate().map(move |(pos, p)| (FamilyRef::NumA(i, k, pos), p))
            })
        });
        let num_w = self.num_w.iter().enumerate().flat_map(|(j, per_subset)| {
            per_subset.iter().enumerate().flat_map(move |(l, entries)| {
                entries.iter().enumerate().map(move |(pos, p)| (FamilyRef::NumW(j, l, pos), p))
            })
        });
        let prod = self.prod.iter().enumerate().flat_map(|(i, per_row)| {
            per_row.iter().enumerate().flat_map(move |(j, per_k)| {
                per_k.iter().enumerate().flat_map(move |(k, per_l)| {
                    per_l
                        .iter()
                        .enumerate()
                        .map(move |(l, p)| (FamilyRef::Prod(i, j, k, l), p))
                })
            })
        });
        det_a.chain(det_w).chain(num_a).chain(num_w).chain(prod)
    }

    pub fn poly_count(&self) -> usize {
        self.family_counts().total()
    }
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k.min(n - k)).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

fn check_anchors<T: Scalar>(
    m: &Matrix<T>,
    s: usize,
    t: usize,
    u: &IndexSet,
    v: &IndexSet,
) -> Result<(), CompileError> {
    if u.len() != s || u.universe() != m.rows() {
        return Err(CompileError::AnchorMismatch(format!(
            "U has {} of {} rows, expected {} of {}",
            u.len(),
            u.universe(),
            s,
            m.rows()
        )));
    }
    if v.len() != t || v.universe() != m.cols() {
        return Err(CompileError::AnchorMismatch(format!(
            "V has {} of {} columns, expected {} of {}",
            v.len(),
            v.universe(),
            t,
            m.cols()
        )));
    }
    Ok(())
}

/// Compiles the transform-variable system: variables are all entries of
/// `B_1..B_p` and `C_1..C_q`; the families are the candidate entries (degree
/// one) and the product constraints (degree two).
pub fn compile_take1<T: Scalar>(
    m: &Matrix<T>,
    r: usize,
    s: usize,
    t: usize,
    u: &IndexSet,
    v: &IndexSet,
    p: usize,
    q: usize,
) -> Result<PolySystem<T>, CompileError> {
    check_anchors(m, s, t, u, v)?;
    if p == 0 || p > binomial(r, s) {
        return Err(CompileError::CapExceeded { given: p, bound: binomial(r, s) });
    }
    if q == 0 || q > binomial(r, t) {
        return Err(CompileError::CapExceeded { given: q, bound: binomial(r, t) });
    }
    let (rows, cols) = (m.rows(), m.cols());
    if rows * cols * p * q > MAX_PRODUCT_POLYS {
        return Err(CompileError::TooLarge);
    }

    let nv = r * s * p + t * r * q;
    let mut vars = Vec::with_capacity(nv);
    for k in 0..p {
        for row in 0..r {
            for col in 0..s {
                vars.push(VarRole::B { k, row, col });
            }
        }
    }
    let c_base = r * s * p;
    for l in 0..q {
        for row in 0..t {
            for col in 0..r {
                vars.push(VarRole::C { l, row, col });
            }
        }
    }
    let b_var = |k: usize, row: usize, col: usize| k * r * s + row * s + col;
    let c_var = |l: usize, row: usize, col: usize| c_base + l * t * r + row * r + col;

    // Candidate entries (B_k M_i^U)_pos: linear in the B variables.
    let num_a: Vec<Vec<Vec<Poly<T>>>> = (0..cols)
        .map(|i| {
            (0..p)
                .map(|k| {
                    (0..r)
                        .map(|pos| {
                            let mut acc = Poly::zero(nv);
                            for (c, urow) in u.iter().enumerate() {
                                let coef = m.get(urow, i).clone();
                                acc = acc
                                    .add(&Poly::var(nv, b_var(k, pos, c)).scale(&coef));
                            }
                            acc
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    // Candidate entries (M^j_V C_l)_pos.
    let num_w: Vec<Vec<Vec<Poly<T>>>> = (0..rows)
        .map(|j| {
            (0..q)
                .map(|l| {
                    (0..r)
                        .map(|pos| {
                            let mut acc = Poly::zero(nv);
                            for (b, vcol) in v.iter().enumerate() {
                                let coef = m.get(j, vcol).clone();
                                acc = acc
                                    .add(&Poly::var(nv, c_var(l, b, pos)).scale(&coef));
                            }
                            acc
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    // Product constraints M^j_V C_l B_k M_i^U - M_i^j: degree two.
    let prod: Vec<Vec<Vec<Vec<Poly<T>>>>> = (0..cols)
        .map(|i| {
            (0..rows)
                .map(|j| {
                    (0..p)
                        .map(|k| {
                            (0..q)
                                .map(|l| {
                                    let mut acc = Poly::zero(nv);
                                    for pos in 0..r {
                                        acc = acc
                                            .add(&num_w[j][l][pos].mul(&num_a[i][k][pos]));
                                    }
                                    acc.sub(&Poly::constant(nv, m.get(j, i).clone()))
                                })
                                .collect()
                        })
                        .collect()
                })
                .collect()
        })
        .collect();

    let sys = PolySystem {
        mode: Take::Take1,
        meta: SystemMeta { m: rows, n: cols, r, s, t, u: u.clone(), v: v.clone(), p, q },
        vars,
        det_a: Vec::new(),
        det_w: Vec::new(),
        num_a,
        num_w,
        prod,
        subsets_a: Vec::new(),
        subsets_w: Vec::new(),
    };
    debug_assert!(sys.max_degree() <= 2);
    Ok(sys)
}

/// Compiles the anchored system with `rs + rt` variables: the entries of
/// `A^U` and `W_V`. Every size-`s` column subset contributes its determinant
/// and adjugate-numerator polynomials; invertibility is decided at
/// evaluation time by `detA[k] != 0`.
pub fn compile_take2<T: Scalar>(
    m: &Matrix<T>,
    r: usize,
    s: usize,
    t: usize,
    u: &IndexSet,
    v: &IndexSet,
) -> Result<PolySystem<T>, CompileError> {
    check_anchors(m, s, t, u, v)?;
    let (rows, cols) = (m.rows(), m.cols());
    let p = binomial(r, s);
    let q = binomial(r, t);
    if rows * cols * p * q > MAX_PRODUCT_POLYS {
        return Err(CompileError::TooLarge);
    }

    let nv = r * s + r * t;
    assert!(nv <= 2 * r * r, "variable count law rs + rt <= 2r^2");
    let mut vars = Vec::with_capacity(nv);
    for row in 0..s {
        for col in 0..r {
            vars.push(VarRole::AU { row, col });
        }
    }
    for row in 0..r {
        for col in 0..t {
            vars.push(VarRole::WV { row, col });
        }
    }
    let au_var = |row: usize, col: usize| row * r + col;
    let wv_var = |row: usize, col: usize| r * s + row * t + col;

    let subsets_a: Vec<IndexSet> = IndexSet::subsets_of_size_lex(r, s).collect();
    let subsets_w: Vec<IndexSet> = IndexSet::subsets_of_size_lex(r, t).collect();

    // Symbolic determinant and adjugate per column subset of A^U.
    let mut det_a = Vec::with_capacity(p);
    let mut adj_a = Vec::with_capacity(p);
    for subset in &subsets_a {
        let square: Vec<Vec<Poly<T>>> = (0..s)
            .map(|row| subset.iter().map(|col| Poly::var(nv, au_var(row, col))).collect())
            .collect();
        det_a.push(poly_det(&square, nv));
        adj_a.push(poly_adjugate(&square, nv));
    }
    // And per row subset of W_V.
    let mut det_w = Vec::with_capacity(q);
    let mut adj_w = Vec::with_capacity(q);
    for subset in &subsets_w {
        let square: Vec<Vec<Poly<T>>> = subset
            .iter()
            .map(|row| (0..t).map(|col| Poly::var(nv, wv_var(row, col))).collect())
            .collect();
        det_w.push(poly_det(&square, nv));
        adj_w.push(poly_adjugate(&square, nv));
    }

    // numA[i][k][pos] = (adj(A^U_{S_k}) M_i^U)_pos: degree s - 1.
    let num_a: Vec<Vec<Vec<Poly<T>>>> = (0..cols)
        .map(|i| {
            (0..p)
                .map(|k| {
                    (0..s)
                        .map(|pos| {
                            let mut acc = Poly::zero(nv);
                            for (c, urow) in u.iter().enumerate() {
                                acc = acc.add(&adj_a[k][pos][c].scale(m.get(urow, i)));
                            }
                            acc
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    // numW[j][l][pos] = (M^j_V adj(W_V^{T_l}))_pos: degree t - 1.
    let num_w: Vec<Vec<Vec<Poly<T>>>> = (0..rows)
        .map(|j| {
            (0..q)
                .map(|l| {
                    (0..t)
                        .map(|pos| {
                            let mut acc = Poly::zero(nv);
                            for (b, vcol) in v.iter().enumerate() {
                                acc = acc.add(&adj_w[l][b][pos].scale(m.get(j, vcol)));
                            }
                            acc
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    // Denominator-cleared product constraint, degree at most s + t.
    let prod: Vec<Vec<Vec<Vec<Poly<T>>>>> = (0..cols)
        .map(|i| {
            (0..rows)
                .map(|j| {
                    (0..p)
                        .map(|k| {
                            (0..q)
                                .map(|l| {
                                    let mut acc = Poly::zero(nv);
                                    for x in subsets_a[k].intersection(&subsets_w[l]).iter() {
                                        let pa = subsets_a[k].position_of(x).unwrap();
                                        let pw = subsets_w[l].position_of(x).unwrap();
                                        acc =
                                            acc.add(&num_w[j][l][pw].mul(&num_a[i][k][pa]));
                                    }
                                    let cleared =
                                        det_a[k].mul(&det_w[l]).scale(m.get(j, i));
                                    acc.sub(&cleared)
                                })
                                .collect()
                        })
                        .collect()
                })
                .collect()
        })
        .collect();

    let sys = PolySystem {
        mode: Take::Take2,
        meta: SystemMeta { m: rows, n: cols, r, s, t, u: u.clone(), v: v.clone(), p, q },
        vars,
        det_a,
        det_w,
        num_a,
        num_w,
        prod,
        subsets_a,
        subsets_w,
    };
    assert!(
        sys.max_degree() as usize <= 2 * r.max(1) * r.max(1),
        "degree bound 2r^2 violated"
    );
    Ok(sys)
}

/// The point of the anchored variable space carried by a factorization:
/// entries of `A^U` row-major, then entries of `W_V` row-major.
pub fn take2_point<T: Scalar>(f: &Factorization<T>, u: &IndexSet, v: &IndexSet) -> Vec<T> {
    let r = f.inner_dim();
    let mut point = Vec::with_capacity(u.len() * r + r * v.len());
    for urow in u.iter() {
        for c in 0..r {
            point.push(f.a().get(urow, c).clone());
        }
    }
    for row in 0..r {
        for vcol in v.iter() {
            point.push(f.w().get(row, vcol).clone());
        }
    }
    point
}

/// Result of evaluating a system at a point: exact signs of every polynomial
/// (in emission order), the selection verdict, and on PASS the assembled
/// factorization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystemEvaluation<T> {
    pub signs: Vec<Sign>,
    pub verdict: PredicateVerdict,
    pub failures: Vec<CellFailure>,
    pub factors: Option<Factorization<T>>,
}

impl<T: Scalar> SystemEvaluation<T> {
    pub fn passed(&self) -> bool {
        self.verdict == PredicateVerdict::Pass
    }
}

/// Evaluates every polynomial exactly, then applies the selection logic to
/// the resulting signs and values: candidates are ranked by support as in
/// the ensemble predicate (for the anchored mode, a candidate entry is
/// `numA/detA`, so its sign is the sign product of the two polynomials and
/// only subsets with nonzero determinant participate), the product
/// constraint of the selected pair must vanish, and on PASS the candidate
/// vectors assemble into a factorization.
pub fn evaluate_system_at<T: Scalar>(
    sys: &PolySystem<T>,
    point: &[T],
) -> Result<SystemEvaluation<T>, CompileError> {
    if point.len() != sys.var_count() {
        return Err(CompileError::PointLength { expected: sys.var_count(), got: point.len() });
    }
    let meta = &sys.meta;
    let det_a_vals: Vec<T> = sys.det_a.iter().map(|p| p.eval(point)).collect();
    let det_w_vals: Vec<T> = sys.det_w.iter().map(|p| p.eval(point)).collect();
    let num_a_vals: Vec<Vec<Vec<T>>> = sys
        .num_a
        .iter()
        .map(|per| per.iter().map(|entries| entries.iter().map(|p| p.eval(point)).collect()).collect())
        .collect();
    let num_w_vals: Vec<Vec<Vec<T>>> = sys
        .num_w
        .iter()
        .map(|per| per.iter().map(|entries| entries.iter().map(|p| p.eval(point)).collect()).collect())
        .collect();
    let prod_vals: Vec<Vec<Vec<Vec<T>>>> = sys
        .prod
        .iter()
        .map(|per_j| {
            per_j
                .iter()
                .map(|per_k| {
                    per_k
                        .iter()
                        .map(|per_l| per_l.iter().map(|p| p.eval(point)).collect())
                        .collect()
                })
                .collect()
        })
        .collect();

    let signs: Vec<Sign> = det_a_vals
        .iter()
        .chain(det_w_vals.iter())
        .chain(num_a_vals.iter().flatten().flatten())
        .chain(num_w_vals.iter().flatten().flatten())
        .chain(prod_vals.iter().flatten().flatten().flatten())
        .map(Scalar::sign)
        .collect();

    // Candidate vectors per column, tagged with the subset index they came
    // from.
    let candidates_for = |vals: &Vec<Vec<T>>, dets: &[T], subsets: &[IndexSet]| -> (Vec<usize>, Vec<Vec<T>>) {
        match sys.mode {
            Take::Take1 => ((0..vals.len()).collect(), vals.clone()),
            Take::Take2 => {
                let mut keys = Vec::new();
                let mut vecs = Vec::new();
                for (k, entries) in vals.iter().enumerate() {
                    if dets[k].is_zero() {
                        continue;
                    }
                    let mut full = vec![T::zero(); meta.r];
                    for (pos, x) in subsets[k].iter().enumerate() {
                        full[x] = entries[pos].clone() / dets[k].clone();
                    }
                    keys.push(k);
                    vecs.push(full);
                }
                (keys, vecs)
            }
        }
    };

    let mut col_choice: Vec<Result<(usize, Vec<T>), FailReason>> = Vec::with_capacity(meta.n);
    for i in 0..meta.n {
        let (keys, vecs) = candidates_for(&num_a_vals[i], &det_a_vals, &sys.subsets_a);
        col_choice.push(first_candidate(&vecs).map(|(idx, v)| (keys[idx], v)));
    }
    let mut row_choice: Vec<Result<(usize, Vec<T>), FailReason>> = Vec::with_capacity(meta.m);
    for j in 0..meta.m {
        let (keys, vecs) = candidates_for(&num_w_vals[j], &det_w_vals, &sys.subsets_w);
        row_choice.push(first_candidate(&vecs).map(|(idx, v)| (keys[idx], v)));
    }

    let mut failures = Vec::new();
    for i in 0..meta.n {
        for j in 0..meta.m {
            let reason = match (&col_choice[i], &row_choice[j]) {
                (Err(r), _) => Some(*r),
                (_, Err(r)) => Some(*r),
                (Ok((k, _)), Ok((l, _))) => {
                    if prod_vals[i][j][*k][*l].is_zero() {
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
    let factors = if verdict == PredicateVerdict::Pass {
        let mut w = Matrix::zeros(meta.r, meta.n);
        for (i, choice) in col_choice.iter().enumerate() {
            let (_, vec) = choice.as_ref().expect("all columns selected on PASS");
            w.set_col(i, vec);
        }
        let mut a = Matrix::zeros(meta.m, meta.r);
        for (j, choice) in row_choice.iter().enumerate() {
            let (_, vec) = choice.as_ref().expect("all rows selected on PASS");
            a.set_row(j, vec);
        }
        Some(Factorization::new(a, w).expect("selected candidates are nonnegative"))
    } else {
        None
    };

    Ok(SystemEvaluation { signs, verdict, failures, factors })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::{evaluate_predicate, Ensemble};
    use crate::factor::is_stable;
    use crate::linalg::{det_adjugate, inverse};
    use crate::scalar::{rat, rint, Rat};
    use crate::stabilize::stabilize;

    fn full_sets(m: usize, s: usize) -> IndexSet {
        IndexSet::from_sorted((0..s).collect(), m)
    }

    #[test]
    fn take1_counts_small_grid() {
        // r=2, s=t=2, p=q=1, m=n=2: 8 variables, four product polynomials.
        let m: Matrix<Rat> = Matrix::identity(2);
        let u = IndexSet::full(2);
        let v = IndexSet::full(2);
        let sys = compile_take1(&m, 2, 2, 2, &u, &v, 1, 1).unwrap();
        assert_eq!(sys.var_count(), 8);
        let counts = sys.family_counts();
        assert_eq!(counts.prod, 4);
        assert_eq!(sys.nominal_take1_count(), 2 * (1 + 1) + 2 * 2 * 1 * 1);
        assert!(sys.max_degree() <= 2);
    }

    #[test]
    fn take1_smallest_instance() {
        let m: Matrix<Rat> = Matrix::from_int_rows(&[&[1]]);
        let u = IndexSet::full(1);
        let v = IndexSet::full(1);
        let sys = compile_take1(&m, 1, 1, 1, &u, &v, 1, 1).unwrap();
        assert_eq!(sys.var_count(), 2);
        assert_eq!(sys.family_counts().prod, 1);
        assert_eq!(sys.prod[0][0][0][0].degree(), 2);
    }

    #[test]
    fn take1_cap_violation() {
        let m: Matrix<Rat> = Matrix::identity(2);
        let u = IndexSet::full(2);
        let v = IndexSet::full(2);
        // C(2,2) = 1, so p = 2 is out of range.
        assert!(matches!(
            compile_take1(&m, 2, 2, 2, &u, &v, 2, 1),
            Err(CompileError::CapExceeded { .. })
        ));
    }

    #[test]
    fn take2_variable_counts() {
        // r=3, s=t=2 gives 6 + 6 = 12 variables, within 2 r^2 = 18.
        let m: Matrix<Rat> = Matrix::from_fn(3, 3, |r, c| rint((r * 3 + c + 1) as i64));
        let u = full_sets(3, 2);
        let v = full_sets(3, 2);
        let sys = compile_take2(&m, 3, 2, 2, &u, &v).unwrap();
        assert_eq!(sys.var_count(), 12);
        assert!(sys.var_count() <= 2 * 9);
        assert_eq!(sys.meta.p, 3);
        assert_eq!(sys.subsets_a.len(), 3);
    }

    #[test]
    fn take2_smallest_instance() {
        let m: Matrix<Rat> = Matrix::from_int_rows(&[&[5]]);
        let u = IndexSet::full(1);
        let v = IndexSet::full(1);
        let sys = compile_take2(&m, 1, 1, 1, &u, &v).unwrap();
        assert_eq!(sys.var_count(), 2);
        // detA = x0, numA[0] = 5 (constant), prod = 5 - 5 x0 x1... degrees <= 2.
        assert_eq!(sys.det_a[0], Poly::var(2, 0));
        assert_eq!(sys.num_a[0][0][0], Poly::constant(2, rint(5)));
        assert!(sys.max_degree() <= 2);
    }

    #[test]
    fn take2_identity_point_passes() {
        let m: Matrix<Rat> = Matrix::identity(2);
        let u = IndexSet::full(2);
        let v = IndexSet::full(2);
        let sys = compile_take2(&m, 2, 2, 2, &u, &v).unwrap();
        let f = Factorization::new(Matrix::identity(2), Matrix::identity(2)).unwrap();
        let point = take2_point(&f, &u, &v);
        let eval = evaluate_system_at(&sys, &point).unwrap();
        assert!(eval.passed());
        assert_eq!(eval.factors.unwrap(), f);
    }

    #[test]
    fn take2_all_singular_point_fails() {
        let m: Matrix<Rat> = Matrix::identity(2);
        let u = IndexSet::full(2);
        let v = IndexSet::full(2);
        let sys = compile_take2(&m, 2, 2, 2, &u, &v).unwrap();
        let point = vec![rint(0); 8];
        let eval = evaluate_system_at(&sys, &point).unwrap();
        assert!(!eval.passed());
        assert!(eval.failures.iter().all(|f| f.reason == FailReason::NoCandidate));
    }

    #[test]
    fn take2_stable_example_point_passes() {
        // Stable factorization of [[1,1],[0,1]] with r = 3.
        let m: Matrix<Rat> = Matrix::from_int_rows(&[&[1, 1], &[0, 1]]);
        let a = Matrix::from_int_rows(&[&[1, 0, 1], &[0, 0, 1]]);
        let w = Matrix::from_int_rows(&[&[1, 0], &[0, 0], &[0, 1]]);
        let f = Factorization::new(a, w).unwrap();
        assert!(is_stable(&m, &f).unwrap());
        let ea = Ensemble::for_left_factor(f.a()).unwrap();
        let ew = Ensemble::for_right_factor(f.w()).unwrap();
        let (s, t) = (ea.anchor_rank(), ew.anchor_rank());
        let sys = compile_take2(&m, 3, s, t, ea.anchor(), ew.anchor()).unwrap();
        let point = take2_point(&f, ea.anchor(), ew.anchor());
        let eval = evaluate_system_at(&sys, &point).unwrap();
        assert!(eval.passed());
        let got = eval.factors.unwrap();
        assert_eq!(got.w(), f.w());
        assert_eq!(got.a(), f.a());
    }

    #[test]
    fn point_length_is_checked() {
        let m: Matrix<Rat> = Matrix::identity(2);
        let u = IndexSet::full(2);
        let sys = compile_take2(&m, 2, 2, 2, &u, &u.clone()).unwrap();
        assert!(matches!(
            evaluate_system_at(&sys, &[rint(1)]),
            Err(CompileError::PointLength { expected: 8, got: 1 })
        ));
    }

    /// Denominator clearing: prod equals detA * detW * (direct product
    /// residual) at every point where both determinants are nonzero.
    #[test]
    fn denominator_clearing_identity_at_random_points() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        let m: Matrix<Rat> = Matrix::from_fn(3, 3, |r, c| rint(((r + 2 * c) % 4) as i64));
        let (r, s, t) = (3, 2, 2);
        let u = full_sets(3, s);
        let v = full_sets(3, t);
        let sys = compile_take2(&m, r, s, t, &u, &v).unwrap();
        for _ in 0..30 {
            let point: Vec<Rat> =
                (0..sys.var_count()).map(|_| rat(rng.gen_range(-4i64..5), rng.gen_range(1i64..4))).collect();
            // Reconstruct the anchored blocks from the point.
            let au = Matrix::from_fn(s, r, |row, col| point[row * r + col].clone());
            let wv = Matrix::from_fn(r, t, |row, col| point[r * s + row * t + col].clone());
            for (k, sk) in sys.subsets_a.iter().enumerate() {
                let da = sys.det_a[k].eval(&point);
                let square_a = au.select_cols(sk);
                assert_eq!(da, crate::linalg::det(&square_a));
                if da.is_zero() {
                    continue;
                }
                for (l, tl) in sys.subsets_w.iter().enumerate() {
                    let dw = sys.det_w[l].eval(&point);
                    let square_w = wv.select_rows(tl);
                    assert_eq!(dw, crate::linalg::det(&square_w));
                    if dw.is_zero() {
                        continue;
                    }
                    let inv_a = inverse(&square_a).unwrap();
                    let inv_w = inverse(&square_w).unwrap();
                    for i in 0..3 {
                        for j in 0..3 {
                            // Direct residual via exact inverses.
                            let miu: Vec<Rat> =
                                u.iter().map(|urow| m.get(urow, i).clone()).collect();
                            let w_cand = inv_a.mul_vec(&miu);
                            let mjv: Vec<Rat> =
                                v.iter().map(|vcol| m.get(j, vcol).clone()).collect();
                            let a_cand = inv_w.transpose().mul_vec(&mjv);
                            let mut dot = Rat::zero();
                            for x in sk.intersection(tl).iter() {
                                let pa = sk.position_of(x).unwrap();
                                let pw = tl.position_of(x).unwrap();
                                dot = dot + a_cand[pw].clone() * w_cand[pa].clone();
                            }
                            let direct = dot - m.get(j, i).clone();
                            let cleared = sys.prod[i][j][k][l].eval(&point);
                            assert_eq!(cleared, da.clone() * dw.clone() * direct);
                        }
                    }
                }
            }
        }
    }

    /// The cofactor-based numerators match inverse computation through the
    /// sign product rule sign((A^U_S)^-1 M^U_i) = sign(numA) * sign(detA).
    #[test]
    fn numerator_signs_match_direct_inverse() {
        let a: Matrix<Rat> = Matrix::from_int_rows(&[&[1, 0, 1], &[0, 2, 1], &[1, 1, 1]]);
        let m = a.clone();
        let (r, s, t) = (3, 3, 3);
        let u = IndexSet::full(3);
        let v = IndexSet::full(3);
        let sys = compile_take2(&m, r, s, t, &u, &v).unwrap();
        let f = Factorization::new(a.clone(), Matrix::identity(3)).unwrap();
        let point = take2_point(&f, &u, &v);
        let (d, adj) = det_adjugate(&a);
        for i in 0..3 {
            for pos in 0..3 {
                let num = sys.num_a[i][0][pos].eval(&point);
                let direct = adj.mul_vec(&m.col(i))[pos].clone();
                assert_eq!(num, direct);
                let quotient = direct / d.clone();
                assert_eq!(quotient.sign(), num.sign().mul(d.sign()));
            }
        }
    }

    /// Bridge: for stable factorizations, the anchored-system verdict and
    /// reconstruction agree with the ensemble predicate.
    #[test]
    fn bridge_matches_predicate_on_stable_factorizations() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        for _ in 0..40 {
            let (mr, r, n) = (rng.gen_range(1..4), rng.gen_range(1..4), rng.gen_range(1..4));
            let a: Matrix<Rat> = Matrix::from_fn(mr, r, |_, _| rint(rng.gen_range(0i64..3)));
            let w: Matrix<Rat> = Matrix::from_fn(r, n, |_, _| rint(rng.gen_range(0i64..3)));
            let f = Factorization::new(a, w).unwrap();
            let m = f.product();
            let (stable, _) = stabilize(&m, f).unwrap();
            let ea = Ensemble::for_left_factor(stable.a()).unwrap();
            let ew = Ensemble::for_right_factor(stable.w()).unwrap();
            let report = evaluate_predicate(&m, &ea, &ew).unwrap();
            assert!(report.passed());

            let sys = compile_take2(
                &m,
                r,
                ea.anchor_rank(),
                ew.anchor_rank(),
                ea.anchor(),
                ew.anchor(),
            )
            .unwrap();
            let point = take2_point(&stable, ea.anchor(), ew.anchor());
            let eval = evaluate_system_at(&sys, &point).unwrap();
            assert!(eval.passed());
            assert_eq!(eval.factors.unwrap(), stable);
        }
    }
}
