//! Multivariate polynomials with exact coefficients, stored as canonical
//! sums of monomials. Just enough ring arithmetic for symbolic determinants
//! and adjugates of small matrices.

use crate::scalar::Scalar;

/// `coef * prod_i x_i^{exps[i]}` over a fixed variable count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Monomial<T> {
    pub coef: T,
    pub exps: Vec<u32>,
}

impl<T: Scalar> Monomial<T> {
    pub fn degree(&self) -> u32 {
        self.exps.iter().sum()
    }
}

/// Canonical form: terms sorted by descending exponent vector, like terms
/// merged, zero coefficients dropped. Equality is therefore structural.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly<T> {
    nvars: usize,
    terms: Vec<Monomial<T>>,
}

impl<T: Scalar> Poly<T> {
    pub fn zero(nvars: usize) -> Poly<T> {
        Poly { nvars, terms: Vec::new() }
    }

    pub fn constant(nvars: usize, c: T) -> Poly<T> {
        Poly::from_terms(nvars, vec![Monomial { coef: c, exps: vec![0; nvars] }])
    }

    pub fn var(nvars: usize, index: usize) -> Poly<T> {
        assert!(index < nvars);
        let mut exps = vec![0; nvars];
        exps[index] = 1;
        Poly::from_terms(nvars, vec![Monomial { coef: T::one(), exps }])
    }

    pub fn from_terms(nvars: usize, terms: Vec<Monomial<T>>) -> Poly<T> {
        let mut poly = Poly { nvars, terms };
        poly.normalize();
        poly
    }

    fn normalize(&mut self) {
        for t in &self.terms {
            assert_eq!(t.exps.len(), self.nvars, "monomial width differs from variable count");
        }
        self.terms.sort_by(|a, b| b.exps.cmp(&a.exps));
        let mut merged: Vec<Monomial<T>> = Vec::with_capacity(self.terms.len());
        for term in self.terms.drain(..) {
            match merged.last_mut() {
                Some(last) if last.exps == term.exps => {
                    last.coef = last.coef.clone() + term.coef;
                }
                _ => merged.push(term),
            }
        }
        merged.retain(|t| !t.coef.is_zero());
        self.terms = merged;
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &[Monomial<T>] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; zero for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms.iter().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn add(&self, rhs: &Poly<T>) -> Poly<T> {
        assert_eq!(self.nvars, rhs.nvars);
        let mut terms = self.terms.clone();
        terms.extend(rhs.terms.iter().cloned());
        Poly::from_terms(self.nvars, terms)
    }

    pub fn sub(&self, rhs: &Poly<T>) -> Poly<T> {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Poly<T> {
        Poly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|t| Monomial { coef: -t.coef.clone(), exps: t.exps.clone() })
                .collect(),
        }
    }

    pub fn mul(&self, rhs: &Poly<T>) -> Poly<T> {
        assert_eq!(self.nvars, rhs.nvars);
        let mut terms = Vec::with_capacity(self.terms.len() * rhs.terms.len());
        for a in &self.terms {
            for b in &rhs.terms {
                let exps = a.exps.iter().zip(&b.exps).map(|(x, y)| x + y).collect();
                terms.push(Monomial { coef: a.coef.clone() * b.coef.clone(), exps });
            }
        }
        Poly::from_terms(self.nvars, terms)
    }

    pub fn scale(&self, c: &T) -> Poly<T> {
        Poly::from_terms(
            self.nvars,
            self.terms
                .iter()
                .map(|t| Monomial { coef: t.coef.clone() * c.clone(), exps: t.exps.clone() })
                .collect(),
        )
    }

    pub fn eval(&self, point: &[T]) -> T {
        assert_eq!(point.len(), self.nvars, "point length differs from variable count");
        let mut acc = T::zero();
        for term in &self.terms {
            let mut value = term.coef.clone();
            for (x, &e) in point.iter().zip(&term.exps) {
                for _ in 0..e {
                    value = value * x.clone();
                }
            }
            acc = acc + value;
        }
        acc
    }
}

/// Determinant of a square matrix of polynomials by cofactor expansion.
pub fn poly_det<T: Scalar>(m: &[Vec<Poly<T>>], nvars: usize) -> Poly<T> {
    let n = m.len();
    if n == 0 {
        return Poly::constant(nvars, T::one());
    }
    if n == 1 {
        return m[0][0].clone();
    }
    let mut acc = Poly::zero(nvars);
    for j in 0..n {
        if m[0][j].is_zero() {
            continue;
        }
        let minor: Vec<Vec<Poly<T>>> = (1..n)
            .map(|r| (0..n).filter(|&c| c != j).map(|c| m[r][c].clone()).collect())
            .collect();
        let term = m[0][j].mul(&poly_det(&minor, nvars));
        acc = if j % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
    }
    acc
}

/// Adjugate of a square matrix of polynomials: `adj[i][j]` is the `(j, i)`
/// cofactor, so `adj * M = det(M) * I` as polynomial identities.
pub fn poly_adjugate<T: Scalar>(m: &[Vec<Poly<T>>], nvars: usize) -> Vec<Vec<Poly<T>>> {
    let n = m.len();
    if n == 0 {
        return Vec::new();
    }
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let minor: Vec<Vec<Poly<T>>> = (0..n)
                        .filter(|&r| r != j)
                        .map(|r| {
                            (0..n).filter(|&c| c != i).map(|c| m[r][c].clone()).collect()
                        })
                        .collect();
                    let cof = poly_det(&minor, nvars);
                    if (i + j) % 2 == 0 {
                        cof
                    } else {
                        cof.neg()
                    }
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rint, Rat};

    fn x(i: usize) -> Poly<Rat> {
        Poly::var(4, i)
    }

    #[test]
    fn arithmetic_and_canonical_form() {
        let p = x(0).mul(&x(1)).add(&Poly::constant(4, rint(2)));
        let q = x(1).mul(&x(0));
        let diff = p.sub(&q);
        assert_eq!(diff, Poly::constant(4, rint(2)));
        assert!(p.sub(&p).is_zero());
        assert_eq!(p.degree(), 2);
    }

    #[test]
    fn evaluation() {
        // x0^2 + 3 x2 - 1/1 at (2, 0, 5, 0) = 4 + 15 - 1 = 18
        let p = x(0)
            .mul(&x(0))
            .add(&x(2).scale(&rint(3)))
            .sub(&Poly::constant(4, rint(1)));
        let point = vec![rint(2), rint(0), rint(5), rint(0)];
        assert_eq!(p.eval(&point), rint(18));
    }

    #[test]
    fn symbolic_det_of_two_by_two() {
        // det [[x0, x1], [x2, x3]] = x0 x3 - x1 x2
        let m = vec![vec![x(0), x(1)], vec![x(2), x(3)]];
        let d = poly_det(&m, 4);
        let expected = x(0).mul(&x(3)).sub(&x(1).mul(&x(2)));
        assert_eq!(d, expected);
        // At the identity point the determinant is 1.
        assert_eq!(d.eval(&[rint(1), rint(0), rint(0), rint(1)]), rint(1));
    }

    #[test]
    fn adjugate_identity() {
        let m = vec![vec![x(0), x(1)], vec![x(2), x(3)]];
        let adj = poly_adjugate(&m, 4);
        let d = poly_det(&m, 4);
        // adj * m = det * I as polynomials.
        for i in 0..2 {
            for j in 0..2 {
                let mut acc = Poly::zero(4);
                for k in 0..2 {
                    acc = acc.add(&adj[i][k].mul(&m[k][j]));
                }
                let expected = if i == j { d.clone() } else { Poly::zero(4) };
                assert_eq!(acc, expected);
            }
        }
    }

    #[test]
    fn empty_det_is_one() {
        let m: Vec<Vec<Poly<Rat>>> = Vec::new();
        assert_eq!(poly_det(&m, 0), Poly::constant(0, rint(1)));
    }
}
