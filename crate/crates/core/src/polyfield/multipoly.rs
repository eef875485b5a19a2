use std::collections::BTreeMap;
use std::fmt;

use super::field::Field;
use super::unipoly::UniPoly;

/// Exponent pair `(deg_x, deg_y)`.
pub type Exp = (u32, u32);

/// Sparse bivariate polynomial in `x, y`. Zero coefficients are never stored.
pub struct MultiPoly<F: Field> {
    field: F,
    terms: BTreeMap<Exp, F::Elem>,
}

impl<F: Field> Clone for MultiPoly<F> {
    fn clone(&self) -> Self {
        MultiPoly { field: self.field.clone(), terms: self.terms.clone() }
    }
}

impl<F: Field> PartialEq for MultiPoly<F> {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms
    }
}

impl<F: Field> fmt::Debug for MultiPoly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .rev()
            .map(|(&(i, j), c)| format!("{c:?}*x^{i}*y^{j}"))
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

/// Graded lexicographic key with `x > y`.
#[inline]
fn grlex(e: Exp) -> (u32, u32) {
    (e.0 + e.1, e.0)
}

impl<F: Field> MultiPoly<F> {
    pub fn zero(field: F) -> Self {
        MultiPoly { field, terms: BTreeMap::new() }
    }

    pub fn one(field: F) -> Self {
        let one = field.one();
        Self::monomial(field, one, (0, 0))
    }

    pub fn constant(field: F, c: F::Elem) -> Self {
        Self::monomial(field, c, (0, 0))
    }

    pub fn monomial(field: F, c: F::Elem, e: Exp) -> Self {
        let mut terms = BTreeMap::new();
        if !field.is_zero(&c) {
            terms.insert(e, c);
        }
        MultiPoly { field, terms }
    }

    pub fn x(field: F) -> Self {
        let one = field.one();
        Self::monomial(field, one, (1, 0))
    }

    pub fn y(field: F) -> Self {
        let one = field.one();
        Self::monomial(field, one, (0, 1))
    }

    pub fn from_terms(field: F, terms: impl IntoIterator<Item = (Exp, F::Elem)>) -> Self {
        let mut p = Self::zero(field);
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn terms(&self) -> &BTreeMap<Exp, F::Elem> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|&e| e == (0, 0))
    }

    pub fn coeff(&self, e: Exp) -> F::Elem {
        self.terms.get(&e).cloned().unwrap_or_else(|| self.field.zero())
    }

    fn add_term(&mut self, e: Exp, c: F::Elem) {
        if self.field.is_zero(&c) {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(v) => {
                *v = self.field.add(v, &c);
                if self.field.is_zero(v) {
                    self.terms.remove(&e);
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    pub fn deg_x(&self) -> u32 {
        self.terms.keys().map(|e| e.0).max().unwrap_or(0)
    }

    pub fn deg_y(&self) -> u32 {
        self.terms.keys().map(|e| e.1).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.0 + e.1).max().unwrap_or(0)
    }

    /// Leading term under graded lexicographic order.
    pub fn leading_term(&self) -> Option<(Exp, &F::Elem)> {
        self.terms.iter().max_by_key(|(e, _)| grlex(**e)).map(|(e, c)| (*e, c))
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        let f = &self.field;
        MultiPoly {
            field: f.clone(),
            terms: self.terms.iter().map(|(e, c)| (*e, f.neg(c))).collect(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, self.field.neg(c));
        }
        out
    }

    pub fn scale(&self, c: &F::Elem) -> Self {
        let f = &self.field;
        if f.is_zero(c) {
            return Self::zero(f.clone());
        }
        MultiPoly {
            field: f.clone(),
            terms: self.terms.iter().map(|(e, a)| (*e, f.mul(a, c))).collect(),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let f = &self.field;
        if self.is_zero() || rhs.is_zero() {
            return Self::zero(f.clone());
        }
        if rhs.len() == 1 {
            let (&(a, b), c) = rhs.terms.iter().next().unwrap();
            return MultiPoly {
                field: f.clone(),
                terms: self.terms.iter().map(|(&(i, j), v)| ((i + a, j + b), f.mul(v, c))).collect(),
            };
        }
        // Dense accumulation buffer; bivariate products here are mostly dense.
        let wy = (self.deg_y() + rhs.deg_y() + 1) as usize;
        let wx = (self.deg_x() + rhs.deg_x() + 1) as usize;
        let mut buf: Vec<Option<F::Elem>> = vec![None; wx * wy];
        for (&(i1, j1), c1) in &self.terms {
            for (&(i2, j2), c2) in &rhs.terms {
                let idx = (i1 + i2) as usize * wy + (j1 + j2) as usize;
                let prod = f.mul(c1, c2);
                buf[idx] = Some(match buf[idx].take() {
                    Some(acc) => f.add(&acc, &prod),
                    None => prod,
                });
            }
        }
        let terms = buf
            .into_iter()
            .enumerate()
            .filter_map(|(idx, c)| {
                let c = c?;
                (!f.is_zero(&c)).then(|| (((idx / wy) as u32, (idx % wy) as u32), c))
            })
            .collect();
        MultiPoly { field: f.clone(), terms }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.field.clone());
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn eval(&self, x: &F::Elem, y: &F::Elem) -> F::Elem {
        let f = &self.field;
        // Horner in x over the y-coefficient polynomials.
        let rows = self.to_x_major();
        rows.iter().rev().fold(f.zero(), |acc, row| f.add(&f.mul(&acc, x), &row.eval(y)))
    }

    /// Coefficients in `K[y]` of successive powers of `x`.
    pub fn to_x_major(&self) -> Vec<UniPoly<F>> {
        let f = &self.field;
        if self.is_zero() {
            return Vec::new();
        }
        let dx = self.deg_x() as usize;
        let mut rows: Vec<Vec<F::Elem>> = vec![Vec::new(); dx + 1];
        for (&(i, j), c) in &self.terms {
            let row = &mut rows[i as usize];
            if row.len() <= j as usize {
                row.resize(j as usize + 1, f.zero());
            }
            row[j as usize] = c.clone();
        }
        rows.into_iter().map(|r| UniPoly::from_coeffs(f.clone(), r)).collect()
    }

    pub fn from_x_major(field: F, rows: &[UniPoly<F>]) -> Self {
        let mut terms = BTreeMap::new();
        for (i, row) in rows.iter().enumerate() {
            for (j, c) in row.coeffs().iter().enumerate() {
                if !field.is_zero(c) {
                    terms.insert((i as u32, j as u32), c.clone());
                }
            }
        }
        MultiPoly { field, terms }
    }

    /// Univariate polynomial in `y` embedded as a bivariate one.
    pub fn from_y_poly(p: &UniPoly<F>) -> Self {
        Self::from_x_major(p.field().clone(), std::slice::from_ref(p))
    }

    /// Exact quotient `self / rhs`, or `None` if `rhs` does not divide `self`.
    pub fn div_exact(&self, rhs: &Self) -> Option<Self> {
        assert!(!rhs.is_zero(), "division by zero polynomial");
        let f = &self.field;
        if self.is_zero() {
            return Some(Self::zero(f.clone()));
        }
        if rhs.is_constant() {
            let inv = f.inv(&rhs.coeff((0, 0)))?;
            return Some(self.scale(&inv));
        }
        let mut rem = self.to_x_major();
        let den = rhs.to_x_major();
        let dd = den.len() - 1;
        if rem.len() < den.len() {
            return None;
        }
        let mut quot = vec![UniPoly::zero(f.clone()); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            if rem[k + dd].is_zero() {
                continue;
            }
            let c = rem[k + dd].div_exact(&den[dd])?;
            for (j, b) in den.iter().enumerate() {
                rem[k + j] = rem[k + j].sub(&c.mul(b));
            }
            quot[k] = c;
        }
        if rem.iter().any(|r| !r.is_zero()) {
            return None;
        }
        Some(Self::from_x_major(f.clone(), &quot))
    }

    /// Coefficient-wise image in another field.
    pub fn map_coeffs<G: Field>(&self, target: G, mut g: impl FnMut(&F::Elem) -> G::Elem) -> MultiPoly<G> {
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            let v = g(c);
            if !target.is_zero(&v) {
                terms.insert(*e, v);
            }
        }
        MultiPoly { field: target, terms }
    }

    /// `x^i y^j` for each exponent, swapped to `y^i x^j`.
    pub fn swap_xy(&self) -> Self {
        MultiPoly {
            field: self.field.clone(),
            terms: self.terms.iter().map(|(&(i, j), c)| ((j, i), c.clone())).collect(),
        }
    }

    /// Coefficient of `x^i` as a polynomial in `y`.
    pub fn x_coefficient(&self, i: u32) -> UniPoly<F> {
        let f = &self.field;
        let mut row = Vec::new();
        for (&(a, j), c) in &self.terms {
            if a == i {
                if row.len() <= j as usize {
                    row.resize(j as usize + 1, f.zero());
                }
                row[j as usize] = c.clone();
            }
        }
        UniPoly::from_coeffs(f.clone(), row)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::Rational;
    use crate::polyfield::field::Q;

    fn q(n: i64) -> Rational {
        Rational::from(n)
    }

    fn p(terms: &[((u32, u32), i64)]) -> MultiPoly<Q> {
        MultiPoly::from_terms(Q, terms.iter().map(|&(e, c)| (e, q(c))))
    }

    #[test]
    fn difference_of_squares() {
        let x = MultiPoly::x(Q);
        let y = MultiPoly::y(Q);
        let prod = x.add(&y).mul(&x.sub(&y));
        assert_eq!(prod, p(&[((2, 0), 1), ((0, 2), -1)]));
    }

    #[test]
    fn additive_identity_and_cancellation() {
        let x = MultiPoly::x(Q);
        let one = MultiPoly::one(Q);
        let a = x.add(&one);
        assert_eq!(a.add(&MultiPoly::zero(Q)), a);
        let sq = a.pow(2);
        let rest = x.pow(2).add(&x.scale(&q(2)));
        assert_eq!(sq.sub(&rest), one);
    }

    #[test]
    fn exact_division() {
        let x = MultiPoly::x(Q);
        let y = MultiPoly::y(Q);
        let a = x.add(&y).pow(3).mul(&x.sub(&y.scale(&q(2))));
        let b = x.add(&y);
        let quot = a.div_exact(&b).unwrap();
        assert_eq!(quot.mul(&b), a);
        assert!(a.div_exact(&x.sub(&y)).is_none());
    }

    #[test]
    fn grlex_leading_term() {
        let poly = p(&[((0, 3), 5), ((2, 1), 7), ((1, 1), 1)]);
        assert_eq!(poly.leading_term().unwrap().0, (2, 1));
    }

    #[test]
    fn evaluation() {
        let poly = p(&[((2, 0), 1), ((1, 1), -3), ((0, 0), 4)]);
        assert_eq!(poly.eval(&q(2), &q(5)), q(4 - 30 + 4));
    }
}
