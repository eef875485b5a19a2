use std::fmt;

use super::field::Field;

/// Dense univariate polynomial, coefficients stored low degree first with
/// no trailing zeros.
pub struct UniPoly<F: Field> {
    field: F,
    coeffs: Vec<F::Elem>,
}

impl<F: Field> Clone for UniPoly<F> {
    fn clone(&self) -> Self {
        UniPoly { field: self.field.clone(), coeffs: self.coeffs.clone() }
    }
}

impl<F: Field> PartialEq for UniPoly<F> {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs
    }
}

impl<F: Field> fmt::Debug for UniPoly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !self.field.is_zero(c))
            .map(|(i, c)| format!("{c:?}*t^{i}"))
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

impl<F: Field> UniPoly<F> {
    pub fn from_coeffs(field: F, mut coeffs: Vec<F::Elem>) -> Self {
        while coeffs.last().is_some_and(|c| field.is_zero(c)) {
            coeffs.pop();
        }
        UniPoly { field, coeffs }
    }

    pub fn zero(field: F) -> Self {
        UniPoly { field, coeffs: Vec::new() }
    }

    pub fn one(field: F) -> Self {
        let one = field.one();
        UniPoly { field, coeffs: vec![one] }
    }

    pub fn constant(field: F, c: F::Elem) -> Self {
        Self::from_coeffs(field, vec![c])
    }

    /// `c0 + c1 t`.
    pub fn linear(field: F, c0: F::Elem, c1: F::Elem) -> Self {
        Self::from_coeffs(field, vec![c0, c1])
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn coeffs(&self) -> &[F::Elem] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lc(&self) -> Option<&F::Elem> {
        self.coeffs.last()
    }

    pub fn coeff(&self, i: usize) -> F::Elem {
        self.coeffs.get(i).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let f = &self.field;
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let c = (0..n)
            .map(|i| match (self.coeffs.get(i), rhs.coeffs.get(i)) {
                (Some(a), Some(b)) => f.add(a, b),
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            })
            .collect();
        Self::from_coeffs(f.clone(), c)
    }

    pub fn neg(&self) -> Self {
        let c = self.coeffs.iter().map(|a| self.field.neg(a)).collect();
        UniPoly { field: self.field.clone(), coeffs: c }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero(self.field.clone());
        }
        let f = &self.field;
        let mut out = vec![f.zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if f.is_zero(a) {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = f.add(&out[i + j], &f.mul(a, b));
            }
        }
        Self::from_coeffs(f.clone(), out)
    }

    pub fn scale(&self, c: &F::Elem) -> Self {
        let f = &self.field;
        Self::from_coeffs(f.clone(), self.coeffs.iter().map(|a| f.mul(a, c)).collect())
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

    pub fn eval(&self, t: &F::Elem) -> F::Elem {
        let f = &self.field;
        self.coeffs.iter().rev().fold(f.zero(), |acc, c| f.add(&f.mul(&acc, t), c))
    }

    /// Quotient and remainder; `rhs` must be nonzero.
    pub fn divrem(&self, rhs: &Self) -> (Self, Self) {
        let f = &self.field;
        let d = rhs.degree().expect("division by zero polynomial");
        let lc_inv = f.inv(rhs.lc().unwrap()).expect("nonzero leading coefficient");
        let mut rem = self.coeffs.clone();
        if rem.len() <= d {
            return (Self::zero(f.clone()), self.clone());
        }
        let mut quot = vec![f.zero(); rem.len() - d];
        for k in (0..quot.len()).rev() {
            let c = f.mul(&rem[k + d], &lc_inv);
            if f.is_zero(&c) {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                rem[k + j] = f.sub(&rem[k + j], &f.mul(&c, b));
            }
            quot[k] = c;
        }
        rem.truncate(d);
        (Self::from_coeffs(f.clone(), quot), Self::from_coeffs(f.clone(), rem))
    }

    /// Exact quotient, `None` if `rhs` does not divide `self`.
    pub fn div_exact(&self, rhs: &Self) -> Option<Self> {
        let (q, r) = self.divrem(rhs);
        r.is_zero().then_some(q)
    }

    pub fn monic(&self) -> Self {
        match self.lc() {
            None => self.clone(),
            Some(lc) => self.scale(&self.field.inv(lc).expect("nonzero")),
        }
    }

    /// Monic greatest common divisor (zero only when both inputs are zero).
    pub fn gcd(&self, rhs: &Self) -> Self {
        let mut a = self.clone();
        let mut b = rhs.clone();
        while !b.is_zero() {
            let (_, r) = a.divrem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Coefficient of the lowest-order nonzero term together with its degree.
    pub fn trailing(&self) -> Option<(usize, &F::Elem)> {
        self.coeffs.iter().enumerate().find(|(_, c)| !self.field.is_zero(c))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::Prime;
    use crate::polyfield::field::Fp;

    fn fp7() -> Fp {
        Fp::new(Prime::new(7).unwrap())
    }

    fn poly(f: Fp, c: &[i64]) -> UniPoly<Fp> {
        UniPoly::from_coeffs(f, c.iter().map(|&x| f.elem(x)).collect())
    }

    #[test]
    fn divrem_reconstructs() {
        let f = fp7();
        let a = poly(f, &[3, 1, 4, 1, 5]);
        let b = poly(f, &[2, 6, 1]);
        let (q, r) = a.divrem(&b);
        assert_eq!(q.mul(&b).add(&r), a);
        assert!(r.degree().unwrap_or(0) < 2);
    }

    #[test]
    fn gcd_of_products() {
        let f = fp7();
        let g = poly(f, &[1, 1]); // t + 1
        let a = g.mul(&poly(f, &[3, 0, 1]));
        let b = g.mul(&poly(f, &[5, 2]));
        assert_eq!(a.gcd(&b), g);
        assert_eq!(a.gcd(&UniPoly::zero(f)), a.monic());
    }

    #[test]
    fn pow_and_eval() {
        let f = fp7();
        let p = poly(f, &[1, 1]).pow(3);
        assert_eq!(p, poly(f, &[1, 3, 3, 1]));
        assert_eq!(p.eval(&f.elem(1)), f.elem(8));
    }
}
