use std::fmt::Debug;
use std::hash::Hash;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::multipoly::MultiPoly;
use crate::exactnum::{FpElem, Prime, Rational};

/// A coefficient field. Field values are small handles (`Q` is a unit
/// struct, `Fp` carries its prime) so polynomials store them by value.
pub trait Field: Clone + Debug + PartialEq + Send + Sync {
    type Elem: Clone + Debug + PartialEq + Eq + Hash + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    fn from_i64(&self, n: i64) -> Self::Elem;

    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Option<Self::Elem> {
        self.inv(b).map(|bi| self.mul(a, &bi))
    }

    /// The unit by which a denominator with the given leading coefficient
    /// and coefficient list must be scaled to reach canonical form.
    fn normalizer<'a, I>(&self, leading: &Self::Elem, coeffs: I) -> Self::Elem
    where
        I: Iterator<Item = &'a Self::Elem>,
        Self::Elem: 'a;

    /// A field-specific gcd that beats the generic remainder sequence, if any.
    fn fast_gcd(_a: &MultiPoly<Self>, _b: &MultiPoly<Self>) -> Option<MultiPoly<Self>>
    where
        Self: Sized,
    {
        None
    }
}

/// The rationals.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Q;

impl Field for Q {
    type Elem = Rational;

    fn zero(&self) -> Rational {
        Rational::zero()
    }
    fn one(&self) -> Rational {
        Rational::one()
    }
    fn is_zero(&self, a: &Rational) -> bool {
        a.is_zero()
    }
    fn is_one(&self, a: &Rational) -> bool {
        a.is_one()
    }
    fn add(&self, a: &Rational, b: &Rational) -> Rational {
        a + b
    }
    fn sub(&self, a: &Rational, b: &Rational) -> Rational {
        a - b
    }
    fn mul(&self, a: &Rational, b: &Rational) -> Rational {
        a * b
    }
    fn neg(&self, a: &Rational) -> Rational {
        -a
    }
    fn inv(&self, a: &Rational) -> Option<Rational> {
        a.recip().ok()
    }
    fn from_i64(&self, n: i64) -> Rational {
        Rational::from(n)
    }

    /// Primitive integer coefficients with a positive leading coefficient.
    fn normalizer<'a, I>(&self, leading: &Rational, coeffs: I) -> Rational
    where
        I: Iterator<Item = &'a Rational>,
    {
        let mut lcm = BigInt::one();
        let mut nums = Vec::new();
        for c in coeffs {
            lcm = lcm.lcm(c.denom());
            nums.push(c);
        }
        let mut g = BigInt::zero();
        for c in nums {
            let scaled = c.numer() * (&lcm / c.denom());
            g = g.gcd(&scaled);
        }
        if g.is_zero() {
            return Rational::one();
        }
        let mut s = Rational::new(lcm, g).expect("gcd of nonzero coefficients");
        if leading.numer().is_negative() {
            s = -s;
        }
        s
    }

    fn fast_gcd(a: &MultiPoly<Q>, b: &MultiPoly<Q>) -> Option<MultiPoly<Q>> {
        super::gcd::modular_gcd_q(a, b)
    }
}

/// The prime field `F_p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Fp {
    pub prime: Prime,
}

impl Fp {
    pub fn new(prime: Prime) -> Self {
        Fp { prime }
    }

    pub fn elem(&self, n: i64) -> FpElem {
        FpElem::new(self.prime, n)
    }
}

impl Field for Fp {
    type Elem = FpElem;

    #[inline]
    fn zero(&self) -> FpElem {
        FpElem::zero(self.prime)
    }
    #[inline]
    fn one(&self) -> FpElem {
        FpElem::one(self.prime)
    }
    #[inline]
    fn is_zero(&self, a: &FpElem) -> bool {
        a.is_zero()
    }
    #[inline]
    fn add(&self, a: &FpElem, b: &FpElem) -> FpElem {
        a.add(*b)
    }
    #[inline]
    fn sub(&self, a: &FpElem, b: &FpElem) -> FpElem {
        a.sub(*b)
    }
    #[inline]
    fn mul(&self, a: &FpElem, b: &FpElem) -> FpElem {
        a.mul(*b)
    }
    #[inline]
    fn neg(&self, a: &FpElem) -> FpElem {
        a.neg()
    }
    fn inv(&self, a: &FpElem) -> Option<FpElem> {
        a.inv().ok()
    }
    fn from_i64(&self, n: i64) -> FpElem {
        FpElem::new(self.prime, n)
    }

    /// Monic.
    fn normalizer<'a, I>(&self, leading: &FpElem, _coeffs: I) -> FpElem
    where
        I: Iterator<Item = &'a FpElem>,
    {
        leading.inv().expect("leading coefficient is nonzero")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_normalizer_makes_primitive_positive() {
        let cs: Vec<Rational> = ["-1/2", "3/4", "-3"].iter().map(|s| s.parse().unwrap()).collect();
        let s = Q.normalizer(&cs[0], cs.iter());
        let scaled: Vec<String> = cs.iter().map(|c| (c * &s).to_string()).collect();
        assert_eq!(scaled, ["2", "-3", "12"]);
    }

    #[test]
    fn fp_normalizer_is_monic() {
        let f = Fp::new(Prime::new(7).unwrap());
        let lc = f.elem(3);
        assert!(f.is_one(&f.mul(&lc, &f.normalizer(&lc, std::iter::empty()))));
    }
}
