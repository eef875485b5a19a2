use std::fmt;

use serde::{Deserialize, Serialize};

use super::field::{Field, Fp, Q};
use super::gcd::poly_gcd;
use super::multipoly::{Exp, MultiPoly};
use super::unipoly::UniPoly;
use crate::error::{Error, Result};
use crate::exactnum::{to_fp, valuation, FpElem, PFp, Prime, Rational, Valuation};

/// Polynomial rings that a bivariate polynomial can be substituted into.
pub trait PolyAlgebra<F: Field>: Clone {
    fn one_like(&self) -> Self;
    fn zero_like(&self) -> Self;
    fn add(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn scale(&self, c: &F::Elem) -> Self;
}

impl<F: Field> PolyAlgebra<F> for MultiPoly<F> {
    fn one_like(&self) -> Self {
        MultiPoly::one(self.field().clone())
    }
    fn zero_like(&self) -> Self {
        MultiPoly::zero(self.field().clone())
    }
    fn add(&self, rhs: &Self) -> Self {
        MultiPoly::add(self, rhs)
    }
    fn mul(&self, rhs: &Self) -> Self {
        MultiPoly::mul(self, rhs)
    }
    fn scale(&self, c: &F::Elem) -> Self {
        MultiPoly::scale(self, c)
    }
}

impl<F: Field> PolyAlgebra<F> for UniPoly<F> {
    fn one_like(&self) -> Self {
        UniPoly::one(self.field().clone())
    }
    fn zero_like(&self) -> Self {
        UniPoly::zero(self.field().clone())
    }
    fn add(&self, rhs: &Self) -> Self {
        UniPoly::add(self, rhs)
    }
    fn mul(&self, rhs: &Self) -> Self {
        UniPoly::mul(self, rhs)
    }
    fn scale(&self, c: &F::Elem) -> Self {
        UniPoly::scale(self, c)
    }
}

fn powers<F: Field, A: PolyAlgebra<F>>(base: &A, n: u32) -> Vec<A> {
    let mut out = Vec::with_capacity(n as usize + 1);
    out.push(base.one_like());
    for i in 0..n as usize {
        out.push(out[i].mul(base));
    }
    out
}

/// Substitutes `x = xn/xd`, `y = yn/yd` into a numerator/denominator pair
/// and clears the nested fractions with the same multiplier on both sides.
pub fn substitute_pair<F: Field, A: PolyAlgebra<F>>(
    num: &MultiPoly<F>,
    den: &MultiPoly<F>,
    xn: &A,
    xd: &A,
    yn: &A,
    yd: &A,
) -> (A, A) {
    let dx = num.deg_x().max(den.deg_x());
    let dy = num.deg_y().max(den.deg_y());
    let xnp = powers(xn, dx);
    let xdp = powers(xd, dx);
    let ynp = powers(yn, dy);
    let ydp = powers(yd, dy);
    let xt: Vec<A> = (0..=dx as usize).map(|i| xnp[i].mul(&xdp[dx as usize - i])).collect();
    let yt: Vec<A> = (0..=dy as usize).map(|j| ynp[j].mul(&ydp[dy as usize - j])).collect();
    let apply = |p: &MultiPoly<F>| -> A {
        let mut acc = xn.zero_like();
        let mut row_i = None;
        let mut row = xn.zero_like();
        for (&(i, j), c) in p.terms() {
            if row_i != Some(i) {
                if let Some(prev) = row_i {
                    acc = acc.add(&row.mul(&xt[prev as usize]));
                }
                row_i = Some(i);
                row = xn.zero_like();
            }
            row = row.add(&yt[j as usize].scale(c));
        }
        if let Some(prev) = row_i {
            acc = acc.add(&row.mul(&xt[prev as usize]));
        }
        acc
    };
    (apply(num), apply(den))
}

/// A bivariate rational function `num / den`.
///
/// Values built through [`RationalFunction::new`] are canonical: the
/// numerator and denominator are coprime and the denominator is normalized
/// (monic over `F_p`, primitive with positive leading coefficient over `Q`).
/// [`minimal_form`] deliberately produces a non-canonical scaling.
pub struct RationalFunction<F: Field> {
    num: MultiPoly<F>,
    den: MultiPoly<F>,
}

impl<F: Field> Clone for RationalFunction<F> {
    fn clone(&self) -> Self {
        RationalFunction { num: self.num.clone(), den: self.den.clone() }
    }
}

impl<F: Field> PartialEq for RationalFunction<F> {
    fn eq(&self, other: &Self) -> bool {
        self.num == other.num && self.den == other.den
    }
}

impl<F: Field> fmt::Debug for RationalFunction<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?}) / ({:?})", self.num, self.den)
    }
}

impl<F: Field> RationalFunction<F> {
    pub fn new(num: MultiPoly<F>, den: MultiPoly<F>) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DegenerateComposition);
        }
        let field = den.field().clone();
        if num.is_zero() {
            return Ok(RationalFunction { num, den: MultiPoly::one(field) });
        }
        let g = poly_gcd(&num, &den)?;
        let (mut num, mut den) = if g.is_constant() {
            (num, den)
        } else {
            (
                num.div_exact(&g).expect("gcd divides numerator"),
                den.div_exact(&g).expect("gcd divides denominator"),
            )
        };
        let (_, lc) = den.leading_term().expect("nonzero denominator");
        let s = field.normalizer(lc, den.terms().values());
        if !field.is_one(&s) {
            num = num.scale(&s);
            den = den.scale(&s);
        }
        Ok(RationalFunction { num, den })
    }

    /// Builds a quotient without cancellation or normalization.
    pub(crate) fn from_raw(num: MultiPoly<F>, den: MultiPoly<F>) -> Self {
        RationalFunction { num, den }
    }

    pub fn from_poly(p: MultiPoly<F>) -> Self {
        let one = MultiPoly::one(p.field().clone());
        RationalFunction { num: p, den: one }
    }

    pub fn x(field: F) -> Self {
        Self::from_poly(MultiPoly::x(field))
    }

    pub fn y(field: F) -> Self {
        Self::from_poly(MultiPoly::y(field))
    }

    pub fn constant(field: F, c: F::Elem) -> Self {
        Self::from_poly(MultiPoly::constant(field, c))
    }

    pub fn num(&self) -> &MultiPoly<F> {
        &self.num
    }

    pub fn den(&self) -> &MultiPoly<F> {
        &self.den
    }

    pub fn field(&self) -> &F {
        self.den.field()
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        let n = self.num.mul(&rhs.den).add(&rhs.num.mul(&self.den));
        Self::new(n, self.den.mul(&rhs.den))
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        let n = self.num.mul(&rhs.den).sub(&rhs.num.mul(&self.den));
        Self::new(n, self.den.mul(&rhs.den))
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        Self::new(self.num.mul(&rhs.num), self.den.mul(&rhs.den))
    }

    pub fn div(&self, rhs: &Self) -> Result<Self> {
        if rhs.num.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Self::new(self.num.mul(&rhs.den), self.den.mul(&rhs.num))
    }

    /// `self(x, y)` with `x, y` replaced by the given rational functions.
    pub fn substitute(&self, x: &Self, y: &Self) -> Result<Self> {
        let (n, d) = substitute_pair(&self.num, &self.den, &x.num, &x.den, &y.num, &y.den);
        Self::new(n, d)
    }

    /// Value at a point where the denominator does not vanish.
    pub fn eval(&self, x: &F::Elem, y: &F::Elem) -> Option<F::Elem> {
        let f = self.field();
        f.div(&self.num.eval(x, y), &self.den.eval(x, y))
    }
}

/// Composition of plane rational maps: `outer ∘ inner`.
pub fn rf_compose<F: Field>(
    outer: &(RationalFunction<F>, RationalFunction<F>),
    inner: &(RationalFunction<F>, RationalFunction<F>),
) -> Result<(RationalFunction<F>, RationalFunction<F>)> {
    Ok((
        outer.0.substitute(&inner.0, &inner.1)?,
        outer.1.substitute(&inner.0, &inner.1)?,
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Numerator,
    Denominator,
}

/// Record of the scaling performed by [`minimal_form`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinimalFormWitness {
    /// Both numerator and denominator were multiplied by `p^power_of_p`.
    pub power_of_p: i64,
    /// A coefficient of valuation exactly zero after scaling.
    pub unit_coefficient: (Side, Exp),
}

/// Scales numerator and denominator jointly by a power of `p` so that every
/// coefficient lies in `Z_(p)` and at least one is a p-adic unit.
pub fn minimal_form(
    f: &RationalFunction<Q>,
    p: Prime,
) -> (RationalFunction<Q>, MinimalFormWitness) {
    let mut best: Option<(i64, Side, Exp)> = None;
    let sides = [(Side::Numerator, &f.num), (Side::Denominator, &f.den)];
    for (side, poly) in sides {
        for (e, c) in poly.terms() {
            if let Valuation::Finite(v) = valuation(c, p) {
                if best.is_none_or(|(b, _, _)| v < b) {
                    best = Some((v, side, *e));
                }
            }
        }
    }
    let (vmin, side, exp) = best.expect("denominator is nonzero");
    let k = -vmin;
    let scale = Rational::from_integer(p.get()).pow(k).expect("p is nonzero");
    let out = if k == 0 {
        f.clone()
    } else {
        RationalFunction::from_raw(f.num.scale(&scale), f.den.scale(&scale))
    };
    (out, MinimalFormWitness { power_of_p: k, unit_coefficient: (side, exp) })
}

fn reduce_poly(p: &MultiPoly<Q>, prime: Prime) -> Result<MultiPoly<Fp>> {
    let field = Fp::new(prime);
    let mut bad = false;
    let out = p.map_coeffs(field, |c| match to_fp(c, prime) {
        Some(e) => e,
        None => {
            bad = true;
            FpElem::zero(prime)
        }
    });
    if bad {
        return Err(Error::InvalidParameter(
            "coefficient of negative valuation; take the minimal form first".into(),
        ));
    }
    Ok(out)
}

/// Reduces a minimal-form rational function modulo `p` and re-cancels over
/// `F_p`. `Ok(None)` means the reduced denominator vanishes identically.
pub fn reduce_rf(f: &RationalFunction<Q>, p: Prime) -> Result<Option<RationalFunction<Fp>>> {
    let num = reduce_poly(&f.num, p)?;
    let den = reduce_poly(&f.den, p)?;
    if den.is_zero() {
        return Ok(None);
    }
    RationalFunction::new(num, den).map(Some)
}

/// Minimal form followed by reduction.
pub fn reduce_map_component(f: &RationalFunction<Q>, p: Prime) -> Option<RationalFunction<Fp>> {
    let (m, _) = minimal_form(f, p);
    reduce_rf(&m, p).expect("minimal form has p-integral coefficients")
}

/// Outcome of evaluating a reduced rational function at a point of
/// `P^1(F_p) x P^1(F_p)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Evaluation {
    Value(PFp),
    IndeterminateAtPoint,
}

impl Evaluation {
    pub fn value(self) -> Option<PFp> {
        match self {
            Evaluation::Value(v) => Some(v),
            Evaluation::IndeterminateAtPoint => None,
        }
    }
}

/// Leading coefficients in `x` of a pair, after `x -> 1/u` and `u = 0`.
fn top_in_x<F: Field>(n: &MultiPoly<F>, d: &MultiPoly<F>) -> (MultiPoly<F>, MultiPoly<F>) {
    let dx = n.deg_x().max(d.deg_x());
    (
        MultiPoly::from_y_poly(&n.x_coefficient(dx)),
        MultiPoly::from_y_poly(&d.x_coefficient(dx)),
    )
}

fn top_in_y<F: Field>(n: &MultiPoly<F>, d: &MultiPoly<F>) -> (MultiPoly<F>, MultiPoly<F>) {
    let (a, b) = top_in_x(&n.swap_xy(), &d.swap_xy());
    (a.swap_xy(), b.swap_xy())
}

/// Evaluates a reduced rational function on `P^1(F_p)^2`.
pub fn evaluate_rf(f: &RationalFunction<Fp>, point: (PFp, PFp)) -> Evaluation {
    let field = *f.field();
    let mut n = f.num.clone();
    let mut d = f.den.clone();
    let x = match point.0 {
        PFp::Finite(e) => e,
        PFp::Infinity => {
            (n, d) = top_in_x(&n, &d);
            field.zero()
        }
    };
    let y = match point.1 {
        PFp::Finite(e) => e,
        PFp::Infinity => {
            (n, d) = top_in_y(&n, &d);
            field.zero()
        }
    };
    let nv = n.eval(&x, &y);
    let dv = d.eval(&x, &y);
    match (nv.is_zero(), dv.is_zero()) {
        (true, true) => Evaluation::IndeterminateAtPoint,
        (false, true) => Evaluation::Value(PFp::Infinity),
        (_, false) => Evaluation::Value(PFp::Finite(nv.mul(dv.inv().expect("nonzero")))),
    }
}

/// Evaluates both components of a reduced plane map; `None` if either is
/// indeterminate.
pub fn evaluate_pair(
    map: &(RationalFunction<Fp>, RationalFunction<Fp>),
    point: (PFp, PFp),
) -> Option<(PFp, PFp)> {
    Some((evaluate_rf(&map.0, point).value()?, evaluate_rf(&map.1, point).value()?))
}
