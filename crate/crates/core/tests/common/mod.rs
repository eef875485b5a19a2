//! Independent oracles shared by the integration tests: plain modular
//! arithmetic, the recovery tables transcribed by hand, and the map
//! formulas over `BigRational`.
#![allow(dead_code)]

use agrlab::agr::WirePoint;
use agrlab::exactnum::{Coord, Rational};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Arithmetic in `F_p` on `i128` residues.
#[derive(Clone, Copy, Debug)]
pub struct Zp(pub i128);

impl Zp {
    pub fn r(self, x: i128) -> i128 {
        x.rem_euclid(self.0)
    }
    pub fn add(self, a: i128, b: i128) -> i128 {
        self.r(a + b)
    }
    pub fn sub(self, a: i128, b: i128) -> i128 {
        self.r(a - b)
    }
    pub fn mul(self, a: i128, b: i128) -> i128 {
        self.r(self.r(a) * self.r(b))
    }
    pub fn pow(self, a: i128, e: i64) -> i128 {
        if e < 0 {
            return self.pow(self.inv(a), -e);
        }
        let (mut base, mut e, mut acc) = (self.r(a), e as u64, 1i128);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }
    pub fn inv(self, a: i128) -> i128 {
        assert_ne!(self.r(a), 0, "inverse of zero");
        self.pow(a, (self.0 - 2) as i64)
    }
    pub fn div(self, a: i128, b: i128) -> i128 {
        self.mul(a, self.inv(b))
    }
}

pub fn fin(x: i128, y: i128) -> WirePoint {
    (Coord::Finite(x as u64), Coord::Finite(y as u64))
}

/// Expected `(m, value)` at a residue, or `None` for a good point (m = 1).
pub type Expectation = Option<(u32, WirePoint, &'static str)>;

/// qPIII recovery table, at step index `n` (parameters `c q^n`, `d q^n`).
pub fn qp3_expect(f: Zp, [a, b, c, d, q]: [i128; 5], n: i64, x: i128, y: i128) -> Expectation {
    let qn = f.pow(q, n);
    let (c, d) = (f.mul(c, qn), f.mul(d, qn));
    let k = f.mul(f.sub(a, b), f.sub(f.add(a, b), f.add(f.mul(c, q), f.mul(d, q))));
    let q2 = f.pow(q, 2);
    let q3 = f.pow(q, 3);
    let q4 = f.pow(q, 4);
    let tail = f.mul(f.sub(a, b), f.sub(f.add(a, b), f.add(f.mul(c, q3), f.mul(d, q3))));
    if x == a {
        let crit = f.mul(b, f.mul(f.sub(a, c), f.sub(a, d)));
        if f.mul(k, y) != crit {
            let num = f.mul(a, f.mul(f.mul(f.sub(b, f.mul(c, q2)), f.sub(b, f.mul(d, q2))), y));
            return Some((3, fin(f.div(num, f.sub(crit, f.mul(k, y))), b), "QP3_i"));
        }
        let num = f.mul(b, f.mul(f.sub(a, f.mul(c, q4)), f.sub(a, f.mul(d, q4))));
        return Some((5, fin(f.div(num, tail), a), "QP3_ii"));
    }
    if x == b {
        let crit = f.r(-f.mul(a, f.mul(f.sub(b, c), f.sub(b, d))));
        if f.mul(k, y) != crit {
            let num = f.mul(b, f.mul(f.mul(f.sub(a, f.mul(c, q2)), f.sub(a, f.mul(d, q2))), y));
            let den = f.add(f.mul(a, f.mul(f.sub(b, c), f.sub(b, d))), f.mul(k, y));
            return Some((3, fin(f.div(num, den), a), "QP3_iii"));
        }
        let num = f.r(-f.mul(a, f.mul(f.sub(b, f.mul(c, q4)), f.sub(b, f.mul(d, q4)))));
        return Some((5, fin(f.div(num, tail), b), "QP3_iv"));
    }
    if y == 0 {
        if x != 0 {
            return Some((3, fin(0, f.div(f.mul(a, b), x)), "QP3_v"));
        }
        return Some((4, fin(0, 0), "QP3_vi"));
    }
    None
}

/// qPIV recovery table, at step index `n` (`tau = q^n tau0`).
pub fn qp4_expect(f: Zp, [a, b, q, tau0]: [i128; 4], n: i64, x: i128, y: i128) -> Expectation {
    let t = f.mul(tau0, f.pow(q, n));
    let qp = |e: i64| f.pow(q, e);
    let t2 = f.mul(t, t);
    let t3 = f.mul(t2, t);
    if x == 0 {
        let inner = f.r(-1 + a * t - b * t2 % f.0 + q * t2 % f.0 + t * y - a * t2 % f.0 * y);
        let s = f.add(1, f.mul(qp(2), inner));
        if s != 0 {
            let tail = f.mul(qp(2), f.r(1 + b * t2 % f.0 - t * y + a * t2 % f.0 * y));
            let num = f.r(-1 - qp(3) * t2 - b * qp(4) % f.0 * t2 + a * qp(6) % f.0 * t3 + tail);
            let den = f.mul(f.mul(qp(2), t), s);
            return Some((3, fin(f.div(num, den), f.r(-qp(2) * t)), "QP4_i"));
        }
        let num = f.r(-1 + qp(2) + a * qp(4) % f.0 * t + qp(7) * t2 - b * qp(8) % f.0 * t2);
        let den = f.mul(f.mul(qp(4), t), f.r(-1 + a * qp(4) % f.0 * t));
        return Some((5, fin(f.div(num, den), 0), "QP4_ii"));
    }
    if x == f.r(-t) {
        if y != f.r(-f.inv(t)) {
            let ty = f.r(1 + t * y);
            let brace = f.r(1 + b * t2 % f.0 + t * y + a * t2 % f.0 * f.r(-t + y));
            let num = f.r(-1 - t * y + f.mul(f.mul(f.r(qp(3) - b * qp(4)), t2), ty) + f.mul(qp(2), brace));
            let den = f.mul(f.mul(f.mul(qp(2), t), f.r(-1 + a * qp(2) % f.0 * t)), ty);
            return Some((3, fin(f.div(num, den), 0), "QP4_iii"));
        }
        let k = f.mul(a, f.mul(qp(6), t2));
        return Some((5, fin(f.r(-f.inv(k)), f.r(-k)), "QP4_iv"));
    }
    if f.mul(x, y) == 1 {
        let k = f.mul(f.mul(a, qp(6)), f.mul(t3, y));
        return Some((5, fin(f.inv(k), k), "QP4_v"));
    }
    None
}

pub fn big(r: &Rational) -> BigRational {
    BigRational::new(r.numer().clone(), r.denom().clone())
}

pub fn br(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Reduction of a rational to `P^1(F_p)`, by direct modular arithmetic.
pub fn reduce_oracle(x: &BigRational, p: u64) -> Coord {
    let pb = BigInt::from(p);
    let mut num = x.numer().clone();
    let mut den = x.denom().clone();
    if num.is_zero() {
        return Coord::Finite(0);
    }
    while (&num % &pb).is_zero() {
        num /= &pb;
        if (&den % &pb).is_zero() {
            den /= &pb;
        } else {
            return Coord::Finite(0);
        }
    }
    if (&den % &pb).is_zero() {
        return Coord::Infinity;
    }
    let f = Zp(p as i128);
    let n = i128::try_from(num.abs() % &pb).unwrap() * if num.is_negative() { -1 } else { 1 };
    let d = i128::try_from(den.abs() % &pb).unwrap() * if den.is_negative() { -1 } else { 1 };
    Coord::Finite(f.div(n, d) as u64)
}

/// One step of each family written straight from the defining formulas.
#[derive(Clone, Debug)]
pub enum Formula {
    Qrt { a: BigRational, gamma: u32 },
    Qp3 { a: BigRational, b: BigRational, c: BigRational, d: BigRational, q: BigRational },
    Qp4 { a: BigRational, b: BigRational, q: BigRational, tau0: BigRational },
    Hv { a: BigRational },
}

fn qpow(q: &BigRational, n: i64) -> BigRational {
    let mut acc = BigRational::one();
    for _ in 0..n.unsigned_abs() {
        acc *= q;
    }
    if n < 0 {
        acc.recip()
    } else {
        acc
    }
}

impl Formula {
    pub fn step(&self, n: i64, x: &BigRational, y: &BigRational) -> Option<(BigRational, BigRational)> {
        let (num, den) = self.parts(n, x, y);
        if den.is_zero() {
            None
        } else {
            Some((num / den, x.clone()))
        }
    }

    /// Numerator and denominator of the new `x`, unreduced.
    pub fn parts(&self, n: i64, x: &BigRational, y: &BigRational) -> (BigRational, BigRational) {
        let one = BigRational::one();
        match self {
            Formula::Qrt { a, gamma } => {
                let mut xg = one.clone();
                for _ in 0..*gamma {
                    xg *= x;
                }
                (a * x + &one, xg * y)
            }
            Formula::Qp3 { a, b, c, d, q } => {
                let qn = qpow(q, n);
                (a * b * (x - c * &qn) * (x - d * &qn), y * (x - a) * (x - b))
            }
            Formula::Qp4 { a, b, q, tau0 } => {
                let t = qpow(q, n) * tau0;
                let xy1 = x * y - &one;
                (&t * &t * (a * x * x + b * x + a) + &xy1 * (x + &t), x * &xy1 * (x + &t))
            }
            Formula::Hv { a } => (x * x * x + a - x * x * y, x * x),
        }
    }

    pub fn params(&self) -> Vec<&BigRational> {
        match self {
            Formula::Qrt { a, .. } | Formula::Hv { a } => vec![a],
            Formula::Qp3 { a, b, c, d, q } => vec![a, b, c, d, q],
            Formula::Qp4 { a, b, q, tau0 } => vec![a, b, q, tau0],
        }
    }

    pub fn orbit(&self, n0: i64, start: (BigRational, BigRational), len: usize) -> Option<Vec<BigRational>> {
        let mut xs = vec![start.1.clone(), start.0.clone()];
        let (mut x, mut y) = start;
        for j in 0..len {
            let (nx, ny) = self.step(n0 + j as i64, &x, &y)?;
            xs.push(nx.clone());
            (x, y) = (nx, ny);
        }
        Some(xs)
    }
}
