//! Fixed relative precision p-adic numbers with precision tracking.
//!
//! Long exact orbits of non-integrable maps grow in height exponentially;
//! their reductions only need a few p-adic digits. Every value carries the
//! number of digits known, so a reduction is either exact or refused.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::{valuation, FpElem, PFp, Prime, Rational};

/// Precision ran out before a result could be determined.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrecisionLost;

#[derive(Clone, Debug, PartialEq, Eq)]
enum Repr {
    /// `p^v * u` with `u` a unit known modulo `p^k`.
    Unit { v: i64, u: BigUint, k: u32 },
    /// Zero modulo `p^abs`.
    Zero { abs: i64 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Padic {
    p: Prime,
    repr: Repr,
}

const EXACT_ZERO: i64 = i64::MAX / 4;

fn pk(p: Prime, k: u32) -> BigUint {
    num_traits::pow(BigUint::from(p.get()), k as usize)
}

fn split_p(n: &BigUint, p: u64) -> (i64, BigUint) {
    let pb = BigUint::from(p);
    let mut v = 0;
    let mut m = n.clone();
    loop {
        let (q, r) = m.div_rem(&pb);
        if !r.is_zero() {
            return (v, m);
        }
        v += 1;
        m = q;
    }
}

impl Padic {
    pub fn from_rational(x: &Rational, p: Prime, k: u32) -> Padic {
        if x.is_zero() {
            return Padic { p, repr: Repr::Zero { abs: EXACT_ZERO } };
        }
        let v = valuation(x, p).finite().expect("nonzero");
        let (_, num) = split_p(x.numer().magnitude(), p.get());
        let (_, den) = split_p(x.denom().magnitude(), p.get());
        let m = pk(p, k);
        let inv = (&den % &m).modinv(&m).expect("unit denominator");
        let mut u = (&num % &m) * inv % &m;
        if x.signum() < 0 {
            u = (&m - u) % &m;
        }
        Padic { p, repr: Repr::Unit { v, u, k } }
    }

    fn abs_prec(&self) -> i64 {
        match &self.repr {
            Repr::Unit { v, k, .. } => v + i64::from(*k),
            Repr::Zero { abs } => *abs,
        }
    }

    pub fn add(&self, rhs: &Padic) -> Padic {
        let p = self.p;
        let abs = self.abs_prec().min(rhs.abs_prec());
        let lo = match (&self.repr, &rhs.repr) {
            (Repr::Unit { v: a, .. }, Repr::Unit { v: b, .. }) => (*a).min(*b),
            (Repr::Unit { v, .. }, _) | (_, Repr::Unit { v, .. }) => *v,
            _ => return Padic { p, repr: Repr::Zero { abs } },
        };
        if lo >= abs {
            return Padic { p, repr: Repr::Zero { abs } };
        }
        let width = u32::try_from(abs - lo).expect("precision width fits");
        let m = pk(p, width);
        let shifted = |x: &Padic| -> BigUint {
            match &x.repr {
                Repr::Unit { v, u, .. } if *v - lo < i64::from(width) => {
                    u * pk(p, (*v - lo) as u32) % &m
                }
                _ => BigUint::zero(),
            }
        };
        let s = (shifted(self) + shifted(rhs)) % &m;
        if s.is_zero() {
            return Padic { p, repr: Repr::Zero { abs } };
        }
        let (w, u) = split_p(&s, p.get());
        let v = lo + w;
        Padic { p, repr: Repr::Unit { v, u, k: (abs - v) as u32 } }
    }

    pub fn neg(&self) -> Padic {
        match &self.repr {
            Repr::Unit { v, u, k } => {
                let m = pk(self.p, *k);
                Padic { p: self.p, repr: Repr::Unit { v: *v, u: (&m - u) % &m, k: *k } }
            }
            Repr::Zero { .. } => self.clone(),
        }
    }

    pub fn sub(&self, rhs: &Padic) -> Padic {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &Padic) -> Padic {
        let p = self.p;
        match (&self.repr, &rhs.repr) {
            (Repr::Unit { v: va, u: ua, k: ka }, Repr::Unit { v: vb, u: ub, k: kb }) => {
                let k = (*ka).min(*kb);
                Padic { p, repr: Repr::Unit { v: va + vb, u: ua * ub % pk(p, k), k } }
            }
            (Repr::Unit { v, .. }, Repr::Zero { abs }) | (Repr::Zero { abs }, Repr::Unit { v, .. }) => {
                Padic { p, repr: Repr::Zero { abs: abs.saturating_add(*v).min(EXACT_ZERO) } }
            }
            (Repr::Zero { abs: a }, Repr::Zero { abs: b }) => {
                Padic { p, repr: Repr::Zero { abs: a.saturating_add(*b).min(EXACT_ZERO) } }
            }
        }
    }

    pub fn inv(&self) -> Result<Padic, PrecisionLost> {
        match &self.repr {
            Repr::Unit { v, u, k } => {
                let m = pk(self.p, *k);
                let inv = u.modinv(&m).expect("unit");
                Ok(Padic { p: self.p, repr: Repr::Unit { v: -v, u: inv, k: *k } })
            }
            Repr::Zero { .. } => Err(PrecisionLost),
        }
    }

    pub fn one(p: Prime, k: u32) -> Padic {
        Padic { p, repr: Repr::Unit { v: 0, u: BigUint::one(), k } }
    }

    pub fn pow(&self, e: u32) -> Padic {
        if e == 0 {
            let k = self.precision().clamp(1, 1 << 16) as u32;
            return Padic::one(self.p, k);
        }
        let mut acc = self.clone();
        for _ in 1..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// `Some(true)` if known to be zero, `Some(false)` if known nonzero.
    pub fn is_zero(&self) -> Option<bool> {
        match &self.repr {
            Repr::Unit { .. } => Some(false),
            Repr::Zero { abs } if *abs >= EXACT_ZERO => Some(true),
            Repr::Zero { .. } => None,
        }
    }

    /// Reduction to the projective line, if the known digits determine it.
    pub fn reduce(&self) -> Option<PFp> {
        match &self.repr {
            Repr::Unit { v, u, .. } => Some(match v.cmp(&0) {
                std::cmp::Ordering::Greater => PFp::Finite(FpElem::zero(self.p)),
                std::cmp::Ordering::Less => PFp::Infinity,
                std::cmp::Ordering::Equal => {
                    let r = u % BigUint::from(self.p.get());
                    PFp::Finite(FpElem::from_residue(self.p, r.try_into().expect("residue fits")).expect("reduced"))
                }
            }),
            Repr::Zero { abs } if *abs >= 1 => Some(PFp::Finite(FpElem::zero(self.p))),
            Repr::Zero { .. } => None,
        }
    }

    /// Relative precision in digits (absolute for a zero).
    pub fn precision(&self) -> i64 {
        match &self.repr {
            Repr::Unit { k, .. } => i64::from(*k),
            Repr::Zero { abs } => *abs,
        }
    }
}
