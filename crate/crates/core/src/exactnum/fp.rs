use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::prime::{mul_mod, pow_mod, Prime};
use crate::error::{Error, Result};

/// An element of the prime field `F_p`, residue kept in `[0, p)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FpElem {
    prime: Prime,
    residue: u64,
}

impl FpElem {
    /// Reduces an arbitrary signed integer into `F_p`.
    pub fn new(prime: Prime, value: i64) -> Self {
        let p = prime.get() as i128;
        let r = (value as i128).rem_euclid(p) as u64;
        FpElem { prime, residue: r }
    }

    pub fn from_residue(prime: Prime, residue: u64) -> Result<Self> {
        if residue >= prime.get() {
            return Err(Error::InvalidParameter(format!(
                "residue {residue} not below prime {prime}"
            )));
        }
        Ok(FpElem { prime, residue })
    }

    pub fn zero(prime: Prime) -> Self {
        FpElem { prime, residue: 0 }
    }

    pub fn one(prime: Prime) -> Self {
        FpElem { prime, residue: 1 }
    }

    #[inline]
    pub fn prime(self) -> Prime {
        self.prime
    }

    #[inline]
    pub fn residue(self) -> u64 {
        self.residue
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.residue == 0
    }

    fn check(self, other: FpElem) -> Result<()> {
        if self.prime != other.prime {
            return Err(Error::PrimeMismatch(self.prime.get(), other.prime.get()));
        }
        Ok(())
    }

    pub fn try_add(self, rhs: FpElem) -> Result<FpElem> {
        self.check(rhs)?;
        Ok(self.add(rhs))
    }

    pub fn try_sub(self, rhs: FpElem) -> Result<FpElem> {
        self.check(rhs)?;
        Ok(self.sub(rhs))
    }

    pub fn try_mul(self, rhs: FpElem) -> Result<FpElem> {
        self.check(rhs)?;
        Ok(self.mul(rhs))
    }

    pub fn try_div(self, rhs: FpElem) -> Result<FpElem> {
        self.check(rhs)?;
        Ok(self.mul(rhs.inv()?))
    }

    // Unchecked variants below assume a shared prime; the field wrapper in
    // `polyfield` and the map code only ever mix elements of one field.

    #[inline]
    pub(crate) fn add(self, rhs: FpElem) -> FpElem {
        debug_assert_eq!(self.prime, rhs.prime);
        let p = self.prime.get();
        let s = self.residue as u128 + rhs.residue as u128;
        FpElem { prime: self.prime, residue: (s % p as u128) as u64 }
    }

    #[inline]
    pub(crate) fn sub(self, rhs: FpElem) -> FpElem {
        debug_assert_eq!(self.prime, rhs.prime);
        let p = self.prime.get();
        let r = if self.residue >= rhs.residue {
            self.residue - rhs.residue
        } else {
            p - (rhs.residue - self.residue)
        };
        FpElem { prime: self.prime, residue: r }
    }

    #[inline]
    pub(crate) fn mul(self, rhs: FpElem) -> FpElem {
        debug_assert_eq!(self.prime, rhs.prime);
        FpElem {
            prime: self.prime,
            residue: mul_mod(self.residue, rhs.residue, self.prime.get()),
        }
    }

    #[inline]
    pub fn neg(self) -> FpElem {
        if self.residue == 0 {
            self
        } else {
            FpElem { prime: self.prime, residue: self.prime.get() - self.residue }
        }
    }

    pub fn inv(self) -> Result<FpElem> {
        if self.residue == 0 {
            return Err(Error::DivisionByZero);
        }
        let p = self.prime.get();
        Ok(FpElem { prime: self.prime, residue: pow_mod(self.residue, p - 2, p) })
    }

    /// `self^exp` for any integer exponent; negative exponents need a unit.
    pub fn pow(self, exp: i64) -> Result<FpElem> {
        let base = if exp < 0 { self.inv()? } else { self };
        let p = self.prime.get();
        Ok(FpElem { prime: self.prime, residue: pow_mod(base.residue, exp.unsigned_abs(), p) })
    }
}

impl fmt::Debug for FpElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.residue, self.prime)
    }
}

impl fmt::Display for FpElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.residue.fmt(f)
    }
}

/// Field arithmetic operation selector for [`fp_arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FpOp {
    Add,
    Sub,
    Mul,
    Div,
}

pub fn fp_arith(a: FpElem, b: FpElem, op: FpOp) -> Result<FpElem> {
    match op {
        FpOp::Add => a.try_add(b),
        FpOp::Sub => a.try_sub(b),
        FpOp::Mul => a.try_mul(b),
        FpOp::Div => a.try_div(b),
    }
}

/// A point of the projective line over `F_p`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PFp {
    Finite(FpElem),
    Infinity,
}

impl PFp {
    pub fn finite(self) -> Option<FpElem> {
        match self {
            PFp::Finite(e) => Some(e),
            PFp::Infinity => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, PFp::Infinity)
    }

    /// Wire form: the residue, or `None` for infinity.
    pub fn to_wire(self) -> Coord {
        match self {
            PFp::Finite(e) => Coord::Finite(e.residue()),
            PFp::Infinity => Coord::Infinity,
        }
    }
}

impl fmt::Debug for PFp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for PFp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PFp::Finite(e) => write!(f, "{}", e.residue()),
            PFp::Infinity => f.write_str("inf"),
        }
    }
}

/// Prime-free serialized coordinate: an integer residue or the string `"inf"`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Coord {
    Finite(u64),
    Infinity,
}

impl Coord {
    pub fn to_pfp(self, prime: Prime) -> Result<PFp> {
        match self {
            Coord::Finite(r) => Ok(PFp::Finite(FpElem::from_residue(prime, r)?)),
            Coord::Infinity => Ok(PFp::Infinity),
        }
    }
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coord::Finite(r) => write!(f, "{r}"),
            Coord::Infinity => f.write_str("inf"),
        }
    }
}

impl Serialize for Coord {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Coord::Finite(r) => s.serialize_u64(*r),
            Coord::Infinity => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Coord {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            N(u64),
            S(String),
        }
        match Raw::deserialize(d)? {
            Raw::N(r) => Ok(Coord::Finite(r)),
            Raw::S(s) if s == "inf" => Ok(Coord::Infinity),
            Raw::S(s) => Err(serde::de::Error::custom(format!("bad coordinate {s:?}"))),
        }
    }
}

/// Parses `"3"` or `"inf"` into a projective-line coordinate.
pub fn parse_coord(s: &str) -> Result<Coord> {
    let s = s.trim();
    if s == "inf" || s == "∞" {
        return Ok(Coord::Infinity);
    }
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::Parse(format!("malformed residue {s:?}")));
    }
    s.parse::<u64>()
        .map(Coord::Finite)
        .map_err(|_| Error::Parse(format!("residue {s:?} out of range")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: u64) -> Prime {
        Prime::new(n).unwrap()
    }

    #[test]
    fn division_example() {
        let f7 = p(7);
        let q = fp_arith(FpElem::new(f7, 3), FpElem::new(f7, 5), FpOp::Div).unwrap();
        assert_eq!(q.residue(), 2);
    }

    #[test]
    fn addition_wraps() {
        let f11 = p(11);
        let s = fp_arith(FpElem::new(f11, 6), FpElem::new(f11, 6), FpOp::Add).unwrap();
        assert_eq!(s.residue(), 1);
    }

    #[test]
    fn multiplicative_identity() {
        let f11 = p(11);
        for a in 0..11 {
            let x = FpElem::new(f11, a);
            assert_eq!(fp_arith(x, FpElem::one(f11), FpOp::Mul).unwrap(), x);
        }
    }

    #[test]
    fn errors() {
        let a = FpElem::new(p(7), 3);
        assert_eq!(fp_arith(a, FpElem::zero(p(7)), FpOp::Div), Err(Error::DivisionByZero));
        assert_eq!(fp_arith(a, FpElem::new(p(11), 1), FpOp::Add), Err(Error::PrimeMismatch(7, 11)));
        assert!(FpElem::from_residue(p(7), 7).is_err());
    }

    #[test]
    fn negative_reduction_and_powers() {
        let f7 = p(7);
        assert_eq!(FpElem::new(f7, -3).residue(), 4);
        assert_eq!(FpElem::new(f7, 3).pow(-1).unwrap().residue(), 5);
        assert_eq!(FpElem::new(f7, 3).pow(6).unwrap().residue(), 1);
    }

    #[test]
    fn projective_equality_is_total() {
        let f5 = p(5);
        assert_eq!(PFp::Infinity, PFp::Infinity);
        assert_ne!(PFp::Infinity, PFp::Finite(FpElem::zero(f5)));
    }

    #[test]
    fn coord_parsing() {
        assert_eq!(parse_coord("12").unwrap(), Coord::Finite(12));
        assert_eq!(parse_coord("inf").unwrap(), Coord::Infinity);
        assert!(parse_coord("-1").is_err());
        assert!(parse_coord("").is_err());
        assert_eq!(serde_json::to_string(&Coord::Infinity).unwrap(), "\"inf\"");
        assert_eq!(serde_json::from_str::<Coord>("4").unwrap(), Coord::Finite(4));
    }
}
