//! Exact numbers: arbitrary-precision rationals with p-adic valuation,
//! prime-field residues, the projective line over `F_p`, and the reduction
//! map `Q -> P^1(F_p)`.

mod fp;
mod padic;
mod prime;
mod rational;

pub use fp::{fp_arith, parse_coord, Coord, FpElem, FpOp, PFp};
pub use padic::{Padic, PrecisionLost};
pub use prime::{is_prime, Prime};
pub use rational::{parse_rational, Rational, Valuation};

pub(crate) use rational::{int_mod, int_valuation};

/// `v_p(x)`: the exponent of `p` in `x`, or `PlusInfinity` for zero.
pub fn valuation(x: &Rational, p: Prime) -> Valuation {
    if x.is_zero() {
        return Valuation::PlusInfinity;
    }
    let up = int_valuation(x.numer().magnitude(), p.get());
    let down = int_valuation(x.denom().magnitude(), p.get());
    Valuation::Finite(up - down)
}

/// The p-adic norm `|x|_p = p^(-v_p(x))`, with `|0|_p = 0`.
pub fn norm(x: &Rational, p: Prime) -> Rational {
    match valuation(x, p) {
        Valuation::PlusInfinity => Rational::zero(),
        Valuation::Finite(v) => Rational::from_integer(p.get())
            .pow(-v)
            .expect("p is nonzero"),
    }
}

/// Residue of `x` when `v_p(x) >= 0`, `None` otherwise.
pub fn to_fp(x: &Rational, p: Prime) -> Option<FpElem> {
    let d = int_mod(x.denom(), p.get());
    if d == 0 {
        return None;
    }
    let n = int_mod(x.numer(), p.get());
    let num = FpElem::from_residue(p, n).expect("residue below p");
    let den = FpElem::from_residue(p, d).expect("residue below p");
    Some(num.mul(den.inv().expect("den is a unit")))
}

/// Reduction `Q -> P^1(F_p)`: residue on `Z_(p)`, infinity elsewhere.
pub fn reduce_rational(x: &Rational, p: Prime) -> PFp {
    match to_fp(x, p) {
        Some(e) => PFp::Finite(e),
        None => PFp::Infinity,
    }
}
