//! Bivariate GCD by the primitive polynomial remainder sequence in `K[y][x]`.
//!
//! Contents in `K[y]` are split off first and recombined at the end, so the
//! remainder sequence only ever runs on primitive polynomials. Over `Q` a
//! multi-modular method runs first and the remainder sequence is the
//! fallback.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::field::{Field, Fp, Q};
use super::multipoly::{Exp, MultiPoly};
use super::unipoly::UniPoly;
use crate::error::{Error, Result};
use crate::exactnum::{is_prime, to_fp, Prime, Rational};

type Rows<F> = Vec<UniPoly<F>>;

fn trim<F: Field>(rows: &mut Rows<F>) {
    while rows.last().is_some_and(|r| r.is_zero()) {
        rows.pop();
    }
}

fn content<F: Field>(rows: &Rows<F>) -> UniPoly<F> {
    let field = rows[0].field().clone();
    let mut g = UniPoly::zero(field);
    for r in rows {
        g = g.gcd(r);
        if g.degree() == Some(0) {
            break;
        }
    }
    g
}

fn primitive_part<F: Field>(rows: &Rows<F>) -> Rows<F> {
    let c = content(rows);
    if c.degree() == Some(0) {
        return rows.clone();
    }
    rows.iter().map(|r| r.div_exact(&c).expect("content divides every row")).collect()
}

/// Pseudo-remainder of `a` by `b` in `K[y][x]`.
fn prem<F: Field>(a: &Rows<F>, b: &Rows<F>) -> Rows<F> {
    let db = b.len() - 1;
    let lb = &b[db];
    let mut r = a.clone();
    trim(&mut r);
    while r.len() > db && !r.is_empty() {
        let top = r.len() - 1;
        let lr = r[top].clone();
        let shift = top - db;
        for c in r.iter_mut() {
            *c = c.mul(lb);
        }
        for (k, bk) in b.iter().enumerate() {
            r[k + shift] = r[k + shift].sub(&lr.mul(bk));
        }
        debug_assert!(r[top].is_zero());
        trim(&mut r);
    }
    r
}

/// Scales `p` so that its graded-lex leading coefficient follows the
/// field's canonical normalization.
pub fn normalize<F: Field>(p: &MultiPoly<F>) -> MultiPoly<F> {
    match p.leading_term() {
        None => p.clone(),
        Some((_, lc)) => {
            let s = p.field().normalizer(lc, p.terms().values());
            p.scale(&s)
        }
    }
}

/// Greatest common divisor of two bivariate polynomials, canonically
/// normalized (monic over `F_p`; primitive with positive leading
/// coefficient over `Q`).
pub fn poly_gcd<F: Field>(a: &MultiPoly<F>, b: &MultiPoly<F>) -> Result<MultiPoly<F>> {
    match (a.is_zero(), b.is_zero()) {
        (true, true) => return Err(Error::ZeroGcd),
        (true, false) => return Ok(normalize(b)),
        (false, true) => return Ok(normalize(a)),
        _ => {}
    }
    let field = a.field().clone();
    if a.is_constant() || b.is_constant() {
        return Ok(MultiPoly::one(field));
    }
    if let Some(g) = F::fast_gcd(a, b) {
        return Ok(g);
    }
    let ra = a.to_x_major();
    let rb = b.to_x_major();
    let ca = content(&ra);
    let cb = content(&rb);
    let gc = ca.gcd(&cb);
    let pa = primitive_part(&ra);
    let pb = primitive_part(&rb);

    let (mut r0, mut r1) = if pa.len() >= pb.len() { (pa, pb) } else { (pb, pa) };
    let g: Rows<F> = loop {
        if r1.len() == 1 {
            // primitive and free of x: a unit
            break vec![UniPoly::one(field.clone())];
        }
        let r = prem(&r0, &r1);
        if r.is_empty() {
            break r1;
        }
        r0 = r1;
        r1 = primitive_part(&r);
    };
    let g = primitive_part(&g);
    let g = MultiPoly::from_x_major(field, &g).mul(&MultiPoly::from_y_poly(&gc));
    Ok(normalize(&g))
}

const MODULAR_PRIME_BUDGET: usize = 64;

fn leading_key<F: Field>(p: &MultiPoly<F>) -> (u32, Exp) {
    let (e, _) = p.leading_term().expect("nonzero");
    (e.0 + e.1, e)
}

fn sym_mod(r: &BigInt, m: &BigInt) -> BigInt {
    let half: BigInt = m >> 1;
    if r > &half {
        r - m
    } else {
        r.clone()
    }
}

/// Multi-modular gcd over `Q`: gcds modulo word-sized primes, combined by
/// the Chinese remainder theorem, accepted once stable and dividing both
/// inputs. `None` if the prime budget runs out.
pub(crate) fn modular_gcd_q(a: &MultiPoly<Q>, b: &MultiPoly<Q>) -> Option<MultiPoly<Q>> {
    let a = normalize(a);
    let b = normalize(b);
    let lca = a.leading_term()?.1.numer().clone();
    let lcb = b.leading_term()?.1.numer().clone();
    let gamma = lca.gcd(&lcb);
    let mut candidate: u64 = (1 << 62) - 1;
    let mut best: Option<(u32, Exp)> = None;
    let mut modulus = BigInt::one();
    let mut acc: BTreeMap<Exp, BigInt> = BTreeMap::new();
    let mut previous: Option<MultiPoly<Q>> = None;
    let mut used = 0;
    while used < MODULAR_PRIME_BUDGET {
        candidate -= 2;
        if !is_prime(candidate) {
            continue;
        }
        let prime = Prime::new(candidate).ok()?;
        let ell = BigInt::from(candidate);
        if (&lca % &ell).is_zero() || (&lcb % &ell).is_zero() {
            continue;
        }
        used += 1;
        let field = Fp::new(prime);
        let red = |p: &MultiPoly<Q>| p.map_coeffs(field, |c| to_fp(c, prime).expect("integer coefficient"));
        let g = poly_gcd(&red(&a), &red(&b)).ok()?;
        let key = leading_key(&g);
        match best {
            Some(k) if key > k => continue,
            Some(k) if key == k => {}
            _ => {
                best = Some(key);
                modulus = BigInt::one();
                acc.clear();
                previous = None;
            }
        }
        let gm = to_fp(&Rational::from_integer(gamma.clone()), prime).expect("integer");
        let image: BTreeMap<Exp, BigInt> =
            g.terms().iter().map(|(e, c)| (*e, BigInt::from(c.mul(gm).residue()))).collect();
        // CRT: x = r + M * ((s - r) * M^-1 mod ell)
        let m_inv = (&modulus % &ell).modinv(&ell).expect("distinct primes");
        let exps: Vec<Exp> = acc.keys().chain(image.keys()).copied().collect();
        let mut next = BTreeMap::new();
        for e in exps {
            let r = acc.get(&e).cloned().unwrap_or_default();
            let s = image.get(&e).cloned().unwrap_or_default();
            let t = ((s - &r) % &ell + &ell) % &ell * &m_inv % &ell;
            next.insert(e, r + &modulus * t);
        }
        modulus *= &ell;
        acc = next;
        let h = MultiPoly::from_terms(
            Q,
            acc.iter().map(|(e, c)| (*e, Rational::from_integer(sym_mod(c, &modulus)))),
        );
        if h.is_zero() {
            continue;
        }
        let h = normalize(&h);
        if previous.as_ref() == Some(&h) && a.div_exact(&h).is_some() && b.div_exact(&h).is_some() {
            return Some(h);
        }
        previous = Some(h);
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{Prime, Rational};
    use crate::polyfield::field::{Fp, Q};

    fn q(n: i64) -> Rational {
        Rational::from(n)
    }

    #[test]
    fn difference_of_squares_gcd() {
        let x = MultiPoly::x(Q);
        let y = MultiPoly::y(Q);
        let a = x.pow(2).sub(&y.pow(2));
        let b = x.sub(&y);
        assert_eq!(poly_gcd(&a, &b).unwrap(), b);
    }

    #[test]
    fn gcd_with_one() {
        let x = MultiPoly::x(Q);
        let a = x.pow(3).add(&MultiPoly::y(Q));
        assert_eq!(poly_gcd(&a, &MultiPoly::one(Q)).unwrap(), MultiPoly::one(Q));
    }

    #[test]
    fn repeated_factor_gcd() {
        let x = MultiPoly::x(Q);
        let y = MultiPoly::y(Q);
        let u = x.add(&y);
        let v = x.sub(&y.scale(&q(2)));
        let a = u.pow(3).mul(&v);
        let b = u.mul(&v.pow(2));
        let g = poly_gcd(&a, &b).unwrap();
        // oracle: the gcd divides both, and the cofactors are coprime
        let ca = a.div_exact(&g).unwrap();
        let cb = b.div_exact(&g).unwrap();
        assert_eq!(poly_gcd(&ca, &cb).unwrap(), MultiPoly::one(Q));
        assert_eq!(g, normalize(&u.mul(&v)));
    }

    #[test]
    fn y_content_is_kept() {
        let x = MultiPoly::x(Q);
        let y = MultiPoly::y(Q);
        let a = y.mul(&x.add(&MultiPoly::one(Q)));
        let b = y.pow(2).mul(&x);
        assert_eq!(poly_gcd(&a, &b).unwrap(), y);
    }

    #[test]
    fn both_zero_is_an_error() {
        assert_eq!(poly_gcd(&MultiPoly::zero(Q), &MultiPoly::zero(Q)), Err(Error::ZeroGcd));
    }

    #[test]
    fn gcd_over_fp_is_monic() {
        let f = Fp::new(Prime::new(7).unwrap());
        let x = MultiPoly::x(f);
        let y = MultiPoly::y(f);
        let g = x.scale(&f.elem(3)).add(&y);
        let a = g.mul(&x.add(&MultiPoly::one(f)));
        let b = g.mul(&y.sub(&MultiPoly::one(f)));
        let got = poly_gcd(&a, &b).unwrap();
        assert_eq!(got.leading_term().unwrap().1, &f.elem(1));
        assert!(a.div_exact(&got).is_some() && b.div_exact(&got).is_some());
        assert_eq!(got.total_degree(), 1);
    }
}
