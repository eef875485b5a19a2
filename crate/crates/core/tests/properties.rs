mod common;

use agrlab::exactnum::{reduce_rational, Coord, valuation, FpElem, PFp, Padic, Prime, Rational, Valuation};
use agrlab::maps::{step_reduced, MapFamily};
use agrlab::polyfield::{poly_gcd, rf_compose, Fp, MultiPoly, RationalFunction, Q};
use common::{big, reduce_oracle, Formula};
use num_rational::BigRational;
use proptest::prelude::*;

const PRIMES: [u64; 4] = [5, 7, 13, 101];

fn prime() -> impl Strategy<Value = Prime> {
    prop::sample::select(PRIMES.to_vec()).prop_map(|p| Prime::new(p).unwrap())
}

fn rational() -> impl Strategy<Value = Rational> {
    (-10_000i64..10_000, 1i64..10_000).prop_map(|(n, d)| Rational::new(n, d).unwrap())
}

fn small_rational() -> impl Strategy<Value = Rational> {
    (-12i64..12, 1i64..6).prop_map(|(n, d)| Rational::new(n, d).unwrap())
}

fn fp_poly(f: Fp) -> impl Strategy<Value = MultiPoly<Fp>> {
    prop::collection::vec(((0u32..4, 0u32..4), -50i64..50), 0..6)
        .prop_map(move |ts| MultiPoly::from_terms(f, ts.into_iter().map(|((i, j), c)| ((i, j), f.elem(c)))))
}

fn q_poly() -> impl Strategy<Value = MultiPoly<Q>> {
    prop::collection::vec(((0u32..3, 0u32..3), -9i64..9), 0..5)
        .prop_map(|ts| MultiPoly::from_terms(Q, ts.into_iter().map(|((i, j), c)| ((i, j), Rational::from(c)))))
}

fn family() -> impl Strategy<Value = MapFamily> {
    let r = || small_rational().prop_filter("nonzero", |x| !x.is_zero());
    prop_oneof![
        (r(), 0u32..4).prop_map(|(a, gamma)| MapFamily::Qrt { a, gamma }),
        (r(), r(), r(), r(), r()).prop_map(|(a, b, c, d, q)| MapFamily::Qp3 { a, b, c, d, q }),
        (r(), r(), r(), r()).prop_map(|(a, b, q, tau0)| MapFamily::Qp4 { a, b, q, tau0 }),
        r().prop_map(|a| MapFamily::Hv { a }),
    ]
}

fn formula(fam: &MapFamily) -> Formula {
    match fam {
        MapFamily::Qrt { a, gamma } => Formula::Qrt { a: big(a), gamma: *gamma },
        MapFamily::Qp3 { a, b, c, d, q } => Formula::Qp3 { a: big(a), b: big(b), c: big(c), d: big(d), q: big(q) },
        MapFamily::Qp4 { a, b, q, tau0 } => Formula::Qp4 { a: big(a), b: big(b), q: big(q), tau0: big(tau0) },
        MapFamily::Hv { a } => Formula::Hv { a: big(a) },
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn fp_field_axioms(p in prime(), a in any::<i64>(), b in any::<i64>(), c in any::<i64>()) {
        let (a, b, c) = (FpElem::new(p, a), FpElem::new(p, b), FpElem::new(p, c));
        let add = |x: FpElem, y| x.try_add(y).unwrap();
        let mul = |x: FpElem, y| x.try_mul(y).unwrap();
        prop_assert_eq!(add(add(a, b), c), add(a, add(b, c)));
        prop_assert_eq!(mul(mul(a, b), c), mul(a, mul(b, c)));
        prop_assert_eq!(mul(a, add(b, c)), add(mul(a, b), mul(a, c)));
        prop_assert_eq!(add(a, a.neg()), FpElem::zero(p));
        if !a.is_zero() {
            prop_assert_eq!(mul(a, a.inv().unwrap()), FpElem::one(p));
            prop_assert_eq!(a.pow(p.get() as i64 - 1).unwrap(), FpElem::one(p));
        }
    }

    #[test]
    fn fp_elements_of_different_primes_do_not_mix(a in 0i64..5, b in 0i64..7) {
        let x = FpElem::new(Prime::new(5).unwrap(), a);
        let y = FpElem::new(Prime::new(7).unwrap(), b);
        prop_assert!(x.try_add(y).is_err());
    }

    #[test]
    fn valuation_is_additive(p in prime(), x in rational(), y in rational()) {
        let vx = valuation(&x, p);
        let vy = valuation(&y, p);
        prop_assert_eq!(valuation(&(&x * &y), p), vx + vy);
        if let (Valuation::Finite(a), Valuation::Finite(b)) = (vx, vy) {
            if let Valuation::Finite(s) = valuation(&(&x + &y), p) {
                prop_assert!(s >= a.min(b));
            }
        }
    }

    #[test]
    fn reduction_matches_oracle(p in prime(), x in rational()) {
        prop_assert_eq!(reduce_rational(&x, p).to_wire(), reduce_oracle(&big(&x), p.get()));
    }

    #[test]
    fn rational_text_round_trip(x in rational()) {
        prop_assert_eq!(x.to_string().parse::<Rational>().unwrap(), x);
    }

    #[test]
    fn padic_agrees_with_exact(p in prime(), x in rational(), y in rational(), k in 2u32..12) {
        let (px, py) = (Padic::from_rational(&x, p, k), Padic::from_rational(&y, p, k));
        let exact_sum = reduce_rational(&(&x + &y), p);
        let exact_prod = reduce_rational(&(&x * &y), p);
        if let Some(r) = px.add(&py).reduce() {
            prop_assert_eq!(r, exact_sum);
        }
        if let Some(r) = px.mul(&py).reduce() {
            prop_assert_eq!(r, exact_prod);
        }
        if !y.is_zero() {
            if let Ok(inv) = py.inv() {
                if let Some(r) = px.mul(&inv).reduce() {
                    prop_assert_eq!(r, reduce_rational(&x.checked_div(&y).unwrap(), p));
                }
            }
        }
    }

    #[test]
    fn fp_gcd_divides_both(a in fp_poly(Fp::new(Prime::new(7).unwrap())), b in fp_poly(Fp::new(Prime::new(7).unwrap())), c in fp_poly(Fp::new(Prime::new(7).unwrap()))) {
        let (ac, bc) = (a.mul(&c), b.mul(&c));
        if ac.is_zero() && bc.is_zero() {
            prop_assert!(poly_gcd(&ac, &bc).is_err());
            return Ok(());
        }
        let g = poly_gcd(&ac, &bc).unwrap();
        if !g.is_zero() {
            prop_assert!(ac.div_exact(&g).is_some());
            prop_assert!(bc.div_exact(&g).is_some());
            if !c.is_zero() {
                prop_assert!(g.div_exact(&c).is_some(), "common factor lost");
            }
        }
    }

    #[test]
    fn q_gcd_divides_both(a in q_poly(), b in q_poly(), c in q_poly()) {
        let (ac, bc) = (a.mul(&c), b.mul(&c));
        if ac.is_zero() && bc.is_zero() {
            prop_assert!(poly_gcd(&ac, &bc).is_err());
            return Ok(());
        }
        let g = poly_gcd(&ac, &bc).unwrap();
        if !g.is_zero() {
            prop_assert!(ac.div_exact(&g).is_some());
            prop_assert!(bc.div_exact(&g).is_some());
            if !c.is_zero() {
                prop_assert!(g.div_exact(&c).is_some(), "common factor lost");
            }
        }
    }

    #[test]
    fn composition_is_pointwise(fam in family(), n in -3i64..3, x in small_rational(), y in small_rational()) {
        let first = fam.step_map(n);
        let second = fam.step_map(n + 1);
        let comp = rf_compose(&second, &first).unwrap();
        let Ok(mid) = fam.step_exact(n, &(x.clone(), y.clone())) else { return Ok(()) };
        let Ok(end) = fam.step_exact(n + 1, &mid) else { return Ok(()) };
        let at = |f: &RationalFunction<Q>| f.eval(&x, &y);
        // the composite may be defined where the step-by-step orbit is not, never the reverse
        prop_assert_eq!(at(&comp.0), Some(end.0));
        prop_assert_eq!(at(&comp.1), Some(end.1));
    }

    #[test]
    fn exact_step_matches_formula(fam in family(), n in -4i64..4, x in small_rational(), y in small_rational()) {
        let oracle = formula(&fam).step(n, &big(&x), &big(&y));
        match fam.step_exact(n, &(x.clone(), y.clone())) {
            Ok((nx, ny)) => {
                prop_assert_eq!(Some((big(&nx), big(&ny))), oracle);
                prop_assert_eq!(ny, x, "y_(n+1) = x_n");
            }
            Err(_) => prop_assert!(oracle.is_none()),
        }
    }

    #[test]
    fn symbolic_step_matches_exact(fam in family(), n in -3i64..3, x in small_rational(), y in small_rational()) {
        let (f, g) = fam.step_map(n);
        if let Ok((nx, ny)) = fam.step_exact(n, &(x.clone(), y.clone())) {
            prop_assert_eq!(f.eval(&x, &y), Some(nx));
            prop_assert_eq!(g.eval(&x, &y), Some(ny));
        }
    }

    #[test]
    fn good_reduction_off_singularities(fam in family(), p in prime(), n in -3i64..3, x in rational(), y in rational()) {
        let f = formula(&fam);
        let pp = p.get();
        let unit = |v: &BigRational| !matches!(reduce_oracle(v, pp), Coord::Infinity | Coord::Finite(0));
        if !f.params().into_iter().all(unit) {
            return Ok(());
        }
        let (rx, ry) = (reduce_rational(&x, p), reduce_rational(&y, p));
        if rx.is_infinite() || ry.is_infinite() {
            return Ok(());
        }
        let (_, den) = f.parts(n, &big(&x), &big(&y));
        if !unit(&den) {
            return Ok(());
        }
        let exact = fam.step_exact(n, &(x.clone(), y.clone())).unwrap();
        let red = step_reduced(&fam, n, (rx, ry), p).unwrap();
        prop_assert_eq!(Ok((reduce_rational(&exact.0, p), reduce_rational(&exact.1, p))), red);
    }

    #[test]
    fn orbit_oracle_agrees(fam in family(), n in -2i64..2, x in small_rational(), y in small_rational()) {
        let Some(xs) = formula(&fam).orbit(n, (big(&x), big(&y)), 3) else { return Ok(()) };
        let mut pt = (x, y);
        for (j, want) in xs[2..].iter().enumerate() {
            pt = fam.step_exact(n + j as i64, &pt).unwrap();
            prop_assert_eq!(&big(&pt.0), want);
        }
    }
}

#[test]
fn reduction_sends_p_to_zero_and_inverse_p_to_infinity() {
    for p in PRIMES {
        let pr = Prime::new(p).unwrap();
        assert_eq!(reduce_rational(&Rational::from(p as i64), pr), PFp::Finite(FpElem::zero(pr)));
        assert_eq!(reduce_rational(&Rational::new(1, p as i64).unwrap(), pr), PFp::Infinity);
        let half: BigRational = BigRational::new(1.into(), 2.into());
        assert_eq!(reduce_rational(&Rational::new(1, 2).unwrap(), pr).to_wire(), reduce_oracle(&half, p));
    }
}

#[test]
fn reduced_step_can_be_defined_on_a_cancelled_line() {
    // a tau^2 - b tau + a = 0 mod 13 cancels x + tau from the reduced step,
    // so x = -tau (residue 7) is singular only where x y = 1 (y = 2)
    let fam = MapFamily::Qp4 { a: Rational::from(-7), b: Rational::from(11), q: Rational::from(-1), tau0: Rational::new(-1, 2).unwrap() };
    let p = Prime::new(13).unwrap();
    for y in 0..13 {
        let pt = (PFp::Finite(FpElem::new(p, 7)), PFp::Finite(FpElem::new(p, y)));
        assert_eq!(step_reduced(&fam, 0, pt, p).unwrap().is_ok(), y != 2, "y = {y}");
    }
}
