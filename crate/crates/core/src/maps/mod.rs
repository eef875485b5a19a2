//! The four plane map families: the QRT-type map `Psi_gamma`, q-discrete
//! Painlevé III and IV, and the Hietarinta–Viallet map. Every family is a
//! coupled system `x' = f_n(x, y)`, `y' = x`.

mod params;
mod reduced;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::{parse_rational, valuation, Padic, PFp, Prime, Rational};
use crate::polyfield::{MultiPoly, RationalFunction, UniRF, Q};

pub use params::{validate_params, validate_params_over, ReducedParams, ValidationReport};
pub use reduced::{step_reduced, ReducedSingularity, ReducedSystem};

/// A parameterized map family.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase", deny_unknown_fields)]
pub enum MapFamily {
    Qrt { a: Rational, gamma: u32 },
    Qp3 { a: Rational, b: Rational, c: Rational, d: Rational, q: Rational },
    Qp4 { a: Rational, b: Rational, q: Rational, tau0: Rational },
    Hv { a: Rational },
}

/// Short family names used on the command line and in reports.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyKind {
    Qrt,
    Qp3,
    Qp4,
    Hv,
}

impl FamilyKind {
    pub fn name(self) -> &'static str {
        match self {
            FamilyKind::Qrt => "qrt",
            FamilyKind::Qp3 => "qp3",
            FamilyKind::Qp4 => "qp4",
            FamilyKind::Hv => "hv",
        }
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for FamilyKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "qrt" => Ok(FamilyKind::Qrt),
            "qp3" => Ok(FamilyKind::Qp3),
            "qp4" => Ok(FamilyKind::Qp4),
            "hv" => Ok(FamilyKind::Hv),
            _ => Err(Error::Parse(format!("unknown family {s:?}"))),
        }
    }
}

/// Ring operations needed to evaluate a step formula.
pub trait Scalar: Clone {
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn powu(&self, e: u32) -> Self;
}

impl Scalar for Rational {
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn powu(&self, e: u32) -> Self {
        self.pow(i64::from(e)).expect("nonnegative exponent")
    }
}

impl Scalar for Padic {
    fn add(&self, rhs: &Self) -> Self {
        Padic::add(self, rhs)
    }
    fn sub(&self, rhs: &Self) -> Self {
        Padic::sub(self, rhs)
    }
    fn mul(&self, rhs: &Self) -> Self {
        Padic::mul(self, rhs)
    }
    fn powu(&self, e: u32) -> Self {
        Padic::pow(self, e)
    }
}

impl Scalar for MultiPoly<Q> {
    fn add(&self, rhs: &Self) -> Self {
        MultiPoly::add(self, rhs)
    }
    fn sub(&self, rhs: &Self) -> Self {
        MultiPoly::sub(self, rhs)
    }
    fn mul(&self, rhs: &Self) -> Self {
        MultiPoly::mul(self, rhs)
    }
    fn powu(&self, e: u32) -> Self {
        MultiPoly::pow(self, e)
    }
}

/// The exact orbit left `Q^2`: a denominator vanished exactly.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExactSingularity;

pub type Point = (Rational, Rational);
pub type ResiduePoint = (PFp, PFp);

fn r(n: i64) -> Rational {
    Rational::from(n)
}

/// Parses `"key=value,key=value"` into a map; values stay unparsed.
pub fn parse_param_list(s: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    if s.trim().is_empty() {
        return Ok(out);
    }
    for item in s.split(',') {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("expected key=value, got {item:?}")))?;
        let k = k.trim();
        if k.is_empty() || !k.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(Error::Parse(format!("bad parameter name {k:?}")));
        }
        if out.insert(k.to_string(), v.trim().to_string()).is_some() {
            return Err(Error::Parse(format!("duplicate parameter {k:?}")));
        }
    }
    Ok(out)
}

impl MapFamily {
    /// Builds a family from named parameters. For `qp4`, the original
    /// `a, b, c, d, q` form is accepted and converted to `a, b, q, tau0`.
    pub fn from_params(kind: FamilyKind, params: &BTreeMap<String, String>) -> Result<Self> {
        let keys: Vec<&str> = params.keys().map(String::as_str).collect();
        let expect = |want: &[&str]| -> Result<()> {
            let mut w = want.to_vec();
            w.sort_unstable();
            if keys == w {
                Ok(())
            } else {
                Err(Error::Parse(format!(
                    "{} expects parameters {{{}}}, got {{{}}}",
                    kind,
                    want.join(","),
                    keys.join(",")
                )))
            }
        };
        let get = |k: &str| -> Result<Rational> {
            parse_rational(&params[k]).map_err(|e| Error::Parse(format!("parameter {k}: {e}")))
        };
        let fam = match kind {
            FamilyKind::Qrt => {
                expect(&["a", "gamma"])?;
                let g = &params["gamma"];
                if g.is_empty() || !g.bytes().all(|b| b.is_ascii_digit()) {
                    return Err(Error::Parse(format!("gamma must be a nonnegative integer, got {g:?}")));
                }
                let gamma = g.parse::<u32>().map_err(|_| Error::Parse(format!("gamma out of range: {g}")))?;
                MapFamily::Qrt { a: get("a")?, gamma }
            }
            FamilyKind::Qp3 => {
                expect(&["a", "b", "c", "d", "q"])?;
                MapFamily::Qp3 { a: get("a")?, b: get("b")?, c: get("c")?, d: get("d")?, q: get("q")? }
            }
            FamilyKind::Qp4 => {
                if params.contains_key("tau0") {
                    expect(&["a", "b", "q", "tau0"])?;
                    MapFamily::Qp4 { a: get("a")?, b: get("b")?, q: get("q")?, tau0: get("tau0")? }
                } else {
                    expect(&["a", "b", "c", "d", "q"])?;
                    Self::qp4_from_original(get("a")?, get("b")?, get("c")?, get("d")?, get("q")?)?
                }
            }
            FamilyKind::Hv => {
                expect(&["a"])?;
                MapFamily::Hv { a: get("a")? }
            }
        };
        fam.check_structure()?;
        Ok(fam)
    }

    /// `tau0 = d/c`, `a -> a c / d^2`, `b -> b c / d^2`.
    pub fn qp4_from_original(a: Rational, b: Rational, c: Rational, d: Rational, q: Rational) -> Result<Self> {
        if c.is_zero() || d.is_zero() {
            return Err(Error::InvalidParameter("qp4 needs nonzero c and d".into()));
        }
        let tau0 = d.checked_div(&c)?;
        let s = c.checked_div(&(&d * &d))?;
        Ok(MapFamily::Qp4 { a: &a * &s, b: &b * &s, q, tau0 })
    }

    /// Conditions needed for the formulas to make sense over `Q` at all.
    pub fn check_structure(&self) -> Result<()> {
        match self {
            MapFamily::Qp3 { q, .. } if q.is_zero() => Err(Error::InvalidParameter("q must be nonzero".into())),
            MapFamily::Qp4 { q, tau0, .. } if q.is_zero() || tau0.is_zero() => {
                Err(Error::InvalidParameter("q and tau0 must be nonzero".into()))
            }
            _ => Ok(()),
        }
    }

    pub fn kind(&self) -> FamilyKind {
        match self {
            MapFamily::Qrt { .. } => FamilyKind::Qrt,
            MapFamily::Qp3 { .. } => FamilyKind::Qp3,
            MapFamily::Qp4 { .. } => FamilyKind::Qp4,
            MapFamily::Hv { .. } => FamilyKind::Hv,
        }
    }

    /// QRT and HV do not depend on the step index.
    pub fn is_autonomous(&self) -> bool {
        matches!(self, MapFamily::Qrt { .. } | MapFamily::Hv { .. })
    }

    /// Named parameters in a fixed order.
    pub fn params(&self) -> Vec<(&'static str, String)> {
        match self {
            MapFamily::Qrt { a, gamma } => vec![("a", a.to_string()), ("gamma", gamma.to_string())],
            MapFamily::Qp3 { a, b, c, d, q } => vec![
                ("a", a.to_string()),
                ("b", b.to_string()),
                ("c", c.to_string()),
                ("d", d.to_string()),
                ("q", q.to_string()),
            ],
            MapFamily::Qp4 { a, b, q, tau0 } => vec![
                ("a", a.to_string()),
                ("b", b.to_string()),
                ("q", q.to_string()),
                ("tau0", tau0.to_string()),
            ],
            MapFamily::Hv { a } => vec![("a", a.to_string())],
        }
    }

    fn q_pow(q: &Rational, n: i64) -> Rational {
        q.pow(n).unwrap_or_else(|_| Rational::zero())
    }

    /// `tau = q^n tau0` for qPIV.
    pub fn tau(&self, n: i64) -> Option<Rational> {
        match self {
            MapFamily::Qp4 { q, tau0, .. } => Some(&Self::q_pow(q, n) * tau0),
            _ => None,
        }
    }

    /// Numerator and denominator of `x'` at a point, over any scalar type
    /// that the parameters embed into via `k`.
    pub fn step_parts<T: Scalar>(&self, n: i64, x: &T, y: &T, k: impl Fn(&Rational) -> T) -> (T, T) {
        let one = k(&r(1));
        match self {
            MapFamily::Qrt { a, gamma } => (k(a).mul(x).add(&one), x.powu(*gamma).mul(y)),
            MapFamily::Qp3 { a, b, c, d, q } => {
                let qn = Self::q_pow(q, n);
                let num = k(&(a * b)).mul(&x.sub(&k(&(c * &qn)))).mul(&x.sub(&k(&(d * &qn))));
                let den = y.mul(&x.sub(&k(a))).mul(&x.sub(&k(b)));
                (num, den)
            }
            MapFamily::Qp4 { a, b, .. } => {
                let tau = self.tau(n).expect("qp4");
                let xy1 = x.mul(y).sub(&one);
                let xt = x.add(&k(&tau));
                let quad = k(a).mul(&x.mul(x)).add(&k(b).mul(x)).add(&k(a));
                let num = k(&(&tau * &tau)).mul(&quad).add(&xy1.mul(&xt));
                (num, x.mul(&xy1).mul(&xt))
            }
            MapFamily::Hv { a } => {
                let x2 = x.mul(x);
                (x2.mul(x).add(&k(a)).sub(&x2.mul(y)), x2)
            }
        }
    }

    fn exact_parts(&self, n: i64, x: &Rational, y: &Rational) -> (Rational, Rational) {
        self.step_parts(n, x, y, Rational::clone)
    }

    /// One exact step over `Q`.
    pub fn step_exact(&self, n: i64, pt: &Point) -> std::result::Result<Point, ExactSingularity> {
        let (num, den) = self.exact_parts(n, &pt.0, &pt.1);
        if den.is_zero() {
            return Err(ExactSingularity);
        }
        Ok((num.checked_div(&den).expect("nonzero"), pt.0.clone()))
    }

    /// The step map at index `n` as a pair of rational functions over `Q`.
    pub fn step_map(&self, n: i64) -> (RationalFunction<Q>, RationalFunction<Q>) {
        let (num, den) = self.step_parts(n, &MultiPoly::x(Q), &MultiPoly::y(Q), |c| MultiPoly::constant(Q, c.clone()));
        let first = RationalFunction::new(num, den).expect("step denominator is nonzero");
        (first, RationalFunction::x(Q))
    }

    /// One symbolic step applied to a point with coordinates in `Q(x, y)`.
    pub fn step_symbolic(
        &self,
        n: i64,
        pt: &(RationalFunction<Q>, RationalFunction<Q>),
    ) -> Result<(RationalFunction<Q>, RationalFunction<Q>)> {
        let (f, _) = self.step_map(n);
        Ok((f.substitute(&pt.0, &pt.1)?, pt.0.clone()))
    }

    /// Exact domain predicate for a rational point: p-integral coordinates
    /// and no exact singularity. Returns the violated conditions.
    pub fn domain_violations_exact(&self, n: i64, pt: &Point, p: Prime) -> Vec<&'static str> {
        let (x, y) = pt;
        let mut out = Vec::new();
        if !valuation(x, p).is_nonnegative() {
            out.push("x in Z_p");
        }
        if !valuation(y, p).is_nonnegative() {
            out.push("y in Z_p");
        }
        let zero = Rational::zero();
        match self {
            MapFamily::Qrt { gamma, .. } => {
                if *gamma >= 1 && *x == zero {
                    out.push("x != 0");
                }
                if *y == zero {
                    out.push("y != 0");
                }
            }
            MapFamily::Qp3 { a, b, .. } => {
                if x == a {
                    out.push("x != a");
                }
                if x == b {
                    out.push("x != b");
                }
                if *y == zero {
                    out.push("y != 0");
                }
            }
            MapFamily::Qp4 { .. } => {
                if *x == zero {
                    out.push("x != 0");
                }
                if (x * y).is_one() {
                    out.push("xy != 1");
                }
                if *x == -self.tau(n).expect("qp4") {
                    out.push("x != -q^n tau0");
                }
            }
            MapFamily::Hv { .. } => {
                if *x == zero {
                    out.push("x != 0");
                }
            }
        }
        out
    }

    pub fn in_domain_exact(&self, n: i64, pt: &Point, p: Prime) -> bool {
        self.domain_violations_exact(n, pt, p).is_empty() && self.step_exact(n, pt).is_ok()
    }

    /// The same predicate tested modulo `p` on a residue point. Points with
    /// an infinite coordinate are never in the domain.
    pub fn domain_violations_residue(&self, n: i64, pt: ResiduePoint, p: Prime) -> Result<Vec<&'static str>> {
        let (PFp::Finite(x), PFp::Finite(y)) = pt else {
            return Ok(vec!["finite coordinates"]);
        };
        let rp = ReducedParams::new(self, p, n)?;
        let zero = x.is_zero();
        let mut out = Vec::new();
        match &rp {
            ReducedParams::Qrt { gamma, .. } => {
                if *gamma >= 1 && zero {
                    out.push("x != 0");
                }
                if y.is_zero() {
                    out.push("y != 0");
                }
            }
            ReducedParams::Qp3 { a, b, .. } => {
                if x == *a {
                    out.push("x != a");
                }
                if x == *b {
                    out.push("x != b");
                }
                if y.is_zero() {
                    out.push("y != 0");
                }
            }
            ReducedParams::Qp4 { tau, .. } => {
                if zero {
                    out.push("x != 0");
                }
                if x.mul(y).residue() == 1 {
                    out.push("xy != 1");
                }
                if x == tau.neg() {
                    out.push("x != -q^n tau0");
                }
            }
            ReducedParams::Hv { .. } => {
                if zero {
                    out.push("x != 0");
                }
            }
        }
        Ok(out)
    }

    pub fn in_domain_residue(&self, n: i64, pt: ResiduePoint, p: Prime) -> Result<bool> {
        Ok(self.domain_violations_residue(n, pt, p)?.is_empty())
    }

    /// Residual of the scalar three-point form of the map at
    /// `(x_{n-1}, x_n, x_{n+1})`; zero exactly when the identity holds.
    pub fn three_point_residual(&self, n: i64, prev: &Rational, cur: &Rational, next: &Rational) -> Result<Rational> {
        match self {
            MapFamily::Qrt { a, gamma } => {
                let lhs = &(next * &cur.pow(i64::from(*gamma))?) * prev;
                Ok(lhs - (a * cur + r(1)))
            }
            MapFamily::Qp3 { a, b, c, d, q } => {
                let qn = Self::q_pow(q, n);
                let rhs = (&(a * b) * &((cur - &(c * &qn)) * (cur - &(d * &qn))))
                    .checked_div(&((cur - a) * (cur - b)))?;
                Ok(next * prev - rhs)
            }
            MapFamily::Qp4 { a, b, .. } => {
                let tau = self.tau(n).expect("qp4");
                let lhs = (next * cur - r(1)) * (cur * prev - r(1));
                let quad = &(a * &(cur * cur)) + &(&(b * cur) + a);
                let rhs = (&(&tau * &tau) * &quad).checked_div(&(cur + &tau))?;
                Ok(lhs - rhs)
            }
            MapFamily::Hv { a } => {
                let rhs = cur + &a.checked_div(&(cur * cur))?;
                Ok(next + prev - rhs)
            }
        }
    }
}

impl fmt::Display for MapFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ps: Vec<String> = self.params().into_iter().map(|(k, v)| format!("{k}={v}")).collect();
        write!(f, "{}({})", self.kind(), ps.join(","))
    }
}

/// One step of a reduced map along a line, over `F_p(t)`.
pub fn step_line(
    sys: &ReducedSystem,
    n: i64,
    pt: &(UniRF<crate::polyfield::Fp>, UniRF<crate::polyfield::Fp>),
) -> Result<(UniRF<crate::polyfield::Fp>, UniRF<crate::polyfield::Fp>)> {
    let step = sys.step(n)?;
    let x = UniRF::apply(&step.0, &pt.0, &pt.1).ok_or(Error::DegenerateComposition)?;
    Ok((x, pt.0.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::reduce_rational;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn p(n: u64) -> Prime {
        Prime::new(n).unwrap()
    }

    #[test]
    fn exact_step_examples() {
        let hv = MapFamily::Hv { a: q("1") };
        assert_eq!(hv.step_exact(0, &(q("1"), q("2"))), Ok((q("0"), q("1"))));
        let qrt = MapFamily::Qrt { a: q("2"), gamma: 0 };
        assert_eq!(qrt.step_exact(0, &(q("1"), q("1"))), Ok((q("3"), q("1"))));
        let qp3 = MapFamily::Qp3 { a: q("1"), b: q("2"), c: q("3"), d: q("4"), q: q("5") };
        assert_eq!(qp3.step_exact(0, &(q("1"), q("7"))), Err(ExactSingularity));
    }

    #[test]
    fn symbolic_qrt_step_is_the_formula() {
        let qrt = MapFamily::Qrt { a: q("3"), gamma: 0 };
        let id = (RationalFunction::x(Q), RationalFunction::y(Q));
        let (fx, fy) = qrt.step_symbolic(0, &id).unwrap();
        let x = MultiPoly::x(Q);
        let expect = RationalFunction::new(x.scale(&q("3")).add(&MultiPoly::one(Q)), MultiPoly::y(Q)).unwrap();
        assert_eq!(fx, expect);
        assert_eq!(fy, RationalFunction::x(Q));
    }

    #[test]
    fn symbolic_step_matches_exact_step() {
        let fams = [
            MapFamily::Qrt { a: q("2/3"), gamma: 2 },
            MapFamily::Qp3 { a: q("1"), b: q("2"), c: q("3"), d: q("4"), q: q("5") },
            MapFamily::Qp4 { a: q("2"), b: q("3"), q: q("5"), tau0: q("7/2") },
            MapFamily::Hv { a: q("-3") },
        ];
        for fam in &fams {
            for n in [-2, 0, 3] {
                let (f, _) = fam.step_map(n);
                for (i, j) in [(3, 5), (-7, 11), (13, -2), (5, 9)] {
                    let pt = (Rational::new(i, 4).unwrap(), Rational::new(j, 3).unwrap());
                    let exact = fam.step_exact(n, &pt).unwrap();
                    assert_eq!(f.eval(&pt.0, &pt.1), Some(exact.0), "{fam} n={n}");
                }
            }
        }
    }

    #[test]
    fn domain_predicates() {
        let hv = MapFamily::Hv { a: q("1") };
        let f7 = |n: i64| PFp::Finite(crate::exactnum::FpElem::new(p(7), n));
        assert!(!hv.in_domain_residue(0, (f7(0), f7(5)), p(7)).unwrap());
        assert!(hv.in_domain_residue(0, (f7(1), f7(0)), p(7)).unwrap());
        let qrt0 = MapFamily::Qrt { a: q("1"), gamma: 0 };
        assert!(qrt0.in_domain_residue(0, (f7(0), f7(1)), p(7)).unwrap());
        // q^n tau0 = 3 mod 7 at n = 1 with q = 5, tau0 = 2
        let qp4 = MapFamily::Qp4 { a: q("2"), b: q("3"), q: q("5"), tau0: q("2") };
        assert_eq!(reduce_rational(&qp4.tau(1).unwrap(), p(7)), f7(3));
        assert!(!qp4.in_domain_residue(1, (f7(4), f7(6)), p(7)).unwrap());
        assert!(!qp4.in_domain_exact(1, &(q("-10"), q("1")), p(7)));
        assert!(qp4.in_domain_exact(1, &(q("4"), q("1")), p(7)));
    }

    #[test]
    fn param_parsing() {
        let m = parse_param_list("a=1,b=2/3").unwrap();
        assert_eq!(m["b"], "2/3");
        assert!(parse_param_list("a=1,a=2").is_err());
        assert!(parse_param_list("a").is_err());
        let fam = MapFamily::from_params(FamilyKind::Hv, &parse_param_list("a=1").unwrap()).unwrap();
        assert_eq!(fam, MapFamily::Hv { a: q("1") });
        assert!(MapFamily::from_params(FamilyKind::Hv, &parse_param_list("a=1//2").unwrap()).is_err());
        assert!(MapFamily::from_params(FamilyKind::Hv, &parse_param_list("a=1,b=2").unwrap()).is_err());
        assert!(MapFamily::from_params(FamilyKind::Qrt, &parse_param_list("a=1,gamma=-1").unwrap()).is_err());
    }

    #[test]
    fn qp4_original_parameters_convert() {
        let m = parse_param_list("a=2,b=3,c=4,d=6,q=5").unwrap();
        let fam = MapFamily::from_params(FamilyKind::Qp4, &m).unwrap();
        assert_eq!(fam, MapFamily::Qp4 { a: q("2/9"), b: q("1/3"), q: q("5"), tau0: q("3/2") });
    }

    #[test]
    fn serde_shape() {
        let fam = MapFamily::Qp3 { a: q("1"), b: q("2"), c: q("3"), d: q("4"), q: q("5/2") };
        let s = serde_json::to_string(&fam).unwrap();
        assert_eq!(s, r#"{"family":"qp3","a":"1","b":"2","c":"3","d":"4","q":"5/2"}"#);
        assert_eq!(serde_json::from_str::<MapFamily>(&s).unwrap(), fam);
    }
}
