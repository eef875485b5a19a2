//! Evaluation of composed reduced maps by restriction to curves through the
//! base point.
//!
//! A residue point is lifted to `(x0 + t dx, y0 + t dy)` over `F_p(t)`, the
//! reduced step maps are applied one at a time with cancellation in `F_p(t)`,
//! and the result is read off at `t = 0`. Exact arithmetic is used until the
//! degrees pass a cap, after which the probe replays its history with
//! truncated Laurent series.

use std::fmt;
use std::sync::Arc;

use super::field::{Field, Fp};
use super::ratfunc::{substitute_pair, RationalFunction};
use super::series::{eval_ratio, Laurent};
use super::unipoly::UniPoly;
use crate::exactnum::{FpElem, PFp};

/// A reduced plane map `(x, y) -> (f(x, y), g(x, y))` over `F_p`.
pub type StepPair = (RationalFunction<Fp>, RationalFunction<Fp>);

const EXACT_DEGREE_CAP: usize = 2048;
const SERIES_PRECISIONS: [usize; 4] = [24, 96, 384, 1024];

/// Univariate rational function in `t`, canonical: coprime, monic
/// denominator (primitive with positive leading coefficient over `Q`).
pub struct UniRF<F: Field> {
    num: UniPoly<F>,
    den: UniPoly<F>,
}

impl<F: Field> Clone for UniRF<F> {
    fn clone(&self) -> Self {
        UniRF { num: self.num.clone(), den: self.den.clone() }
    }
}

impl<F: Field> PartialEq for UniRF<F> {
    fn eq(&self, other: &Self) -> bool {
        self.num == other.num && self.den == other.den
    }
}

impl<F: Field> fmt::Debug for UniRF<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?}) / ({:?})", self.num, self.den)
    }
}

impl<F: Field> UniRF<F> {
    /// `None` if the denominator is zero.
    pub fn new(num: UniPoly<F>, den: UniPoly<F>) -> Option<Self> {
        if den.is_zero() {
            return None;
        }
        let field = den.field().clone();
        if num.is_zero() {
            return Some(UniRF { num, den: UniPoly::one(field) });
        }
        let g = num.gcd(&den);
        let (num, den) = if g.degree() == Some(0) {
            (num, den)
        } else {
            (num.div_exact(&g).expect("gcd divides"), den.div_exact(&g).expect("gcd divides"))
        };
        let s = field.normalizer(den.lc().expect("nonzero"), den.coeffs().iter());
        Some(UniRF { num: num.scale(&s), den: den.scale(&s) })
    }

    pub fn from_poly(p: UniPoly<F>) -> Self {
        let one = UniPoly::one(p.field().clone());
        UniRF { num: p, den: one }
    }

    pub fn num(&self) -> &UniPoly<F> {
        &self.num
    }

    pub fn den(&self) -> &UniPoly<F> {
        &self.den
    }

    pub fn degree(&self) -> usize {
        self.num.degree().unwrap_or(0).max(self.den.degree().unwrap_or(0))
    }

    /// Applies a bivariate rational function to a pair of univariate ones.
    pub fn apply(f: &RationalFunction<F>, x: &UniRF<F>, y: &UniRF<F>) -> Option<UniRF<F>> {
        let (n, d) = substitute_pair(f.num(), f.den(), &x.num, &x.den, &y.num, &y.den);
        UniRF::new(n, d)
    }
}

impl UniRF<Fp> {
    /// Value at `t = 0`; never indeterminate since the pair is coprime.
    pub fn value_at_zero(&self) -> PFp {
        let f = *self.den.field();
        let d0 = self.den.coeff(0);
        if d0.is_zero() {
            PFp::Infinity
        } else {
            PFp::Finite(f.div(&self.num.coeff(0), &d0).expect("nonzero"))
        }
    }
}

/// Direction of the probing line through the base point.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// `(x0 + t, y0 + lambda t)`.
    Slope(FpElem),
    /// `(x0, y0 + t)`.
    Vertical,
}

#[derive(Clone, Debug)]
enum ProbeState {
    Exact { x: UniRF<Fp>, y: UniRF<Fp> },
    Series { prec_idx: usize, x: Laurent, y: Laurent },
    /// The line is mapped into a pole or base locus of some step.
    Degenerate,
    /// Series precision ran out before `t = 0` could be resolved.
    Lost,
}

/// One line through a base point, pushed forward step by step.
#[derive(Clone, Debug)]
pub struct LineProbe {
    field: Fp,
    base: (FpElem, FpElem),
    dir: Direction,
    history: Vec<Arc<StepPair>>,
    state: ProbeState,
}

impl LineProbe {
    pub fn new(base: (FpElem, FpElem), dir: Direction) -> Self {
        let field = Fp::new(base.0.prime());
        let (dx, dy) = match dir {
            Direction::Slope(l) => (field.one(), l),
            Direction::Vertical => (field.zero(), field.one()),
        };
        let x = UniRF::from_poly(UniPoly::linear(field, base.0, dx));
        let y = UniRF::from_poly(UniPoly::linear(field, base.1, dy));
        LineProbe { field, base, dir, history: Vec::new(), state: ProbeState::Exact { x, y } }
    }

    pub fn direction(&self) -> Direction {
        self.dir
    }

    pub fn steps_applied(&self) -> usize {
        self.history.len()
    }

    fn initial_series(&self, prec: usize) -> (Laurent, Laurent) {
        let f = self.field;
        let (dx, dy) = match self.dir {
            Direction::Slope(l) => (f.one(), l),
            Direction::Vertical => (f.zero(), f.one()),
        };
        (
            Laurent::from_poly(&UniPoly::linear(f, self.base.0, dx), prec),
            Laurent::from_poly(&UniPoly::linear(f, self.base.1, dy), prec),
        )
    }

    /// Replays the whole history with series at the given precision level.
    fn replay_series(&mut self, mut prec_idx: usize) {
        'outer: while prec_idx < SERIES_PRECISIONS.len() {
            let (mut x, mut y) = self.initial_series(SERIES_PRECISIONS[prec_idx]);
            for step in &self.history {
                match series_step(step, &x, &y, self.field) {
                    Some((nx, ny)) => (x, y) = (nx, ny),
                    None => {
                        prec_idx += 1;
                        continue 'outer;
                    }
                }
            }
            self.state = ProbeState::Series { prec_idx, x, y };
            return;
        }
        self.state = ProbeState::Lost;
    }

    pub fn advance(&mut self, step: Arc<StepPair>) {
        self.history.push(step.clone());
        match &self.state {
            ProbeState::Degenerate | ProbeState::Lost => {}
            ProbeState::Exact { x, y } => {
                let nx = UniRF::apply(&step.0, x, y);
                let ny = UniRF::apply(&step.1, x, y);
                match (nx, ny) {
                    (Some(nx), Some(ny)) => {
                        if nx.degree().max(ny.degree()) > EXACT_DEGREE_CAP {
                            self.replay_series(0);
                        } else {
                            self.state = ProbeState::Exact { x: nx, y: ny };
                        }
                    }
                    _ => self.state = ProbeState::Degenerate,
                }
            }
            ProbeState::Series { prec_idx, x, y } => match series_step(&step, x, y, self.field) {
                Some((nx, ny)) => self.state = ProbeState::Series { prec_idx: *prec_idx, x: nx, y: ny },
                None => {
                    let next = prec_idx + 1;
                    self.replay_series(next);
                }
            },
        }
    }

    /// Value of the pushed-forward line at `t = 0`, `None` when degenerate
    /// or unresolved.
    pub fn value(&self) -> Option<(PFp, PFp)> {
        match &self.state {
            ProbeState::Exact { x, y } => Some((x.value_at_zero(), y.value_at_zero())),
            ProbeState::Series { x, y, .. } => {
                Some((x.value_at_zero_in(self.field)?, y.value_at_zero_in(self.field)?))
            }
            ProbeState::Degenerate | ProbeState::Lost => None,
        }
    }

    pub fn uses_series(&self) -> bool {
        matches!(self.state, ProbeState::Series { .. })
    }
}

fn series_step(step: &StepPair, x: &Laurent, y: &Laurent, field: Fp) -> Option<(Laurent, Laurent)> {
    let nx = eval_ratio(step.0.num(), step.0.den(), x, y, field).ok()?;
    let ny = eval_ratio(step.1.num(), step.1.den(), x, y, field).ok()?;
    Some((nx, ny))
}

/// Combined verdict of several line probes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PerturbationOutcome {
    Value((PFp, PFp)),
    /// Two usable directions gave different limits.
    Disagree,
    /// Fewer than the required number of usable directions.
    Inconclusive,
}

/// Minimum number of agreeing non-degenerate directions.
pub const MIN_DIRECTIONS: usize = 3;

/// A set of probes through one base point, advanced together.
#[derive(Clone, Debug)]
pub struct ProbeBundle {
    probes: Vec<LineProbe>,
}

impl ProbeBundle {
    pub fn new(base: (FpElem, FpElem), dirs: &[Direction]) -> Self {
        ProbeBundle { probes: dirs.iter().map(|&d| LineProbe::new(base, d)).collect() }
    }

    pub fn advance(&mut self, step: &Arc<StepPair>) {
        for p in &mut self.probes {
            p.advance(step.clone());
        }
    }

    pub fn probes(&self) -> &[LineProbe] {
        &self.probes
    }

    pub fn verdict(&self) -> PerturbationOutcome {
        let values: Vec<(PFp, PFp)> = self.probes.iter().filter_map(|p| p.value()).collect();
        if values.iter().any(|v| *v != values[0]) {
            return PerturbationOutcome::Disagree;
        }
        if values.len() < MIN_DIRECTIONS.min(self.probes.len()) {
            return PerturbationOutcome::Inconclusive;
        }
        PerturbationOutcome::Value(values[0])
    }
}

/// Applies `steps` along lines through `base` in every given direction and
/// returns the common value at `t = 0`.
pub fn perturbation_eval(
    steps: &[Arc<StepPair>],
    base: (FpElem, FpElem),
    dirs: &[Direction],
) -> PerturbationOutcome {
    let mut bundle = ProbeBundle::new(base, dirs);
    for s in steps {
        bundle.advance(s);
    }
    bundle.verdict()
}
