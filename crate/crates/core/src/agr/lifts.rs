//! Random rational lifts of residue points and their exact orbits.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exactnum::{reduce_rational, FpElem, Padic, Prime, Rational};
use crate::maps::{MapFamily, Point, ResiduePoint};

/// Exact height (bits per coordinate) above which orbits continue p-adically.
pub const HEIGHT_CAP_BITS: u64 = 16_384;
const PADIC_DIGITS: [u32; 4] = [64, 256, 1024, 4096];
const MAX_ATTEMPTS: u64 = 16;

/// p-adic exponents `(ex, ey)` of the perturbation, cycled over lifts.
const EXPONENTS: [(u32, u32); 7] = [(1, 1), (1, 2), (2, 1), (1, 1), (2, 2), (1, 3), (3, 1)];

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Folds a list of words into one seed.
pub fn hash_words(words: &[u64]) -> u64 {
    words.iter().fold(0x5eed_u64, |h, &w| mix64(h ^ mix64(w)))
}

fn coprime_denominator(rng: &mut ChaCha8Rng, p: u64) -> u64 {
    loop {
        let v: u64 = rng.gen_range(1..1u64 << 32);
        if !v.is_multiple_of(p) {
            return v;
        }
    }
}

fn lift_coordinate(rng: &mut ChaCha8Rng, residue: FpElem, e: u32) -> Rational {
    let p = residue.prime().get();
    let u: u64 = rng.gen_range(0..1u64 << 32);
    let v = coprime_denominator(rng, p);
    let scale = num_traits::pow(num_bigint::BigInt::from(p), e as usize);
    let r = Rational::new(scale * u, v).expect("nonzero denominator");
    &Rational::from_integer(residue.residue()) + &r
}

/// Draws a lift `x~ + p^ex u/v, y~ + p^ey u'/v'` of a finite residue point.
pub fn sample_lift(pt: (FpElem, FpElem), seed: u64, index: usize) -> Point {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (ex, ey) = EXPONENTS[index % EXPONENTS.len()];
    (lift_coordinate(&mut rng, pt.0, ex), lift_coordinate(&mut rng, pt.1, ey))
}

fn reduce_point(pt: &Point, p: Prime) -> ResiduePoint {
    (reduce_rational(&pt.0, p), reduce_rational(&pt.1, p))
}

/// A point of an orbit that is either exact or known to finite p-adic
/// precision.
#[derive(Clone, Debug)]
enum State {
    Exact(Point),
    Padic { from: Point, from_step: usize, level: usize, x: Padic, y: Padic },
    /// No precision level determines the orbit any further.
    Lost,
}

/// The lift's orbit hit an exact singularity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OrbitBlocked;

/// The reductions of one lift's orbit, extended one step at a time.
#[derive(Clone, Debug)]
pub struct LiftOrbit {
    family: MapFamily,
    prime: Prime,
    n0: i64,
    start: Point,
    state: State,
    /// `reductions[j]` is the reduction of the `j`-th iterate; `None` once
    /// p-adic precision no longer determines it.
    reductions: Vec<Option<ResiduePoint>>,
}

impl LiftOrbit {
    pub fn new(family: MapFamily, prime: Prime, n0: i64, start: Point) -> Self {
        let r = reduce_point(&start, prime);
        LiftOrbit { family, prime, n0, state: State::Exact(start.clone()), start, reductions: vec![Some(r)] }
    }

    pub fn start(&self) -> &Point {
        &self.start
    }

    pub fn len(&self) -> usize {
        self.reductions.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Reduction after `m` steps, if computed and determined.
    pub fn reduction(&self, m: usize) -> Option<ResiduePoint> {
        self.reductions.get(m).copied().flatten()
    }

    pub fn reductions(&self) -> &[Option<ResiduePoint>] {
        &self.reductions
    }

    pub fn uses_padic(&self) -> bool {
        matches!(self.state, State::Padic { .. } | State::Lost)
    }

    /// Advances to `m` steps.
    pub fn extend_to(&mut self, m: usize) -> Result<(), OrbitBlocked> {
        while self.len() < m {
            self.advance()?;
        }
        Ok(())
    }

    fn advance(&mut self) -> Result<(), OrbitBlocked> {
        let j = self.len();
        let n = self.n0 + j as i64;
        match &self.state {
            State::Exact(pt) => {
                let next = self.family.step_exact(n, pt).map_err(|_| OrbitBlocked)?;
                self.reductions.push(Some(reduce_point(&next, self.prime)));
                if next.0.height_bits().max(next.1.height_bits()) > HEIGHT_CAP_BITS {
                    self.state = self.padic_from(next, j + 1, 0);
                } else {
                    self.state = State::Exact(next);
                }
            }
            State::Padic { .. } => {
                let r = self.padic_step(n);
                self.reductions.push(r);
            }
            State::Lost => self.reductions.push(None),
        }
        Ok(())
    }

    fn padic_from(&self, from: Point, from_step: usize, level: usize) -> State {
        let k = PADIC_DIGITS[level];
        let x = Padic::from_rational(&from.0, self.prime, k);
        let y = Padic::from_rational(&from.1, self.prime, k);
        State::Padic { from, from_step, level, x, y }
    }

    /// One p-adic step; on precision loss, replays from the last exact
    /// point at higher precision.
    fn padic_step(&mut self, n: i64) -> Option<ResiduePoint> {
        loop {
            if let Some(r) = self.try_padic_step(n) {
                return Some(r);
            }
            if !self.escalate() {
                self.state = State::Lost;
                return None;
            }
        }
    }

    /// Moves to the next precision level and replays up to the current
    /// step. `false` when no level suffices.
    fn escalate(&mut self) -> bool {
        let State::Padic { from, from_step, level, .. } = &self.state else { return false };
        let (from, from_step, mut level) = (from.clone(), *from_step, *level);
        'levels: while level + 1 < PADIC_DIGITS.len() {
            level += 1;
            self.state = self.padic_from(from.clone(), from_step, level);
            for j in from_step..self.len() {
                if self.try_padic_step(self.n0 + j as i64).is_none() {
                    continue 'levels;
                }
            }
            return true;
        }
        false
    }

    fn try_padic_step(&mut self, n: i64) -> Option<ResiduePoint> {
        let State::Padic { from, from_step, level, x, y } = &self.state else { return None };
        let p = self.prime;
        let lvl = *level;
        let k = |c: &Rational| Padic::from_rational(c, p, PADIC_DIGITS[lvl]);
        let (num, den) = self.family.step_parts(n, x, y, k);
        let nx = num.mul(&den.inv().ok()?);
        let r = (nx.reduce()?, x.reduce()?);
        self.state = State::Padic { from: from.clone(), from_step: *from_step, level: lvl, x: nx, y: x.clone() };
        Some(r)
    }
}

/// Samples a lift whose exact orbit survives `steps` steps, resampling on
/// exact singularities. `None` after the attempt budget.
pub fn sample_orbit(
    family: &MapFamily,
    p: Prime,
    n: i64,
    pt: (FpElem, FpElem),
    seed: u64,
    index: usize,
    first_attempt: u64,
    steps: usize,
) -> Option<(LiftOrbit, u64)> {
    for attempt in first_attempt..MAX_ATTEMPTS {
        let s = hash_words(&[seed, pt.0.residue(), pt.1.residue(), n as u64, index as u64, attempt]);
        let start = sample_lift(pt, s, index);
        if !family.in_domain_exact(n, &start, p) {
            continue;
        }
        let mut orbit = LiftOrbit::new(family.clone(), p, n, start);
        if orbit.extend_to(steps).is_ok() {
            return Some((orbit, attempt));
        }
    }
    None
}
