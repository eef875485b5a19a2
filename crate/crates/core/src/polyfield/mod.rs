//! Polynomials and rational functions over `Q`, `F_p` and `F_p(t)`.

mod field;
mod gcd;
mod multipoly;
mod perturb;
mod ratfunc;
mod series;
mod unipoly;

pub use field::{Field, Fp, Q};
pub use gcd::{normalize, poly_gcd};
pub use multipoly::{Exp, MultiPoly};
pub use perturb::{
    perturbation_eval, Direction, LineProbe, PerturbationOutcome, ProbeBundle, StepPair, UniRF,
    MIN_DIRECTIONS,
};
pub use ratfunc::{
    evaluate_pair, evaluate_rf, minimal_form, reduce_map_component, reduce_rf, rf_compose,
    substitute_pair, Evaluation, MinimalFormWitness, PolyAlgebra, RationalFunction, Side,
};
pub use series::{eval_ratio, Laurent, PrecisionExhausted};
pub use unipoly::UniPoly;
