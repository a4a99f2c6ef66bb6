//! Exact coefficient arithmetic, sparse polynomials and identity testing.

mod field;
mod pit;
mod poly;

pub use field::{Field, Fp, Lanes, Rational, Ring, LANES, MODULUS};
pub use pit::{
    degree_limit, eval_at, eval_many, pit_equal, poly_expand_small, random_points, Evaluable,
    ExpandSmall, Verdict,
};
pub use poly::{Assignment, LanePoints, Monomial, SparsePoly, Symbolic, Valuation, Var, Weight};
