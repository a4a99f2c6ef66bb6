//! Randomized polynomial identity testing.
//!
//! Two objects are compared by evaluating both at the same uniformly random
//! points. Points come from a ChaCha8 stream seeded with the caller's 64-bit
//! seed, so a verdict is a deterministic function of `(f, g, trials, seed)`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::field::{Field, Lanes, Ring, LANES};
use super::poly::{Assignment, LanePoints, SparsePoly, Valuation};
use crate::{Error, Result};

/// Anything that computes a polynomial and can be evaluated in any ring.
pub trait Evaluable {
    /// Number of variables `X_1..X_n` the object may reference.
    fn num_vars(&self) -> usize;

    /// Upper bound on the total degree of the computed polynomial.
    fn degree_bound(&self) -> u64;

    fn evaluate<R: Ring, V: Valuation<R>>(&self, val: &V) -> Result<R>;
}

/// Objects small enough to expand into an explicit polynomial.
pub trait ExpandSmall {
    fn expand_small(&self, max_terms: usize) -> Result<SparsePoly>;
}

/// Fully expanded polynomial of `obj`, or a budget error when it has more
/// than `max_terms` terms (callers then fall back to [`pit_equal`]).
pub fn poly_expand_small<T: ExpandSmall + ?Sized>(obj: &T, max_terms: usize) -> Result<SparsePoly> {
    obj.expand_small(max_terms)
}

/// Evaluates `obj` at a single point.
pub fn eval_at<F: Field, T: Evaluable + ?Sized>(obj: &T, point: &Assignment<F>) -> Result<F> {
    point.check_covers(obj.num_vars())?;
    obj.evaluate(point)
}

/// Outcome of an identity test.
#[derive(Clone, Debug, PartialEq)]
pub enum Verdict<F> {
    /// No distinguishing point among `trials` random points.
    EqualWhp { trials: usize },
    /// `witness` distinguishes the two objects.
    Unequal {
        witness: Assignment<F>,
        left: F,
        right: F,
    },
}

impl<F> Verdict<F> {
    pub fn is_equal(&self) -> bool {
        matches!(self, Verdict::EqualWhp { .. })
    }
}

/// Degrees above `2^(SAMPLE_BITS - 20)` are rejected: beyond that a single
/// trial's false-agreement probability is no longer negligible.
pub fn degree_limit<F: Field>() -> u64 {
    1u64 << (F::SAMPLE_BITS - 20)
}

/// Draws `trials` points over `n_vars` variables from the seeded stream.
pub fn random_points<F: Field>(n_vars: usize, trials: usize, seed: u64) -> Vec<Assignment<F>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..trials)
        .map(|_| Assignment::new((0..n_vars).map(|_| F::random(&mut rng)).collect()))
        .collect()
}

/// Evaluates `obj` at every point, `LANES` points per traversal.
pub fn eval_many<F: Field, T: Evaluable + ?Sized>(obj: &T, points: &[Assignment<F>]) -> Result<Vec<F>> {
    let mut out = Vec::with_capacity(points.len());
    for chunk in points.chunks(LANES) {
        for p in chunk {
            p.check_covers(obj.num_vars())?;
        }
        let lanes: [Assignment<F>; LANES] =
            std::array::from_fn(|k| chunk.get(k).unwrap_or(&chunk[0]).clone());
        let value: Lanes<F> = obj.evaluate(&LanePoints::new(&lanes))?;
        out.extend(value.0.into_iter().take(chunk.len()));
    }
    Ok(out)
}

/// Schwartz–Zippel identity test of `f` against `g`.
pub fn pit_equal<F, A, B>(f: &A, g: &B, trials: usize, seed: u64) -> Result<Verdict<F>>
where
    F: Field,
    A: Evaluable + ?Sized,
    B: Evaluable + ?Sized,
{
    let degree = f.degree_bound().max(g.degree_bound());
    let limit = degree_limit::<F>();
    if degree > limit {
        return Err(Error::DegreeTooLarge { degree, limit });
    }
    let n_vars = f.num_vars().max(g.num_vars());
    let points = random_points::<F>(n_vars, trials, seed);
    let left = eval_many(f, &points)?;
    let right = eval_many(g, &points)?;
    for ((point, l), r) in points.into_iter().zip(left).zip(right) {
        if l != r {
            return Ok(Verdict::Unequal {
                witness: point,
                left: l,
                right: r,
            });
        }
    }
    Ok(Verdict::EqualWhp { trials })
}

impl Evaluable for SparsePoly {
    fn num_vars(&self) -> usize {
        self.max_var() as usize
    }

    fn degree_bound(&self) -> u64 {
        self.total_degree()
    }

    fn evaluate<R: Ring, V: Valuation<R>>(&self, val: &V) -> Result<R> {
        let mut acc = R::zero();
        for (m, c) in self.terms() {
            let mut t = val.constant(c.signed() as i64);
            for &(v, e) in m.powers() {
                let x = val.var(super::poly::Var(v));
                for _ in 0..e {
                    t = t.mul(&x);
                }
            }
            acc.add_assign(&t);
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{Fp, Rational, Var};

    fn x(i: u32) -> SparsePoly {
        SparsePoly::var(Var(i))
    }

    #[test]
    fn literal_equality() {
        let f = x(1).mul(&x(2)).add(&x(3));
        let v = pit_equal::<Fp, _, _>(&f, &f.clone(), 50, 7).unwrap();
        assert_eq!(v, Verdict::EqualWhp { trials: 50 });
    }

    #[test]
    fn sum_versus_product_has_witness() {
        let f = x(1).add(&x(2));
        let g = x(1).mul(&x(2));
        // Direct evaluation at X1 = X2 = 2 gives 4 = 4; at (2, 3) gives 5 vs 6.
        let p = Assignment::from_u64s(&[2, 3]);
        assert_ne!(f.eval(&p), g.eval(&p));
        match pit_equal::<Fp, _, _>(&f, &g, 10, 1).unwrap() {
            Verdict::Unequal { witness, left, right } => {
                assert_eq!(f.eval(&witness), left);
                assert_eq!(g.eval(&witness), right);
                assert_ne!(left, right);
            }
            other => panic!("expected a witness, got {other:?}"),
        }
    }

    #[test]
    fn symmetric_and_deterministic() {
        let f = x(1).mul(&x(1));
        let g = x(1).add(&x(1));
        let a = pit_equal::<Fp, _, _>(&f, &g, 20, 99).unwrap();
        let b = pit_equal::<Fp, _, _>(&g, &f, 20, 99).unwrap();
        let c = pit_equal::<Fp, _, _>(&f, &g, 20, 99).unwrap();
        assert_eq!(a, c);
        match (a, b) {
            (Verdict::Unequal { witness: w1, .. }, Verdict::Unequal { witness: w2, .. }) => {
                assert_eq!(w1, w2)
            }
            _ => panic!("both orders must be unequal"),
        }
    }

    #[test]
    fn rational_mode() {
        let f = x(1).add(&x(2)).mul(&x(1).add(&x(2)));
        let g = x(1).mul(&x(1)).add(&x(2).mul(&x(2))).add(&x(1).mul(&x(2)).add(&x(1).mul(&x(2))));
        assert!(pit_equal::<Rational, _, _>(&f, &g, 12, 3).unwrap().is_equal());
    }

    #[test]
    fn lanes_match_scalar_evaluation() {
        let f = x(1).mul(&x(2)).add(&x(2));
        let pts = random_points::<Fp>(2, 11, 5);
        let batch = eval_many(&f, &pts).unwrap();
        for (p, v) in pts.iter().zip(batch) {
            assert_eq!(f.eval(p), v);
        }
    }

    struct HugeDegree;
    impl Evaluable for HugeDegree {
        fn num_vars(&self) -> usize {
            1
        }
        fn degree_bound(&self) -> u64 {
            u64::MAX
        }
        fn evaluate<R: Ring, V: Valuation<R>>(&self, _: &V) -> Result<R> {
            Ok(R::zero())
        }
    }

    #[test]
    fn degree_safety_bound() {
        let err = pit_equal::<Fp, _, _>(&HugeDegree, &HugeDegree, 1, 0).unwrap_err();
        assert!(matches!(err, Error::DegreeTooLarge { .. }));
    }
}
