//! Variables, assignments and sparse multivariate polynomials over [`Fp`].

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::field::{Field, Fp, Lanes, Ring, LANES};
use crate::{Error, Result};

/// Variable `X_i`; indices start at 1.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct Var(pub u32);

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "X{}", self.0)
    }
}

/// Maps variables (and integer constants) into a ring.
pub trait Valuation<R: Ring> {
    fn var(&self, v: Var) -> R;

    fn constant(&self, c: i64) -> R {
        R::from_i64(c)
    }
}

/// Point `X_i := values[i - 1]`.
#[derive(Clone, PartialEq, Debug)]
pub struct Assignment<F> {
    values: Vec<F>,
}

impl<F: Field> Assignment<F> {
    pub fn new(values: Vec<F>) -> Self {
        Assignment { values }
    }

    pub fn values(&self) -> &[F] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Errors unless every variable `X_1..X_n` has a value.
    pub fn check_covers(&self, n_vars: usize) -> Result<()> {
        if self.values.len() < n_vars {
            return Err(Error::Assignment {
                got: self.values.len(),
                needed: n_vars,
            });
        }
        Ok(())
    }
}

impl Assignment<Fp> {
    pub fn from_u64s(values: &[u64]) -> Self {
        Assignment::new(values.iter().map(|&v| Fp::new(v)).collect())
    }
}

impl<F: Field> Valuation<F> for Assignment<F> {
    fn var(&self, v: Var) -> F {
        self.values[v.0 as usize - 1].clone()
    }
}

/// `LANES` assignments evaluated together.
pub struct LanePoints<'a, F> {
    points: &'a [Assignment<F>; LANES],
}

impl<'a, F> LanePoints<'a, F> {
    pub fn new(points: &'a [Assignment<F>; LANES]) -> Self {
        LanePoints { points }
    }
}

impl<F: Field> Valuation<Lanes<F>> for LanePoints<'_, F> {
    fn var(&self, v: Var) -> Lanes<F> {
        Lanes(std::array::from_fn(|k| self.points[k].var(v)))
    }
}

/// Valuation sending every variable to the polynomial `X_i` itself.
pub struct Symbolic;

impl Valuation<SparsePoly> for Symbolic {
    fn var(&self, v: Var) -> SparsePoly {
        SparsePoly::var(v)
    }
}

/// Product of variable powers, stored sparsely as `(var, exponent)` pairs
/// sorted by variable with positive exponents.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct Monomial(Vec<(u32, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: Var) -> Self {
        Monomial(vec![(v.0, 1)])
    }

    pub fn from_powers(mut powers: Vec<(u32, u32)>) -> Self {
        powers.retain(|&(_, e)| e > 0);
        powers.sort_unstable();
        let mut merged: Vec<(u32, u32)> = Vec::with_capacity(powers.len());
        for (v, e) in powers {
            match merged.last_mut() {
                Some(last) if last.0 == v => last.1 += e,
                _ => merged.push((v, e)),
            }
        }
        Monomial(merged)
    }

    pub fn powers(&self) -> &[(u32, u32)] {
        &self.0
    }

    pub fn degree(&self) -> u64 {
        self.0.iter().map(|&(_, e)| e as u64).sum()
    }

    pub fn mul(&self, rhs: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &rhs.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((a[i].0, a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    pub fn eval(&self, point: &Assignment<Fp>) -> Fp {
        self.0.iter().fold(Fp::ONE, |acc, &(v, e)| {
            acc * point.var(Var(v)).pow(e as u64)
        })
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (k, &(v, e)) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, "*")?;
            }
            if e == 1 {
                write!(f, "X{v}")?;
            } else {
                write!(f, "X{v}^{e}")?;
            }
        }
        Ok(())
    }
}

/// Sparse polynomial over [`Fp`]. The term map never stores a zero
/// coefficient, so equal polynomials have identical maps.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct SparsePoly {
    terms: BTreeMap<Monomial, Fp>,
}

impl SparsePoly {
    pub fn constant(c: Fp) -> Self {
        let mut terms = BTreeMap::new();
        if c != Fp::ZERO {
            terms.insert(Monomial::one(), c);
        }
        SparsePoly { terms }
    }

    pub fn var(v: Var) -> Self {
        Self::term(Monomial::var(v), Fp::ONE)
    }

    pub fn term(m: Monomial, c: Fp) -> Self {
        let mut terms = BTreeMap::new();
        if c != Fp::ZERO {
            terms.insert(m, c);
        }
        SparsePoly { terms }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Fp)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, m: &Monomial) -> Fp {
        self.terms.get(m).copied().unwrap_or(Fp::ZERO)
    }

    pub fn total_degree(&self) -> u64 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn add_term(&mut self, m: Monomial, c: Fp) {
        if c == Fp::ZERO {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(slot) => {
                slot.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut slot) => {
                let sum = *slot.get() + c;
                if sum == Fp::ZERO {
                    slot.remove();
                } else {
                    *slot.get_mut() = sum;
                }
            }
        }
    }

    pub fn eval(&self, point: &Assignment<Fp>) -> Fp {
        self.terms
            .iter()
            .fold(Fp::ZERO, |acc, (m, &c)| acc + c * m.eval(point))
    }

    /// Largest variable index appearing in the polynomial.
    pub fn max_var(&self) -> u32 {
        self.terms
            .keys()
            .flat_map(|m| m.powers().iter().map(|&(v, _)| v))
            .max()
            .unwrap_or(0)
    }

    /// Errors once the polynomial has more than `max_terms` terms.
    pub fn check_budget(&self, max_terms: usize) -> Result<()> {
        if self.terms.len() > max_terms {
            return Err(Error::BudgetExceeded {
                what: "polynomial terms",
                limit: max_terms,
            });
        }
        Ok(())
    }
}

impl Ring for SparsePoly {
    fn zero() -> Self {
        SparsePoly::default()
    }
    fn one() -> Self {
        SparsePoly::constant(Fp::ONE)
    }
    fn from_i64(c: i64) -> Self {
        SparsePoly::constant(Fp::from_i64(c))
    }
    fn add(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign(rhs);
        out
    }
    fn sub(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (m, &c) in &rhs.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }
    fn mul(&self, rhs: &Self) -> Self {
        let mut out = SparsePoly::default();
        for (ma, &ca) in &self.terms {
            for (mb, &cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn add_assign(&mut self, rhs: &Self) {
        for (m, &c) in &rhs.terms {
            self.add_term(m.clone(), c);
        }
    }
}

/// Lexicographic comparison of dense exponent vectors, larger first.
fn lex_desc(a: &Monomial, b: &Monomial) -> std::cmp::Ordering {
    use std::cmp::Ordering;
    let (a, b) = (a.powers(), b.powers());
    for k in 0..a.len().max(b.len()) {
        match (a.get(k), b.get(k)) {
            (Some(x), Some(y)) if x == y => continue,
            // A smaller variable index means a nonzero exponent where the other has zero.
            (Some(x), Some(y)) if x.0 != y.0 => return x.0.cmp(&y.0),
            (Some(x), Some(y)) => return y.1.cmp(&x.1),
            (Some(_), None) => return Ordering::Less,
            (None, Some(_)) => return Ordering::Greater,
            (None, None) => break,
        }
    }
    Ordering::Equal
}

impl fmt::Display for SparsePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        // Graded lexicographic order, highest degree first.
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by(|(a, _), (b, _)| b.degree().cmp(&a.degree()).then_with(|| lex_desc(a, b)));
        for (k, (m, c)) in terms.into_iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            match (c.signed(), m.powers().is_empty()) {
                (1, false) => write!(f, "{m}")?,
                (s, true) => write!(f, "{s}")?,
                (s, false) => write!(f, "{s}*{m}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(i: u32) -> SparsePoly {
        SparsePoly::var(Var(i))
    }

    #[test]
    fn canonical_after_cancellation() {
        let p = x(1).add(&x(2)).sub(&x(2));
        assert_eq!(p, x(1));
        assert!(x(1).sub(&x(1)).is_zero());
        assert_eq!(x(1).sub(&x(1)).num_terms(), 0);
    }

    #[test]
    fn product_and_eval() {
        // (X1 + X2)^2 = X1^2 + 2 X1 X2 + X2^2
        let s = x(1).add(&x(2));
        let sq = s.mul(&s);
        assert_eq!(sq.num_terms(), 3);
        assert_eq!(
            sq.coefficient(&Monomial::from_powers(vec![(1, 1), (2, 1)])),
            Fp::new(2)
        );
        assert_eq!(sq.eval(&Assignment::from_u64s(&[3, 4])), Fp::new(49));
        assert_eq!(sq.total_degree(), 2);
        assert_eq!(sq.to_string(), "X1^2 + 2*X1*X2 + X2^2");
    }

    #[test]
    fn monomial_merge() {
        let m = Monomial::from_powers(vec![(2, 1), (1, 2), (2, 3), (4, 0)]);
        assert_eq!(m.powers(), &[(1, 2), (2, 4)]);
        assert_eq!(m.degree(), 6);
    }

    #[test]
    fn assignment_coverage() {
        let a = Assignment::from_u64s(&[1, 2]);
        assert!(a.check_covers(2).is_ok());
        assert_eq!(
            a.check_covers(3),
            Err(Error::Assignment { got: 2, needed: 3 })
        );
    }
}

/// Leaf label shared by circuit inputs and program edges: a constant or a
/// variable.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Weight {
    Const(i64),
    Var(Var),
}

impl Weight {
    pub const ONE: Weight = Weight::Const(1);

    pub fn value<R: Ring, V: Valuation<R>>(&self, val: &V) -> R {
        match *self {
            Weight::Const(c) => val.constant(c),
            Weight::Var(v) => val.var(v),
        }
    }

    pub fn var_index(&self) -> u32 {
        match self {
            Weight::Var(v) => v.0,
            Weight::Const(_) => 0,
        }
    }

    pub fn degree(&self) -> u64 {
        match self {
            Weight::Var(_) => 1,
            Weight::Const(_) => 0,
        }
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Weight::Const(c) => write!(f, "{c}"),
            Weight::Var(v) => write!(f, "{v}"),
        }
    }
}
