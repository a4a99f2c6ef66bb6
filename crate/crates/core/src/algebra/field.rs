//! Coefficient rings: the Mersenne prime field, exact rationals, and a
//! lane-parallel wrapper used to evaluate several points in one pass.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, RngExt};

use crate::{Error, Result};

/// Commutative ring with unit. Every evaluator in the crate is generic over
/// this trait, so the same dynamic program runs over field elements,
/// symbolic polynomials or lane batches.
pub trait Ring: Clone + PartialEq + fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(c: i64) -> Self;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn is_zero(&self) -> bool;

    fn add_assign(&mut self, rhs: &Self) {
        *self = self.add(rhs);
    }

    fn is_one(&self) -> bool {
        *self == Self::one()
    }
}

/// A field we can sample from, used for identity testing.
pub trait Field: Ring + fmt::Display {
    /// log2 of the size of the set random points are drawn from.
    const SAMPLE_BITS: u32;

    fn inv(&self) -> Result<Self>;
    fn random<R: Rng + ?Sized>(rng: &mut R) -> Self;
}

/// Modulus of the default prime field, 2^61 - 1.
pub const MODULUS: u64 = (1 << 61) - 1;

/// Element of the prime field of order 2^61 - 1, stored as a residue in `[0, p)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Fp(u64);

impl Fp {
    pub const ZERO: Fp = Fp(0);
    pub const ONE: Fp = Fp(1);

    pub fn new(value: u64) -> Self {
        Fp(value % MODULUS)
    }

    pub fn value(self) -> u64 {
        self.0
    }

    fn reduce(x: u128) -> u64 {
        // x < 2^122: fold the high bits twice.
        let folded = (x as u64 & MODULUS) + (x >> 61) as u64;
        let folded = (folded & MODULUS) + (folded >> 61);
        if folded >= MODULUS {
            folded - MODULUS
        } else {
            folded
        }
    }

    pub fn pow(self, mut exp: u64) -> Fp {
        let mut base = self;
        let mut acc = Fp::ONE;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            exp >>= 1;
        }
        acc
    }

    /// Signed representative in `(-p/2, p/2]`, convenient for display.
    pub fn signed(self) -> i128 {
        if self.0 > MODULUS / 2 {
            self.0 as i128 - MODULUS as i128
        } else {
            self.0 as i128
        }
    }
}

impl std::ops::Add for Fp {
    type Output = Fp;
    fn add(self, rhs: Fp) -> Fp {
        let s = self.0 + rhs.0;
        Fp(if s >= MODULUS { s - MODULUS } else { s })
    }
}

impl std::ops::Sub for Fp {
    type Output = Fp;
    fn sub(self, rhs: Fp) -> Fp {
        Fp(if self.0 >= rhs.0 {
            self.0 - rhs.0
        } else {
            self.0 + MODULUS - rhs.0
        })
    }
}

impl std::ops::Mul for Fp {
    type Output = Fp;
    fn mul(self, rhs: Fp) -> Fp {
        Fp(Fp::reduce(self.0 as u128 * rhs.0 as u128))
    }
}

impl std::ops::Neg for Fp {
    type Output = Fp;
    fn neg(self) -> Fp {
        Fp::ZERO - self
    }
}

impl fmt::Debug for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Parses a decimal integer (any sign or size, reduced mod p) or a
/// fraction `a/b` with `b` invertible.
impl FromStr for Fp {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let int = |t: &str| -> Result<Fp> {
            let v: BigInt = t
                .trim()
                .parse()
                .map_err(|_| Error::Invalid(format!("{t:?} is not an integer")))?;
            let r = ((v % MODULUS) + MODULUS) % MODULUS;
            Ok(Fp(u64::try_from(r).expect("reduced below the modulus")))
        };
        match text.split_once('/') {
            Some((a, b)) => Ok(int(a)? * int(b)?.inv()?),
            None => int(text),
        }
    }
}

impl Ring for Fp {
    fn zero() -> Self {
        Fp::ZERO
    }
    fn one() -> Self {
        Fp::ONE
    }
    fn from_i64(c: i64) -> Self {
        Fp((c as i128).rem_euclid(MODULUS as i128) as u64)
    }
    fn add(&self, rhs: &Self) -> Self {
        *self + *rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        *self - *rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        *self * *rhs
    }
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
}

impl Field for Fp {
    const SAMPLE_BITS: u32 = 61;

    fn inv(&self) -> Result<Self> {
        if self.0 == 0 {
            return Err(Error::InverseOfZero);
        }
        Ok(self.pow(MODULUS - 2))
    }

    fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Fp(rng.random_range(0..MODULUS))
    }
}

/// Exact rational number, for runs that must not depend on a modulus.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Rational(pub BigRational);

impl Rational {
    pub fn from_integer(v: i64) -> Self {
        Rational(BigRational::from_integer(BigInt::from(v)))
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl FromStr for Rational {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let t = text.trim();
        if t.ends_with("/0") {
            return Err(Error::InverseOfZero);
        }
        t.parse::<BigRational>()
            .map(Rational)
            .map_err(|_| Error::Invalid(format!("{text:?} is not a rational number")))
    }
}

impl Ring for Rational {
    fn zero() -> Self {
        Rational(BigRational::zero())
    }
    fn one() -> Self {
        Rational(BigRational::one())
    }
    fn from_i64(c: i64) -> Self {
        Rational::from_integer(c)
    }
    fn add(&self, rhs: &Self) -> Self {
        Rational(&self.0 + &rhs.0)
    }
    fn sub(&self, rhs: &Self) -> Self {
        Rational(&self.0 - &rhs.0)
    }
    fn mul(&self, rhs: &Self) -> Self {
        Rational(&self.0 * &rhs.0)
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl Field for Rational {
    const SAMPLE_BITS: u32 = 32;

    fn inv(&self) -> Result<Self> {
        if self.0.is_zero() {
            return Err(Error::InverseOfZero);
        }
        Ok(Rational(self.0.recip()))
    }

    fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let v: i64 = rng.random_range(-(1i64 << 31)..(1i64 << 31));
        Rational::from_integer(v)
    }
}

impl Rational {
    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }
}

/// Number of evaluation points carried by one [`Lanes`] value.
pub const LANES: usize = 8;

/// Componentwise ring of `LANES` independent values. Evaluating an object
/// over `Lanes<F>` evaluates it at `LANES` points for the price of one
/// structural traversal.
#[derive(Clone, PartialEq, Debug)]
pub struct Lanes<F>(pub [F; LANES]);

impl<F: Ring> Ring for Lanes<F> {
    fn zero() -> Self {
        Lanes(std::array::from_fn(|_| F::zero()))
    }
    fn one() -> Self {
        Lanes(std::array::from_fn(|_| F::one()))
    }
    fn from_i64(c: i64) -> Self {
        let v = F::from_i64(c);
        Lanes(std::array::from_fn(|_| v.clone()))
    }
    fn add(&self, rhs: &Self) -> Self {
        Lanes(std::array::from_fn(|k| self.0[k].add(&rhs.0[k])))
    }
    fn sub(&self, rhs: &Self) -> Self {
        Lanes(std::array::from_fn(|k| self.0[k].sub(&rhs.0[k])))
    }
    fn mul(&self, rhs: &Self) -> Self {
        Lanes(std::array::from_fn(|k| self.0[k].mul(&rhs.0[k])))
    }
    fn is_zero(&self) -> bool {
        self.0.iter().all(Ring::is_zero)
    }
    fn add_assign(&mut self, rhs: &Self) {
        for (a, b) in self.0.iter_mut().zip(rhs.0.iter()) {
            a.add_assign(b);
        }
    }
}

/// Boolean semiring (or/and). Used for structural "is this entry
/// identically empty" passes; `sub` is or, which is only sound for callers
/// that never subtract.
impl Ring for bool {
    fn zero() -> Self {
        false
    }
    fn one() -> Self {
        true
    }
    fn from_i64(c: i64) -> Self {
        c != 0
    }
    fn add(&self, rhs: &Self) -> Self {
        *self || *rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        *self || *rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        *self && *rhs
    }
    fn is_zero(&self) -> bool {
        !*self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn wraparound_identity_inverse() {
        assert_eq!(Fp::new(MODULUS - 1) + Fp::ONE, Fp::ZERO);
        let x = Fp::new(123_456_789);
        assert_eq!(Fp::ONE * x, x);
        assert_eq!(Fp::new(2).inv().unwrap() * Fp::new(2), Fp::ONE);
        assert_eq!(Fp::ZERO.inv(), Err(Error::InverseOfZero));
        assert_eq!(Rational::zero().inv(), Err(Error::InverseOfZero));
    }

    #[test]
    fn negative_constants_reduce() {
        assert_eq!(Fp::from_i64(-1), Fp::new(MODULUS - 1));
        assert_eq!(Fp::from_i64(-1).signed(), -1);
    }

    #[test]
    fn parsing() {
        assert_eq!("-1".parse::<Fp>().unwrap(), Fp::new(MODULUS - 1));
        assert_eq!("2305843009213693953".parse::<Fp>().unwrap(), Fp::new(2));
        assert_eq!("1/2".parse::<Fp>().unwrap() * Fp::new(2), Fp::ONE);
        assert_eq!("1/0".parse::<Fp>(), Err(Error::InverseOfZero));
        assert!("x".parse::<Fp>().is_err());
        assert_eq!("-3/6".parse::<Rational>().unwrap().to_string(), "-1/2");
        assert_eq!("1/0".parse::<Rational>(), Err(Error::InverseOfZero));
    }

    fn fp() -> impl Strategy<Value = Fp> {
        (0..MODULUS).prop_map(Fp::new)
    }

    proptest! {
        #[test]
        fn field_axioms(a in fp(), b in fp(), c in fp()) {
            prop_assert_eq!(a + b, b + a);
            prop_assert_eq!(a * b, b * a);
            prop_assert_eq!((a + b) * c, a * c + b * c);
            prop_assert_eq!((a * b) * c, a * (b * c));
            prop_assert_eq!(a - a, Fp::ZERO);
            if a != Fp::ZERO {
                prop_assert_eq!(a * a.inv().unwrap(), Fp::ONE);
            }
        }

        #[test]
        fn mul_matches_u128_reference(a in fp(), b in fp()) {
            let want = (a.value() as u128 * b.value() as u128 % MODULUS as u128) as u64;
            prop_assert_eq!((a * b).value(), want);
        }
    }
}
