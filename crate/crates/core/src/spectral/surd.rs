//! Arithmetic in `Q(√d)` for a squarefree integer `d > 1`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::rational::{self, Rational};

/// `a + b√d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadSurd {
    pub a: Rational,
    pub b: Rational,
    pub d: BigInt,
}

impl QuadSurd {
    pub fn rational(a: Rational, d: BigInt) -> Self {
        Self { a, b: Rational::zero(), d }
    }

    pub fn add(&self, o: &Self) -> Self {
        debug_assert_eq!(self.d, o.d);
        Self { a: &self.a + &o.a, b: &self.b + &o.b, d: self.d.clone() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        debug_assert_eq!(self.d, o.d);
        let d = Rational::from_integer(self.d.clone());
        Self { a: &self.a * &o.a + &self.b * &o.b * d, b: &self.a * &o.b + &self.b * &o.a, d: self.d.clone() }
    }

    pub fn scale(&self, r: &Rational) -> Self {
        Self { a: &self.a * r, b: &self.b * r, d: self.d.clone() }
    }

    pub fn to_f64(&self) -> f64 {
        rational::to_f64(&self.a) + rational::to_f64(&self.b) * self.d.to_f64().unwrap_or(f64::NAN).sqrt()
    }
}

impl fmt::Display for QuadSurd {
    /// `(A ± B*sqrt(d))/C` over the common denominator.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = self.a.denom().lcm(self.b.denom());
        let scale = Rational::from_integer(c.clone());
        let a = (&self.a * &scale).to_integer();
        let b = (&self.b * &scale).to_integer();
        let sign = if b.is_negative() { '-' } else { '+' };
        let body = if b.abs().is_one() {
            format!("{a}{sign}sqrt({})", self.d)
        } else {
            format!("{a}{sign}{}*sqrt({})", b.abs(), self.d)
        };
        if c.is_one() {
            write!(f, "{body}")
        } else {
            write!(f, "({body})/{c}")
        }
    }
}

/// Returns `(s, d)` with `√r = s·√d`, `s` rational and `d` squarefree.
/// Uses trial division, so only for modest numerators and denominators.
pub fn sqrt_parts(r: &Rational) -> Option<(Rational, BigInt)> {
    if r.is_negative() {
        return None;
    }
    if r.is_zero() {
        return Some((Rational::zero(), BigInt::one()));
    }
    // √(p/q) = √(pq)/q
    let q = r.denom().clone();
    let pq = r.numer() * &q;
    let (square, free) = split_square(&pq)?;
    Some((Rational::new(square, q), free))
}

fn split_square(n: &BigInt) -> Option<(BigInt, BigInt)> {
    let mut rest = n.clone();
    let mut square = BigInt::one();
    let mut p = BigInt::from(2);
    let limit = BigInt::from(10_000_000u64);
    while &p * &p <= rest {
        if p > limit {
            return None;
        }
        let pp = &p * &p;
        while (&rest % &pp).is_zero() {
            rest /= &pp;
            square *= &p;
        }
        p += 1;
    }
    Some((square, rest))
}
