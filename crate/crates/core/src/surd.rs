//! Exact arithmetic in the ring generated by the rationals and square roots
//! of natural numbers.
//!
//! A [`Surd`] is a finite sum `Σ c_s √s` with rational `c_s` and square-free
//! radicands `s`. The representation is canonical (square-free keys, no zero
//! coefficients), so structural equality is numerical equality.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_rational::Ratio;
use num_traits::{One, Zero};

use crate::scalar::RadicalScalar;

type Q = Ratio<i128>;

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Surd {
    terms: BTreeMap<u64, Q>,
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Splits `k = a² s` with `s` square-free.
fn square_free_split(mut k: u64) -> (u64, u64) {
    let mut outside = 1u64;
    let mut inside = 1u64;
    let mut p = 2u64;
    while p * p <= k {
        let mut e = 0;
        while k.is_multiple_of(p) {
            k /= p;
            e += 1;
        }
        outside *= p.pow(e / 2);
        if e % 2 == 1 {
            inside *= p;
        }
        p += 1;
    }
    (outside, inside * k)
}

impl Surd {
    pub fn rational(num: i128, den: i128) -> Self {
        Self::from_q(Q::new(num, den))
    }

    pub fn integer(n: i128) -> Self {
        Self::rational(n, 1)
    }

    pub fn sqrt_of(k: u64) -> Self {
        if k == 0 {
            return Self::zero();
        }
        let (outside, inside) = square_free_split(k);
        let mut terms = BTreeMap::new();
        terms.insert(inside, Q::from_integer(outside as i128));
        Self { terms }
    }

    fn from_q(q: Q) -> Self {
        let mut terms = BTreeMap::new();
        if !q.is_zero() {
            terms.insert(1, q);
        }
        Self { terms }
    }

    fn accumulate(&mut self, radicand: u64, coeff: Q) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(radicand).or_insert_with(Q::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.terms.remove(&radicand);
        }
    }

    /// True when no irrational radicand remains.
    pub fn is_rational(&self) -> bool {
        self.terms.keys().all(|&s| s == 1)
    }

    /// The rational part, if the value is rational.
    pub fn as_rational(&self) -> Option<(i128, i128)> {
        if !self.is_rational() {
            return None;
        }
        let q = self.terms.get(&1).copied().unwrap_or_else(Q::zero);
        Some((*q.numer(), *q.denom()))
    }

    pub fn to_f64(&self) -> f64 {
        self.terms
            .iter()
            .map(|(&s, c)| (*c.numer() as f64 / *c.denom() as f64) * (s as f64).sqrt())
            .sum()
    }
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (s, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if *s == 1 {
                write!(f, "{c}")?;
            } else {
                write!(f, "{c}·√{s}")?;
            }
        }
        Ok(())
    }
}

impl Zero for Surd {
    fn zero() -> Self {
        Self::default()
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl One for Surd {
    fn one() -> Self {
        Self::integer(1)
    }
}

impl Add for Surd {
    type Output = Surd;
    fn add(mut self, rhs: Surd) -> Surd {
        self += rhs;
        self
    }
}

impl AddAssign for Surd {
    fn add_assign(&mut self, rhs: Surd) {
        for (s, c) in rhs.terms {
            self.accumulate(s, c);
        }
    }
}

impl Neg for Surd {
    type Output = Surd;
    fn neg(mut self) -> Surd {
        for c in self.terms.values_mut() {
            *c = -*c;
        }
        self
    }
}

impl Sub for Surd {
    type Output = Surd;
    fn sub(self, rhs: Surd) -> Surd {
        self + (-rhs)
    }
}

impl SubAssign for Surd {
    fn sub_assign(&mut self, rhs: Surd) {
        *self += -rhs;
    }
}

impl Mul for Surd {
    type Output = Surd;
    fn mul(self, rhs: Surd) -> Surd {
        let mut out = Surd::zero();
        for (&s1, c1) in &self.terms {
            for (&s2, c2) in &rhs.terms {
                let g = gcd(s1, s2);
                let radicand = (s1 / g) * (s2 / g);
                out.accumulate(radicand, *c1 * *c2 * Q::from_integer(g as i128));
            }
        }
        out
    }
}

impl MulAssign for Surd {
    fn mul_assign(&mut self, rhs: Surd) {
        *self = std::mem::take(self) * rhs;
    }
}

impl RadicalScalar for Surd {
    fn sqrt_of(k: u64) -> Self {
        Surd::sqrt_of(k)
    }
    fn ratio(num: i64, den: i64) -> Self {
        Surd::rational(num as i128, den as i128)
    }
    fn approx_f64(&self) -> f64 {
        self.to_f64()
    }
}
