//! Matrix entry types: `Complex64` for float mode and [`Surd`] for exact mode.

use std::collections::BTreeMap;
use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::{Signed, ToPrimitive, Zero};

pub trait Scalar:
    Clone
    + PartialEq
    + Debug
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn from_int(i: i64) -> Self;
    /// `√(num/den)`
    fn sqrt_ratio(num: u64, den: u64) -> Self;
    fn conj(&self) -> Self;
    /// `|x|` as a float.
    fn magnitude(&self) -> f64;
}

impl Scalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn from_int(i: i64) -> Self {
        Complex64::new(i as f64, 0.0)
    }
    fn sqrt_ratio(num: u64, den: u64) -> Self {
        Complex64::new((num as f64 / den as f64).sqrt(), 0.0)
    }
    fn conj(&self) -> Self {
        Complex64::conj(self)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

/// Exact real number `Σ_s q_s √s` with `s` squarefree and `q_s` rational.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Surd(BTreeMap<u64, Rational64>);

/// `n = a² s` with `s` squarefree.
fn split_square(mut n: u64) -> (u64, u64) {
    let mut a = 1;
    let mut s = 1;
    let mut p = 2;
    while p * p <= n {
        let mut e = 0;
        while n.is_multiple_of(p) {
            n /= p;
            e += 1;
        }
        a *= p.pow(e / 2);
        if e % 2 == 1 {
            s *= p;
        }
        p += 1;
    }
    (a, s * n)
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl Surd {
    pub fn rational(q: Rational64) -> Self {
        let mut m = BTreeMap::new();
        if !q.is_zero() {
            m.insert(1, q);
        }
        Surd(m)
    }

    fn push(&mut self, s: u64, q: Rational64) {
        let e = self.0.entry(s).or_insert_with(Rational64::zero);
        *e += q;
        if e.is_zero() {
            self.0.remove(&s);
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.0
            .iter()
            .map(|(s, q)| q.to_f64().unwrap_or(f64::NAN) * (*s as f64).sqrt())
            .sum()
    }

    pub fn terms(&self) -> &BTreeMap<u64, Rational64> {
        &self.0
    }
}

impl Add for Surd {
    type Output = Surd;
    fn add(mut self, o: Surd) -> Surd {
        for (s, q) in o.0 {
            self.push(s, q);
        }
        self
    }
}

impl Sub for Surd {
    type Output = Surd;
    fn sub(self, o: Surd) -> Surd {
        self + (-o)
    }
}

impl Neg for Surd {
    type Output = Surd;
    fn neg(self) -> Surd {
        Surd(self.0.into_iter().map(|(s, q)| (s, -q)).collect())
    }
}

impl Mul for Surd {
    type Output = Surd;
    fn mul(self, o: Surd) -> Surd {
        let mut out = Surd::default();
        for (s1, q1) in &self.0 {
            for (s2, q2) in &o.0 {
                let g = gcd(*s1, *s2);
                let s = (s1 / g) * (s2 / g);
                out.push(s, q1 * q2 * Rational64::from_integer(g as i64));
            }
        }
        out
    }
}

impl Scalar for Surd {
    fn zero() -> Self {
        Surd::default()
    }
    fn one() -> Self {
        Surd::rational(Rational64::from_integer(1))
    }
    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }
    fn from_int(i: i64) -> Self {
        Surd::rational(Rational64::from_integer(i))
    }
    fn sqrt_ratio(num: u64, den: u64) -> Self {
        if num == 0 {
            return Surd::default();
        }
        let (a, s) = split_square(num * den);
        let mut out = Surd::default();
        out.push(s, Rational64::new(a as i64, den as i64));
        out
    }
    fn conj(&self) -> Self {
        self.clone()
    }
    fn magnitude(&self) -> f64 {
        if self.0.is_empty() {
            0.0
        } else if self.0.len() == 1 {
            let (s, q) = self.0.iter().next().unwrap();
            q.abs().to_f64().unwrap_or(f64::NAN) * (*s as f64).sqrt()
        } else {
            self.to_f64().abs()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn surd_arithmetic() {
        let r2 = Surd::sqrt_ratio(2, 1);
        assert_eq!(r2.clone() * r2.clone(), Surd::from_int(2));
        let r6 = Surd::sqrt_ratio(3, 2) * Surd::sqrt_ratio(2, 1);
        assert_eq!(r6, Surd::from_int(1) * Surd::sqrt_ratio(3, 1));
        assert_eq!(Surd::sqrt_ratio(8, 2), Surd::from_int(2));
        assert!((Surd::sqrt_ratio(5, 3).to_f64() - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert!((r2.clone() - r2).is_zero());
    }
}
