//! Exact scalar rings.
//!
//! [`Laurent`] holds integer Laurent polynomials in one variable. Spin
//! weights `exp(t * s)` are written as `u^s` with `u = e^t`; polynomials in
//! `t` with nonnegative exponents live in the same type.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{Map, Value};

/// Commutative ring with exact equality.
pub trait Ring: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add_ref(&self, other: &Self) -> Self;
    fn mul_ref(&self, other: &Self) -> Self;
    fn add_assign_ref(&mut self, other: &Self) {
        *self = self.add_ref(other);
    }
}

impl Ring for BigInt {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add_ref(&self, other: &Self) -> Self {
        self + other
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
    fn add_assign_ref(&mut self, other: &Self) {
        *self += other;
    }
}

/// Integer Laurent polynomial; no zero coefficients are stored.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Laurent {
    terms: BTreeMap<i64, BigInt>,
}

impl Laurent {
    pub fn zero() -> Self {
        Laurent::default()
    }

    pub fn one() -> Self {
        Laurent::monomial(0, 1)
    }

    pub fn constant<C: Into<BigInt>>(c: C) -> Self {
        Laurent::monomial(0, c)
    }

    /// The variable itself.
    pub fn var() -> Self {
        Laurent::monomial(1, 1)
    }

    pub fn monomial<C: Into<BigInt>>(exponent: i64, coeff: C) -> Self {
        let mut l = Laurent::zero();
        l.add_term(exponent, coeff.into());
        l
    }

    pub fn from_terms<I, C>(terms: I) -> Self
    where
        I: IntoIterator<Item = (i64, C)>,
        C: Into<BigInt>,
    {
        let mut l = Laurent::zero();
        for (e, c) in terms {
            l.add_term(e, c.into());
        }
        l
    }

    pub fn add_term(&mut self, exponent: i64, coeff: BigInt) {
        if Zero::is_zero(&coeff) {
            return;
        }
        let slot = self.terms.entry(exponent).or_insert_with(<BigInt as Zero>::zero);
        *slot += coeff;
        if Zero::is_zero(slot) {
            self.terms.remove(&exponent);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exponent: i64) -> BigInt {
        self.terms.get(&exponent).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &BigInt)> {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    pub fn min_exponent(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn max_exponent(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    /// Value at `u = 1` (the sum of coefficients).
    pub fn eval_at_one(&self) -> BigInt {
        self.terms.values().sum()
    }

    pub fn eval_f64(&self, u: f64) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| c.to_f64().unwrap_or(f64::NAN) * u.powi(*e as i32))
            .sum()
    }

    /// Substitute `u -> u^k`.
    pub fn substitute_power(&self, k: i64) -> Self {
        Laurent::from_terms(self.terms.iter().map(|(e, c)| (e * k, c.clone())))
    }

    /// Substitute `u -> 1/u`.
    pub fn reflect(&self) -> Self {
        self.substitute_power(-1)
    }

    pub fn is_palindromic(&self) -> bool {
        *self == self.reflect()
    }

    pub fn scale<C: Into<BigInt>>(&self, c: C) -> Self {
        let c = c.into();
        Laurent::from_terms(self.terms.iter().map(|(e, x)| (*e, x * &c)))
    }

    /// Exact division by an integer, if every coefficient is divisible.
    pub fn div_exact<C: Into<BigInt>>(&self, c: C) -> Option<Self> {
        let c = c.into();
        if Zero::is_zero(&c) {
            return None;
        }
        let mut out = Laurent::zero();
        for (e, x) in &self.terms {
            if !Zero::is_zero(&(x % &c)) {
                return None;
            }
            out.add_term(*e, x / &c);
        }
        Some(out)
    }

    /// Every exponent is even.
    pub fn is_even(&self) -> bool {
        self.terms.keys().all(|e| e % 2 == 0)
    }

    /// `{"exponent": coefficient}` map; coefficients beyond i64 become strings.
    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        for (e, c) in &self.terms {
            let v = match c.to_i64() {
                Some(i) => Value::from(i),
                None => Value::from(c.to_string()),
            };
            m.insert(e.to_string(), v);
        }
        Value::Object(m)
    }

    pub fn from_json(v: &Value) -> Option<Self> {
        let obj = v.as_object()?;
        let mut out = Laurent::zero();
        for (k, c) in obj {
            let e: i64 = k.parse().ok()?;
            let c: BigInt = match c {
                Value::Number(n) => BigInt::from(n.as_i64()?),
                Value::String(s) => s.parse().ok()?,
                _ => return None,
            };
            out.add_term(e, c);
        }
        Some(out)
    }
}

impl serde::Serialize for Laurent {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl Ring for Laurent {
    fn zero() -> Self {
        Laurent::zero()
    }
    fn one() -> Self {
        Laurent::one()
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn add_ref(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign_ref(other);
        out
    }
    fn mul_ref(&self, other: &Self) -> Self {
        let mut out = Laurent::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                out.add_term(e1 + e2, c1 * c2);
            }
        }
        out
    }
    fn add_assign_ref(&mut self, other: &Self) {
        for (e, c) in &other.terms {
            self.add_term(*e, c.clone());
        }
    }
}

impl Add for Laurent {
    type Output = Laurent;
    fn add(self, rhs: Laurent) -> Laurent {
        self.add_ref(&rhs)
    }
}

impl<'a> Add<&'a Laurent> for &'a Laurent {
    type Output = Laurent;
    fn add(self, rhs: &Laurent) -> Laurent {
        self.add_ref(rhs)
    }
}

impl AddAssign<&Laurent> for Laurent {
    fn add_assign(&mut self, rhs: &Laurent) {
        self.add_assign_ref(rhs);
    }
}

impl Mul for Laurent {
    type Output = Laurent;
    fn mul(self, rhs: Laurent) -> Laurent {
        self.mul_ref(&rhs)
    }
}

impl<'a> Mul<&'a Laurent> for &'a Laurent {
    type Output = Laurent;
    fn mul(self, rhs: &Laurent) -> Laurent {
        self.mul_ref(rhs)
    }
}

impl Neg for Laurent {
    type Output = Laurent;
    fn neg(self) -> Laurent {
        self.scale(-1)
    }
}

impl Sub for Laurent {
    type Output = Laurent;
    fn sub(self, rhs: Laurent) -> Laurent {
        self + (-rhs)
    }
}

impl fmt::Debug for Laurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Laurent({self})")
    }
}

impl fmt::Display for Laurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let unit = mag.is_one();
            match *e {
                0 => write!(f, "{mag}")?,
                1 if unit => write!(f, "u")?,
                1 => write!(f, "{mag}u")?,
                _ if unit => write!(f, "u^{e}")?,
                _ => write!(f, "{mag}u^{e}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn arb_laurent() -> impl Strategy<Value = Laurent> {
        proptest::collection::vec((-6i64..=6, -20i64..=20), 0..6).prop_map(Laurent::from_terms)
    }

    proptest! {
        #[test]
        fn ring_laws(a in arb_laurent(), b in arb_laurent(), c in arb_laurent()) {
            prop_assert_eq!(a.add_ref(&b), b.add_ref(&a));
            prop_assert_eq!(a.mul_ref(&b), b.mul_ref(&a));
            prop_assert_eq!(a.add_ref(&b).add_ref(&c), a.add_ref(&b.add_ref(&c)));
            prop_assert_eq!(a.mul_ref(&b).mul_ref(&c), a.mul_ref(&b.mul_ref(&c)));
            prop_assert_eq!(a.mul_ref(&b.add_ref(&c)), a.mul_ref(&b).add_ref(&a.mul_ref(&c)));
            prop_assert_eq!(a.mul_ref(&Laurent::one()), a.clone());
            prop_assert_eq!(a.add_ref(&Laurent::zero()), a.clone());
            prop_assert!((a.clone() - a.clone()).is_zero());
        }

        #[test]
        fn evaluation_is_a_homomorphism(a in arb_laurent(), b in arb_laurent()) {
            prop_assert_eq!(a.mul_ref(&b).eval_at_one(), a.eval_at_one() * b.eval_at_one());
            prop_assert_eq!(a.add_ref(&b).eval_at_one(), a.eval_at_one() + b.eval_at_one());
            let k = 2;
            prop_assert_eq!(a.mul_ref(&b).substitute_power(k), a.substitute_power(k).mul_ref(&b.substitute_power(k)));
        }

        #[test]
        fn json_roundtrip(a in arb_laurent()) {
            prop_assert_eq!(Laurent::from_json(&a.to_json()).unwrap(), a);
        }
    }

    #[test]
    fn no_zero_coefficients() {
        let a = Laurent::from_terms([(2, 3), (2, -3), (1, 0)]);
        assert!(a.is_zero());
        assert_eq!(a.to_string(), "0");
    }

    #[test]
    fn display() {
        let a = Laurent::from_terms([(2, 1), (0, 3), (-1, -2), (1, 1)]);
        assert_eq!(a.to_string(), "u^2 + u + 3 - 2u^-1");
        assert_eq!(Laurent::monomial(6, 2).to_string(), "2u^6");
    }

    #[test]
    fn palindrome_and_division() {
        let a = Laurent::from_terms([(3, 2), (-3, 2), (0, 4)]);
        assert!(a.is_palindromic());
        assert_eq!(a.div_exact(2).unwrap(), Laurent::from_terms([(3, 1), (-3, 1), (0, 2)]));
        assert!(a.div_exact(4).is_none());
        assert!(!Laurent::var().is_palindromic());
    }
}
