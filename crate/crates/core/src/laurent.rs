//! Laurent polynomials in a single variable `c`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::scalar::Field;

/// `Σ a_k c^k` with integer `k` and no stored zero coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentPoly<T> {
    coefficients: BTreeMap<i64, T>,
}

impl<T: Field> LaurentPoly<T> {
    pub fn zero() -> Self {
        Self {
            coefficients: BTreeMap::new(),
        }
    }

    pub fn constant(a: T) -> Self {
        Self::monomial(a, 0)
    }

    pub fn monomial(a: T, exponent: i64) -> Self {
        let mut p = Self::zero();
        p.add_term(exponent, a);
        p
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (i64, T)>) -> Self {
        let mut p = Self::zero();
        for (k, a) in terms {
            p.add_term(k, a);
        }
        p
    }

    /// Adds `a c^k` in place.
    pub fn add_term(&mut self, exponent: i64, a: T) {
        if a.is_zero() {
            return;
        }
        let sum = match self.coefficients.remove(&exponent) {
            Some(b) => b + a,
            None => a,
        };
        if !sum.is_zero() {
            self.coefficients.insert(exponent, sum);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.is_empty()
    }

    pub fn coefficient(&self, exponent: i64) -> T {
        self.coefficients.get(&exponent).cloned().unwrap_or_else(T::zero)
    }

    /// Nonzero terms in ascending exponent order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (i64, &T)> {
        self.coefficients.iter().map(|(&k, a)| (k, a))
    }

    pub fn max_exponent(&self) -> Option<i64> {
        self.coefficients.keys().next_back().copied()
    }

    pub fn min_exponent(&self) -> Option<i64> {
        self.coefficients.keys().next().copied()
    }

    /// Value at `c`; `c` must be invertible when negative powers occur.
    pub fn eval(&self, c: &T) -> T {
        self.coefficients
            .iter()
            .fold(T::zero(), |acc, (&k, a)| acc + a.clone() * c.powi(k))
    }

    pub fn map_coefficients<U: Field>(&self, f: impl Fn(&T) -> U) -> LaurentPoly<U> {
        LaurentPoly::from_terms(self.coefficients.iter().map(|(&k, a)| (k, f(a))))
    }
}

impl<T: Field> Default for LaurentPoly<T> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<T: Field> Add for LaurentPoly<T> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        for (k, a) in rhs.coefficients {
            self.add_term(k, a);
        }
        self
    }
}

impl<T: Field> Neg for LaurentPoly<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            coefficients: self.coefficients.into_iter().map(|(k, a)| (k, -a)).collect(),
        }
    }
}

impl<T: Field> Sub for LaurentPoly<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<T: Field> Mul for &LaurentPoly<T> {
    type Output = LaurentPoly<T>;
    fn mul(self, rhs: Self) -> LaurentPoly<T> {
        let mut out = LaurentPoly::zero();
        for (&i, a) in &self.coefficients {
            for (&j, b) in &rhs.coefficients {
                out.add_term(i + j, a.clone() * b.clone());
            }
        }
        out
    }
}

/// Ascending exponents, e.g. `c^-2 + 2` or `-1/2*c^-1 + 3*c`; zero prints as `0`.
impl<T: Field + fmt::Display> fmt::Display for LaurentPoly<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (n, (&k, a)) in self.coefficients.iter().enumerate() {
            let negative = a.to_string().starts_with('-');
            let magnitude = if negative { -a.clone() } else { a.clone() };
            match (n, negative) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let unit = magnitude.is_one();
            let var = match k {
                0 => String::new(),
                1 => "c".to_string(),
                _ => format!("c^{k}"),
            };
            match (k, unit) {
                (0, _) => write!(f, "{magnitude}")?,
                (_, true) => write!(f, "{var}")?,
                (_, false) => write!(f, "{magnitude}*{var}")?,
            }
        }
        Ok(())
    }
}
