//! Scalar abstractions.
//!
//! Two families of scalars appear in this crate. [`Real`] is a floating point
//! type (`f32` or `f64`) used by the sampling, spectral and state code.
//! [`Field`] is anything that supports exact field arithmetic and can be
//! built from small integers; the moment formulas are evaluated over it, so
//! the same code yields exact [`BigRational`](num_rational::BigRational)
//! values or quick `f64` approximations.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;
use std::ops::Neg;

use num_traits::{Float, FromPrimitive, Num, NumAssign, ToPrimitive};

/// Floating point scalar: `f32` or `f64`.
pub trait Real:
    Float
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + LowerExp
    + Default
    + Send
    + Sync
    + 'static
{
    /// Entrywise tolerance factor used when asserting that a matrix is
    /// Hermitian: `max |M - M*| <= tol * (1 + max |M|)`.
    fn hermitian_tolerance() -> Self;

    /// Absolute tolerance on the trace of a density matrix.
    fn trace_tolerance() -> Self;

    /// Absolute tolerance on the smallest eigenvalue of a density matrix and
    /// on PPT decisions.
    fn psd_tolerance() -> Self;

    /// Lossless-enough conversion from `f64` (panics only on NaN payloads
    /// that the target cannot represent, which does not happen for f32/f64).
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 is representable")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("finite float converts to f64")
    }
}

impl Real for f64 {
    fn hermitian_tolerance() -> Self {
        1e-10
    }
    fn trace_tolerance() -> Self {
        1e-10
    }
    fn psd_tolerance() -> Self {
        1e-8
    }
}

impl Real for f32 {
    fn hermitian_tolerance() -> Self {
        1e-5
    }
    fn trace_tolerance() -> Self {
        1e-5
    }
    fn psd_tolerance() -> Self {
        1e-4
    }
}

/// Exact (or exact-enough) field used to evaluate moment formulas.
pub trait Field: Num + Clone + FromPrimitive + Neg<Output = Self> + Debug + Send + Sync {
    fn from_count(n: u64) -> Self {
        Self::from_u64(n).expect("count representable in field")
    }

    /// `self^exp` for any integer exponent. Negative exponents divide.
    fn powi(&self, exp: i64) -> Self {
        let mut base = if exp < 0 {
            Self::one() / self.clone()
        } else {
            self.clone()
        };
        let mut e = exp.unsigned_abs();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            e >>= 1;
            if e > 0 {
                base = base.clone() * base;
            }
        }
        acc
    }
}

impl<T> Field for T where T: Num + Clone + FromPrimitive + Neg<Output = T> + Debug + Send + Sync {}
