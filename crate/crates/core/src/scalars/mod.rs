//! Exact scalar fields.
//!
//! Everything downstream works over one of four fields with decidable
//! equality: `Q`, `Q(κ)` (the level as a transcendental symbol), `Q(v)`
//! (the generic quantum parameter) and `Q(ζ_ℓ)` (the quantum parameter at a
//! primitive ℓ-th root of unity). `Q(κ)` and `Q(v)` share [`RatFunc`]; the
//! symbol is only a display concern.

mod cyclotomic;
mod fp;
mod laurent;
mod poly;
mod quantum;
mod ratfunc;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

pub use cyclotomic::{cyclotomic_polynomial, CycloModulus, Cyclotomic};
pub use fp::{Fp, FP_PRIME};
pub use laurent::{quantum_binomial_laurent, quantum_integer_laurent, Laurent};
pub use poly::Poly;
pub use quantum::{GenericCtx, QuantumCtx, QuantumMode, RootOfUnityCtx};
pub use ratfunc::RatFunc;

/// Exact rationals.
pub type Rational = num_rational::BigRational;

/// The level κ lives in `Q(κ)`.
pub type LevelScalar = RatFunc;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("denominator vanishes at the primitive {ell}-th root of unity")]
    PoleAtRoot { ell: u32 },
    #[error("v_i = ±1 at the primitive {ell}-th root of unity; quantum integers are undefined")]
    DegenerateQuantumParameter { ell: u32 },
    #[error("internal consistency: {0}")]
    Internal(String),
}

/// A commutative field with exact, decidable equality.
pub trait Field:
    Clone
    + PartialEq
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn from_i64(n: i64) -> Self;
    fn from_rational(q: &Rational) -> Self;
    /// Multiplicative inverse; `None` exactly for zero.
    fn inv(&self) -> Option<Self>;

    fn div(&self, rhs: &Self) -> Option<Self> {
        rhs.inv().map(|r| self.clone() * r)
    }
}

impl Field for Rational {
    fn from_i64(n: i64) -> Self {
        Rational::from_integer(BigInt::from(n))
    }
    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }
    fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(self.recip())
        }
    }
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `Some(n)` iff `q` is an integer fitting in `i64`.
pub fn rational_to_i64(q: &Rational) -> Option<i64> {
    if q.is_integer() {
        q.to_integer().to_i64()
    } else {
        None
    }
}

pub(crate) fn fmt_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.to_integer().to_string()
    } else if q.is_negative() {
        format!("-{}/{}", q.numer().abs(), q.denom())
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}
