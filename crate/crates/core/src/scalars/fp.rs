use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

use super::{Field, Rational};

/// A 61-bit Mersenne prime.
pub const FP_PRIME: u64 = (1 << 61) - 1;

/// Element of `F_p` for [`FP_PRIME`]. Used only for certified lower bounds on
/// ranks over `Q(x)`: the rank of a reduction never exceeds the true rank.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default)]
pub struct Fp(pub u64);

impl Fp {
    pub fn new(x: u64) -> Self {
        Fp(x % FP_PRIME)
    }

    pub fn from_bigint(x: &BigInt) -> Self {
        let p = BigInt::from(FP_PRIME);
        let r = ((x % &p) + &p) % &p;
        Fp(r.to_u64().expect("reduced residue fits"))
    }

    /// Reduction of a rational; `None` if `p` divides the denominator.
    pub fn try_from_rational(q: &Rational) -> Option<Self> {
        let d = Fp::from_bigint(q.denom());
        if d.0 == 0 {
            return None;
        }
        Some(Fp::from_bigint(q.numer()) * d.inv()?)
    }

    pub fn pow(self, mut e: u64) -> Self {
        let mut base = self;
        let mut acc = Fp(1);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }
}

impl fmt::Display for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Add for Fp {
    type Output = Fp;
    fn add(self, rhs: Fp) -> Fp {
        let s = self.0 + rhs.0;
        Fp(if s >= FP_PRIME { s - FP_PRIME } else { s })
    }
}

impl Sub for Fp {
    type Output = Fp;
    fn sub(self, rhs: Fp) -> Fp {
        if self.0 >= rhs.0 {
            Fp(self.0 - rhs.0)
        } else {
            Fp(self.0 + FP_PRIME - rhs.0)
        }
    }
}

impl Mul for Fp {
    type Output = Fp;
    fn mul(self, rhs: Fp) -> Fp {
        Fp(((self.0 as u128 * rhs.0 as u128) % FP_PRIME as u128) as u64)
    }
}

impl Neg for Fp {
    type Output = Fp;
    fn neg(self) -> Fp {
        if self.0 == 0 {
            self
        } else {
            Fp(FP_PRIME - self.0)
        }
    }
}

impl Zero for Fp {
    fn zero() -> Self {
        Fp(0)
    }
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
}

impl One for Fp {
    fn one() -> Self {
        Fp(1)
    }
}

impl Field for Fp {
    fn from_i64(n: i64) -> Self {
        Fp::from_bigint(&BigInt::from(n))
    }
    fn from_rational(q: &Rational) -> Self {
        Fp::try_from_rational(q).expect("denominator divisible by the working prime")
    }
    fn inv(&self) -> Option<Self> {
        if self.0 == 0 {
            None
        } else {
            Some(self.pow(FP_PRIME - 2))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_and_negatives() {
        let a = Fp::from_i64(-7);
        assert_eq!(a + Fp::from_i64(7), Fp(0));
        assert_eq!(a * a.inv().unwrap(), Fp(1));
        let half = Fp::try_from_rational(&crate::scalars::rat(1, 2)).unwrap();
        assert_eq!(half * Fp(2), Fp(1));
    }
}
