use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{Field, Poly, Rational};

/// Element of `Q(x)` kept in canonical form: numerator and denominator are
/// coprime integer polynomials with jointly content-free coefficients and a
/// positive leading denominator coefficient. Equality of canonical forms is
/// equality of field elements.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl RatFunc {
    pub fn new(num: Poly, den: Poly) -> Self {
        assert!(!den.is_zero(), "rational function with zero denominator");
        Self::normalize(num, den)
    }

    pub fn from_poly(p: Poly) -> Self {
        Self::normalize(p, Poly::one())
    }

    /// The transcendental symbol itself.
    pub fn var() -> Self {
        Self::from_poly(Poly::x())
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_poly(Poly::constant(c))
    }

    /// `x^k` for any integer `k`.
    pub fn var_pow(k: i64) -> Self {
        let m = Poly::monomial(Rational::one(), k.unsigned_abs() as usize);
        if k >= 0 {
            Self::from_poly(m)
        } else {
            Self::normalize(Poly::one(), m)
        }
    }

    fn normalize(num: Poly, den: Poly) -> Self {
        if num.is_zero() {
            return RatFunc {
                num: Poly::zero(),
                den: Poly::one(),
            };
        }
        let g = num.gcd(&den);
        let (num, _) = num.div_rem(&g);
        let (den, _) = den.div_rem(&g);
        let l = num.denominator_lcm().lcm(&den.denominator_lcm());
        let lq = Rational::from_integer(l);
        let (num, den) = (num.scale(&lq), den.scale(&lq));
        let c = num.numerator_gcd().gcd(&den.numerator_gcd());
        let mut s = Rational::new(BigInt::one(), c);
        if den.leading().is_negative() {
            s = -s;
        }
        RatFunc {
            num: num.scale(&s),
            den: den.scale(&s),
        }
    }

    pub fn numer(&self) -> &Poly {
        &self.num
    }

    pub fn denom(&self) -> &Poly {
        &self.den
    }

    /// True iff the element is a constant (lies in `Q`).
    pub fn is_rational(&self) -> bool {
        self.num.is_constant() && self.den.is_constant()
    }

    /// The constant value, if the element is rational.
    pub fn as_rational(&self) -> Option<Rational> {
        if self.is_rational() {
            Some(self.num.coeff(0) / self.den.coeff(0))
        } else {
            None
        }
    }

    /// Value at a rational point; `None` at a pole.
    pub fn eval(&self, x: &Rational) -> Option<Rational> {
        let d = self.den.eval(x);
        if d.is_zero() {
            None
        } else {
            Some(self.num.eval(x) / d)
        }
    }

    pub fn pow(&self, e: i64) -> Self {
        let (n, d) = if e >= 0 {
            (self.num.pow(e as u32), self.den.pow(e as u32))
        } else {
            assert!(!self.num.is_zero(), "negative power of zero");
            (self.den.pow((-e) as u32), self.num.pow((-e) as u32))
        };
        RatFunc::new(n, d)
    }

    pub fn fmt_with(&self, var: &str) -> String {
        if self.den == Poly::one() {
            return self.num.fmt_with(var);
        }
        let wrap = |p: &Poly| {
            let s = p.fmt_with(var);
            if p.coeffs().iter().filter(|c| !c.is_zero()).count() > 1 {
                format!("({s})")
            } else {
                s
            }
        };
        format!("{}/{}", wrap(&self.num), wrap(&self.den))
    }
}

impl Default for RatFunc {
    fn default() -> Self {
        RatFunc::zero()
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.fmt_with("x"))
    }
}

impl Add for RatFunc {
    type Output = RatFunc;
    fn add(self, rhs: RatFunc) -> RatFunc {
        if self.den.is_one() && rhs.den.is_one() {
            return RatFunc {
                num: &self.num + &rhs.num,
                den: self.den,
            };
        }
        if self.den == rhs.den {
            return RatFunc::new(&self.num + &rhs.num, self.den);
        }
        let n = &(&self.num * &rhs.den) + &(&rhs.num * &self.den);
        RatFunc::new(n, &self.den * &rhs.den)
    }
}

impl Sub for RatFunc {
    type Output = RatFunc;
    fn sub(self, rhs: RatFunc) -> RatFunc {
        self + (-rhs)
    }
}

impl Mul for RatFunc {
    type Output = RatFunc;
    fn mul(self, rhs: RatFunc) -> RatFunc {
        if self.num.is_zero() || rhs.num.is_zero() {
            return RatFunc::zero();
        }
        if self.den.is_one() && rhs.den.is_one() {
            return RatFunc {
                num: &self.num * &rhs.num,
                den: self.den,
            };
        }
        RatFunc::new(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

impl Neg for RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc {
            num: -&self.num,
            den: self.den,
        }
    }
}

impl Zero for RatFunc {
    fn zero() -> Self {
        RatFunc {
            num: Poly::zero(),
            den: Poly::one(),
        }
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

impl One for RatFunc {
    fn one() -> Self {
        RatFunc {
            num: Poly::one(),
            den: Poly::one(),
        }
    }
}

impl Field for RatFunc {
    fn from_i64(n: i64) -> Self {
        RatFunc::constant(Rational::from_integer(BigInt::from(n)))
    }
    fn from_rational(q: &Rational) -> Self {
        RatFunc::constant(q.clone())
    }
    fn inv(&self) -> Option<Self> {
        if self.num.is_zero() {
            None
        } else {
            Some(RatFunc::new(self.den.clone(), self.num.clone()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::rat_int;

    #[test]
    fn canonical_cancellation() {
        // (2κ + 4)/(κ + 2) = 2
        let x = RatFunc::new(Poly::from_ints(&[4, 2]), Poly::from_ints(&[2, 1]));
        assert!(x.is_rational());
        assert_eq!(x, RatFunc::from_i64(2));
    }

    #[test]
    fn rationality() {
        let k1 = RatFunc::var() + RatFunc::one();
        assert!(!k1.is_rational());
        assert!(RatFunc::from_i64(3).is_rational());
    }

    #[test]
    fn integer_canonical_form() {
        // (κ/2)/(κ/3 + 1) = 3κ/(2κ + 6)
        let x = RatFunc::new(
            Poly::new(vec![Rational::zero(), crate::scalars::rat(1, 2)]),
            Poly::new(vec![Rational::one(), crate::scalars::rat(1, 3)]),
        );
        assert_eq!(x.numer(), &Poly::from_ints(&[0, 3]));
        assert_eq!(x.denom(), &Poly::from_ints(&[6, 2]));
        assert_eq!(x.eval(&rat_int(0)), Some(Rational::zero()));
    }

    #[test]
    fn negative_powers() {
        let v = RatFunc::var();
        assert_eq!(RatFunc::var_pow(-2) * v.clone() * v, RatFunc::one());
    }
}
