use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::{Poly, RatFunc, Rational};

/// Integer Laurent polynomial in `v`. Quantum integers, Gaussian binomials
/// and braided pairings are all of this shape before specialization.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Laurent {
    terms: BTreeMap<i64, BigInt>,
}

impl Laurent {
    pub fn zero() -> Self {
        Laurent::default()
    }

    pub fn one() -> Self {
        Laurent::monomial(1, 0)
    }

    pub fn monomial(c: i64, e: i64) -> Self {
        let mut l = Laurent::zero();
        l.add_term(e, BigInt::from(c));
        l
    }

    pub fn add_term(&mut self, e: i64, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(e).or_insert_with(BigInt::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &BigInt)> {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, e: i64) -> BigInt {
        self.terms.get(&e).cloned().unwrap_or_else(BigInt::zero)
    }

    /// Multiply by `v^k`.
    pub fn shift(&self, k: i64) -> Self {
        Laurent {
            terms: self.terms.iter().map(|(e, c)| (e + k, c.clone())).collect(),
        }
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return Laurent::zero();
        }
        Laurent {
            terms: self.terms.iter().map(|(e, a)| (*e, a * c)).collect(),
        }
    }

    pub fn to_ratfunc(&self) -> RatFunc {
        let Some(min) = self.terms.keys().next().copied() else {
            return RatFunc::new(Poly::zero(), Poly::one());
        };
        let max = *self.terms.keys().next_back().unwrap();
        let mut coeffs = vec![Rational::zero(); (max - min + 1) as usize];
        for (e, c) in &self.terms {
            coeffs[(e - min) as usize] = Rational::from_integer(c.clone());
        }
        let num = Poly::new(coeffs);
        if min >= 0 {
            RatFunc::from_poly(&num * &Poly::monomial(Rational::one(), min as usize))
        } else {
            RatFunc::new(num, Poly::monomial(Rational::one(), (-min) as usize))
        }
    }

    pub fn eval_rational(&self, v: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for (e, c) in &self.terms {
            acc += Rational::from_integer(c.clone()) * pow_rational(v, *e);
        }
        acc
    }
}

fn pow_rational(v: &Rational, e: i64) -> Rational {
    let mut base = if e < 0 { v.recip() } else { v.clone() };
    let mut k = e.unsigned_abs();
    let mut acc = Rational::one();
    while k > 0 {
        if k & 1 == 1 {
            acc *= &base;
        }
        base = &base * &base;
        k >>= 1;
    }
    acc
}

impl fmt::Display for Laurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            let neg = c.is_negative();
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            let mag = c.abs();
            match (*e, mag.is_one()) {
                (0, _) => write!(f, "{mag}")?,
                (1, true) => f.write_str("v")?,
                (e, true) => write!(f, "v^{e}")?,
                (1, false) => write!(f, "{mag}*v")?,
                (e, false) => write!(f, "{mag}*v^{e}")?,
            }
        }
        Ok(())
    }
}

impl Add for &Laurent {
    type Output = Laurent;
    fn add(self, rhs: &Laurent) -> Laurent {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, c.clone());
        }
        out
    }
}

impl Sub for &Laurent {
    type Output = Laurent;
    fn sub(self, rhs: &Laurent) -> Laurent {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, -c);
        }
        out
    }
}

impl Mul for &Laurent {
    type Output = Laurent;
    fn mul(self, rhs: &Laurent) -> Laurent {
        let mut out = Laurent::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                out.add_term(e1 + e2, c1 * c2);
            }
        }
        out
    }
}

impl Neg for &Laurent {
    type Output = Laurent;
    fn neg(self) -> Laurent {
        Laurent {
            terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect(),
        }
    }
}

/// `[n]_{v_i}` with `v_i = v^e`: `(v_i^n − v_i^{−n})/(v_i − v_i^{−1})`.
pub fn quantum_integer_laurent(n: i64, e: i64) -> Laurent {
    let mut out = Laurent::zero();
    let m = n.abs();
    for k in 0..m {
        out.add_term((m - 1 - 2 * k) * e, BigInt::one());
    }
    if n < 0 {
        -&out
    } else {
        out
    }
}

/// Symmetric Gaussian binomial `[n choose m]_{v_i}` with `v_i = v^e`,
/// via `[n,m] = v_i^m [n−1,m] + v_i^{−(n−m)} [n−1,m−1]`. Zero outside `0 ≤ m ≤ n`.
pub fn quantum_binomial_laurent(n: i64, m: i64, e: i64) -> Laurent {
    if m < 0 || n < 0 || m > n {
        return Laurent::zero();
    }
    // row[k] = [r choose k]
    let mut row = vec![Laurent::one()];
    for r in 1..=n {
        let mut next = vec![Laurent::zero(); (r + 1) as usize];
        for k in 0..=r {
            let mut acc = Laurent::zero();
            if k < r {
                acc = &acc + &row[k as usize].shift(k * e);
            }
            if k > 0 {
                acc = &acc + &row[(k - 1) as usize].shift(-(r - k) * e);
            }
            next[k as usize] = acc;
        }
        row = next;
    }
    row[m as usize].clone()
}
