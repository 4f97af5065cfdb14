use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_traits::{One, Zero};

use super::{Field, Poly, Rational};

/// The ℓ-th cyclotomic polynomial `Φ_ℓ`.
pub fn cyclotomic_polynomial(ell: u32) -> Poly {
    assert!(ell >= 1);
    // x^ℓ - 1 divided by Φ_d for every proper divisor d.
    let mut p = &Poly::monomial(Rational::one(), ell as usize) - &Poly::one();
    for d in 1..ell {
        if ell.is_multiple_of(d) {
            let (q, r) = p.div_rem(&cyclotomic_polynomial(d));
            debug_assert!(r.is_zero());
            p = q;
        }
    }
    p
}

#[derive(Debug, PartialEq, Eq, Hash)]
pub struct CycloModulus {
    pub ell: u32,
    pub phi: Poly,
}

impl CycloModulus {
    pub fn new(ell: u32) -> Arc<Self> {
        Arc::new(CycloModulus {
            ell,
            phi: cyclotomic_polynomial(ell),
        })
    }
}

/// Element of `Q(ζ_ℓ) = Q[ζ]/Φ_ℓ(ζ)`.
///
/// Rational constants may carry no modulus; they combine with elements of
/// any `Q(ζ_ℓ)`. Non-constant elements always carry theirs.
#[derive(Clone, Debug)]
pub struct Cyclotomic {
    modulus: Option<Arc<CycloModulus>>,
    rep: Poly,
}

impl Cyclotomic {
    pub fn from_poly(modulus: &Arc<CycloModulus>, p: &Poly) -> Self {
        let (_, r) = p.div_rem(&modulus.phi);
        Cyclotomic {
            modulus: Some(modulus.clone()),
            rep: r,
        }
    }

    /// `ζ^k` for any integer `k`.
    pub fn zeta_pow(modulus: &Arc<CycloModulus>, k: i64) -> Self {
        let e = k.rem_euclid(modulus.ell as i64) as usize;
        Self::from_poly(modulus, &Poly::monomial(Rational::one(), e))
    }

    pub fn constant(c: Rational) -> Self {
        Cyclotomic {
            modulus: None,
            rep: Poly::constant(c),
        }
    }

    /// Reduced representative, of degree below `φ(ℓ)`.
    pub fn rep(&self) -> &Poly {
        &self.rep
    }

    pub fn ell(&self) -> Option<u32> {
        self.modulus.as_ref().map(|m| m.ell)
    }

    fn join(a: &Self, b: &Self) -> Option<Arc<CycloModulus>> {
        match (&a.modulus, &b.modulus) {
            (Some(x), Some(y)) => {
                assert_eq!(x.ell, y.ell, "mixing cyclotomic fields of different order");
                Some(x.clone())
            }
            (Some(x), None) | (None, Some(x)) => Some(x.clone()),
            (None, None) => None,
        }
    }

    fn with(modulus: Option<Arc<CycloModulus>>, p: Poly) -> Self {
        match modulus {
            Some(m) => Self::from_poly(&m, &p),
            None => {
                debug_assert!(p.is_constant());
                Cyclotomic {
                    modulus: None,
                    rep: p,
                }
            }
        }
    }
}

impl PartialEq for Cyclotomic {
    fn eq(&self, other: &Self) -> bool {
        if let (Some(a), Some(b)) = (&self.modulus, &other.modulus) {
            if a.ell != b.ell {
                return false;
            }
        }
        self.rep == other.rep
    }
}

impl fmt::Display for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.rep.fmt_with("z"))
    }
}

impl Add for Cyclotomic {
    type Output = Cyclotomic;
    fn add(self, rhs: Cyclotomic) -> Cyclotomic {
        let m = Self::join(&self, &rhs);
        // Sum of reduced representatives is still reduced.
        Cyclotomic {
            modulus: m,
            rep: &self.rep + &rhs.rep,
        }
    }
}

impl Sub for Cyclotomic {
    type Output = Cyclotomic;
    fn sub(self, rhs: Cyclotomic) -> Cyclotomic {
        let m = Self::join(&self, &rhs);
        Cyclotomic {
            modulus: m,
            rep: &self.rep - &rhs.rep,
        }
    }
}

impl Mul for Cyclotomic {
    type Output = Cyclotomic;
    fn mul(self, rhs: Cyclotomic) -> Cyclotomic {
        let m = Self::join(&self, &rhs);
        Self::with(m, &self.rep * &rhs.rep)
    }
}

impl Neg for Cyclotomic {
    type Output = Cyclotomic;
    fn neg(self) -> Cyclotomic {
        Cyclotomic {
            modulus: self.modulus,
            rep: -&self.rep,
        }
    }
}

impl Zero for Cyclotomic {
    fn zero() -> Self {
        Cyclotomic {
            modulus: None,
            rep: Poly::zero(),
        }
    }
    fn is_zero(&self) -> bool {
        self.rep.is_zero()
    }
}

impl One for Cyclotomic {
    fn one() -> Self {
        Cyclotomic::constant(Rational::one())
    }
}

impl Field for Cyclotomic {
    fn from_i64(n: i64) -> Self {
        Cyclotomic::constant(super::rat_int(n))
    }
    fn from_rational(q: &Rational) -> Self {
        Cyclotomic::constant(q.clone())
    }
    fn inv(&self) -> Option<Self> {
        if self.rep.is_zero() {
            return None;
        }
        match &self.modulus {
            None => Some(Cyclotomic::constant(self.rep.coeff(0).recip())),
            Some(m) => {
                let (g, s, _) = self.rep.ext_gcd(&m.phi);
                // Φ_ℓ is irreducible, so a nonzero reduced element is coprime to it.
                assert!(g == Poly::one(), "cyclotomic inverse: non-unit gcd");
                Some(Self::from_poly(m, &s))
            }
        }
    }
}

impl Default for Cyclotomic {
    fn default() -> Self {
        Cyclotomic::zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cyclotomic_polynomials() {
        assert_eq!(cyclotomic_polynomial(1), Poly::from_ints(&[-1, 1]));
        assert_eq!(cyclotomic_polynomial(3), Poly::from_ints(&[1, 1, 1]));
        assert_eq!(cyclotomic_polynomial(4), Poly::from_ints(&[1, 0, 1]));
        assert_eq!(cyclotomic_polynomial(6), Poly::from_ints(&[1, -1, 1]));
        assert_eq!(cyclotomic_polynomial(5).degree(), Some(4));
    }

    #[test]
    fn zeta3_relations() {
        let m = CycloModulus::new(3);
        let z = Cyclotomic::zeta_pow(&m, 1);
        let s = Cyclotomic::one() + z.clone() + z.clone() * z.clone();
        assert!(s.is_zero());
        assert_eq!(Cyclotomic::zeta_pow(&m, 3), Cyclotomic::one());
        assert_eq!(Cyclotomic::zeta_pow(&m, -1), z.clone() * z.clone());
    }

    #[test]
    fn inverse() {
        let m = CycloModulus::new(5);
        let x = Cyclotomic::zeta_pow(&m, 1) + Cyclotomic::from_i64(2);
        let y = x.inv().unwrap();
        assert_eq!(x * y, Cyclotomic::one());
    }
}
