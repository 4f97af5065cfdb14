use std::fmt;
use std::sync::Arc;

use num_traits::Zero;

use super::{
    quantum_binomial_laurent, quantum_integer_laurent, CycloModulus, Cyclotomic, Field, Laurent,
    RatFunc, Rational, ScalarError,
};

/// Where the quantum parameter `v` lives.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum QuantumMode {
    Generic,
    RootOfUnity { ell: u32 },
}

impl fmt::Display for QuantumMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QuantumMode::Generic => f.write_str("generic"),
            QuantumMode::RootOfUnity { ell } => write!(f, "root-of-unity(ell={ell})"),
        }
    }
}

/// A choice of field for `v` together with the map from integer Laurent
/// polynomials in `v`. `v_i` is passed as an exponent `e` with `v_i = v^e`.
pub trait QuantumCtx: Clone + Send + Sync + fmt::Debug {
    type Scalar: Field;

    fn mode(&self) -> QuantumMode;

    fn laurent(&self, l: &Laurent) -> Self::Scalar;

    /// Image of a generic element under this context's specialization.
    fn specialize(&self, x: &RatFunc) -> Result<Self::Scalar, ScalarError>;

    fn v_pow(&self, k: i64) -> Self::Scalar {
        self.laurent(&Laurent::monomial(1, k))
    }

    /// Fails when `v_i = ±1`, where quantum integers stop being a deformation.
    fn check_nondegenerate(&self, e: i64) -> Result<(), ScalarError> {
        match self.mode() {
            QuantumMode::Generic => Ok(()),
            QuantumMode::RootOfUnity { ell } => {
                if (2 * e).rem_euclid(ell as i64) == 0 {
                    Err(ScalarError::DegenerateQuantumParameter { ell })
                } else {
                    Ok(())
                }
            }
        }
    }

    fn quantum_integer(&self, n: i64, e: i64) -> Result<Self::Scalar, ScalarError> {
        self.check_nondegenerate(e)?;
        Ok(self.laurent(&quantum_integer_laurent(n, e)))
    }

    /// Formed as a Laurent polynomial first, so specialization never divides by zero.
    fn quantum_binomial(&self, n: i64, m: i64, e: i64) -> Result<Self::Scalar, ScalarError> {
        self.check_nondegenerate(e)?;
        Ok(self.laurent(&quantum_binomial_laurent(n, m, e)))
    }
}

/// `v` transcendental: scalars in `Q(v)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GenericCtx;

impl QuantumCtx for GenericCtx {
    type Scalar = RatFunc;

    fn mode(&self) -> QuantumMode {
        QuantumMode::Generic
    }

    fn laurent(&self, l: &Laurent) -> RatFunc {
        l.to_ratfunc()
    }

    fn specialize(&self, x: &RatFunc) -> Result<RatFunc, ScalarError> {
        Ok(x.clone())
    }
}

/// `v = ζ` a primitive ℓ-th root of unity: scalars in `Q(ζ_ℓ)`.
#[derive(Clone, Debug)]
pub struct RootOfUnityCtx {
    modulus: Arc<CycloModulus>,
}

impl RootOfUnityCtx {
    pub fn new(ell: u32) -> Self {
        assert!(ell >= 2, "root of unity of order {ell}");
        RootOfUnityCtx {
            modulus: CycloModulus::new(ell),
        }
    }

    pub fn ell(&self) -> u32 {
        self.modulus.ell
    }

    pub fn modulus(&self) -> &Arc<CycloModulus> {
        &self.modulus
    }

    pub fn zeta_pow(&self, k: i64) -> Cyclotomic {
        Cyclotomic::zeta_pow(&self.modulus, k)
    }

    fn eval_poly(&self, p: &super::Poly) -> Cyclotomic {
        let mut acc = Cyclotomic::zero();
        for (k, c) in p.coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            acc = acc + Cyclotomic::constant(c.clone()) * self.zeta_pow(k as i64);
        }
        acc
    }
}

impl QuantumCtx for RootOfUnityCtx {
    type Scalar = Cyclotomic;

    fn mode(&self) -> QuantumMode {
        QuantumMode::RootOfUnity { ell: self.ell() }
    }

    fn laurent(&self, l: &Laurent) -> Cyclotomic {
        let mut acc = Cyclotomic::zero();
        for (e, c) in l.terms() {
            acc = acc
                + Cyclotomic::constant(Rational::from_integer(c.clone())) * self.zeta_pow(e);
        }
        acc
    }

    fn specialize(&self, x: &RatFunc) -> Result<Cyclotomic, ScalarError> {
        let d = self.eval_poly(x.denom());
        let inv = d
            .inv()
            .ok_or(ScalarError::PoleAtRoot { ell: self.ell() })?;
        Ok(self.eval_poly(x.numer()) * inv)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::{rat, Poly};
    use num_traits::One;
    use proptest::prelude::*;

    #[test]
    fn quantum_integer_examples() {
        let g = GenericCtx;
        assert_eq!(g.quantum_integer(1, 1).unwrap(), RatFunc::one());
        let v = RatFunc::var();
        assert_eq!(
            g.quantum_integer(2, 1).unwrap(),
            v.clone() + v.inv().unwrap()
        );
        let z3 = RootOfUnityCtx::new(3);
        assert!(z3.quantum_integer(3, 1).unwrap().is_zero());
        assert_eq!(
            z3.quantum_integer(2, 3),
            Err(ScalarError::DegenerateQuantumParameter { ell: 3 })
        );
    }

    #[test]
    fn quantum_binomial_examples() {
        let g = GenericCtx;
        assert_eq!(g.quantum_binomial(7, 0, 1).unwrap(), RatFunc::one());
        assert_eq!(
            g.quantum_binomial(2, 1, 1).unwrap(),
            g.quantum_integer(2, 1).unwrap()
        );
        let z3 = RootOfUnityCtx::new(3);
        assert!(z3.quantum_binomial(3, 1, 1).unwrap().is_zero());
    }

    #[test]
    fn specialize_examples() {
        let z3 = RootOfUnityCtx::new(3);
        assert_eq!(
            z3.specialize(&RatFunc::var_pow(2)).unwrap(),
            z3.zeta_pow(2)
        );
        let three = quantum_integer_laurent(3, 1).to_ratfunc();
        assert!(z3.specialize(&three).unwrap().is_zero());
        let pole = RatFunc::new(Poly::one(), Poly::from_ints(&[-1, 0, 0, 1]));
        assert_eq!(z3.specialize(&pole), Err(ScalarError::PoleAtRoot { ell: 3 }));
    }

    #[test]
    fn is_rational_examples() {
        assert!(!(RatFunc::var() + RatFunc::one()).is_rational());
        assert!(RatFunc::from_i64(3).is_rational());
        let x = RatFunc::new(Poly::from_ints(&[4, 2]), Poly::from_ints(&[2, 1]));
        assert!(x.is_rational());
    }

    /// Coefficient of `t^m` in `Π_{k<n} (1 + v^{2k} t)`, expanded directly.
    fn q_binomial_theorem_coeff(n: usize, m: usize) -> Laurent {
        let mut coeffs = vec![Laurent::one()];
        for k in 0..n {
            let mut next = vec![Laurent::zero(); coeffs.len() + 1];
            for (j, c) in coeffs.iter().enumerate() {
                next[j] = &next[j] + c;
                next[j + 1] = &next[j + 1] + &c.shift(2 * k as i64);
            }
            coeffs = next;
        }
        coeffs[m].clone()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(50))]
        #[test]
        fn binomial_matches_product_expansion(n in 0usize..12, m in 0usize..12) {
            prop_assume!(m <= n);
            let lhs = quantum_binomial_laurent(n as i64, m as i64, 1).shift(m as i64 * (n as i64 - 1));
            prop_assert_eq!(lhs, q_binomial_theorem_coeff(n, m));
        }
    }

    fn arb_ratfunc() -> impl Strategy<Value = RatFunc> {
        (
            prop::collection::vec(-4i64..5, 1..4),
            prop::collection::vec(-4i64..5, 1..3),
        )
            .prop_filter_map("zero denominator", |(n, d)| {
                let den = Poly::from_ints(&d);
                (!den.is_zero()).then(|| RatFunc::new(Poly::from_ints(&n), den))
            })
    }

    fn arb_cyclo(ell: u32) -> impl Strategy<Value = Cyclotomic> {
        prop::collection::vec(-5i64..6, 1..6).prop_map(move |c| {
            let ctx = RootOfUnityCtx::new(ell);
            let mut acc = Cyclotomic::zero();
            for (k, a) in c.into_iter().enumerate() {
                acc = acc + Cyclotomic::from_i64(a) * ctx.zeta_pow(k as i64);
            }
            acc
        })
    }

    fn arb_rational() -> impl Strategy<Value = Rational> {
        (-50i64..50, 1i64..20).prop_map(|(n, d)| rat(n, d))
    }

    fn field_laws<F: Field>(a: F, b: F, c: F) -> Result<(), TestCaseError> {
        prop_assert_eq!((a.clone() + b.clone()) + c.clone(), a.clone() + (b.clone() + c.clone()));
        prop_assert_eq!((a.clone() * b.clone()) * c.clone(), a.clone() * (b.clone() * c.clone()));
        prop_assert_eq!(
            a.clone() * (b.clone() + c.clone()),
            a.clone() * b.clone() + a.clone() * c.clone()
        );
        prop_assert_eq!(a.clone() + b.clone(), b.clone() + a.clone());
        prop_assert!((a.clone() - a.clone()).is_zero());
        if !a.is_zero() {
            prop_assert!((a.clone() * a.inv().unwrap()).is_one());
        }
        Ok(())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn rational_field_laws(a in arb_rational(), b in arb_rational(), c in arb_rational()) {
            field_laws(a, b, c)?;
        }

        #[test]
        fn ratfunc_field_laws(a in arb_ratfunc(), b in arb_ratfunc(), c in arb_ratfunc()) {
            field_laws(a, b, c)?;
        }

        #[test]
        fn cyclotomic_field_laws(a in arb_cyclo(5), b in arb_cyclo(5), c in arb_cyclo(5)) {
            field_laws(a, b, c)?;
        }

        #[test]
        fn canonical_form_idempotent(a in arb_ratfunc()) {
            let again = RatFunc::new(a.numer().clone(), a.denom().clone());
            prop_assert_eq!(&again, &a);
            prop_assert_eq!(again.numer(), a.numer());
        }
    }
}
