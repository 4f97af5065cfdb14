mod common;

use proptest::prelude::*;
use seminf::characters::{verma_character, wakimoto_character, Truncation};
use seminf::quantum_algebra::QuantumAlgebra;
use seminf::root_datum::RootDatum;
use seminf::scalars::{GenericCtx, RatFunc};

#[test]
fn oracle_root_systems() {
    for (name, n) in [("A1", 1), ("A2", 3), ("B2", 4)] {
        let rd = RootDatum::from_name(name).unwrap();
        let mut ours = common::positive_roots(rd.cartan());
        let mut lib = rd.positive_roots().to_vec();
        ours.sort();
        lib.sort();
        assert_eq!(ours.len(), n);
        assert_eq!(ours, lib, "{name}");
    }
}

#[test]
fn oracle_partition_counts() {
    let a2 = common::positive_roots(RootDatum::a2().cartan());
    assert_eq!(common::partition_count(&a2, &[1, 1]), 2);
    assert_eq!(common::partition_count(&a2, &[2, 2]), 3);
    assert_eq!(common::partition_count(&a2, &[2, 1]), 2);
    // (1, 0) is the imaginary root or (1, −α) + (0, α)
    let affine = common::affine_kostant(RootDatum::a1().cartan(), 2, 0);
    assert_eq!(affine[&(1, vec![0])], 1 + 1);
    assert_eq!(affine[&(1, vec![-1])], 1);
}

#[test]
fn verma_matches_kostant_b2() {
    let b2 = RootDatum::b2();
    let oracle = common::affine_kostant(b2.cartan(), 2, 3);
    let v = verma_character(&b2, &[1, 0], &RatFunc::var(), Truncation::new(2, 3));
    assert_eq!(common::nonzero(v.coeffs()), oracle);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn kd_dims_are_kostant_counts(a in 0i64..4, b in 0i64..4, which in 0usize..2) {
        prop_assume!(a + b > 0);
        let rd = RootDatum::from_name(["A2", "B2"][which]).unwrap();
        let alg = QuantumAlgebra::new(&rd, GenericCtx).unwrap();
        let pos = common::positive_roots(rd.cartan());
        prop_assert_eq!(alg.kd_component(&[a, b]).dim() as u64, common::partition_count(&pos, &[a, b]));
    }

    #[test]
    fn wakimoto_character_is_verma(l0 in -5i64..6, l1 in -5i64..6, n in 0i64..4, d in 0i64..4) {
        let a2 = RootDatum::a2();
        let t = Truncation::new(n, d);
        let k = RatFunc::var();
        let v = verma_character(&a2, &[l0, l1], &k, t);
        let w = wakimoto_character(&a2, &[l0, l1], &k, t);
        prop_assert_eq!(w.coeffs(), v.coeffs());
        prop_assert_eq!(common::nonzero(v.coeffs()), common::affine_kostant(a2.cartan(), n, d));
    }
}
