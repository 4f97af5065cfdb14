//! Truncated characters of affine Verma, Wakimoto, Fock and Weyl modules.
//!
//! A series is indexed by drops `(n, β)` from its base weight: the term
//! `(n, β)` stands for the weight `(−n, λ − β, κ)`. `β` is in root coordinates
//! and may have negative entries once `n > 0`. Truncation keeps `n ≤ N` and
//! `ht(β) ≤ D`.

use std::collections::{BTreeMap, HashMap};

use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::root_datum::{AffineWeight, IntWeight, RootDatum, RootDatumError, Weight};
use crate::scalars::{rat_int, LevelScalar, Rational};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CharacterError {
    #[error("truncation mismatch: {0:?} vs {1:?}")]
    TruncationMismatch(Truncation, Truncation),
    #[error(transparent)]
    RootDatum(#[from] RootDatumError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Truncation {
    pub energy: i64,
    pub depth: i64,
}

impl Truncation {
    pub fn new(energy: i64, depth: i64) -> Self {
        assert!(energy >= 0 && depth >= 0, "negative truncation");
        Truncation { energy, depth }
    }

    pub fn contains(&self, drop: &Drop) -> bool {
        drop.0 >= 0 && drop.0 <= self.energy && RootDatum::height(&drop.1) <= self.depth
    }
}

/// `(energy drop, root-lattice drop)`.
pub type Drop = (i64, Vec<i64>);

#[derive(Clone, Debug, PartialEq)]
pub struct CharacterSeries {
    pub base: AffineWeight,
    pub truncation: Truncation,
    coeffs: BTreeMap<Drop, i64>,
}

impl CharacterSeries {
    pub fn from_coeffs(base: AffineWeight, truncation: Truncation, coeffs: BTreeMap<Drop, i64>) -> Self {
        let mut coeffs = coeffs;
        coeffs.retain(|k, c| *c != 0 && truncation.contains(k));
        CharacterSeries {
            base,
            truncation,
            coeffs,
        }
    }

    pub fn coeff(&self, n: i64, beta: &[i64]) -> i64 {
        self.coeffs.get(&(n, beta.to_vec())).copied().unwrap_or(0)
    }

    pub fn coeffs(&self) -> &BTreeMap<Drop, i64> {
        &self.coeffs
    }

    /// Total multiplicity at a given energy drop.
    pub fn energy_slice_total(&self, n: i64) -> i64 {
        self.coeffs
            .iter()
            .filter(|((m, _), _)| *m == n)
            .map(|(_, c)| c)
            .sum()
    }

    fn check(&self, other: &CharacterSeries) -> Result<(), CharacterError> {
        if self.truncation != other.truncation {
            return Err(CharacterError::TruncationMismatch(self.truncation, other.truncation));
        }
        Ok(())
    }

    /// Coefficient-wise sum. Bases are not compared: drops are taken as given.
    pub fn add(&self, other: &CharacterSeries) -> Result<CharacterSeries, CharacterError> {
        self.check(other)?;
        let mut out = self.coeffs.clone();
        for (k, c) in &other.coeffs {
            *out.entry(k.clone()).or_default() += c;
        }
        Ok(Self::from_coeffs(self.base.clone(), self.truncation, out))
    }

    pub fn scale(&self, s: i64) -> CharacterSeries {
        let coeffs = self.coeffs.iter().map(|(k, c)| (k.clone(), c * s)).collect();
        Self::from_coeffs(self.base.clone(), self.truncation, coeffs)
    }

    pub fn sub(&self, other: &CharacterSeries) -> Result<CharacterSeries, CharacterError> {
        self.add(&other.scale(-1))
    }

    /// Same coefficients, indexed from a base lower by `shift`
    /// (in root coordinates), cut to `truncation`.
    pub fn reindex(&self, shift: &[i64], base: AffineWeight, truncation: Truncation) -> CharacterSeries {
        let coeffs = self
            .coeffs
            .iter()
            .map(|((n, b), c)| {
                let nb: Vec<i64> = b.iter().zip(shift).map(|(x, y)| x + y).collect();
                ((*n, nb), *c)
            })
            .collect();
        Self::from_coeffs(base, truncation, coeffs)
    }

    pub fn is_genuine(&self) -> bool {
        self.coeffs.values().all(|&c| c >= 0)
    }

    /// `[[n, β, mult], …]` in drop order.
    pub fn coefficient_table(&self) -> Vec<(i64, Vec<i64>, i64)> {
        self.coeffs
            .iter()
            .map(|((n, b), c)| (*n, b.clone(), *c))
            .collect()
    }
}

/// A dense working region large enough that truncating each partial
/// product to it loses nothing inside the final truncation.
struct Region {
    keys: Vec<Drop>,
    index: HashMap<Drop, usize>,
}

impl Region {
    fn new(rd: &RootDatum, trunc: Truncation) -> Self {
        let theta = rd.highest_root().to_vec();
        let ht_theta = RootDatum::height(&theta);
        let n = rd.rank();
        let mut keys = Vec::new();
        for e in 0..=trunc.energy {
            let max_h = trunc.depth + (trunc.energy - e) * ht_theta;
            let lo: Vec<i64> = theta.iter().map(|t| -e * t).collect();
            // coordinates c_i ≥ lo_i with Σ c ≤ max_h
            let mut cur = lo.clone();
            loop {
                if RootDatum::height(&cur) <= max_h {
                    keys.push((e, cur.clone()));
                }
                let mut i = 0;
                loop {
                    if i == n {
                        break;
                    }
                    cur[i] += 1;
                    let rest: i64 = (0..n).filter(|&j| j != i).map(|j| cur[j]).sum();
                    if cur[i] + rest <= max_h {
                        break;
                    }
                    cur[i] = lo[i];
                    i += 1;
                }
                if i == n {
                    break;
                }
            }
        }
        keys.sort_by_key(|(e, b)| (*e, RootDatum::height(b), b.clone()));
        let index = keys.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
        Region { keys, index }
    }

    fn unit(&self) -> Vec<i64> {
        let mut v = vec![0; self.keys.len()];
        let zero = (0, vec![0; self.keys[0].1.len()]);
        v[self.index[&zero]] = 1;
        v
    }

    /// In place `f ← f / (1 − e^{−x})`.
    fn divide_geometric(&self, f: &mut [i64], x: &Drop) {
        for (i, (e, b)) in self.keys.iter().enumerate() {
            let prev: Drop = (e - x.0, b.iter().zip(&x.1).map(|(p, q)| p - q).collect());
            if let Some(&j) = self.index.get(&prev) {
                if f[j] != 0 {
                    f[i] += f[j];
                }
            }
        }
    }

    /// `f · g` for a finite sum `g`.
    fn multiply_by(&self, f: &[i64], g: &BTreeMap<Drop, i64>) -> Vec<i64> {
        let mut out = vec![0; f.len()];
        for (i, (e, b)) in self.keys.iter().enumerate() {
            if f[i] == 0 {
                continue;
            }
            for ((ge, gb), c) in g {
                let k: Drop = (e + ge, b.iter().zip(gb).map(|(p, q)| p + q).collect());
                if let Some(&j) = self.index.get(&k) {
                    out[j] += f[i] * c;
                }
            }
        }
        out
    }

    fn finish(&self, f: &[i64], base: AffineWeight, trunc: Truncation) -> CharacterSeries {
        let coeffs = self
            .keys
            .iter()
            .zip(f)
            .filter(|(k, c)| **c != 0 && trunc.contains(k))
            .map(|(k, c)| (k.clone(), *c))
            .collect();
        CharacterSeries::from_coeffs(base, trunc, coeffs)
    }
}

fn base_weight(lambda: &[i64], level: &LevelScalar) -> AffineWeight {
    AffineWeight {
        energy: 0,
        finite: Weight::from_ints(lambda),
        level: level.clone(),
    }
}

/// `e^{(0,λ,κ)} · Π_{α̂ ∈ R̂⁺} (1 − e^{−α̂})^{−mult α̂}`.
pub fn verma_character(rd: &RootDatum, lambda: &[i64], kappa: &LevelScalar, trunc: Truncation) -> CharacterSeries {
    let region = Region::new(rd, trunc);
    let mut f = region.unit();
    for root in rd.positive_affine_roots(trunc.energy) {
        let x = (root.energy, root.finite.clone());
        for _ in 0..root.multiplicity {
            region.divide_geometric(&mut f, &x);
        }
    }
    region.finish(&f, base_weight(lambda, kappa), trunc)
}

/// Free-field character: one bosonic generator per `x*_{α,n}` (drop `(−n, α)`,
/// `n ≤ 0`), per `x_{α,m}` (drop `(−m, −α)`, `m < 0`) and per `y_{i,l}`
/// (drop `(−l, 0)`, `l < 0`).
pub fn wakimoto_character(rd: &RootDatum, lambda: &[i64], kappa: &LevelScalar, trunc: Truncation) -> CharacterSeries {
    let region = Region::new(rd, trunc);
    let mut f = region.unit();
    let zero = vec![0; rd.rank()];
    for alpha in rd.positive_roots() {
        for n in (-trunc.energy..=0).rev() {
            region.divide_geometric(&mut f, &(-n, alpha.clone()));
        }
        let neg: Vec<i64> = alpha.iter().map(|a| -a).collect();
        for m in -trunc.energy..0 {
            region.divide_geometric(&mut f, &(-m, neg.clone()));
        }
    }
    for _i in 0..rd.rank() {
        for l in -trunc.energy..0 {
            region.divide_geometric(&mut f, &(-l, zero.clone()));
        }
    }
    region.finish(&f, base_weight(lambda, kappa), trunc)
}

/// `e^{(0,μ,level)} · Π_{n>0} (1 − e^{−(n,0)})^{−rank}`.
pub fn fock_character(rd: &RootDatum, mu: &[i64], level: &LevelScalar, trunc: Truncation) -> CharacterSeries {
    let region = Region::new(rd, trunc);
    let mut f = region.unit();
    let zero = vec![0; rd.rank()];
    for n in 1..=trunc.energy {
        for _ in 0..rd.rank() {
            region.divide_geometric(&mut f, &(n, zero.clone()));
        }
    }
    region.finish(&f, base_weight(mu, level), trunc)
}

/// Weight multiplicities of the finite irreducible `V_λ` (Freudenthal).
pub fn finite_character(rd: &RootDatum, lambda: &[i64]) -> Result<BTreeMap<IntWeight, i64>, RootDatumError> {
    rd.require_dominant(lambda)?;
    let n = rd.rank();
    let rho = rd.rho();
    let lr: IntWeight = lambda.iter().zip(&rho).map(|(a, b)| a + b).collect();
    let norm_lr = rd.form_st_int(&lr, &lr);
    let pos_w: Vec<IntWeight> = rd.positive_roots().iter().map(|a| rd.root_to_weight(a)).collect();

    // Process drops β ≥ 0 by height; a weight λ−β occurs only if β is
    // bounded by the lowest weight, whose drop has height ht(λ − w₀λ).
    let w0l = rd.weyl()[rd.w0()].act(lambda);
    let total: IntWeight = lambda.iter().zip(&w0l).map(|(a, b)| a - b).collect();
    let max_drop = rd.weight_to_root(&total).expect("λ − w₀λ in root lattice");
    let max_h = RootDatum::height(&max_drop);

    let mut mult: BTreeMap<IntWeight, i64> = BTreeMap::new();
    mult.insert(lambda.to_vec(), 1);
    let mut by_height: Vec<Vec<Vec<i64>>> = vec![Vec::new(); (max_h + 1) as usize];
    enumerate_box(&max_drop, &mut |b: &[i64]| {
        by_height[RootDatum::height(b) as usize].push(b.to_vec());
    });
    for h in 1..=max_h {
        for beta in &by_height[h as usize] {
            let bw = rd.root_to_weight(beta);
            let mu: IntWeight = (0..n).map(|i| lambda[i] - bw[i]).collect();
            let mr: IntWeight = mu.iter().zip(&rho).map(|(a, b)| a + b).collect();
            let denom = &norm_lr - rd.form_st_int(&mr, &mr);
            if denom.is_zero() {
                continue;
            }
            let mut acc = Rational::zero();
            for aw in &pos_w {
                let mut k = 1;
                loop {
                    let up: IntWeight = (0..n).map(|i| mu[i] + k * aw[i]).collect();
                    let Some(&m) = mult.get(&up) else {
                        // weights of V_λ along an α-string are contiguous
                        break;
                    };
                    acc += rat_int(m) * rd.form_st_int(&up, aw);
                    k += 1;
                }
            }
            let m = acc * rat_int(2) / denom;
            let m = crate::scalars::rational_to_i64(&m).expect("integral multiplicity");
            if m > 0 {
                mult.insert(mu, m);
            }
        }
    }
    Ok(mult)
}

fn enumerate_box(upper: &[i64], f: &mut impl FnMut(&[i64])) {
    let n = upper.len();
    let mut cur = vec![0i64; n];
    loop {
        f(&cur);
        let mut i = 0;
        while i < n {
            cur[i] += 1;
            if cur[i] <= upper[i] {
                break;
            }
            cur[i] = 0;
            i += 1;
        }
        if i == n {
            return;
        }
    }
}

/// Finite character of `V_λ` times `Π_{n>0, α ∈ R ⊔ 0} (1 − e^{−(n,α)})^{−mult}`.
pub fn weyl_module_character(
    rd: &RootDatum,
    lambda: &[i64],
    kappa: &LevelScalar,
    trunc: Truncation,
) -> Result<CharacterSeries, CharacterError> {
    let fin = finite_character(rd, lambda)?;
    let region = Region::new(rd, trunc);
    let mut top: BTreeMap<Drop, i64> = BTreeMap::new();
    for (mu, m) in &fin {
        let d: IntWeight = lambda.iter().zip(mu).map(|(a, b)| a - b).collect();
        top.insert((0, rd.weight_to_root(&d).expect("root lattice")), *m);
    }
    let mut f = region.multiply_by(&region.unit(), &top);
    for root in rd.positive_affine_roots(trunc.energy) {
        if root.energy == 0 {
            continue;
        }
        let x = (root.energy, root.finite.clone());
        for _ in 0..root.multiplicity {
            region.divide_geometric(&mut f, &x);
        }
    }
    Ok(region.finish(&f, base_weight(lambda, kappa), trunc))
}

/// Contragredient duality preserves characters.
pub fn contragredient_character(c: &CharacterSeries) -> CharacterSeries {
    c.clone()
}

/// `Σ_w (−1)^{ℓ(w)} ch M(w·λ) = ch V(λ)` on the truncation. With
/// `flip_sign` one term enters with the wrong sign (a negative control).
pub fn bgg_euler_sum(
    rd: &RootDatum,
    lambda: &[i64],
    kappa: &LevelScalar,
    trunc: Truncation,
    flip_sign: bool,
) -> Result<CharacterSeries, CharacterError> {
    rd.require_dominant(lambda)?;
    let base = base_weight(lambda, kappa);
    let mut total = CharacterSeries::from_coeffs(base.clone(), trunc, BTreeMap::new());
    for (w, e) in rd.weyl().iter().enumerate() {
        let wl = rd.dot(w, lambda);
        let diff: IntWeight = lambda.iter().zip(&wl).map(|(a, b)| a - b).collect();
        let shift = rd.weight_to_root(&diff).expect("dot orbit stays in λ + Q");
        // drops of negative height reach back into the window even when h > depth
        let h = RootDatum::height(&shift);
        let vm = verma_character(rd, &wl, kappa, Truncation::new(trunc.energy, (trunc.depth - h).max(0)));
        let mut sign = if e.length() % 2 == 0 { 1 } else { -1 };
        if flip_sign && e.length() == 1 {
            sign = -sign;
        }
        total = total.add(&vm.reindex(&shift, base.clone(), trunc).scale(sign))?;
    }
    Ok(total)
}

pub fn bgg_euler_check(
    rd: &RootDatum,
    lambda: &[i64],
    kappa: &LevelScalar,
    trunc: Truncation,
    flip_sign: bool,
) -> Result<bool, CharacterError> {
    let lhs = bgg_euler_sum(rd, lambda, kappa, trunc, flip_sign)?;
    let rhs = weyl_module_character(rd, lambda, kappa, trunc)?;
    Ok(lhs.coeffs() == rhs.coeffs())
}

/// `Π_{α>0} (λ+ρ, α) / (ρ, α)`.
pub fn weyl_dimension(rd: &RootDatum, lambda: &[i64]) -> i64 {
    let rho = rd.rho();
    let lr: IntWeight = lambda.iter().zip(&rho).map(|(a, b)| a + b).collect();
    let mut num = Rational::from_integer(1.into());
    for a in rd.positive_roots() {
        let aw = rd.root_to_weight(a);
        num *= rd.form_st_int(&lr, &aw) / rd.form_st_int(&rho, &aw);
    }
    crate::scalars::rational_to_i64(&num).expect("integral dimension")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::RatFunc;

    fn k() -> RatFunc {
        RatFunc::var()
    }

    #[test]
    fn verma_small_coefficients() {
        let a1 = RootDatum::a1();
        let c = verma_character(&a1, &[0], &k(), Truncation::new(2, 2));
        assert_eq!(c.coeff(0, &[0]), 1);
        assert_eq!(c.coeff(1, &[0]), 2);
        assert_eq!(c.coeff(0, &[1]), 1);
        assert!(c.is_genuine());
    }

    #[test]
    fn fock_partition_counts() {
        let a1 = RootDatum::a1();
        let c = fock_character(&a1, &[3], &k(), Truncation::new(4, 4));
        let row: Vec<i64> = (0..=4).map(|n| c.coeff(n, &[0])).collect();
        assert_eq!(row, vec![1, 1, 2, 3, 5]);
        assert_eq!(c.coeff(1, &[1]), 0);
        let a2 = RootDatum::a2();
        let c2 = fock_character(&a2, &[0, 0], &k(), Truncation::new(2, 2));
        assert_eq!(c2.coeff(2, &[0, 0]), 5);
    }

    #[test]
    fn weyl_module_top_slice() {
        let a1 = RootDatum::a1();
        let c = weyl_module_character(&a1, &[2], &k(), Truncation::new(2, 4)).unwrap();
        let top: Vec<i64> = (0..=3).map(|b| c.coeff(0, &[b])).collect();
        assert_eq!(top, vec![1, 1, 1, 0]);
        let a2 = RootDatum::a2();
        let c = weyl_module_character(&a2, &[1, 1], &k(), Truncation::new(0, 4)).unwrap();
        assert_eq!(c.energy_slice_total(0), 8);
        assert!(weyl_module_character(&a1, &[-1], &k(), Truncation::new(1, 1)).is_err());
    }

    #[test]
    fn freudenthal_matches_weyl_dimension() {
        for rd in [RootDatum::a1(), RootDatum::a2(), RootDatum::b2()] {
            let n = rd.rank();
            for a in 0..4 {
                for b in 0..3 {
                    let lam: Vec<i64> = [a, b][..n].to_vec();
                    let ch = finite_character(&rd, &lam).unwrap();
                    let total: i64 = ch.values().sum();
                    assert_eq!(total, weyl_dimension(&rd, &lam), "{} {:?}", rd.name(), lam);
                    // W-invariance
                    for (mu, m) in &ch {
                        for w in rd.weyl() {
                            assert_eq!(ch.get(&w.act(mu)), Some(m));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn wakimoto_equals_verma_small() {
        let a1 = RootDatum::a1();
        let t = Truncation::new(3, 3);
        assert_eq!(
            wakimoto_character(&a1, &[1], &k(), t).coeffs(),
            verma_character(&a1, &[1], &k(), t).coeffs()
        );
    }

    #[test]
    fn bgg_euler_with_negative_control() {
        let a1 = RootDatum::a1();
        let t = Truncation::new(3, 3);
        assert!(bgg_euler_check(&a1, &[0], &k(), t, false).unwrap());
        assert!(!bgg_euler_check(&a1, &[0], &k(), t, true).unwrap());
    }

    #[test]
    fn bgg_euler_with_orbit_deeper_than_window() {
        for name in ["A2", "B2"] {
            let rd = RootDatum::from_name(name).unwrap();
            for (e, d) in [(1, 0), (2, 1), (2, 2)] {
                assert!(bgg_euler_check(&rd, &[0, 1], &k(), Truncation::new(e, d), false).unwrap(), "{name} ({e},{d})");
            }
        }
    }

    #[test]
    fn mixed_truncation_rejected() {
        let a1 = RootDatum::a1();
        let x = verma_character(&a1, &[0], &k(), Truncation::new(1, 1));
        let y = verma_character(&a1, &[0], &k(), Truncation::new(2, 1));
        assert!(matches!(x.add(&y), Err(CharacterError::TruncationMismatch(..))));
        assert_eq!(contragredient_character(&contragredient_character(&x)), x);
    }
}
