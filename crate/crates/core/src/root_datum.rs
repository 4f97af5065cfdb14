//! Finite root data of rank ≤ 2, their Weyl groups and the level-dependent forms.
//!
//! Conventions: `a_ij = ⟨α_j, α̌_i⟩`. Weights are written in the fundamental
//! weight basis, so simple root `α_j` has coordinates `(a_1j, …, a_nj)` and
//! `ρ = (1, …, 1)`. Root-lattice elements are written in the simple-root
//! basis. Coweights are written in the simple-coroot basis, so
//! `⟨λ, μ̌⟩ = Σ_i c_i λ_i`. The normalized form has long roots of squared
//! length 2 and `(μ, α_i)_st = d_i^{-1} ⟨μ, α̌_i⟩`.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_traits::{One, Zero};
use thiserror::Error;

use crate::linalg::Matrix;
use crate::scalars::{rat, rat_int, Field, LevelScalar, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RootDatumError {
    #[error("unknown root datum `{0}` (expected A1, A2 or B2)")]
    UnknownName(String),
    #[error("critical level: κ + h∨ = 0")]
    CriticalLevel,
    #[error("weight {0:?} is not dominant integral")]
    NotDominant(Vec<i64>),
    #[error("dimension mismatch: expected rank {expected}, got {got}")]
    Rank { expected: usize, got: usize },
}

/// Integral weight in fundamental-weight coordinates.
pub type IntWeight = Vec<i64>;

/// Weight with coordinates in a field, in the fundamental-weight basis.
#[derive(Clone, PartialEq, Debug)]
pub struct Weight<S = Rational> {
    pub coords: Vec<S>,
}

impl<S: Field> Weight<S> {
    pub fn zero(rank: usize) -> Self {
        Weight {
            coords: vec![S::zero(); rank],
        }
    }

    pub fn from_ints(v: &[i64]) -> Self {
        Weight {
            coords: v.iter().map(|&x| S::from_i64(x)).collect(),
        }
    }

    pub fn scale(&self, s: &S) -> Self {
        Weight {
            coords: self.coords.iter().map(|x| x.clone() * s.clone()).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|x| x.is_zero())
    }
}

impl Weight<Rational> {
    /// Integral coordinates, if all coordinates are integers.
    pub fn to_ints(&self) -> Option<IntWeight> {
        self.coords
            .iter()
            .map(crate::scalars::rational_to_i64)
            .collect()
    }

    pub fn to_level(&self) -> Weight<LevelScalar> {
        Weight {
            coords: self.coords.iter().map(LevelScalar::from_rational).collect(),
        }
    }
}

impl<S: Field> fmt::Display for Weight<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}

impl<S: Field> Add for Weight<S> {
    type Output = Weight<S>;
    fn add(self, rhs: Weight<S>) -> Weight<S> {
        assert_eq!(self.coords.len(), rhs.coords.len());
        Weight {
            coords: self
                .coords
                .into_iter()
                .zip(rhs.coords)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl<S: Field> Sub for Weight<S> {
    type Output = Weight<S>;
    fn sub(self, rhs: Weight<S>) -> Weight<S> {
        self + (-rhs)
    }
}

impl<S: Field> Neg for Weight<S> {
    type Output = Weight<S>;
    fn neg(self) -> Weight<S> {
        Weight {
            coords: self.coords.into_iter().map(|a| -a).collect(),
        }
    }
}

/// `(energy n, finite weight μ, level)`.
#[derive(Clone, PartialEq, Debug)]
pub struct AffineWeight {
    pub energy: i64,
    pub finite: Weight,
    pub level: LevelScalar,
}

/// Positive affine root `(energy, finite)` with `finite` in root coordinates
/// (a root of the finite system or zero).
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct AffineRoot {
    pub energy: i64,
    pub finite: Vec<i64>,
    pub multiplicity: u32,
}

impl AffineRoot {
    pub fn is_imaginary(&self) -> bool {
        self.finite.iter().all(|&x| x == 0)
    }
}

/// Element of the finite Weyl group, stored with one reduced word and its
/// matrix on fundamental-weight coordinates.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct WeylElement {
    pub word: Vec<usize>,
    pub matrix: Vec<Vec<i64>>,
}

impl WeylElement {
    pub fn length(&self) -> usize {
        self.word.len()
    }

    pub fn act(&self, lambda: &[i64]) -> IntWeight {
        self.matrix
            .iter()
            .map(|row| row.iter().zip(lambda).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn act_field<S: Field>(&self, lambda: &Weight<S>) -> Weight<S> {
        Weight {
            coords: self
                .matrix
                .iter()
                .map(|row| {
                    row.iter()
                        .zip(&lambda.coords)
                        .fold(S::zero(), |acc, (&a, b)| {
                            if a == 0 {
                                acc
                            } else {
                                acc + S::from_i64(a) * b.clone()
                            }
                        })
                })
                .collect(),
        }
    }
}

/// Affine Weyl element `λ̌·w`: translation by a coweight after `w`.
#[derive(Clone, PartialEq, Debug)]
pub struct AffineWeylElement {
    /// Coweight in simple-coroot coordinates.
    pub translation: Vec<Rational>,
    /// Index into [`RootDatum::weyl`].
    pub w: usize,
}

#[derive(Clone, Debug)]
pub struct RootDatum {
    name: String,
    cartan: Vec<Vec<i64>>,
    d: Vec<i64>,
    h_dual: i64,
    positive_roots: Vec<Vec<i64>>,
    weyl: Vec<WeylElement>,
    weyl_index: HashMap<Vec<Vec<i64>>, usize>,
    w0: usize,
    weight_gram: Vec<Vec<Rational>>,
}

impl RootDatum {
    pub fn a1() -> Self {
        Self::build("A1", vec![vec![2]], vec![1])
    }

    pub fn a2() -> Self {
        Self::build("A2", vec![vec![2, -1], vec![-1, 2]], vec![1, 1])
    }

    /// `α_1` long, `α_2` short.
    pub fn b2() -> Self {
        Self::build("B2", vec![vec![2, -1], vec![-2, 2]], vec![1, 2])
    }

    pub fn from_name(name: &str) -> Result<Self, RootDatumError> {
        match name.to_ascii_uppercase().as_str() {
            "A1" => Ok(Self::a1()),
            "A2" => Ok(Self::a2()),
            "B2" => Ok(Self::b2()),
            _ => Err(RootDatumError::UnknownName(name.to_string())),
        }
    }

    fn build(name: &str, cartan: Vec<Vec<i64>>, d: Vec<i64>) -> Self {
        let n = cartan.len();
        for i in 0..n {
            for j in 0..n {
                assert_eq!(d[j] * cartan[i][j], d[i] * cartan[j][i], "not symmetrizable");
            }
        }
        // G = D^{-1} A^{-1}
        let a = Matrix::from_rows(
            cartan
                .iter()
                .map(|r| r.iter().map(|&x| rat_int(x)).collect())
                .collect(),
            n,
        );
        let mut aug = Matrix::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, a.get(i, j).clone());
            }
            aug.set(i, n + i, Rational::one());
        }
        let e = aug.rref();
        let weight_gram: Vec<Vec<Rational>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| e.matrix.get(i, n + j).clone() / rat_int(d[i]))
                    .collect()
            })
            .collect();

        let mut rd = RootDatum {
            name: name.to_string(),
            cartan,
            d,
            h_dual: 0,
            positive_roots: Vec::new(),
            weyl: Vec::new(),
            weyl_index: HashMap::new(),
            w0: 0,
            weight_gram,
        };
        rd.positive_roots = rd.enumerate_positive_roots();
        rd.build_weyl();
        let theta = rd.root_to_weight(rd.highest_root());
        let two_rho = vec![2; n];
        let th: IntWeight = theta.iter().zip(&two_rho).map(|(a, b)| a + b).collect();
        let h = rd.form_st_int(&theta, &th) / rat_int(2);
        rd.h_dual = crate::scalars::rational_to_i64(&h).expect("integral dual Coxeter number");
        rd
    }

    fn enumerate_positive_roots(&self) -> Vec<Vec<i64>> {
        let n = self.rank();
        let mut seen: Vec<Vec<i64>> = Vec::new();
        let mut queue: VecDeque<Vec<i64>> = VecDeque::new();
        for i in 0..n {
            let mut e = vec![0; n];
            e[i] = 1;
            queue.push_back(e);
        }
        while let Some(beta) = queue.pop_front() {
            if seen.contains(&beta) {
                continue;
            }
            for i in 0..n {
                let r = self.reflect_root(i, &beta);
                if r.iter().all(|&x| x >= 0) && !seen.contains(&r) {
                    queue.push_back(r);
                }
            }
            seen.push(beta);
        }
        seen.sort_by_key(|b| (b.iter().sum::<i64>(), b.clone()));
        seen
    }

    /// `s_i(β)` for β in root coordinates.
    pub fn reflect_root(&self, i: usize, beta: &[i64]) -> Vec<i64> {
        let pairing: i64 = (0..self.rank()).map(|j| self.cartan[i][j] * beta[j]).sum();
        let mut out = beta.to_vec();
        out[i] -= pairing;
        out
    }

    fn simple_reflection_matrix(&self, i: usize) -> Vec<Vec<i64>> {
        // λ ↦ λ − λ_i α_i, with α_i = column i of the Cartan matrix.
        let n = self.rank();
        (0..n)
            .map(|k| {
                (0..n)
                    .map(|j| {
                        let id = i64::from(k == j);
                        if j == i {
                            id - self.cartan[k][i]
                        } else {
                            id
                        }
                    })
                    .collect()
            })
            .collect()
    }

    fn build_weyl(&mut self) {
        let n = self.rank();
        let id: Vec<Vec<i64>> = (0..n)
            .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
            .collect();
        let gens: Vec<Vec<Vec<i64>>> = (0..n).map(|i| self.simple_reflection_matrix(i)).collect();
        let mut elems = vec![WeylElement {
            word: vec![],
            matrix: id.clone(),
        }];
        let mut index = HashMap::new();
        index.insert(id, 0);
        let mut frontier = vec![0usize];
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for &e in &frontier {
                for (i, g) in gens.iter().enumerate() {
                    let m = int_mat_mul(g, &elems[e].matrix);
                    if index.contains_key(&m) {
                        continue;
                    }
                    let mut word = vec![i];
                    word.extend(&elems[e].word);
                    index.insert(m.clone(), elems.len());
                    next.push(elems.len());
                    elems.push(WeylElement { word, matrix: m });
                }
            }
            frontier = next;
        }
        self.w0 = elems
            .iter()
            .enumerate()
            .max_by_key(|(_, e)| e.length())
            .map(|(k, _)| k)
            .unwrap();
        self.weyl = elems;
        self.weyl_index = index;
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn rank(&self) -> usize {
        self.cartan.len()
    }

    pub fn cartan(&self) -> &[Vec<i64>] {
        &self.cartan
    }

    /// `⟨α_j, α̌_i⟩`.
    pub fn a(&self, i: usize, j: usize) -> i64 {
        self.cartan[i][j]
    }

    pub fn symmetrizers(&self) -> &[i64] {
        &self.d
    }

    pub fn h_dual(&self) -> i64 {
        self.h_dual
    }

    pub fn rho(&self) -> IntWeight {
        vec![1; self.rank()]
    }

    /// Positive roots in root coordinates, sorted by height.
    pub fn positive_roots(&self) -> &[Vec<i64>] {
        &self.positive_roots
    }

    pub fn num_positive_roots(&self) -> usize {
        self.positive_roots.len()
    }

    pub fn highest_root(&self) -> &[i64] {
        self.positive_roots.last().unwrap()
    }

    pub fn simple_root(&self, i: usize) -> Vec<i64> {
        let mut e = vec![0; self.rank()];
        e[i] = 1;
        e
    }

    /// Root-lattice coordinates to fundamental-weight coordinates.
    pub fn root_to_weight(&self, beta: &[i64]) -> IntWeight {
        (0..self.rank())
            .map(|i| (0..self.rank()).map(|j| self.cartan[i][j] * beta[j]).sum())
            .collect()
    }

    /// Inverse of [`root_to_weight`](Self::root_to_weight); `None` off the root lattice.
    pub fn weight_to_root(&self, lambda: &[i64]) -> Option<Vec<i64>> {
        let n = self.rank();
        let g: Vec<Vec<Rational>> = (0..n)
            .map(|i| (0..n).map(|j| &self.weight_gram[i][j] * rat_int(self.d[i])).collect())
            .collect();
        // A^{-1} = D G
        (0..n)
            .map(|i| {
                let x: Rational = (0..n).fold(Rational::zero(), |acc, j| acc + &g[i][j] * rat_int(lambda[j]));
                crate::scalars::rational_to_i64(&x)
            })
            .collect()
    }

    pub fn height(beta: &[i64]) -> i64 {
        beta.iter().sum()
    }

    /// `(λ, μ)_st` on fundamental-weight coordinates.
    pub fn form_st(&self, lambda: &Weight, mu: &Weight) -> Rational {
        let n = self.rank();
        let mut acc = Rational::zero();
        for i in 0..n {
            for j in 0..n {
                acc += &lambda.coords[i] * &self.weight_gram[i][j] * &mu.coords[j];
            }
        }
        acc
    }

    pub fn form_st_int(&self, lambda: &[i64], mu: &[i64]) -> Rational {
        self.form_st(&Weight::from_ints(lambda), &Weight::from_ints(mu))
    }

    /// `(β, γ)_st` on root coordinates: `Σ β_i γ_j a_ij / d_i`.
    pub fn root_form(&self, beta: &[i64], gamma: &[i64]) -> Rational {
        let n = self.rank();
        let mut acc = Rational::zero();
        for i in 0..n {
            for j in 0..n {
                if beta[i] != 0 && gamma[j] != 0 {
                    acc += rat(beta[i] * gamma[j] * self.cartan[i][j], self.d[i]);
                }
            }
        }
        acc
    }

    /// `κ·(λ, μ)_st`.
    pub fn kappa_form(&self, lambda: &Weight, mu: &Weight, kappa: &LevelScalar) -> LevelScalar {
        kappa.clone() * LevelScalar::from_rational(&self.form_st(lambda, mu))
    }

    /// Standard form on affine weights:
    /// `((n₁,μ₁,k₁),(n₂,μ₂,k₂)) = (μ₁,μ₂)_st + n₁k₂ + n₂k₁`.
    pub fn affine_form(&self, x: &AffineWeight, y: &AffineWeight) -> LevelScalar {
        LevelScalar::from_rational(&self.form_st(&x.finite, &y.finite))
            + LevelScalar::from_i64(x.energy) * y.level.clone()
            + LevelScalar::from_i64(y.energy) * x.level.clone()
    }

    /// `φ_κ(μ̌)`: the weight with `(λ, φ_κ(μ̌))_{κ+h∨} = ⟨λ, μ̌⟩` for all `λ`,
    /// namely `A·D·c / (κ + h∨)`.
    pub fn phi_kappa(
        &self,
        coweight: &[Rational],
        kappa: &LevelScalar,
    ) -> Result<Weight<LevelScalar>, RootDatumError> {
        let n = self.rank();
        if coweight.len() != n {
            return Err(RootDatumError::Rank {
                expected: n,
                got: coweight.len(),
            });
        }
        let shifted = kappa.clone() + LevelScalar::from_i64(self.h_dual);
        let inv = shifted.inv().ok_or(RootDatumError::CriticalLevel)?;
        let coords = (0..n)
            .map(|i| {
                let x = (0..n).fold(Rational::zero(), |acc, j| {
                    acc + rat_int(self.cartan[i][j] * self.d[j]) * &coweight[j]
                });
                LevelScalar::from_rational(&x) * inv.clone()
            })
            .collect();
        Ok(Weight { coords })
    }

    /// `w(μ̌)` for a coweight in simple-coroot coordinates.
    pub fn act_coweight(&self, w: usize, coweight: &[Rational]) -> Vec<Rational> {
        let mut c = coweight.to_vec();
        for &i in self.weyl[w].word.iter().rev() {
            // s_i μ̌ = μ̌ − ⟨α_i, μ̌⟩ α̌_i, ⟨α_i, α̌_j⟩ = a_ji
            let p = (0..self.rank()).fold(Rational::zero(), |acc, j| {
                acc + rat_int(self.cartan[j][i]) * &c[j]
            });
            c[i] -= p;
        }
        c
    }

    pub fn weyl(&self) -> &[WeylElement] {
        &self.weyl
    }

    pub fn weyl_by_length(&self) -> BTreeMap<usize, Vec<usize>> {
        let mut out: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (k, e) in self.weyl.iter().enumerate() {
            out.entry(e.length()).or_default().push(k);
        }
        out
    }

    pub fn w0(&self) -> usize {
        self.w0
    }

    pub fn identity(&self) -> usize {
        0
    }

    pub fn compose(&self, a: usize, b: usize) -> usize {
        let m = int_mat_mul(&self.weyl[a].matrix, &self.weyl[b].matrix);
        self.weyl_index[&m]
    }

    pub fn inverse(&self, a: usize) -> usize {
        (0..self.weyl.len())
            .find(|&b| self.compose(a, b) == 0)
            .expect("group inverse")
    }

    /// `w·λ = w(λ+ρ) − ρ`.
    pub fn dot(&self, w: usize, lambda: &[i64]) -> IntWeight {
        let shifted: IntWeight = lambda.iter().map(|x| x + 1).collect();
        self.weyl[w].act(&shifted).iter().map(|x| x - 1).collect()
    }

    /// `λ̌w · μ = φ_κ(λ̌) + w(μ+ρ) − ρ`.
    pub fn dot_action(
        &self,
        elem: &AffineWeylElement,
        mu: &Weight<LevelScalar>,
        kappa: &LevelScalar,
    ) -> Result<Weight<LevelScalar>, RootDatumError> {
        let rho = Weight::<LevelScalar>::from_ints(&self.rho());
        let finite = self.weyl[elem.w].act_field(&(mu.clone() + rho.clone())) - rho;
        if elem.translation.iter().all(|x| x.is_zero()) {
            return Ok(finite);
        }
        Ok(self.phi_kappa(&elem.translation, kappa)? + finite)
    }

    /// Product in the affine Weyl group: `(λ̌₁w₁)(λ̌₂w₂) = (λ̌₁ + w₁λ̌₂)·w₁w₂`.
    pub fn affine_compose(&self, x: &AffineWeylElement, y: &AffineWeylElement) -> AffineWeylElement {
        let moved = self.act_coweight(x.w, &y.translation);
        AffineWeylElement {
            translation: x
                .translation
                .iter()
                .zip(moved)
                .map(|(a, b)| a + b)
                .collect(),
            w: self.compose(x.w, y.w),
        }
    }

    pub fn is_dominant(&self, lambda: &[i64]) -> bool {
        lambda.iter().all(|&x| x >= 0)
    }

    pub fn require_dominant(&self, lambda: &[i64]) -> Result<(), RootDatumError> {
        if lambda.len() != self.rank() {
            return Err(RootDatumError::Rank {
                expected: self.rank(),
                got: lambda.len(),
            });
        }
        if self.is_dominant(lambda) {
            Ok(())
        } else {
            Err(RootDatumError::NotDominant(lambda.to_vec()))
        }
    }

    /// Positive affine roots of energy ≤ `max_energy`, imaginary ones with
    /// multiplicity equal to the rank.
    pub fn positive_affine_roots(&self, max_energy: i64) -> Vec<AffineRoot> {
        let n = self.rank();
        let mut out: Vec<AffineRoot> = self
            .positive_roots
            .iter()
            .map(|a| AffineRoot {
                energy: 0,
                finite: a.clone(),
                multiplicity: 1,
            })
            .collect();
        for e in 1..=max_energy {
            for a in &self.positive_roots {
                out.push(AffineRoot {
                    energy: e,
                    finite: a.clone(),
                    multiplicity: 1,
                });
                out.push(AffineRoot {
                    energy: e,
                    finite: a.iter().map(|x| -x).collect(),
                    multiplicity: 1,
                });
            }
            out.push(AffineRoot {
                energy: e,
                finite: vec![0; n],
                multiplicity: n as u32,
            });
        }
        out
    }
}

fn int_mat_mul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum())
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::RatFunc;
    use proptest::prelude::*;
    use std::collections::BTreeMap;

    fn all() -> Vec<RootDatum> {
        vec![RootDatum::a1(), RootDatum::a2(), RootDatum::b2()]
    }

    #[test]
    fn constructor_invariants() {
        for rd in all() {
            let n = rd.rank();
            for i in 0..n {
                assert_eq!(rd.a(i, i), 2);
                let rho = rd.rho();
                assert_eq!(rho[i], 1);
                // α_j has ⟨α_j, α̌_i⟩ = a_ij
                for j in 0..n {
                    assert_eq!(rd.root_to_weight(&rd.simple_root(j))[i], rd.a(i, j));
                }
                // (α_i, α_i)_st = 2/d_i
                let ai = rd.simple_root(i);
                assert_eq!(rd.root_form(&ai, &ai), rat(2, rd.symmetrizers()[i]));
            }
            let w0 = rd.w0();
            assert_eq!(rd.compose(w0, w0), 0);
        }
        assert_eq!(RootDatum::a1().h_dual(), 2);
        assert_eq!(RootDatum::a2().h_dual(), 3);
        assert_eq!(RootDatum::b2().h_dual(), 3);
        assert_eq!(RootDatum::b2().num_positive_roots(), 4);
    }

    #[test]
    fn weight_and_root_forms_agree() {
        for rd in all() {
            for a in rd.positive_roots() {
                for b in rd.positive_roots() {
                    let wa = rd.root_to_weight(a);
                    let wb = rd.root_to_weight(b);
                    assert_eq!(rd.form_st_int(&wa, &wb), rd.root_form(a, b));
                }
                assert_eq!(rd.weight_to_root(&rd.root_to_weight(a)).as_ref(), Some(a));
            }
        }
    }

    #[test]
    fn weyl_lengths() {
        let counts = |rd: RootDatum| -> Vec<usize> {
            rd.weyl_by_length().values().map(|v| v.len()).collect()
        };
        assert_eq!(counts(RootDatum::a1()), vec![1, 1]);
        assert_eq!(counts(RootDatum::a2()), vec![1, 2, 2, 1]);
        assert_eq!(counts(RootDatum::b2()), vec![1, 2, 2, 2, 1]);
    }

    #[test]
    fn affine_roots_counts() {
        let a1 = RootDatum::a1();
        assert_eq!(a1.positive_affine_roots(0).len(), 1);
        let r = a1.positive_affine_roots(1);
        assert_eq!(r.len(), 4);
        assert!(r.iter().any(|x| x.energy == 1 && x.finite == vec![-1]));
        let a2 = RootDatum::a2();
        let m: u32 = a2.positive_affine_roots(1).iter().map(|r| r.multiplicity).sum();
        assert_eq!(m, 11);
    }

    #[test]
    fn finite_dot_action() {
        let a1 = RootDatum::a1();
        assert_eq!(a1.dot(1, &[0]), vec![-2]);
        let a2 = RootDatum::a2();
        let mut orbit: Vec<IntWeight> = (0..6).map(|w| a2.dot(w, &[0, 0])).collect();
        orbit.sort();
        orbit.dedup();
        assert_eq!(orbit.len(), 6);
        let id = AffineWeylElement {
            translation: vec![Rational::zero(); 2],
            w: 0,
        };
        let mu = Weight::<LevelScalar>::from_ints(&[3, -1]);
        assert_eq!(a2.dot_action(&id, &mu, &RatFunc::var()).unwrap(), mu);
    }

    #[test]
    fn phi_kappa_a1() {
        let a1 = RootDatum::a1();
        let k = RatFunc::var();
        let phi = a1.phi_kappa(&[rat_int(1)], &k).unwrap();
        // ⟨φ_κ(α̌), α̌⟩ = 2/(κ+2)
        let expected = RatFunc::from_i64(2) * (k.clone() + RatFunc::from_i64(2)).inv().unwrap();
        assert_eq!(phi.coords[0], expected);
        assert!(a1.phi_kappa(&[rat_int(0)], &k).unwrap().is_zero());
        let twice = a1.phi_kappa(&[rat_int(2)], &k).unwrap();
        assert_eq!(twice, phi.scale(&RatFunc::from_i64(2)));
        assert_eq!(
            a1.phi_kappa(&[rat_int(1)], &RatFunc::from_i64(-2)),
            Err(RootDatumError::CriticalLevel)
        );
    }

    #[test]
    fn phi_kappa_defining_identity() {
        let k = RatFunc::var();
        for rd in all() {
            let n = rd.rank();
            let shift = k.clone() + RatFunc::from_i64(rd.h_dual());
            for j in 0..n {
                let mut c = vec![Rational::zero(); n];
                c[j] = Rational::one();
                let phi = rd.phi_kappa(&c, &k).unwrap();
                for i in 0..n {
                    let mut lam = vec![0; n];
                    lam[i] = 1;
                    // (λ, φ)_st with φ over Q(κ)
                    let mut acc = RatFunc::zero();
                    for a in 0..n {
                        for b in 0..n {
                            acc = acc
                                + RatFunc::from_rational(&rd.weight_gram[a][b])
                                    * RatFunc::from_i64(lam[a])
                                    * phi.coords[b].clone();
                        }
                    }
                    let lhs = shift.clone() * acc;
                    assert_eq!(lhs, RatFunc::from_i64(i64::from(i == j)));
                }
            }
        }
    }

    #[test]
    fn kappa_form_examples() {
        let a1 = RootDatum::a1();
        let alpha = Weight::from_ints(&[2]);
        assert_eq!(a1.form_st(&alpha, &alpha), rat_int(2));
        let k = RatFunc::var();
        assert!(a1
            .kappa_form(&alpha, &Weight::zero(1), &k)
            .is_zero());
        // Off-diagonal ratios are consistent with the symmetrizers for B2.
        let b2 = RootDatum::b2();
        for i in 0..2 {
            for j in 0..2 {
                let ai = b2.simple_root(i);
                let aj = b2.simple_root(j);
                let lhs = b2.root_form(&ai, &aj) * rat_int(b2.symmetrizers()[i]);
                assert_eq!(lhs, rat_int(b2.a(i, j)));
            }
        }
    }

    /// Σ_w (−1)^{ℓ(w)} e^{w(ρ)−ρ} = Π_{α>0} (1 − e^{−α}).
    #[test]
    fn weyl_denominator() {
        for rd in all() {
            let mut lhs: BTreeMap<IntWeight, i64> = BTreeMap::new();
            for (k, e) in rd.weyl().iter().enumerate() {
                let sign = if e.length() % 2 == 0 { 1 } else { -1 };
                *lhs.entry(rd.dot(k, &vec![0; rd.rank()])).or_default() += sign;
            }
            let mut rhs: BTreeMap<IntWeight, i64> = BTreeMap::new();
            rhs.insert(vec![0; rd.rank()], 1);
            for a in rd.positive_roots() {
                let wa = rd.root_to_weight(a);
                let mut next = rhs.clone();
                for (w, c) in &rhs {
                    let shifted: IntWeight = w.iter().zip(&wa).map(|(x, y)| x - y).collect();
                    *next.entry(shifted).or_default() -= c;
                }
                rhs = next;
            }
            lhs.retain(|_, c| *c != 0);
            rhs.retain(|_, c| *c != 0);
            assert_eq!(lhs, rhs, "{}", rd.name());
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]
        #[test]
        fn dot_action_is_group_action(
            which in 0usize..3,
            w1 in 0usize..8, w2 in 0usize..8,
            t1 in prop::collection::vec(-3i64..4, 2),
            t2 in prop::collection::vec(-3i64..4, 2),
            mu in prop::collection::vec(-5i64..6, 2),
        ) {
            let rd = all().swap_remove(which);
            let n = rd.rank();
            let order = rd.weyl().len();
            let x = AffineWeylElement { translation: t1[..n].iter().map(|&a| rat_int(a)).collect(), w: w1 % order };
            let y = AffineWeylElement { translation: t2[..n].iter().map(|&a| rat_int(a)).collect(), w: w2 % order };
            let k = RatFunc::var();
            let mu = Weight::<LevelScalar>::from_ints(&mu[..n]);
            let lhs = rd.dot_action(&rd.affine_compose(&x, &y), &mu, &k).unwrap();
            let rhs = rd.dot_action(&x, &rd.dot_action(&y, &mu, &k).unwrap(), &k).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
