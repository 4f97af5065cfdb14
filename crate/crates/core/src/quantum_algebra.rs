//! The positive part of the quantum group, degree by degree: the free
//! algebra on `E_i`, its quotient by the quantum Serre ideal, and the image
//! of that quotient under the bialgebra pairing.
//!
//! The braiding is `b(α_i, α_j) = v^{sym(i,j)}` with `sym(i,j) = m·a_ij/d_i`
//! and `m = lcm(d)`, so `v_i = v^{m/d_i}`. The pairing against the negative
//! part is normalized by `⟨E_i, F_j⟩ = δ_ij` and computed by
//!
//! `⟨u, w·F_j⟩ = Σ_{k : u_k = j} v^{Σ_{l>k} sym(u_l, j)} ⟨u without u_k, w⟩`,
//!
//! which is the braided coproduct of `u` evaluated on `w ⊗ F_j`.

use std::collections::HashMap;

use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::linalg::Matrix;
use crate::root_datum::RootDatum;
use crate::scalars::{
    quantum_binomial_laurent, Field, Laurent, QuantumCtx, QuantumMode, ScalarError,
};

pub type Word = Vec<u8>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AlgebraError {
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error("ℓ = {ell} is not divisible by the symmetrizer d_{index} = {d}")]
    EllNotDivisible { ell: u32, index: usize, d: i64 },
}

/// Degree of a word: letter counts per simple root.
pub fn degree_of(word: &[u8], rank: usize) -> Vec<i64> {
    let mut d = vec![0; rank];
    for &l in word {
        d[l as usize] += 1;
    }
    d
}

/// All words of the given degree, in lexicographic order.
pub fn words_of_degree(nu: &[i64]) -> Vec<Word> {
    fn rec(left: &mut Vec<i64>, cur: &mut Word, out: &mut Vec<Word>) {
        if left.iter().all(|&x| x == 0) {
            out.push(cur.clone());
            return;
        }
        for i in 0..left.len() {
            if left[i] > 0 {
                left[i] -= 1;
                cur.push(i as u8);
                rec(left, cur, out);
                cur.pop();
                left[i] += 1;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut nu.to_vec(), &mut Vec::new(), &mut out);
    out
}

/// All degrees `ν ≥ 0` with `1 ≤ ht(ν) ≤ max_height`, by height.
pub fn degrees_up_to(rank: usize, max_height: i64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    for h in 1..=max_height {
        let mut cur = vec![0i64; rank];
        fn rec(i: usize, left: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
            if i + 1 == cur.len() {
                cur[i] = left;
                out.push(cur.clone());
                return;
            }
            for a in (0..=left).rev() {
                cur[i] = a;
                rec(i + 1, left - a, cur, out);
            }
        }
        rec(0, h, &mut cur, &mut out);
    }
    out
}

/// `Σ_{p+p'=n} (−1)^{p'} [n choose p]_i E_i^p E_j E_i^{p'}`, `n = 1 − a_ij`.
#[derive(Clone, Debug)]
pub struct SerreElement {
    pub i: usize,
    pub j: usize,
    pub degree: Vec<i64>,
    pub terms: Vec<(Word, Laurent)>,
}

#[derive(Clone)]
pub struct PairingMatrix<S> {
    pub degree: Vec<i64>,
    pub words: Vec<Word>,
    /// Rows: words in the `E_i`; columns: the same words read in the `F_i`.
    pub matrix: Matrix<S>,
}

/// One graded component of the Serre quotient.
#[derive(Clone)]
pub struct GradedComponentBasis<S> {
    pub degree: Vec<i64>,
    pub words: Vec<Word>,
    pub relations: Matrix<S>,
    /// Indices into `words` of the quotient basis.
    pub basis: Vec<usize>,
    /// Row `k`: coordinates of `words[k]` in the quotient basis.
    pub normal_forms: Matrix<S>,
    index: HashMap<Word, usize>,
}

impl<S: Field> GradedComponentBasis<S> {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis_words(&self) -> Vec<Word> {
        self.basis.iter().map(|&k| self.words[k].clone()).collect()
    }

    pub fn word_index(&self, w: &[u8]) -> Option<usize> {
        self.index.get(w).copied()
    }

    /// Quotient coordinates of a word of this degree.
    pub fn normal_form(&self, w: &[u8]) -> Vec<S> {
        let k = self.index[w];
        self.normal_forms.row(k).to_vec()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SmallComponent {
    pub degree: Vec<i64>,
    pub dim: usize,
    pub basis_words: Vec<Word>,
}

#[derive(Clone, Debug)]
pub struct QuantumAlgebra<C: QuantumCtx> {
    rd: RootDatum,
    ctx: C,
    exps: Vec<i64>,
    sym: Vec<Vec<i64>>,
    corrupt_serre: bool,
}

impl<C: QuantumCtx> QuantumAlgebra<C> {
    pub fn new(rd: &RootDatum, ctx: C) -> Result<Self, AlgebraError> {
        let d = rd.symmetrizers();
        let m = d.iter().fold(1i64, |acc, &x| acc.lcm(&x));
        let n = rd.rank();
        let exps: Vec<i64> = d.iter().map(|&di| m / di).collect();
        for &e in &exps {
            ctx.check_nondegenerate(e)?;
        }
        let sym = (0..n)
            .map(|i| (0..n).map(|j| m * rd.a(i, j) / d[i]).collect())
            .collect();
        Ok(QuantumAlgebra {
            rd: rd.clone(),
            ctx,
            exps,
            sym,
            corrupt_serre: false,
        })
    }

    /// Perturbs one quantum binomial in every Serre element (negative control).
    pub fn with_corrupted_serre(mut self, corrupt: bool) -> Self {
        self.corrupt_serre = corrupt;
        self
    }

    pub fn root_datum(&self) -> &RootDatum {
        &self.rd
    }

    pub fn ctx(&self) -> &C {
        &self.ctx
    }

    pub fn rank(&self) -> usize {
        self.rd.rank()
    }

    /// `v_i = v^{e_i}`.
    pub fn vi_exponent(&self, i: usize) -> i64 {
        self.exps[i]
    }

    /// `b(α_i, α_j) = v^{sym(i,j)}`.
    pub fn sym(&self, i: usize, j: usize) -> i64 {
        self.sym[i][j]
    }

    pub fn serre_element(&self, i: usize, j: usize) -> SerreElement {
        assert_ne!(i, j);
        let n = 1 - self.rd.a(i, j);
        let e = self.exps[i];
        let mut terms = Vec::new();
        for p in 0..=n {
            let pp = n - p;
            let mut c = quantum_binomial_laurent(n, p, e);
            if self.corrupt_serre && p == 1 {
                c = &c + &Laurent::one();
            }
            if pp % 2 == 1 {
                c = -&c;
            }
            let mut w: Word = vec![i as u8; p as usize];
            w.push(j as u8);
            w.extend(std::iter::repeat_n(i as u8, pp as usize));
            terms.push((w, c));
        }
        let mut degree = vec![0; self.rank()];
        degree[i] += n;
        degree[j] += 1;
        SerreElement { i, j, degree, terms }
    }

    pub fn serre_elements(&self) -> Vec<SerreElement> {
        let n = self.rank();
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    out.push(self.serre_element(i, j));
                }
            }
        }
        out
    }

    /// `⟨u, w⟩` as a Laurent polynomial in `v`.
    pub fn pairing_laurent(&self, u: &[u8], w: &[u8], memo: &mut HashMap<(Word, Word), Laurent>) -> Laurent {
        if u.len() != w.len() {
            return Laurent::zero();
        }
        if u.is_empty() {
            return Laurent::one();
        }
        let key = (u.to_vec(), w.to_vec());
        if let Some(x) = memo.get(&key) {
            return x.clone();
        }
        let (j, rest) = (w[w.len() - 1] as usize, &w[..w.len() - 1]);
        let mut acc = Laurent::zero();
        let mut tail = 0i64;
        for k in (0..u.len()).rev() {
            if u[k] as usize == j {
                let mut sub = u[..k].to_vec();
                sub.extend_from_slice(&u[k + 1..]);
                let inner = self.pairing_laurent(&sub, rest, memo);
                if !inner.is_zero() {
                    acc = &acc + &inner.shift(tail);
                }
            }
            tail += self.sym[u[k] as usize][j];
        }
        memo.insert(key, acc.clone());
        acc
    }

    pub fn pairing_matrix(&self, nu: &[i64]) -> PairingMatrix<C::Scalar> {
        let words = words_of_degree(nu);
        let mut memo = HashMap::new();
        let rows = words
            .iter()
            .map(|u| {
                words
                    .iter()
                    .map(|w| self.ctx.laurent(&self.pairing_laurent(u, w, &mut memo)))
                    .collect()
            })
            .collect();
        PairingMatrix {
            degree: nu.to_vec(),
            matrix: Matrix::from_rows(rows, words.len()),
            words,
        }
    }

    /// Rows `x·s·y` spanning the Serre ideal in degree `ν`.
    pub fn relation_rows(&self, nu: &[i64], words: &[Word]) -> Vec<Vec<Laurent>> {
        let index: HashMap<&Word, usize> = words.iter().enumerate().map(|(k, w)| (w, k)).collect();
        let mut rows = Vec::new();
        for s in self.serre_elements() {
            let rest: Vec<i64> = nu.iter().zip(&s.degree).map(|(a, b)| a - b).collect();
            if rest.iter().any(|&x| x < 0) {
                continue;
            }
            for left in sub_degrees(&rest) {
                let right: Vec<i64> = rest.iter().zip(&left).map(|(a, b)| a - b).collect();
                let lw = words_of_degree(&left);
                let rw = words_of_degree(&right);
                for x in &lw {
                    for y in &rw {
                        let mut row = vec![Laurent::zero(); words.len()];
                        for (t, c) in &s.terms {
                            let mut w = x.clone();
                            w.extend(t);
                            w.extend(y);
                            let k = index[&w];
                            row[k] = &row[k] + c;
                        }
                        rows.push(row);
                    }
                }
            }
        }
        rows
    }

    pub fn kd_component(&self, nu: &[i64]) -> GradedComponentBasis<C::Scalar> {
        let words = words_of_degree(nu);
        let n = words.len();
        let rows: Vec<Vec<C::Scalar>> = self
            .relation_rows(nu, &words)
            .iter()
            .map(|r| r.iter().map(|l| self.ctx.laurent(l)).collect())
            .collect();
        let relations = Matrix::from_rows(rows, n);
        let e = relations.rref();
        let mut is_pivot = vec![false; n];
        for &p in &e.pivots {
            is_pivot[p] = true;
        }
        let basis: Vec<usize> = (0..n).filter(|&k| !is_pivot[k]).collect();
        let col_of: HashMap<usize, usize> = basis.iter().enumerate().map(|(c, &k)| (k, c)).collect();
        let mut normal_forms = Matrix::zeros(n, basis.len());
        for (&k, &c) in &col_of {
            normal_forms.set(k, c, C::Scalar::one());
        }
        for (r, &p) in e.pivots.iter().enumerate() {
            for (&k, &c) in &col_of {
                let x = e.matrix.get(r, k);
                if !x.is_zero() {
                    normal_forms.set(p, c, -x.clone());
                }
            }
        }
        let index = words.iter().cloned().enumerate().map(|(k, w)| (w, k)).collect();
        GradedComponentBasis {
            degree: nu.to_vec(),
            words,
            relations,
            basis,
            normal_forms,
            index,
        }
    }

    fn check_ell(&self) -> Result<(), AlgebraError> {
        if let QuantumMode::RootOfUnity { ell } = self.ctx.mode() {
            for (i, &d) in self.rd.symmetrizers().iter().enumerate() {
                if (ell as i64) % d != 0 {
                    return Err(AlgebraError::EllNotDivisible { ell, index: i, d });
                }
            }
        }
        Ok(())
    }

    /// Image of the Serre quotient under the pairing: the rank of the
    /// pairing restricted to quotient-basis words on both sides.
    pub fn small_component(&self, nu: &[i64]) -> Result<SmallComponent, AlgebraError> {
        self.check_ell()?;
        let kd = self.kd_component(nu);
        let p = self.pairing_matrix(nu);
        let gram = p.matrix.select(&kd.basis, &kd.basis);
        let e = gram.transpose().rref();
        Ok(SmallComponent {
            degree: nu.to_vec(),
            dim: e.pivots.len(),
            basis_words: e.pivots.iter().map(|&c| kd.words[kd.basis[c]].clone()).collect(),
        })
    }

    /// Graded dual of the Serre quotient of the negative part, which has the
    /// same presentation.
    pub fn lusztig_dim(&self, nu: &[i64]) -> usize {
        self.kd_component(nu).dim()
    }

    /// Every element `x·s·y` of the Serre ideal pairs to zero with every word,
    /// in every degree up to `max_height`.
    pub fn serre_vanishing_check(&self, max_height: i64) -> bool {
        for nu in degrees_up_to(self.rank(), max_height) {
            let words = words_of_degree(&nu);
            let rows = self.relation_rows(&nu, &words);
            if rows.is_empty() {
                continue;
            }
            let p = self.pairing_matrix(&nu);
            for row in rows {
                let r: Vec<C::Scalar> = row.iter().map(|l| self.ctx.laurent(l)).collect();
                let prod = p.matrix.transpose().apply(&r);
                if prod.iter().any(|x| !x.is_zero()) {
                    return false;
                }
            }
        }
        true
    }
}

/// All `a` with `0 ≤ a ≤ top` componentwise.
pub fn sub_degrees(top: &[i64]) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for &t in top {
        let mut next = Vec::new();
        for p in &out {
            for a in 0..=t {
                let mut q = p.clone();
                q.push(a);
                next.push(q);
            }
        }
        out = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::{GenericCtx, RatFunc, RootOfUnityCtx};

    #[test]
    fn words_and_degrees() {
        assert_eq!(words_of_degree(&[2, 1]).len(), 3);
        assert_eq!(degrees_up_to(2, 2).len(), 5);
        assert_eq!(degree_of(&[0, 1, 0], 2), vec![2, 1]);
    }

    #[test]
    fn serre_elements_shape() {
        let a1 = QuantumAlgebra::new(&RootDatum::a1(), GenericCtx).unwrap();
        assert!(a1.serre_elements().is_empty());
        let a2 = QuantumAlgebra::new(&RootDatum::a2(), GenericCtx).unwrap();
        let s = a2.serre_element(0, 1);
        assert_eq!(s.degree, vec![2, 1]);
        let two = crate::scalars::quantum_integer_laurent(2, 1);
        assert_eq!(s.terms[0], (vec![1, 0, 0], Laurent::one()));
        assert_eq!(s.terms[1], (vec![0, 1, 0], -&two));
        assert_eq!(s.terms[2], (vec![0, 0, 1], Laurent::one()));
        let b2 = QuantumAlgebra::new(&RootDatum::b2(), GenericCtx).unwrap();
        let s = b2.serre_element(1, 0);
        assert_eq!(s.terms.len(), 4);
        assert_eq!(s.degree, vec![1, 3]);
    }

    #[test]
    fn pairing_examples() {
        let a1 = QuantumAlgebra::new(&RootDatum::a1(), GenericCtx).unwrap();
        let p = a1.pairing_matrix(&[1]);
        assert!(p.matrix.get(0, 0).is_one());
        let p2 = a1.pairing_matrix(&[2]);
        // ⟨E², F²⟩ = 1 + v² = v·[2]
        let v = RatFunc::var();
        assert_eq!(p2.matrix.get(0, 0).clone(), RatFunc::one() + v.clone() * v);
        let a2 = QuantumAlgebra::new(&RootDatum::a2(), GenericCtx).unwrap();
        assert_eq!(a2.pairing_matrix(&[1, 1]).matrix.rank(), 2);
    }

    #[test]
    fn kd_dimensions() {
        let a2 = QuantumAlgebra::new(&RootDatum::a2(), GenericCtx).unwrap();
        assert_eq!(a2.kd_component(&[1, 1]).dim(), 2);
        assert_eq!(a2.kd_component(&[2, 1]).dim(), 2);
        let a1 = QuantumAlgebra::new(&RootDatum::a1(), RootOfUnityCtx::new(3)).unwrap();
        for k in 1..5 {
            assert_eq!(a1.kd_component(&[k]).dim(), 1);
            assert_eq!(a1.lusztig_dim(&[k]), 1);
        }
    }

    #[test]
    fn small_quantum_group_rank_one() {
        for (ell, expected) in [(3u32, vec![1, 1, 0]), (5, vec![1, 1, 1, 1, 0])] {
            let a1 = QuantumAlgebra::new(&RootDatum::a1(), RootOfUnityCtx::new(ell)).unwrap();
            let dims: Vec<usize> = (1..=ell as i64).map(|k| a1.small_component(&[k]).unwrap().dim).collect();
            assert_eq!(dims, expected);
        }
    }

    #[test]
    fn serre_vanishing_and_control() {
        let a2 = QuantumAlgebra::new(&RootDatum::a2(), GenericCtx).unwrap();
        assert!(a2.serre_vanishing_check(3));
        let b2 = QuantumAlgebra::new(&RootDatum::b2(), GenericCtx).unwrap();
        assert!(b2.serre_vanishing_check(4));
        let bad = QuantumAlgebra::new(&RootDatum::a2(), GenericCtx)
            .unwrap()
            .with_corrupted_serre(true);
        assert!(!bad.serre_vanishing_check(3));
    }

    #[test]
    fn normal_forms_kill_relations() {
        let a2 = QuantumAlgebra::new(&RootDatum::a2(), GenericCtx).unwrap();
        let kd = a2.kd_component(&[2, 1]);
        let s = a2.serre_element(0, 1);
        let mut acc = vec![RatFunc::zero(); kd.dim()];
        for (w, c) in &s.terms {
            let c = c.to_ratfunc();
            for (a, x) in acc.iter_mut().zip(kd.normal_form(w)) {
                *a = a.clone() + c.clone() * x;
            }
        }
        assert!(acc.iter().all(|x| x.is_zero()));
    }

    /// Ways to write `nu` as a nonnegative combination of positive roots.
    fn kostant(roots: &[Vec<i64>], nu: &[i64]) -> usize {
        if nu.iter().all(|&x| x == 0) {
            return 1;
        }
        let Some((first, rest)) = roots.split_first() else {
            return 0;
        };
        let mut total = 0;
        let mut left = nu.to_vec();
        loop {
            total += kostant(rest, &left);
            for (l, r) in left.iter_mut().zip(first) {
                *l -= r;
            }
            if left.iter().any(|&x| x < 0) {
                return total;
            }
        }
    }

    #[test]
    fn kd_matches_kostant_partition_count() {
        for rd in [RootDatum::a2(), RootDatum::b2()] {
            let alg = QuantumAlgebra::new(&rd, GenericCtx).unwrap();
            for nu in degrees_up_to(2, 6) {
                assert_eq!(alg.kd_component(&nu).dim(), kostant(rd.positive_roots(), &nu), "{} {:?}", rd.name(), nu);
            }
        }
    }
}
