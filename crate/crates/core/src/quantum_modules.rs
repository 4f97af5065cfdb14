//! Weight modules over the quantum group, stored as one matrix per generator
//! and weight space. The torus acts through the weight grading only.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};
use thiserror::Error;

use crate::linalg::Matrix;
use crate::quantum_algebra::{degrees_up_to, words_of_degree, AlgebraError, GradedComponentBasis, QuantumAlgebra, Word};
use crate::root_datum::{IntWeight, RootDatum, RootDatumError};
use crate::scalars::{quantum_binomial_laurent, quantum_integer_laurent, Field, QuantumCtx, QuantumMode, ScalarError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModuleError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error(transparent)]
    RootDatum(#[from] RootDatumError),
    #[error("relation {relation} fails on the weight space {weight:?}")]
    RelationViolated { weight: IntWeight, relation: String },
    #[error("singular vectors of weight {weight:?}: expected a line, found dimension {dim}")]
    SingularSolve { weight: IntWeight, dim: usize },
    #[error("unsupported: {0}")]
    Unsupported(String),
}

/// Generators acting on a weight module. `EDiv`/`FDiv` are the divided
/// powers `E_i^{(ℓ_i)}`, `F_i^{(ℓ_i)}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Op {
    E,
    F,
    EDiv,
    FDiv,
}

/// Which weights a module would have if it were not truncated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Bound {
    /// Nothing is cut off: a missing weight space is zero.
    Finite,
    /// Weights `top − β` with `β ≥ 0`, `ht β ≤ depth`.
    Below { top: IntWeight, depth: i64 },
    /// Weights `bottom + β` with `β ≥ 0`, `ht β ≤ depth`.
    Above { bottom: IntWeight, depth: i64 },
}

#[derive(Clone)]
pub struct WeightModule<S> {
    rd: RootDatum,
    alpha: Vec<IntWeight>,
    bound: Bound,
    weights: Vec<IntWeight>,
    dims: Vec<usize>,
    index: HashMap<IntWeight, usize>,
    ops: HashMap<(Op, usize, usize), Matrix<S>>,
    divided_step: Option<Vec<i64>>,
    labels: HashMap<usize, Vec<Word>>,
}

fn add(a: &[i64], b: &[i64]) -> IntWeight {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn sub(a: &[i64], b: &[i64]) -> IntWeight {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn scaled(a: &[i64], k: i64) -> IntWeight {
    a.iter().map(|x| x * k).collect()
}

/// `Σ ν_j α_j` in fundamental-weight coordinates.
fn drop_weight(rd: &RootDatum, nu: &[i64]) -> IntWeight {
    rd.root_to_weight(nu)
}

impl<S: Field> WeightModule<S> {
    pub fn new(rd: &RootDatum, bound: Bound) -> Self {
        let alpha = (0..rd.rank()).map(|i| rd.root_to_weight(&rd.simple_root(i))).collect();
        WeightModule {
            rd: rd.clone(),
            alpha,
            bound,
            weights: Vec::new(),
            dims: Vec::new(),
            index: HashMap::new(),
            ops: HashMap::new(),
            divided_step: None,
            labels: HashMap::new(),
        }
    }

    pub fn root_datum(&self) -> &RootDatum {
        &self.rd
    }

    pub fn bound(&self) -> &Bound {
        &self.bound
    }

    pub fn add_block(&mut self, weight: IntWeight, dim: usize) -> usize {
        let k = self.weights.len();
        self.index.insert(weight.clone(), k);
        self.weights.push(weight);
        self.dims.push(dim);
        k
    }

    pub fn set_divided_step(&mut self, step: Vec<i64>) {
        self.divided_step = Some(step);
    }

    /// Matrix of `op_i` from the weight space at `source`.
    pub fn set_op(&mut self, op: Op, i: usize, source: &[i64], m: Matrix<S>) {
        let b = self.index[source];
        self.ops.insert((op, i, b), m);
    }

    pub fn weights(&self) -> &[IntWeight] {
        &self.weights
    }

    pub fn dim_at(&self, mu: &[i64]) -> usize {
        self.index.get(mu).map_or(0, |&b| self.dims[b])
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    /// Basis words of a weight space, when the basis is `F`-monomials.
    pub fn labels(&self, mu: &[i64]) -> Option<&[Word]> {
        self.index.get(mu).and_then(|b| self.labels.get(b)).map(|v| v.as_slice())
    }

    pub fn character(&self) -> BTreeMap<IntWeight, usize> {
        self.weights
            .iter()
            .zip(&self.dims)
            .filter(|(_, &d)| d > 0)
            .map(|(w, &d)| (w.clone(), d))
            .collect()
    }

    pub fn shift(&self, op: Op, i: usize) -> IntWeight {
        let step = self.divided_step.as_ref().map_or(1, |s| s[i]);
        match op {
            Op::E => self.alpha[i].clone(),
            Op::F => scaled(&self.alpha[i], -1),
            Op::EDiv => scaled(&self.alpha[i], step),
            Op::FDiv => scaled(&self.alpha[i], -step),
        }
    }

    /// Whether `mu` lies in the untruncated module's weight range.
    pub fn inside(&self, mu: &[i64]) -> bool {
        let within = |d: IntWeight, depth: i64| match self.rd.weight_to_root(&d) {
            Some(b) => b.iter().all(|&x| x >= 0) && RootDatum::height(&b) <= depth,
            None => false,
        };
        match &self.bound {
            Bound::Finite => true,
            Bound::Below { top, depth } => within(sub(top, mu), *depth),
            Bound::Above { bottom, depth } => within(sub(mu, bottom), *depth),
        }
    }

    /// Matrix of `op_i` from `mu`; `None` when the target is cut off by truncation.
    pub fn op_matrix(&self, op: Op, i: usize, mu: &[i64]) -> Option<Matrix<S>> {
        let target = add(mu, &self.shift(op, i));
        let src = self.dim_at(mu);
        if self.index.contains_key(&target) || self.inside(&target) {
            let b = self.index.get(mu);
            return Some(match b.and_then(|&b| self.ops.get(&(op, i, b))) {
                Some(m) => m.clone(),
                None => Matrix::zeros(self.dim_at(&target), src),
            });
        }
        None
    }

    /// Composite of the generators in application order, from `mu`.
    pub fn path(&self, mu: &[i64], ops: &[(Op, usize)]) -> Option<(IntWeight, Matrix<S>)> {
        let mut cur = mu.to_vec();
        let mut m = Matrix::identity(self.dim_at(mu));
        for &(op, i) in ops {
            let a = self.op_matrix(op, i, &cur)?;
            m = a.mul(&m);
            cur = add(&cur, &self.shift(op, i));
        }
        Some((cur, m))
    }

    fn relation_holds(&self, mu: &[i64], terms: &[(S, Vec<(Op, usize)>)]) -> Option<bool> {
        let mut acc: Option<Matrix<S>> = None;
        for (c, ops) in terms {
            let (_, m) = self.path(mu, ops)?;
            let m = m.scale(c);
            acc = Some(match acc {
                None => m,
                Some(a) => {
                    let mut a = a;
                    for r in 0..a.rows() {
                        for col in 0..a.cols() {
                            a.add_to(r, col, m.get(r, col).clone());
                        }
                    }
                    a
                }
            });
        }
        Some(acc.is_none_or(|a| a.is_zero()))
    }

    /// Checks the `E_iF_j` commutation and both Serre relations on every
    /// weight space where the relation stays inside the truncation.
    pub fn check_relations<C: QuantumCtx<Scalar = S>>(&self, alg: &QuantumAlgebra<C>) -> Result<(), ModuleError> {
        let n = self.rd.rank();
        let ctx = alg.ctx();
        let serre = alg.serre_elements();
        for mu in &self.weights {
            for i in 0..n {
                for j in 0..n {
                    let mut terms = vec![
                        (S::one(), vec![(Op::F, j), (Op::E, i)]),
                        (-S::one(), vec![(Op::E, i), (Op::F, j)]),
                    ];
                    if i == j {
                        let k = ctx.laurent(&quantum_integer_laurent(mu[i], alg.vi_exponent(i)));
                        terms.push((-k, vec![]));
                    }
                    if self.relation_holds(mu, &terms) == Some(false) {
                        return Err(ModuleError::RelationViolated {
                            weight: mu.clone(),
                            relation: format!("[E_{i}, F_{j}]"),
                        });
                    }
                }
            }
            for s in &serre {
                for op in [Op::E, Op::F] {
                    let terms: Vec<(S, Vec<(Op, usize)>)> = s
                        .terms
                        .iter()
                        .map(|(w, c)| (ctx.laurent(c), w.iter().rev().map(|&l| (op, l as usize)).collect()))
                        .collect();
                    if self.relation_holds(mu, &terms) == Some(false) {
                        return Err(ModuleError::RelationViolated {
                            weight: mu.clone(),
                            relation: format!("Serre({:?}, {}, {})", op, s.i, s.j),
                        });
                    }
                }
            }
            if self.divided_step.is_some() {
                for i in 0..n {
                    for (a, b) in [(Op::E, Op::EDiv), (Op::F, Op::FDiv)] {
                        let terms = vec![(S::one(), vec![(a, i), (b, i)]), (-S::one(), vec![(b, i), (a, i)])];
                        if self.relation_holds(mu, &terms) == Some(false) {
                            return Err(ModuleError::RelationViolated {
                                weight: mu.clone(),
                                relation: format!("[{a:?}_{i}, {b:?}_{i}]"),
                            });
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Graded dual with `E_i ↦ F_i^T`, `F_i ↦ E_i^T`: same character.
    pub fn contragredient(&self) -> WeightModule<S> {
        let mut out = WeightModule::new(&self.rd, self.bound.clone());
        out.divided_step = self.divided_step.clone();
        for (w, &d) in self.weights.iter().zip(&self.dims) {
            out.add_block(w.clone(), d);
        }
        let swap = |op| match op {
            Op::E => Op::F,
            Op::F => Op::E,
            Op::EDiv => Op::FDiv,
            Op::FDiv => Op::EDiv,
        };
        for (&(op, i, b), m) in &self.ops {
            let target = add(&self.weights[b], &self.shift(op, i));
            if out.index.contains_key(&target) {
                out.set_op(swap(op), i, &target, m.transpose());
            }
        }
        out
    }

    /// Graded dual twisted by the antipode `S(E_i) = −E_iK_i^{-1}`,
    /// `S(F_i) = −K_iF_i`: weights are negated.
    pub fn antipode_dual<C: QuantumCtx<Scalar = S>>(&self, alg: &QuantumAlgebra<C>) -> Result<WeightModule<S>, ModuleError> {
        if self.divided_step.is_some() {
            return Err(ModuleError::Unsupported("antipode dual with divided powers".into()));
        }
        let bound = match &self.bound {
            Bound::Finite => Bound::Finite,
            Bound::Below { top, depth } => Bound::Above {
                bottom: scaled(top, -1),
                depth: *depth,
            },
            Bound::Above { bottom, depth } => Bound::Below {
                top: scaled(bottom, -1),
                depth: *depth,
            },
        };
        let mut out = WeightModule::new(&self.rd, bound);
        for (w, &d) in self.weights.iter().zip(&self.dims) {
            out.add_block(scaled(w, -1), d);
        }
        let ctx = alg.ctx();
        for (&(op, i, b), m) in &self.ops {
            let src = &self.weights[b];
            let e = alg.vi_exponent(i);
            match op {
                // E_i : V_src → V_{src+α_i} dualizes to V*_{−src−α_i} → V*_{−src}
                Op::E => {
                    let c = -ctx.v_pow(-e * src[i]);
                    out.set_op(Op::E, i, &scaled(&add(src, &self.alpha[i]), -1), m.transpose().scale(&c));
                }
                Op::F => {
                    let target = sub(src, &self.alpha[i]);
                    let c = -ctx.v_pow(e * target[i]);
                    out.set_op(Op::F, i, &scaled(&target, -1), m.transpose().scale(&c));
                }
                _ => unreachable!(),
            }
        }
        Ok(out)
    }
}

/// Builds a truncated quantum Verma module, keeping the Serre-quotient
/// components it used so callers can extend maps along `F`-words.
pub struct VermaBuilder<'a, C: QuantumCtx> {
    alg: &'a QuantumAlgebra<C>,
    kd: HashMap<Vec<i64>, GradedComponentBasis<C::Scalar>>,
}

impl<'a, C: QuantumCtx> VermaBuilder<'a, C> {
    pub fn new(alg: &'a QuantumAlgebra<C>) -> Self {
        VermaBuilder { alg, kd: HashMap::new() }
    }

    pub fn component(&mut self, nu: &[i64]) -> &GradedComponentBasis<C::Scalar> {
        if !self.kd.contains_key(nu) {
            let c = self.alg.kd_component(nu);
            self.kd.insert(nu.to_vec(), c);
        }
        &self.kd[nu]
    }

    /// `E_i · (word)·v_λ` as a combination of words, by
    /// `E_iF_j x = F_jE_i x + δ_ij [⟨wt x, α̌_i⟩]_i x`.
    fn e_on_word(
        &self,
        i: usize,
        lambda: &[i64],
        word: &[u8],
        memo: &mut HashMap<Word, Vec<(Word, C::Scalar)>>,
    ) -> Vec<(Word, C::Scalar)> {
        if word.is_empty() {
            return Vec::new();
        }
        if let Some(x) = memo.get(word) {
            return x.clone();
        }
        let rd = self.alg.root_datum();
        let j = word[0];
        let rest = &word[1..];
        let mut acc: BTreeMap<Word, C::Scalar> = BTreeMap::new();
        for (w, c) in self.e_on_word(i, lambda, rest, memo) {
            let mut nw = vec![j];
            nw.extend(w);
            let e = acc.entry(nw).or_insert_with(C::Scalar::zero);
            *e = e.clone() + c;
        }
        if j as usize == i {
            let pairing = lambda[i] - rest.iter().map(|&k| rd.a(i, k as usize)).sum::<i64>();
            let c = self.alg.ctx().laurent(&quantum_integer_laurent(pairing, self.alg.vi_exponent(i)));
            let e = acc.entry(rest.to_vec()).or_insert_with(C::Scalar::zero);
            *e = e.clone() + c;
        }
        let out: Vec<(Word, C::Scalar)> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        memo.insert(word.to_vec(), out.clone());
        out
    }

    fn combine(&mut self, nu: &[i64], terms: &[(Word, C::Scalar)]) -> Vec<C::Scalar> {
        let kd = self.component(nu);
        let mut v = vec![C::Scalar::zero(); kd.dim()];
        for (w, c) in terms {
            for (a, x) in v.iter_mut().zip(kd.normal_form(w)) {
                if !x.is_zero() {
                    *a = a.clone() + c.clone() * x;
                }
            }
        }
        v
    }

    pub fn verma(&mut self, lambda: &[i64], depth: i64) -> Result<WeightModule<C::Scalar>, ModuleError> {
        let rd = self.alg.root_datum().clone();
        let n = rd.rank();
        let mut m = WeightModule::new(
            &rd,
            Bound::Below {
                top: lambda.to_vec(),
                depth,
            },
        );
        let mut degrees = vec![vec![0; n]];
        degrees.extend(degrees_up_to(n, depth));
        for nu in &degrees {
            let words = if nu.iter().all(|&x| x == 0) {
                vec![Vec::new()]
            } else {
                self.component(nu).basis_words()
            };
            let b = m.add_block(sub(lambda, &drop_weight(&rd, nu)), words.len());
            m.labels.insert(b, words);
        }
        let mut memos: Vec<HashMap<Word, Vec<(Word, C::Scalar)>>> = vec![HashMap::new(); n];
        for nu in &degrees {
            let src = sub(lambda, &drop_weight(&rd, nu));
            let words = m.labels(&src).unwrap().to_vec();
            for i in 0..n {
                let mut up = nu.clone();
                up[i] += 1;
                if RootDatum::height(&up) <= depth {
                    let cols: Vec<Vec<C::Scalar>> = words
                        .iter()
                        .map(|w| {
                            let mut nw = vec![i as u8];
                            nw.extend(w);
                            self.combine(&up, &[(nw, C::Scalar::one())])
                        })
                        .collect();
                    let rows = m.dim_at(&sub(&src, &m.alpha[i]));
                    m.set_op(Op::F, i, &src, Matrix::from_rows(cols, rows).transpose());
                }
                if nu[i] > 0 {
                    let mut down = nu.clone();
                    down[i] -= 1;
                    let cols: Vec<Vec<C::Scalar>> = words
                        .iter()
                        .map(|w| {
                            let terms = self.e_on_word(i, lambda, w, &mut memos[i]);
                            if down.iter().all(|&x| x == 0) {
                                let c = terms.into_iter().map(|t| t.1).fold(C::Scalar::zero(), |a, b| a + b);
                                vec![c]
                            } else {
                                self.combine(&down, &terms)
                            }
                        })
                        .collect();
                    let rows = m.dim_at(&add(&src, &m.alpha[i]));
                    m.set_op(Op::E, i, &src, Matrix::from_rows(cols, rows).transpose());
                }
            }
        }
        Ok(m)
    }
}

pub fn quantum_verma<C: QuantumCtx>(
    alg: &QuantumAlgebra<C>,
    lambda: &[i64],
    depth: i64,
) -> Result<WeightModule<C::Scalar>, ModuleError> {
    let m = VermaBuilder::new(alg).verma(lambda, depth)?;
    m.check_relations(alg)?;
    Ok(m)
}

/// Coordinates modulo a subspace: `(projection, lift)` onto the free
/// columns of the subspace's echelon form.
fn quotient_maps<S: Field>(sub_rows: Vec<Vec<S>>, dim: usize) -> (Matrix<S>, Matrix<S>) {
    let e = Matrix::from_rows(sub_rows, dim).rref();
    let mut is_pivot = vec![false; dim];
    for &p in &e.pivots {
        is_pivot[p] = true;
    }
    let free: Vec<usize> = (0..dim).filter(|&c| !is_pivot[c]).collect();
    let mut proj = Matrix::zeros(free.len(), dim);
    let mut lift = Matrix::zeros(dim, free.len());
    for (q, &f) in free.iter().enumerate() {
        proj.set(q, f, S::one());
        lift.set(f, q, S::one());
        for (r, &p) in e.pivots.iter().enumerate() {
            let x = e.matrix.get(r, f);
            if !x.is_zero() {
                proj.set(q, p, -x.clone());
            }
        }
    }
    (proj, lift)
}

/// Finite-dimensional irreducible quotient of the Verma module. Generic
/// mode uses the quotient by the `F_i^{⟨λ,α̌_i⟩+1}v` and their descendants;
/// at a root of unity only rank one is built, over the divided-power form.
pub fn quantum_weyl<C: QuantumCtx>(alg: &QuantumAlgebra<C>, lambda: &[i64]) -> Result<WeightModule<C::Scalar>, ModuleError> {
    let rd = alg.root_datum().clone();
    rd.require_dominant(lambda)?;
    if let QuantumMode::RootOfUnity { ell } = alg.ctx().mode() {
        if rd.rank() != 1 {
            return Err(ModuleError::Unsupported("Weyl modules at a root of unity beyond rank one".into()));
        }
        return rank_one_divided_weyl(alg, lambda[0], ell as i64);
    }
    let n = rd.rank();
    let lowest = rd.weyl()[rd.w0()].act(lambda);
    let depth = RootDatum::height(&rd.weight_to_root(&sub(lambda, &lowest)).expect("root lattice"));
    let mut builder = VermaBuilder::new(alg);
    let verma = builder.verma(lambda, depth)?;
    let mut out = WeightModule::new(&rd, Bound::Finite);
    let mut maps: HashMap<IntWeight, (Matrix<C::Scalar>, Matrix<C::Scalar>)> = HashMap::new();
    let mut degrees = vec![vec![0; n]];
    degrees.extend(degrees_up_to(n, depth));
    for nu in &degrees {
        let mu = sub(lambda, &drop_weight(&rd, nu));
        let dim = verma.dim_at(&mu);
        let mut rows = Vec::new();
        for i in 0..n {
            let p = lambda[i] + 1;
            if nu[i] < p {
                continue;
            }
            let mut rest = nu.clone();
            rest[i] -= p;
            for x in words_of_degree(&rest) {
                let mut w = x.clone();
                w.extend(std::iter::repeat_n(i as u8, p as usize));
                rows.push(builder.component(nu).normal_form(&w));
            }
        }
        let (proj, lift) = quotient_maps(rows, dim);
        if proj.rows() > 0 {
            out.add_block(mu.clone(), proj.rows());
        }
        maps.insert(mu, (proj, lift));
    }
    for mu in out.weights.clone() {
        for i in 0..n {
            for op in [Op::E, Op::F] {
                let target = add(&mu, &verma.shift(op, i));
                if out.dim_at(&target) == 0 {
                    continue;
                }
                let a = verma.op_matrix(op, i, &mu).expect("inside depth");
                let m = maps[&target].0.mul(&a).mul(&maps[&mu].1);
                out.set_op(op, i, &mu, m);
            }
        }
    }
    out.check_relations(alg)?;
    Ok(out)
}

/// Basis `F^{(k)}v`, `0 ≤ k ≤ m`, with `E`, `F` and the divided powers of
/// order `ℓ` given by the quantum binomial formulas.
fn rank_one_divided_weyl<C: QuantumCtx>(alg: &QuantumAlgebra<C>, m: i64, ell: i64) -> Result<WeightModule<C::Scalar>, ModuleError> {
    let rd = alg.root_datum();
    let ctx = alg.ctx();
    let e = alg.vi_exponent(0);
    let mut out = WeightModule::new(rd, Bound::Finite);
    out.set_divided_step(vec![ell]);
    let wt = |k: i64| vec![m - 2 * k];
    for k in 0..=m {
        out.add_block(wt(k), 1);
    }
    let one = |x: C::Scalar| Matrix::from_rows(vec![vec![x]], 1);
    for k in 0..=m {
        if k >= 1 {
            out.set_op(Op::E, 0, &wt(k), one(ctx.laurent(&quantum_integer_laurent(m - k + 1, e))));
        }
        if k < m {
            out.set_op(Op::F, 0, &wt(k), one(ctx.laurent(&quantum_integer_laurent(k + 1, e))));
        }
        if k >= ell {
            out.set_op(Op::EDiv, 0, &wt(k), one(ctx.laurent(&quantum_binomial_laurent(m - k + ell, ell, e))));
        }
        if k + ell <= m {
            out.set_op(Op::FDiv, 0, &wt(k), one(ctx.laurent(&quantum_binomial_laurent(k + ell, ell, e))));
        }
    }
    out.check_relations(alg)?;
    Ok(out)
}

pub struct BggTerm<S> {
    pub w: usize,
    pub weight: IntWeight,
    pub module: WeightModule<S>,
}

/// Truncated quantum BGG complex; term `k` is `⊕_{ℓ(w)=k} M(w·λ)`.
pub struct BggComplex<S> {
    pub lambda: IntWeight,
    pub depth: i64,
    pub terms: Vec<Vec<BggTerm<S>>>,
    /// `differentials[k]`: term `k+1` → term `k`, per weight.
    differentials: Vec<BTreeMap<IntWeight, Matrix<S>>>,
    weights: Vec<IntWeight>,
}

impl<S: Field> BggComplex<S> {
    pub fn weights(&self) -> &[IntWeight] {
        &self.weights
    }

    pub fn term_dim(&self, k: usize, mu: &[i64]) -> usize {
        self.terms.get(k).map_or(0, |t| t.iter().map(|x| x.module.dim_at(mu)).sum())
    }

    /// Matrix of `d : term k+1 → term k` at weight `mu`.
    pub fn differential(&self, k: usize, mu: &[i64]) -> Matrix<S> {
        self.differentials
            .get(k)
            .and_then(|d| d.get(mu).cloned())
            .unwrap_or_else(|| Matrix::zeros(self.term_dim(k, mu), self.term_dim(k + 1, mu)))
    }

    fn offsets(&self, k: usize, mu: &[i64]) -> Vec<usize> {
        let mut out = Vec::new();
        let mut acc = 0;
        for t in &self.terms[k] {
            out.push(acc);
            acc += t.module.dim_at(mu);
        }
        out
    }

    /// Coordinate of the highest vector of `terms[k][a]` in `d(v)` for the
    /// highest vector `v` of `terms[k+1][b]`.
    pub fn top_coefficient(&self, k: usize, a: usize, b: usize) -> S {
        let src = &self.terms[k + 1][b];
        let dst = &self.terms[k][a];
        if src.weight != dst.weight {
            return S::zero();
        }
        let d = self.differential(k, &src.weight);
        let row = self.offsets(k, &src.weight)[a];
        let col = self.offsets(k + 1, &src.weight)[b];
        d.get(row, col).clone()
    }

    pub fn d_squared_zero(&self) -> bool {
        (0..self.terms.len().saturating_sub(2)).all(|k| {
            self.weights
                .iter()
                .all(|mu| self.differential(k, mu).mul(&self.differential(k + 1, mu)).is_zero())
        })
    }

    /// `dim H_k` at each weight.
    pub fn homology(&self) -> BTreeMap<(usize, IntWeight), usize> {
        let mut out = BTreeMap::new();
        for k in 0..self.terms.len() {
            for mu in &self.weights {
                let dim = self.term_dim(k, mu);
                if dim == 0 {
                    continue;
                }
                let out_rank = if k == 0 { 0 } else { self.differential(k - 1, mu).rank() };
                let in_rank = self.differential(k, mu).rank();
                let h = dim - out_rank - in_rank;
                if h > 0 {
                    out.insert((k, mu.clone()), h);
                }
            }
        }
        out
    }
}

/// Differentials are built from the top: the image of the highest vector of
/// `M(w·λ)` is the unique line of `E`-annihilated vectors of weight `w·λ`
/// in the kernel of the previous differential, then extended along `F`-words.
/// `corrupt` places the terms at `wλ` instead of `w·λ` (negative control).
pub fn quantum_bgg<C: QuantumCtx>(
    alg: &QuantumAlgebra<C>,
    lambda: &[i64],
    depth: i64,
    corrupt: bool,
) -> Result<BggComplex<C::Scalar>, ModuleError> {
    if alg.ctx().mode() != QuantumMode::Generic {
        return Err(ModuleError::Unsupported("BGG resolution at a root of unity".into()));
    }
    let rd = alg.root_datum().clone();
    rd.require_dominant(lambda)?;
    let n = rd.rank();
    let mut builder = VermaBuilder::new(alg);
    let mut terms: Vec<Vec<BggTerm<C::Scalar>>> = Vec::new();
    let mut all: std::collections::BTreeSet<IntWeight> = std::collections::BTreeSet::new();
    for (_, ws) in rd.weyl_by_length() {
        let mut level = Vec::new();
        for w in ws {
            let mu = if corrupt { rd.weyl()[w].act(lambda) } else { rd.dot(w, lambda) };
            let h = RootDatum::height(&rd.weight_to_root(&sub(lambda, &mu)).expect("root lattice"));
            if h > depth {
                continue;
            }
            let module = builder.verma(&mu, depth - h)?;
            all.extend(module.weights().iter().cloned());
            level.push(BggTerm { w, weight: mu, module });
        }
        terms.push(level);
    }
    let mut cx = BggComplex {
        lambda: lambda.to_vec(),
        depth,
        terms,
        differentials: Vec::new(),
        weights: all.into_iter().collect(),
    };
    let alpha: Vec<IntWeight> = (0..n).map(|i| rd.root_to_weight(&rd.simple_root(i))).collect();
    for k in 0..cx.terms.len().saturating_sub(1) {
        let mut dk: BTreeMap<IntWeight, Matrix<C::Scalar>> = BTreeMap::new();
        for mu in &cx.weights {
            dk.insert(mu.clone(), Matrix::zeros(cx.term_dim(k, mu), cx.term_dim(k + 1, mu)));
        }
        let col_offsets: BTreeMap<IntWeight, Vec<usize>> =
            cx.weights.iter().map(|mu| (mu.clone(), cx.offsets(k + 1, mu))).collect();
        for (b, src) in cx.terms[k + 1].iter().enumerate() {
            let top = &src.weight;
            let dim = cx.term_dim(k, top);
            let mut conds: Vec<Vec<C::Scalar>> = Vec::new();
            for i in 0..n {
                let up = add(top, &alpha[i]);
                let offs = cx.offsets(k, top);
                let offs_up = cx.offsets(k, &up);
                let mut m = Matrix::zeros(cx.term_dim(k, &up), dim);
                for (a, t) in cx.terms[k].iter().enumerate() {
                    if t.module.dim_at(top) == 0 || t.module.dim_at(&up) == 0 {
                        continue;
                    }
                    let e = t.module.op_matrix(Op::E, i, top).expect("raising stays inside");
                    for r in 0..e.rows() {
                        for c in 0..e.cols() {
                            m.set(offs_up[a] + r, offs[a] + c, e.get(r, c).clone());
                        }
                    }
                }
                for r in 0..m.rows() {
                    conds.push(m.row(r).to_vec());
                }
            }
            if k >= 1 {
                let prev = cx.differential(k - 1, top);
                for r in 0..prev.rows() {
                    conds.push(prev.row(r).to_vec());
                }
            }
            let kernel = Matrix::from_rows(conds, dim).kernel();
            if kernel.len() != 1 {
                return Err(ModuleError::SingularSolve {
                    weight: top.clone(),
                    dim: kernel.len(),
                });
            }
            let u = kernel[0].clone();
            // extend along F-words: d(x·v_w) = x·u
            for mu in src.module.weights() {
                let Some(words) = src.module.labels(mu) else { continue };
                for (c, word) in words.iter().enumerate() {
                    let mut vec = u.clone();
                    let mut cur = top.clone();
                    for &l in word.iter().rev() {
                        let next = sub(&cur, &alpha[l as usize]);
                        let offs = cx.offsets(k, &cur);
                        let offs_next = cx.offsets(k, &next);
                        let mut out = vec![C::Scalar::zero(); cx.term_dim(k, &next)];
                        for (a, t) in cx.terms[k].iter().enumerate() {
                            let d = t.module.dim_at(&cur);
                            if d == 0 || t.module.dim_at(&next) == 0 {
                                continue;
                            }
                            let f = t.module.op_matrix(Op::F, l as usize, &cur).expect("within depth");
                            let piece = f.apply(&vec[offs[a]..offs[a] + d]);
                            for (r, x) in piece.into_iter().enumerate() {
                                out[offs_next[a] + r] = x;
                            }
                        }
                        vec = out;
                        cur = next;
                    }
                    let m = dk.get_mut(mu).expect("weight in complex");
                    let col = col_offsets[mu][b] + c;
                    for (r, x) in vec.into_iter().enumerate() {
                        m.set(r, col, x);
                    }
                }
            }
        }
        cx.differentials.push(dk);
    }
    Ok(cx)
}
