//! Semi-infinite cohomology of `ŝl₂`-modules relative to the loop algebra of
//! `n = C·e`, computed block by block on an energy/weight window.
//!
//! Two modules are modelled: the Weyl module `V_λ` (PBW monomials in negative
//! modes over the finite `V_λ`) and the Wakimoto module (a polynomial ring in
//! free fields). Both use the ghost vacuum killed by `b_n (n ≥ 0)` and
//! `c_n (n ≥ 1)`, with `d = Σ_n e_n ⊗ c_{−n}`.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::characters::{fock_character, wakimoto_character, weyl_module_character, CharacterSeries, Truncation};
use crate::cohomology::{coh_via_bgg, coh_via_resolution, trivial_module, CohomologyError, RankOneLusztig};
use crate::linalg::Matrix;
use crate::quantum_algebra::QuantumAlgebra;
use crate::root_datum::RootDatum;
use crate::scalars::{Field, Fp, LevelScalar, Poly, RatFunc, Rational, RootOfUnityCtx};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BrstError {
    #[error("truncation (energy {energy}, depth {depth}) too small for λ = {lambda}: need energy ≥ {min_energy}, depth ≥ {min_depth}")]
    Boundary {
        lambda: i64,
        energy: i64,
        depth: i64,
        min_energy: i64,
        min_depth: i64,
    },
    #[error("degree {degree}, weight {weight}: no Fock decomposition, residual {residual:?}")]
    NoDecomposition {
        degree: i64,
        weight: i64,
        residual: Vec<(i64, i64)>,
    },
    #[error("highest weight must be dominant, got {0}")]
    NotDominant(i64),
    #[error(transparent)]
    Cohomology(#[from] CohomologyError),
}

/// Loop generators `e, h, f`.
pub mod gen {
    pub const E: u8 = 0;
    pub const H: u8 = 1;
    pub const F: u8 = 2;
}

/// Free-field generators `a, a*, b`.
pub mod field {
    pub const A: u8 = 0;
    pub const A_STAR: u8 = 1;
    pub const B: u8 = 2;
}

/// Sorted factors `(mode, kind)` plus an index into the finite top.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SliceMono {
    pub modes: Vec<(i64, u8)>,
    pub top: u32,
}

impl SliceMono {
    pub fn depth(&self) -> i64 {
        self.modes.iter().map(|m| -m.0).sum()
    }
}

pub type Vector = BTreeMap<SliceMono, LevelScalar>;

fn add_into(v: &mut Vector, k: SliceMono, c: LevelScalar) {
    if c.is_zero() {
        return;
    }
    match v.get_mut(&k) {
        Some(x) => {
            *x = x.clone() + c;
            if x.is_zero() {
                v.remove(&k);
            }
        }
        None => {
            v.insert(k, c);
        }
    }
}

fn lint(n: i64) -> LevelScalar {
    LevelScalar::from_i64(n)
}

/// A module of `ŝl₂` at level `κ` with an explicit monomial basis graded by
/// depth (minus energy) and weight.
pub trait Slice: Sync {
    fn lambda(&self) -> i64;
    fn kappa(&self) -> &LevelScalar;
    fn basis(&self, depth: i64, weight: i64) -> Vec<SliceMono>;
    fn act(&self, x: u8, n: i64, v: &SliceMono) -> Vector;
    fn character(&self, trunc: Truncation) -> CharacterSeries;
}

pub fn act_vector<S: Slice + ?Sized>(s: &S, x: u8, n: i64, v: &Vector) -> Vector {
    let mut out = Vector::new();
    for (m, c) in v {
        for (m2, c2) in s.act(x, n, m) {
            add_into(&mut out, m2, c.clone() * c2);
        }
    }
    out
}

/// Multisets of `(mode, kind)` with modes `≤ −1`, keyed by total depth.
fn colored_monomials(kinds: u8, max_depth: i64) -> BTreeMap<i64, Vec<Vec<(i64, u8)>>> {
    fn rec(
        cur: &mut Vec<(i64, u8)>,
        depth: i64,
        max_depth: i64,
        kinds: u8,
        out: &mut BTreeMap<i64, Vec<Vec<(i64, u8)>>>,
    ) {
        out.entry(depth).or_default().push(cur.clone());
        let last = cur.last().copied();
        for m in -(max_depth - depth)..=-1 {
            for k in 0..kinds {
                if last.is_some_and(|l| (m, k) < l) {
                    continue;
                }
                cur.push((m, k));
                rec(cur, depth - m, max_depth, kinds, out);
                cur.pop();
            }
        }
    }
    let mut out = BTreeMap::new();
    rec(&mut Vec::new(), 0, max_depth, kinds, &mut out);
    out
}

fn sl2_weight(k: u8) -> i64 {
    [2, 0, -2][k as usize]
}

fn sl2_bracket(x: u8, y: u8) -> Option<(u8, i64)> {
    use gen::*;
    match (x, y) {
        (E, F) => Some((H, 1)),
        (F, E) => Some((H, -1)),
        (H, E) => Some((E, 2)),
        (E, H) => Some((E, -2)),
        (H, F) => Some((F, -2)),
        (F, H) => Some((F, 2)),
        _ => None,
    }
}

fn sl2_form(x: u8, y: u8) -> i64 {
    use gen::*;
    match (x, y) {
        (E, F) | (F, E) => 1,
        (H, H) => 2,
        _ => 0,
    }
}

/// The Weyl module induced from the finite `V_λ` at level `κ`.
pub struct WeylSlice {
    lambda: i64,
    kappa: LevelScalar,
    pbw: BTreeMap<i64, Vec<Vec<(i64, u8)>>>,
}

impl WeylSlice {
    pub fn new(lambda: i64, kappa: LevelScalar, max_depth: i64) -> Self {
        WeylSlice {
            lambda,
            kappa,
            pbw: colored_monomials(3, max_depth),
        }
    }

    /// `u_k = f^k u_0` with `e u_k = k(λ−k+1) u_{k−1}`.
    fn top_action(&self, x: u8, k: u32) -> Vector {
        let m = self.lambda;
        let ki = k as i64;
        let mut out = Vector::new();
        let mono = |t: u32| SliceMono { modes: vec![], top: t };
        match x {
            gen::E if ki >= 1 => add_into(&mut out, mono(k - 1), lint(ki * (m - ki + 1))),
            gen::F if ki < m => add_into(&mut out, mono(k + 1), LevelScalar::one()),
            gen::H => add_into(&mut out, mono(k), lint(m - 2 * ki)),
            _ => {}
        }
        out
    }

    /// `x_m · (modes ⊗ u_top)` straightened to PBW order.
    fn lmul(&self, x: u8, m: i64, modes: &[(i64, u8)], top: u32) -> Vector {
        let Some(&first) = modes.first() else {
            return match m.cmp(&0) {
                std::cmp::Ordering::Greater => Vector::new(),
                std::cmp::Ordering::Equal => self.top_action(x, top),
                std::cmp::Ordering::Less => Vector::from([(
                    SliceMono {
                        modes: vec![(m, x)],
                        top,
                    },
                    LevelScalar::one(),
                )]),
            };
        };
        if m < 0 && (m, x) <= first {
            let mut nm = Vec::with_capacity(modes.len() + 1);
            nm.push((m, x));
            nm.extend_from_slice(modes);
            return Vector::from([(SliceMono { modes: nm, top }, LevelScalar::one())]);
        }
        let rest = &modes[1..];
        let mut out = Vector::new();
        for (w, c) in self.lmul(x, m, rest, top) {
            for (w2, c2) in self.lmul(first.1, first.0, &w.modes, w.top) {
                add_into(&mut out, w2, c.clone() * c2);
            }
        }
        if let Some((z, s)) = sl2_bracket(x, first.1) {
            for (w, c) in self.lmul(z, m + first.0, rest, top) {
                add_into(&mut out, w, lint(s) * c);
            }
        }
        let f = sl2_form(x, first.1);
        if m + first.0 == 0 && f != 0 {
            let w = SliceMono {
                modes: rest.to_vec(),
                top,
            };
            add_into(&mut out, w, lint(m * f) * self.kappa.clone());
        }
        out
    }
}

impl Slice for WeylSlice {
    fn lambda(&self) -> i64 {
        self.lambda
    }

    fn kappa(&self) -> &LevelScalar {
        &self.kappa
    }

    fn basis(&self, depth: i64, weight: i64) -> Vec<SliceMono> {
        let mut out = Vec::new();
        for mono in self.pbw.get(&depth).into_iter().flatten() {
            let wt: i64 = mono.iter().map(|x| sl2_weight(x.1)).sum();
            let twice_k = self.lambda + wt - weight;
            if twice_k < 0 || twice_k % 2 != 0 || twice_k / 2 > self.lambda {
                continue;
            }
            out.push(SliceMono {
                modes: mono.clone(),
                top: (twice_k / 2) as u32,
            });
        }
        out
    }

    fn act(&self, x: u8, n: i64, v: &SliceMono) -> Vector {
        self.lmul(x, n, &v.modes, v.top)
    }

    fn character(&self, trunc: Truncation) -> CharacterSeries {
        weyl_module_character(&RootDatum::a1(), &[self.lambda], &self.kappa, trunc).expect("dominant")
    }
}

/// Free-field realization: `e = a`, `h = −2:a*a: + b`,
/// `f = −:a*a*a: + κ∂a* + :a*b:`, with `[a_n, a*_m] = δ_{n+m,0}` and
/// `[b_m, b_n] = 2(κ+2)m δ_{m+n,0}`, `b_0 = λ` on the vacuum.
pub struct WakimotoSlice {
    lambda: i64,
    kappa: LevelScalar,
    positive: BTreeMap<i64, Vec<Vec<(i64, u8)>>>,
}

impl WakimotoSlice {
    pub fn new(lambda: i64, kappa: LevelScalar, max_depth: i64) -> Self {
        WakimotoSlice {
            lambda,
            kappa,
            positive: colored_monomials(3, max_depth),
        }
    }

    fn is_creation(kind: u8, mode: i64) -> bool {
        match kind {
            field::A_STAR => mode <= 0,
            _ => mode < 0,
        }
    }

    fn field_op(&self, kind: u8, mode: i64, v: &SliceMono) -> Option<(SliceMono, LevelScalar)> {
        if Self::is_creation(kind, mode) {
            let mut m = v.modes.clone();
            let pos = m.partition_point(|x| *x < (mode, kind));
            m.insert(pos, (mode, kind));
            return Some((SliceMono { modes: m, top: 0 }, LevelScalar::one()));
        }
        if kind == field::B && mode == 0 {
            return Some((v.clone(), lint(self.lambda)));
        }
        let conj = match kind {
            field::A => (-mode, field::A_STAR),
            field::A_STAR => (-mode, field::A),
            _ => (-mode, field::B),
        };
        let pos = v.modes.iter().position(|x| *x == conj)?;
        let count = v.modes.iter().filter(|x| **x == conj).count() as i64;
        let factor = match kind {
            field::A => LevelScalar::one(),
            field::A_STAR => lint(-1),
            _ => lint(2 * mode) * (self.kappa.clone() + lint(2)),
        };
        let mut m = v.modes.clone();
        m.remove(pos);
        Some((SliceMono { modes: m, top: 0 }, lint(count) * factor))
    }

    /// Normally ordered product applied to `v`: annihilators act first.
    fn normal_product(&self, factors: &[(u8, i64)], v: &SliceMono, coeff: LevelScalar, out: &mut Vector) {
        let mut order: Vec<(u8, i64)> = factors.iter().copied().filter(|f| !Self::is_creation(f.0, f.1)).collect();
        order.extend(factors.iter().copied().filter(|f| Self::is_creation(f.0, f.1)));
        let mut cur = v.clone();
        let mut c = coeff;
        for (kind, mode) in order {
            let Some((next, s)) = self.field_op(kind, mode, &cur) else {
                return;
            };
            cur = next;
            c = c * s;
        }
        add_into(out, cur, c);
    }
}

impl WakimotoSlice {
    /// Modes a factor of `kind` can take with a nonzero contribution on `v`:
    /// annihilators must meet a variable of `v`, and creators add at most
    /// `budget` depth since the output has depth `depth(v) − n`.
    fn candidate_modes(kind: u8, v: &SliceMono, budget: i64) -> Vec<i64> {
        let conj = match kind {
            field::A => field::A_STAR,
            field::A_STAR => field::A,
            _ => field::B,
        };
        let mut out: Vec<i64> = (-budget..=0).filter(|&m| Self::is_creation(kind, m)).collect();
        out.extend(v.modes.iter().filter(|x| x.1 == conj && !Self::is_creation(kind, -x.0)).map(|x| -x.0));
        if kind == field::B {
            out.push(0);
        }
        out.sort();
        out.dedup();
        out
    }

    /// `Σ :x¹_{m_1} ⋯ x^r_{m_r}:` over `m_1 + ⋯ + m_r = n`, applied to `v`.
    fn mode_sum(&self, kinds: &[u8], n: i64, v: &SliceMono, coeff: LevelScalar, out: &mut Vector) {
        let budget = v.depth() - n;
        if budget < 0 {
            return;
        }
        let cands: Vec<Vec<i64>> = kinds[..kinds.len() - 1].iter().map(|&k| Self::candidate_modes(k, v, budget)).collect();
        let mut modes = vec![0; kinds.len()];
        self.mode_sum_rec(kinds, &cands, 0, n, &mut modes, v, &coeff, out);
    }

    #[allow(clippy::too_many_arguments)]
    fn mode_sum_rec(
        &self,
        kinds: &[u8],
        cands: &[Vec<i64>],
        i: usize,
        left: i64,
        modes: &mut Vec<i64>,
        v: &SliceMono,
        coeff: &LevelScalar,
        out: &mut Vector,
    ) {
        if i + 1 == kinds.len() {
            modes[i] = left;
            let factors: Vec<(u8, i64)> = kinds.iter().copied().zip(modes.iter().copied()).collect();
            self.normal_product(&factors, v, coeff.clone(), out);
            return;
        }
        for &m in &cands[i] {
            modes[i] = m;
            self.mode_sum_rec(kinds, cands, i + 1, left - m, modes, v, coeff, out);
        }
    }
}

impl Slice for WakimotoSlice {
    fn lambda(&self) -> i64 {
        self.lambda
    }

    fn kappa(&self) -> &LevelScalar {
        &self.kappa
    }

    fn basis(&self, depth: i64, weight: i64) -> Vec<SliceMono> {
        let mut out = Vec::new();
        for mono in self.positive.get(&depth).into_iter().flatten() {
            let na = mono.iter().filter(|x| x.1 == field::A).count() as i64;
            let nas = mono.iter().filter(|x| x.1 == field::A_STAR).count() as i64;
            let twice_k = self.lambda + 2 * na - 2 * nas - weight;
            if twice_k < 0 || twice_k % 2 != 0 {
                continue;
            }
            let mut modes = mono.clone();
            modes.extend(std::iter::repeat_n((0, field::A_STAR), (twice_k / 2) as usize));
            modes.sort();
            out.push(SliceMono { modes, top: 0 });
        }
        out
    }

    fn act(&self, x: u8, n: i64, v: &SliceMono) -> Vector {
        use field::*;
        let mut out = Vector::new();
        match x {
            gen::E => self.normal_product(&[(A, n)], v, LevelScalar::one(), &mut out),
            gen::H => {
                self.mode_sum(&[A_STAR, A], n, v, lint(-2), &mut out);
                self.normal_product(&[(B, n)], v, LevelScalar::one(), &mut out);
            }
            _ => {
                self.mode_sum(&[A_STAR, A_STAR, A], n, v, lint(-1), &mut out);
                self.mode_sum(&[A_STAR, B], n, v, LevelScalar::one(), &mut out);
                self.normal_product(&[(A_STAR, n)], v, lint(-n) * self.kappa.clone(), &mut out);
            }
        }
        out
    }

    fn character(&self, trunc: Truncation) -> CharacterSeries {
        wakimoto_character(&RootDatum::a1(), &[self.lambda], &self.kappa, trunc)
    }
}

/// Checks `[x_m, y_n] = [x,y]_{m+n} + m κ (x,y) δ_{m+n,0}` on every basis
/// vector of depth `≤ max_depth` and weight in `[λ − 4, λ + 2·depth]`, for
/// modes in `[−2, 2]`.
pub fn check_commutators<S: Slice + ?Sized>(s: &S, max_depth: i64) -> bool {
    let lambda = s.lambda();
    let gens = [gen::E, gen::H, gen::F];
    for d in 0..=max_depth {
        let mut w = lambda - 4;
        while w <= lambda + 2 * d {
            for b in s.basis(d, w) {
                let v = Vector::from([(b, LevelScalar::one())]);
                for &x in &gens {
                    for &y in &gens {
                        for m in -2..=2 {
                            for n in -2..=2 {
                                let xy = act_vector(s, x, m, &act_vector(s, y, n, &v));
                                let yx = act_vector(s, y, n, &act_vector(s, x, m, &v));
                                let mut lhs = xy;
                                for (k, c) in yx {
                                    add_into(&mut lhs, k, -c);
                                }
                                let mut rhs = Vector::new();
                                if let Some((z, c)) = sl2_bracket(x, y) {
                                    for (k, c2) in act_vector(s, z, m + n, &v) {
                                        add_into(&mut rhs, k, lint(c) * c2);
                                    }
                                }
                                if m + n == 0 {
                                    for (k, c) in &v {
                                        add_into(&mut rhs, k.clone(), lint(m * sl2_form(x, y)) * s.kappa().clone() * c.clone());
                                    }
                                }
                                if lhs != rhs {
                                    return false;
                                }
                            }
                        }
                    }
                }
            }
            w += 2;
        }
    }
    true
}

/// Ghost monomial: sorted `(kind, mode)` with kind 0 for `c`, 1 for `b`.
pub type Ghost = Vec<(u8, i64)>;

const GHOST_C: u8 = 0;
const GHOST_B: u8 = 1;

fn ghost_depth(g: &Ghost) -> i64 {
    g.iter().map(|x| -x.1).sum()
}

fn ghost_weight(g: &Ghost) -> i64 {
    g.iter().map(|x| if x.0 == GHOST_C { -2 } else { 2 }).sum()
}

fn ghost_number(g: &Ghost) -> i64 {
    g.iter().map(|x| if x.0 == GHOST_C { 1 } else { -1 }).sum()
}

/// Ghost monomials of depth `≤ max_depth`, keyed by `(depth, weight)`.
fn ghost_monomials(max_depth: i64) -> BTreeMap<(i64, i64), Vec<Ghost>> {
    let mut vars: Vec<(u8, i64)> = (-max_depth..=0).map(|m| (GHOST_C, m)).collect();
    vars.extend((-max_depth..=-1).map(|n| (GHOST_B, n)));
    vars.sort();
    fn rec(vars: &[(u8, i64)], i: usize, cur: &mut Ghost, left: i64, out: &mut Vec<Ghost>) {
        if i == vars.len() {
            out.push(cur.clone());
            return;
        }
        rec(vars, i + 1, cur, left, out);
        let d = -vars[i].1;
        if d <= left {
            cur.push(vars[i]);
            rec(vars, i + 1, cur, left - d, out);
            cur.pop();
        }
    }
    let mut all = Vec::new();
    rec(&vars, 0, &mut Vec::new(), max_depth, &mut all);
    let mut out: BTreeMap<(i64, i64), Vec<Ghost>> = BTreeMap::new();
    for g in all {
        out.entry((ghost_depth(&g), ghost_weight(&g))).or_default().push(g);
    }
    out
}

/// `c_mode · g` with its fermionic sign; `ignore_signs` drops the sign.
fn apply_c(mode: i64, g: &Ghost, ignore_signs: bool) -> Option<(Ghost, i64)> {
    let (out, pos) = if mode <= 0 {
        let x = (GHOST_C, mode);
        if g.contains(&x) {
            return None;
        }
        let pos = g.partition_point(|y| *y < x);
        let mut out = g.clone();
        out.insert(pos, x);
        (out, pos)
    } else {
        let pos = g.iter().position(|y| *y == (GHOST_B, -mode))?;
        let mut out = g.clone();
        out.remove(pos);
        (out, pos)
    };
    let sign = if ignore_signs || pos % 2 == 0 { 1 } else { -1 };
    Some((out, sign))
}

/// The complex at fixed `(depth, weight)`: one space per ghost number and
/// `d_g : C^g → C^{g+1}` as a matrix.
pub struct Block {
    pub depth: i64,
    pub weight: i64,
    pub spaces: BTreeMap<i64, Vec<(SliceMono, Ghost)>>,
    pub diffs: BTreeMap<i64, Matrix<LevelScalar>>,
}

fn build_block<S: Slice + ?Sized>(
    s: &S,
    ghosts: &BTreeMap<(i64, i64), Vec<Ghost>>,
    depth: i64,
    weight: i64,
    ignore_signs: bool,
) -> Block {
    let mut spaces: BTreeMap<i64, Vec<(SliceMono, Ghost)>> = BTreeMap::new();
    for (&(gd, gw), gs) in ghosts {
        if gd > depth {
            continue;
        }
        let mods = s.basis(depth - gd, weight - gw);
        if mods.is_empty() {
            continue;
        }
        for g in gs {
            let sp = spaces.entry(ghost_number(g)).or_default();
            for v in &mods {
                sp.push((v.clone(), g.clone()));
            }
        }
    }
    let index: BTreeMap<i64, HashMap<&(SliceMono, Ghost), usize>> = spaces
        .iter()
        .map(|(g, b)| (*g, b.iter().enumerate().map(|(i, x)| (x, i)).collect()))
        .collect();
    let mut diffs = BTreeMap::new();
    for (g, basis) in &spaces {
        let Some(target) = index.get(&(g + 1)) else {
            continue;
        };
        let mut m = Matrix::zeros(target.len(), basis.len());
        for (col, (v, gh)) in basis.iter().enumerate() {
            for n in -ghost_depth(gh)..=v.depth() {
                let Some((g2, sign)) = apply_c(-n, gh, ignore_signs) else {
                    continue;
                };
                for (v2, c) in s.act(gen::E, n, v) {
                    let row = target[&(v2, g2.clone())];
                    m.add_to(row, col, lint(sign) * c);
                }
            }
        }
        diffs.insert(*g, m);
    }
    Block {
        depth,
        weight,
        spaces,
        diffs,
    }
}

fn poly_at(p: &Poly, x: Fp) -> Option<Fp> {
    let mut acc = Fp(0);
    for c in p.coeffs().iter().rev() {
        acc = acc * x + Fp::try_from_rational(c)?;
    }
    Some(acc)
}

/// Value of a function of `κ` at `κ = x` in `F_p`; `None` at a pole.
pub fn specialize(f: &RatFunc, x: Fp) -> Option<Fp> {
    let d = poly_at(f.denom(), x)?;
    poly_at(f.numer(), x)?.div(&d)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlockReport {
    /// Energy relative to the top, `−depth`.
    pub energy: i64,
    pub weight: i64,
    pub ghost_dims: BTreeMap<i64, usize>,
    pub homology_dims: BTreeMap<i64, usize>,
    /// Ranks taken from one reduction mod p and certified by degree
    /// separation; otherwise computed exactly.
    pub certified_by_reduction: bool,
    pub d_squared_zero: bool,
}

fn homology_from_ranks(dims: &BTreeMap<i64, usize>, ranks: &BTreeMap<i64, usize>) -> BTreeMap<i64, usize> {
    dims.iter()
        .map(|(g, n)| {
            let out = ranks.get(g).copied().unwrap_or(0);
            let inc = ranks.get(&(g - 1)).copied().unwrap_or(0);
            (*g, n.saturating_sub(out + inc))
        })
        .collect()
}

/// Ranks over `F_p` bound the true ranks from below, so reduced homology
/// bounds the true homology from above with the same Euler characteristic.
/// A rank drop at `d_g` raises both `h_g` and `h_{g+1}`; if no two adjacent
/// degrees carry reduced homology, no rank dropped.
fn block_report(b: &Block, at: Fp) -> BlockReport {
    let dims: BTreeMap<i64, usize> = b.spaces.iter().map(|(g, v)| (*g, v.len())).collect();
    let reduced: Option<BTreeMap<i64, usize>> = b
        .diffs
        .iter()
        .map(|(g, m)| m.try_map(|x| specialize(x, at).ok_or(())).ok().map(|m| (*g, m.rank())))
        .collect();
    let mut certified = false;
    let mut homology = BTreeMap::new();
    if let Some(r) = reduced {
        let h = homology_from_ranks(&dims, &r);
        certified = !h.iter().any(|(g, n)| *n > 0 && h.get(&(g + 1)).is_some_and(|m| *m > 0));
        if certified {
            homology = h;
        }
    }
    if !certified {
        let exact: BTreeMap<i64, usize> = b.diffs.iter().map(|(g, m)| (*g, m.rank())).collect();
        homology = homology_from_ranks(&dims, &exact);
    }
    let d_squared_zero = b.diffs.iter().all(|(g, m)| match b.diffs.get(&(g + 1)) {
        Some(next) => next.mul(m).is_zero(),
        None => true,
    });
    BlockReport {
        energy: -b.depth,
        weight: b.weight,
        ghost_dims: dims,
        homology_dims: homology.into_iter().filter(|x| x.1 > 0).collect(),
        certified_by_reduction: certified,
        d_squared_zero,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BrstCohomology {
    pub lambda: i64,
    pub truncation: Truncation,
    pub blocks: Vec<BlockReport>,
    pub d_squared_zero: bool,
    /// `Σ_g (−1)^g dim C^g` equals the product of the module character and
    /// the ghost character on every block.
    pub euler_ok: bool,
}

impl BrstCohomology {
    /// `(degree, depth, weight) → dim H`.
    pub fn table(&self) -> BTreeMap<(i64, i64, i64), usize> {
        let mut out = BTreeMap::new();
        for b in &self.blocks {
            for (g, n) in &b.homology_dims {
                out.insert((*g, -b.energy, b.weight), *n);
            }
        }
        out
    }
}

/// `Π_{m≥0} (1 − q^m e^{−α}) Π_{n≥1} (1 − q^n e^{α})` as `(q-degree, α-drop) → coefficient`.
fn ghost_character(max_depth: i64) -> BTreeMap<(i64, i64), i64> {
    let mut f = BTreeMap::from([((0, 0), 1)]);
    let mut factors: Vec<(i64, i64)> = (0..=max_depth).map(|m| (m, 1)).collect();
    factors.extend((1..=max_depth).map(|n| (n, -1)));
    for (q, b) in factors {
        let mut next = f.clone();
        for ((q0, b0), c) in &f {
            if q0 + q <= max_depth {
                *next.entry((q0 + q, b0 + b)).or_insert(0) -= c;
            }
        }
        next.retain(|_, c| *c != 0);
        f = next;
    }
    f
}

/// Blocks with depth `≤ trunc.energy` and weight `≥ λ − 2·trunc.depth`.
/// Every block inside the window is complete.
pub fn brst_cohomology<S: Slice + ?Sized>(s: &S, trunc: Truncation, seed: u64, ignore_signs: bool) -> BrstCohomology {
    let lambda = s.lambda();
    let n_max = trunc.energy;
    let ghosts = ghost_monomials(n_max);
    let mut keys = Vec::new();
    for d in 0..=n_max {
        let mut w = lambda - 2 * trunc.depth;
        while w <= lambda + 2 * d {
            keys.push((d, w));
            w += 2;
        }
    }
    let at = Fp::new(ChaCha8Rng::seed_from_u64(seed).gen());
    let blocks: Vec<(BlockReport, i64)> = keys
        .par_iter()
        .map(|&(d, w)| {
            let b = build_block(s, &ghosts, d, w, ignore_signs);
            let euler: i64 = b.spaces.iter().map(|(g, v)| if g % 2 == 0 { v.len() as i64 } else { -(v.len() as i64) }).sum();
            (block_report(&b, at), euler)
        })
        .collect();
    let module = s.character(Truncation::new(n_max, trunc.depth + n_max));
    let ghost = ghost_character(n_max);
    let euler_ok = blocks.iter().all(|(b, e)| {
        let (d, beta) = (-b.energy, (lambda - b.weight) / 2);
        let expected: i64 = ghost
            .iter()
            .filter(|((q, _), _)| *q <= d)
            .map(|((q, b2), c)| c * module.coeff(d - q, &[beta - b2]))
            .sum();
        expected == *e
    });
    let blocks: Vec<BlockReport> = blocks.into_iter().map(|x| x.0).collect();
    BrstCohomology {
        lambda,
        truncation: trunc,
        d_squared_zero: blocks.iter().all(|b| b.d_squared_zero),
        euler_ok,
        blocks,
    }
}

/// `π_μ` shifted down by `energy_shift`, with multiplicity.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct FockLabel {
    pub weight: i64,
    pub energy_shift: i64,
    pub multiplicity: i64,
}

/// Writes each degree of the cohomology as `⊕ π_μ` shifted in energy, by
/// triangular elimination against the Fock character `Σ p(n) q^n`.
pub fn fock_decompose(c: &BrstCohomology, kappa: &LevelScalar) -> Result<BTreeMap<i64, Vec<FockLabel>>, BrstError> {
    let n_max = c.truncation.energy;
    let fock = fock_character(&RootDatum::a1(), &[0], kappa, Truncation::new(n_max, 0));
    let p: Vec<i64> = (0..=n_max).map(|n| fock.coeff(n, &[0])).collect();
    let mut columns: BTreeMap<(i64, i64), Vec<i64>> = BTreeMap::new();
    for ((g, d, w), n) in c.table() {
        columns.entry((g, w)).or_insert_with(|| vec![0; n_max as usize + 1])[d as usize] = n as i64;
    }
    let mut out: BTreeMap<i64, Vec<FockLabel>> = BTreeMap::new();
    for ((g, w), h) in columns {
        let mut residual = h.clone();
        for s in 0..=n_max as usize {
            let m = residual[s];
            if m < 0 {
                return Err(BrstError::NoDecomposition {
                    degree: g,
                    weight: w,
                    residual: residual.iter().enumerate().map(|(i, x)| (i as i64, *x)).collect(),
                });
            }
            if m == 0 {
                continue;
            }
            for t in s..=n_max as usize {
                residual[t] -= m * p[t - s];
            }
            out.entry(g).or_default().push(FockLabel {
                weight: w,
                energy_shift: s as i64,
                multiplicity: m,
            });
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct WakimotoCalibration {
    pub lambda: i64,
    pub passed: bool,
    pub commutators_ok: bool,
    pub cohomology: BrstCohomology,
    pub fock: Option<BTreeMap<i64, Vec<FockLabel>>>,
    pub error: Option<String>,
}

/// The Wakimoto module must give exactly `π_λ` in degree 0.
pub fn wakimoto_calibration(lambda: i64, trunc: Truncation, seed: u64) -> WakimotoCalibration {
    let kappa = RatFunc::var();
    let s = WakimotoSlice::new(lambda, kappa.clone(), trunc.energy);
    let commutators_ok = check_commutators(&s, 2.min(trunc.energy));
    let cohomology = brst_cohomology(&s, trunc, seed, false);
    let (fock, error) = match fock_decompose(&cohomology, &kappa) {
        Ok(f) => (Some(f), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let expected = BTreeMap::from([(
        0,
        vec![FockLabel {
            weight: lambda,
            energy_shift: 0,
            multiplicity: 1,
        }],
    )]);
    let passed =
        commutators_ok && cohomology.d_squared_zero && cohomology.euler_ok && fock.as_ref() == Some(&expected);
    WakimotoCalibration {
        lambda,
        passed,
        commutators_ok,
        cohomology,
        fock,
        error,
    }
}

/// Smallest window holding both expected Fock modules: one unit of energy
/// and the drop from `λ` to `−λ−2`.
pub fn check_window(lambda: i64, trunc: Truncation) -> Result<(), BrstError> {
    if lambda < 0 {
        return Err(BrstError::NotDominant(lambda));
    }
    if trunc.energy < 1 || trunc.depth < lambda + 1 {
        return Err(BrstError::Boundary {
            lambda,
            energy: trunc.energy,
            depth: trunc.depth,
            min_energy: 1,
            min_depth: lambda + 1,
        });
    }
    Ok(())
}

#[derive(Clone, Debug, Serialize)]
pub struct MainFormulaEntry {
    pub lambda: i64,
    pub commutators_ok: bool,
    pub d_squared_zero: bool,
    pub euler_ok: bool,
    pub semi_infinite: Option<BTreeMap<i64, Vec<FockLabel>>>,
    /// `(degree, weight, dim)` of the quantum nilpotent cohomology.
    pub quantum: Vec<(i64, i64, usize)>,
    pub matches_expected: bool,
    pub matches_quantum: bool,
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct MainFormulaReport {
    pub passed: bool,
    pub truncation: Truncation,
    pub entries: Vec<MainFormulaEntry>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Corruptions {
    pub ghost_signs: bool,
    pub quantum_differential: bool,
}

/// For `V_λ` at symbolic level: `H^0 = π_λ`, `H^1 = π_{−λ−2}`, nothing else,
/// and `π_μ ↦ C_μ` carries this onto the quantum `n`-cohomology of `V_λ`.
pub fn verify_main_formula(
    lambdas: &[i64],
    trunc: Truncation,
    seed: u64,
    corrupt: Corruptions,
) -> Result<MainFormulaReport, BrstError> {
    for &l in lambdas {
        check_window(l, trunc)?;
    }
    let a1 = RootDatum::a1();
    let kappa = RatFunc::var();
    let mut entries = Vec::new();
    for &lambda in lambdas {
        let s = WeylSlice::new(lambda, kappa.clone(), trunc.energy);
        let commutators_ok = check_commutators(&s, 2.min(trunc.energy));
        let c = brst_cohomology(&s, trunc, seed, corrupt.ghost_signs);
        let (semi, error) = match fock_decompose(&c, &kappa) {
            Ok(f) => (Some(f), None),
            Err(e) => (None, Some(e.to_string())),
        };
        let label = |w: i64| FockLabel {
            weight: w,
            energy_shift: 0,
            multiplicity: 1,
        };
        let expected = BTreeMap::from([(0, vec![label(lambda)]), (1, vec![label(-lambda - 2)])]);
        let (quantum, resolution_ok, error) = match coh_via_bgg(&a1, &[lambda], corrupt.quantum_differential) {
            Ok(q) => (q.table.iter().map(|((g, w), n)| (*g as i64, w[0], *n)).collect(), q.resolution_ok, error),
            Err(e) => (Vec::new(), false, Some(error.map_or(e.to_string(), |x| format!("{x}; {e}")))),
        };
        let mapped: Option<Vec<(i64, i64, usize)>> = semi.as_ref().map(|f| {
            let mut v: Vec<(i64, i64, usize)> = f
                .iter()
                .flat_map(|(g, ls)| ls.iter().map(move |l| (*g, l.weight, l.multiplicity as usize, l.energy_shift)))
                .filter(|x| x.3 == 0)
                .map(|x| (x.0, x.1, x.2))
                .collect();
            v.sort();
            v
        });
        let shifted = semi.as_ref().is_some_and(|f| f.values().flatten().any(|l| l.energy_shift != 0));
        let matches_quantum = resolution_ok && !shifted && mapped.as_ref() == Some(&quantum);
        entries.push(MainFormulaEntry {
            lambda,
            commutators_ok,
            d_squared_zero: c.d_squared_zero,
            euler_ok: c.euler_ok,
            matches_expected: semi.as_ref() == Some(&expected),
            semi_infinite: semi,
            quantum,
            matches_quantum,
            error,
        });
    }
    let passed = entries
        .iter()
        .all(|e| e.commutators_ok && e.d_squared_zero && e.euler_ok && e.matches_expected && e.matches_quantum);
    Ok(MainFormulaReport {
        passed,
        truncation: trunc,
        entries,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SpotCheckReport {
    pub passed: bool,
    pub ell: i64,
    pub kappa: String,
    pub lambda: i64,
    pub truncation: Truncation,
    pub d_squared_zero: bool,
    pub euler_ok: bool,
    /// `(degree, weight) → Σ multiplicities over energy shifts`.
    pub semi_infinite: Option<Vec<(i64, i64, i64)>>,
    /// Cohomology of the rank-one divided-power algebra at `q = e^{πi/ℓ}`.
    pub root_of_unity: Vec<(i64, i64, usize)>,
    pub mismatches: Vec<String>,
    pub error: Option<String>,
}

/// Positive integral level `κ = ℓ − 2`: compares the semi-infinite
/// cohomology of `V_λ` with the `u`-cohomology of the trivial module over the
/// divided-power algebra at an ℓ-th root of unity, on weights `≥ λ − 2·depth`.
pub fn positive_level_spot_check(lambda: i64, ell: i64, trunc: Truncation, seed: u64) -> Result<SpotCheckReport, BrstError> {
    check_window(lambda, trunc)?;
    let kappa_q = Rational::from_integer((ell - 2).into());
    let kappa = RatFunc::constant(kappa_q.clone());
    let s = WeylSlice::new(lambda, kappa.clone(), trunc.energy);
    let c = brst_cohomology(&s, trunc, seed, false);
    let (semi, error) = match fock_decompose(&c, &kappa) {
        Ok(f) => {
            let mut acc: BTreeMap<(i64, i64), i64> = BTreeMap::new();
            for (g, ls) in &f {
                for l in ls {
                    *acc.entry((*g, l.weight)).or_insert(0) += l.multiplicity;
                }
            }
            (Some(acc.into_iter().map(|((g, w), n)| (g, w, n)).collect::<Vec<_>>()), None)
        }
        Err(e) => (None, Some(e.to_string())),
    };
    let a1 = RootDatum::a1();
    let ctx = RootOfUnityCtx::new(ell as u32);
    let alg = RankOneLusztig { ell, ctx: ctx.clone() };
    let _ = QuantumAlgebra::new(&a1, ctx).map_err(CohomologyError::from)?;
    let floor = lambda - 2 * trunc.depth;
    let max_degree = c.table().keys().map(|k| k.0).max().unwrap_or(0).max(0) as usize + 1;
    let r = coh_via_resolution(&alg, &a1, &trivial_module(&a1), max_degree, 2 * trunc.depth)?;
    let root_of_unity: Vec<(i64, i64, usize)> = r
        .table
        .iter()
        .filter(|((_, w), _)| w[0] >= floor)
        .map(|((g, w), n)| (*g as i64, w[0], *n))
        .collect();
    let mut mismatches = Vec::new();
    if let Some(si) = &semi {
        let a: BTreeMap<(i64, i64), i64> = si.iter().map(|x| ((x.0, x.1), x.2)).collect();
        let b: BTreeMap<(i64, i64), i64> = root_of_unity.iter().map(|x| ((x.0, x.1), x.2 as i64)).collect();
        let keys: std::collections::BTreeSet<_> = a.keys().chain(b.keys()).copied().collect();
        for k in keys {
            let (x, y) = (a.get(&k).copied().unwrap_or(0), b.get(&k).copied().unwrap_or(0));
            if x != y {
                mismatches.push(format!("degree {} weight {}: semi-infinite {x}, root of unity {y}", k.0, k.1));
            }
        }
    }
    Ok(SpotCheckReport {
        passed: semi.is_some() && mismatches.is_empty() && c.d_squared_zero,
        ell,
        kappa: kappa_q.to_string(),
        lambda,
        truncation: trunc,
        d_squared_zero: c.d_squared_zero,
        euler_ok: c.euler_ok,
        semi_infinite: semi,
        root_of_unity,
        mismatches,
        error,
    })
}
