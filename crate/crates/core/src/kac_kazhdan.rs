//! Singular-weight chains of affine Verma modules and the exclusion test
//! comparing Wakimoto and dual Verma modules.

use std::collections::{BTreeSet, VecDeque};

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::root_datum::{AffineRoot, IntWeight, RootDatum};
use crate::scalars::{rat_int, rational_to_i64, Field, LevelScalar, Rational};

/// Solution set of `b·(α̂, α̂) = 2·(α̂, μ̂ + ρ̂)` in positive integers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StepCondition {
    None,
    Exact(i64),
    /// Zero-norm root with vanishing right side: every `b ≥ 1` solves it.
    AnyPositive,
}

/// Candidate weight `(energy, finite)`; the level is fixed along a chain.
pub type Candidate = (i64, IntWeight);

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChainStep {
    pub root_energy: i64,
    pub root_finite: Vec<i64>,
    pub multiplier: i64,
    pub from: Candidate,
    pub to: Candidate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Cutoffs {
    pub max_energy: i64,
    pub max_depth: i64,
}

#[derive(Clone, Debug, Serialize)]
pub struct KkReport {
    pub passed: bool,
    pub candidates: Vec<Candidate>,
    pub witnesses: Vec<Candidate>,
    pub cutoffs: Cutoffs,
    pub imaginary_steps: usize,
    pub degenerate_steps: usize,
    pub shape_ok: bool,
}

/// `(α̂, μ̂ + ρ̂)` for `α̂ = (k, α, 0)`, `μ̂ = (·, μ, κ)`, `ρ̂ = (0, ρ, h∨)`.
fn pairing_with_shifted(rd: &RootDatum, root: &AffineRoot, mu: &[i64], kappa: &LevelScalar) -> LevelScalar {
    let aw = rd.root_to_weight(&root.finite);
    let mr: IntWeight = mu.iter().map(|x| x + 1).collect();
    let finite = rd.form_st_int(&aw, &mr);
    LevelScalar::from_rational(&finite)
        + LevelScalar::from_i64(root.energy) * (kappa.clone() + LevelScalar::from_i64(rd.h_dual()))
}

pub fn step_condition(rd: &RootDatum, mu: &[i64], root: &AffineRoot, kappa: &LevelScalar) -> StepCondition {
    let rhs = pairing_with_shifted(rd, root, mu, kappa) * LevelScalar::from_i64(2);
    let norm = rd.root_form(&root.finite, &root.finite);
    if norm.is_zero() {
        return if rhs.is_zero() {
            StepCondition::AnyPositive
        } else {
            StepCondition::None
        };
    }
    // Irrational (non-constant in κ) solutions are no solutions.
    let Some(r) = rhs.as_rational() else {
        return StepCondition::None;
    };
    let b = r / norm;
    match rational_to_i64(&b) {
        Some(b) if b > 0 => StepCondition::Exact(b),
        _ => StepCondition::None,
    }
}

fn depth(rd: &RootDatum, lambda: &[i64], mu: &[i64]) -> i64 {
    let d: IntWeight = lambda.iter().zip(mu).map(|(a, b)| a - b).collect();
    rd.weight_to_root(&d)
        .expect("chains stay in λ + root lattice")
        .iter()
        .map(|x| x.abs())
        .sum()
}

pub struct ChainSearch {
    pub candidates: BTreeSet<Candidate>,
    pub steps: Vec<ChainStep>,
    pub imaginary_steps: usize,
    pub degenerate_steps: usize,
}

/// Breadth-first closure of `(0, λ)` under valid chain steps within the cutoffs.
pub fn chain_search(rd: &RootDatum, lambda: &[i64], kappa: &LevelScalar, cut: Cutoffs) -> ChainSearch {
    let roots = rd.positive_affine_roots(cut.max_energy);
    let start: Candidate = (0, lambda.to_vec());
    let mut seen = BTreeSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    let mut out = ChainSearch {
        candidates: BTreeSet::new(),
        steps: Vec::new(),
        imaginary_steps: 0,
        degenerate_steps: 0,
    };
    while let Some(cur) = queue.pop_front() {
        for root in &roots {
            let bs: Vec<i64> = match step_condition(rd, &cur.1, root, kappa) {
                StepCondition::None => continue,
                StepCondition::Exact(b) => vec![b],
                StepCondition::AnyPositive => {
                    out.degenerate_steps += 1;
                    let room = cut.max_energy + cur.0;
                    (1..=room / root.energy.max(1)).collect()
                }
            };
            let aw = rd.root_to_weight(&root.finite);
            for b in bs {
                let to: Candidate = (
                    cur.0 - b * root.energy,
                    cur.1.iter().zip(&aw).map(|(m, a)| m - b * a).collect(),
                );
                if -to.0 > cut.max_energy || depth(rd, lambda, &to.1) > cut.max_depth {
                    continue;
                }
                if root.is_imaginary() {
                    out.imaginary_steps += 1;
                }
                out.steps.push(ChainStep {
                    root_energy: root.energy,
                    root_finite: root.finite.clone(),
                    multiplier: b,
                    from: cur.clone(),
                    to: to.clone(),
                });
                if seen.insert(to.clone()) {
                    queue.push_back(to);
                }
            }
        }
    }
    out.candidates = seen;
    out
}

pub fn singular_candidates(rd: &RootDatum, lambda: &[i64], kappa: &LevelScalar, cut: Cutoffs) -> BTreeSet<Candidate> {
    chain_search(rd, lambda, kappa, cut).candidates
}

/// `λ − μ` as a root-lattice element.
fn drop_of(rd: &RootDatum, lambda: &[i64], mu: &[i64]) -> Vec<i64> {
    let d: IntWeight = lambda.iter().zip(mu).map(|(a, b)| a - b).collect();
    rd.weight_to_root(&d).expect("root lattice")
}

pub fn wakimoto_verma_check(rd: &RootDatum, lambda: &[i64], kappa: &LevelScalar, cut: Cutoffs) -> KkReport {
    let search = chain_search(rd, lambda, kappa, cut);
    let mut witnesses = Vec::new();
    let mut shape_ok = true;
    for c in &search.candidates {
        let beta = drop_of(rd, lambda, &c.1);
        // finite part λ + β' with β' = −beta nonzero and nonnegative
        let up = beta.iter().all(|&x| x <= 0) && beta.iter().any(|&x| x < 0);
        if c.0 < 0 && up {
            witnesses.push(c.clone());
        }
        if c.0 > 0 || beta.iter().any(|&x| x < 0) {
            shape_ok = false;
        }
    }
    KkReport {
        passed: witnesses.is_empty(),
        candidates: search.candidates.into_iter().collect(),
        witnesses,
        cutoffs: cut,
        imaginary_steps: search.imaginary_steps,
        degenerate_steps: search.degenerate_steps,
        shape_ok,
    }
}

/// A bound `t` such that every `λ` with all `⟨λ, α̌_i⟩ ≥ t` passes the
/// exclusion check at the rational level `κ` within `cut`: no step along a
/// negative finite root can then have a positive multiplier.
pub fn sufficient_dominance(rd: &RootDatum, kappa: &Rational, cut: Cutoffs) -> i64 {
    let shifted = (kappa + rat_int(rd.h_dual())).abs();
    let mut coroot_max = Rational::zero();
    let mut shift_max = Rational::zero();
    for a in rd.positive_roots() {
        let norm = rd.root_form(a, a);
        coroot_max = coroot_max.max(rat_int(2) / &norm);
        for i in 0..rd.rank() {
            // |⟨α_i, α̌⟩| bounds how far one unit of depth moves ⟨μ, α̌⟩
            let p = (rd.root_form(&rd.simple_root(i), a) * rat_int(2) / &norm).abs();
            shift_max = shift_max.max(p);
        }
    }
    let bound = (rat_int(cut.max_energy) * shifted * coroot_max + rat_int(cut.max_depth) * shift_max).ceil();
    rational_to_i64(&bound).expect("small bound") + 1
}

/// Candidates at energy 0 keyed by weight, for comparison with the dot orbit.
pub fn energy_zero_slice(c: &BTreeSet<Candidate>) -> BTreeSet<IntWeight> {
    c.iter().filter(|x| x.0 == 0).map(|x| x.1.clone()).collect()
}

/// `{w·λ} ∩ (λ − Q⁺)`.
pub fn dot_orbit_below(rd: &RootDatum, lambda: &[i64]) -> BTreeSet<IntWeight> {
    let mut out = BTreeSet::new();
    for w in 0..rd.weyl().len() {
        let mu = rd.dot(w, lambda);
        if let Some(b) = rd.weight_to_root(&lambda.iter().zip(&mu).map(|(a, b)| a - b).collect::<Vec<_>>()) {
            if b.iter().all(|&x| x >= 0) {
                out.insert(mu);
            }
        }
    }
    out
}
