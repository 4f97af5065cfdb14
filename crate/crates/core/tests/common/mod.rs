//! Independent brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

/// Positive roots in simple-root coordinates, by closing the simple roots
/// under simple reflections `s_i(β) = β − ⟨β, α̌_i⟩ α_i` with
/// `⟨α_j, α̌_i⟩ = cartan[i][j]`.
pub fn positive_roots(cartan: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let r = cartan.len();
    let simple: Vec<Vec<i64>> = (0..r).map(|i| (0..r).map(|j| (i == j) as i64).collect()).collect();
    let mut seen: BTreeSet<Vec<i64>> = simple.iter().cloned().collect();
    let mut frontier = simple;
    while let Some(beta) = frontier.pop() {
        for i in 0..r {
            let pair: i64 = (0..r).map(|j| beta[j] * cartan[i][j]).sum();
            let mut image = beta.clone();
            image[i] -= pair;
            if image.iter().all(|&x| x >= 0) && seen.insert(image.clone()) {
                frontier.push(image);
            }
        }
    }
    seen.into_iter().collect()
}

/// Number of ways to write `nu` as an unordered sum of the given vectors.
pub fn partition_count(parts: &[Vec<i64>], nu: &[i64]) -> u64 {
    fn go(parts: &[Vec<i64>], idx: usize, rest: &mut Vec<i64>) -> u64 {
        if rest.iter().all(|&x| x == 0) {
            return 1;
        }
        if idx == parts.len() {
            return 0;
        }
        let mut total = 0;
        let mut used = 0;
        loop {
            total += go(parts, idx + 1, rest);
            for (x, p) in rest.iter_mut().zip(&parts[idx]) {
                *x -= p;
            }
            used += 1;
            if rest.iter().any(|&x| x < 0) {
                break;
            }
        }
        for (x, p) in rest.iter_mut().zip(&parts[idx]) {
            *x += used * p;
        }
        total
    }
    go(parts, 0, &mut nu.to_vec())
}

/// Coefficients of `Π_{α̂>0} (1 − e^{−α̂})^{−mult}` at drops `(n, β)` with
/// `0 ≤ n ≤ energy` and `ht β ≤ depth`, by enumerating every multiset of
/// positive affine roots. Imaginary roots `(m, 0)` carry multiplicity `rank`.
pub fn affine_kostant(cartan: &[Vec<i64>], energy: i64, depth: i64) -> BTreeMap<(i64, Vec<i64>), i64> {
    let r = cartan.len();
    let pos = positive_roots(cartan);
    let mut looped: Vec<(i64, Vec<i64>)> = Vec::new();
    for m in 1..=energy {
        for a in &pos {
            looped.push((m, a.clone()));
            looped.push((m, a.iter().map(|x| -x).collect()));
        }
        for _ in 0..r {
            looped.push((m, vec![0; r]));
        }
    }
    let mut out = BTreeMap::new();
    let mut stack = (0i64, vec![0i64; r]);
    looped_dfs(&looped, 0, energy, &mut stack, &mut |n, beta| {
        finite_dfs(&pos, 0, depth, &mut beta.to_vec(), &mut |b| {
            *out.entry((n, b.to_vec())).or_insert(0) += 1;
        });
    });
    out
}

fn looped_dfs(roots: &[(i64, Vec<i64>)], idx: usize, energy: i64, acc: &mut (i64, Vec<i64>), f: &mut dyn FnMut(i64, &[i64])) {
    if idx == roots.len() {
        f(acc.0, &acc.1);
        return;
    }
    let (m, a) = &roots[idx];
    let mut k = 0;
    loop {
        looped_dfs(roots, idx + 1, energy, acc, f);
        if acc.0 + m > energy {
            break;
        }
        acc.0 += m;
        acc.1.iter_mut().zip(a).for_each(|(x, y)| *x += y);
        k += 1;
    }
    acc.0 -= k * m;
    acc.1.iter_mut().zip(a).for_each(|(x, y)| *x -= k * y);
}

fn finite_dfs(pos: &[Vec<i64>], idx: usize, depth: i64, beta: &mut Vec<i64>, f: &mut dyn FnMut(&[i64])) {
    let height: i64 = beta.iter().sum();
    if idx == pos.len() {
        if height <= depth {
            f(beta);
        }
        return;
    }
    let a = &pos[idx];
    let ha: i64 = a.iter().sum();
    let mut k = 0;
    loop {
        finite_dfs(pos, idx + 1, depth, beta, f);
        if height + (k + 1) * ha > depth {
            break;
        }
        beta.iter_mut().zip(a).for_each(|(x, y)| *x += y);
        k += 1;
    }
    beta.iter_mut().zip(a).for_each(|(x, y)| *x -= k * y);
}

/// Nonzero entries only.
pub fn nonzero<K: Ord + Clone>(m: &BTreeMap<K, i64>) -> BTreeMap<K, i64> {
    m.iter().filter(|(_, v)| **v != 0).map(|(k, v)| (k.clone(), *v)).collect()
}
