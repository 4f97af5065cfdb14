//! Label arithmetic for the duality functors and the Kazhdan-Lusztig functors
//! on standard objects: kind, weight, level and homological shift. No module
//! is ever built here.

use std::fmt;

use num_traits::{Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::root_datum::{RootDatum, RootDatumError, Weight};
use crate::scalars::{Field, LevelScalar, Rational};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LabelError {
    #[error("{op} does not apply to {kind:?} labels")]
    UnsupportedKind { op: &'static str, kind: LabelKind },
    #[error("weight {0} is not dominant integral")]
    NotDominant(String),
    #[error("coweight {0:?} is not dominant")]
    NotDominantCoweight(Vec<Rational>),
    #[error("{op} needs {expected} level, got κ + h∨ = {shifted}")]
    WrongLevelSign {
        op: &'static str,
        expected: &'static str,
        shifted: String,
    },
    #[error(transparent)]
    RootDatum(#[from] RootDatumError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum LabelKind {
    Verma,
    DualVerma,
    Weyl,
    DualWeyl,
    WakimotoStar,
    WakimotoW0,
    Fock,
    QuantumVerma,
    QuantumWeyl,
    DualQuantumWeyl,
}

impl LabelKind {
    pub fn is_quantum(self) -> bool {
        matches!(self, LabelKind::QuantumVerma | LabelKind::QuantumWeyl | LabelKind::DualQuantumWeyl)
    }
}

/// For affine kinds `level` is `κ`. For quantum kinds it is `κ' + h∨` of
/// the negative level the quantum parameter comes from, `q = exp(πi/(κ'+h∨))`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModuleLabel {
    pub kind: LabelKind,
    pub weight: Weight<LevelScalar>,
    pub level: LevelScalar,
    pub shift: i64,
}

impl ModuleLabel {
    pub fn new(kind: LabelKind, weight: &[i64], level: LevelScalar, shift: i64) -> Self {
        ModuleLabel {
            kind,
            weight: Weight::from_ints(weight),
            level,
            shift,
        }
    }

    /// Integral coordinates, if the weight is integral.
    pub fn int_weight(&self) -> Option<Vec<i64>> {
        self.weight
            .coords
            .iter()
            .map(|c| c.as_rational().filter(|q| q.is_integer()).and_then(|q| crate::scalars::rational_to_i64(&q)))
            .collect()
    }
}

impl fmt::Display for ModuleLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w: Vec<String> = self.weight.coords.iter().map(|c| c.fmt_with("κ")).collect();
        write!(f, "{:?}[{}; {}; shift {}]", self.kind, w.join(", "), self.level.fmt_with("κ"), self.shift)
    }
}

/// Flat form for reports.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LabelRecord {
    pub kind: LabelKind,
    pub weight: Vec<String>,
    pub level: String,
    pub shift: i64,
}

impl From<&ModuleLabel> for LabelRecord {
    fn from(l: &ModuleLabel) -> Self {
        LabelRecord {
            kind: l.kind,
            weight: l.weight.coords.iter().map(|c| c.fmt_with("κ")).collect(),
            level: l.level.fmt_with("κ"),
            shift: l.shift,
        }
    }
}

/// Sign of `κ + h∨`. A symbolic level takes the sign it has as the symbol
/// tends to `+∞`, so `−κ − h∨` is negative and `κ` positive.
pub fn level_sign(rd: &RootDatum, kappa: &LevelScalar) -> i32 {
    let s = kappa.clone() + LevelScalar::from_i64(rd.h_dual());
    if s.is_zero() {
        return 0;
    }
    let lead = s.numer().leading() / s.denom().leading();
    if lead.is_positive() {
        1
    } else {
        -1
    }
}

/// `κ' ↦ −κ' − 2h∨`.
pub fn dual_level(rd: &RootDatum, kappa: &LevelScalar) -> LevelScalar {
    -kappa.clone() - LevelScalar::from_i64(2 * rd.h_dual())
}

fn shifted_string(rd: &RootDatum, kappa: &LevelScalar) -> String {
    (kappa.clone() + LevelScalar::from_i64(rd.h_dual())).fmt_with("κ")
}

/// Iwahori duality on Verma labels: `μ ↦ −μ + 2ρ`, level reflected, and the
/// shift `s ↦ |R⁺| − s` (duality is contravariant, so two applications cancel).
pub fn dual_i(rd: &RootDatum, l: &ModuleLabel) -> Result<ModuleLabel, LabelError> {
    if l.kind != LabelKind::Verma {
        return Err(LabelError::UnsupportedKind { op: "dual_I", kind: l.kind });
    }
    let two_rho: Weight<LevelScalar> = Weight::from_ints(&rd.rho().iter().map(|x| 2 * x).collect::<Vec<_>>());
    Ok(ModuleLabel {
        kind: LabelKind::Verma,
        weight: -l.weight.clone() + two_rho,
        level: dual_level(rd, &l.level),
        shift: rd.num_positive_roots() as i64 - l.shift,
    })
}

/// `−w₀λ`.
fn minus_w0(rd: &RootDatum, lambda: &[i64]) -> Vec<i64> {
    rd.weyl()[rd.w0()].act(lambda).iter().map(|x| -x).collect()
}

fn dominant_int(rd: &RootDatum, l: &ModuleLabel) -> Result<Vec<i64>, LabelError> {
    match l.int_weight() {
        Some(w) if rd.is_dominant(&w) => Ok(w),
        _ => Err(LabelError::NotDominant(l.to_string())),
    }
}

/// Spherical duality on Weyl labels: `λ ↦ −w₀λ`, level reflected, shift kept.
pub fn dual_go(rd: &RootDatum, l: &ModuleLabel) -> Result<ModuleLabel, LabelError> {
    if l.kind != LabelKind::Weyl {
        return Err(LabelError::UnsupportedKind { op: "dual_GO", kind: l.kind });
    }
    let w = dominant_int(rd, l)?;
    Ok(ModuleLabel {
        kind: LabelKind::Weyl,
        weight: Weight::from_ints(&minus_w0(rd, &w)),
        level: dual_level(rd, &l.level),
        shift: l.shift,
    })
}

/// Quantum duality: quantum Weyl `ν` and dual quantum Weyl `−w₀ν` swap.
pub fn dual_q(rd: &RootDatum, l: &ModuleLabel) -> Result<ModuleLabel, LabelError> {
    let kind = match l.kind {
        LabelKind::QuantumWeyl => LabelKind::DualQuantumWeyl,
        LabelKind::DualQuantumWeyl => LabelKind::QuantumWeyl,
        k => return Err(LabelError::UnsupportedKind { op: "dual_q", kind: k }),
    };
    let w = dominant_int(rd, l)?;
    Ok(ModuleLabel {
        kind,
        weight: Weight::from_ints(&minus_w0(rd, &w)),
        level: l.level.clone(),
        shift: l.shift,
    })
}

/// Negative level: Weyl `(λ, κ')` goes to the quantum Weyl module `λ`.
pub fn kl_negative(rd: &RootDatum, l: &ModuleLabel) -> Result<ModuleLabel, LabelError> {
    if l.kind != LabelKind::Weyl {
        return Err(LabelError::UnsupportedKind { op: "kl_negative", kind: l.kind });
    }
    if level_sign(rd, &l.level) >= 0 {
        return Err(LabelError::WrongLevelSign {
            op: "kl_negative",
            expected: "negative",
            shifted: shifted_string(rd, &l.level),
        });
    }
    let w = dominant_int(rd, l)?;
    Ok(ModuleLabel {
        kind: LabelKind::QuantumWeyl,
        weight: Weight::from_ints(&w),
        level: l.level.clone() + LevelScalar::from_i64(rd.h_dual()),
        shift: l.shift,
    })
}

/// Positive level: Weyl `(μ, κ)` goes to the dual quantum Weyl module `μ`,
/// with `q` taken from the dual negative level `−κ − 2h∨`.
pub fn kl_positive(rd: &RootDatum, l: &ModuleLabel) -> Result<ModuleLabel, LabelError> {
    if l.kind != LabelKind::Weyl {
        return Err(LabelError::UnsupportedKind { op: "kl_positive", kind: l.kind });
    }
    if level_sign(rd, &l.level) <= 0 {
        return Err(LabelError::WrongLevelSign {
            op: "kl_positive",
            expected: "positive",
            shifted: shifted_string(rd, &l.level),
        });
    }
    let w = dominant_int(rd, l)?;
    Ok(ModuleLabel {
        kind: LabelKind::DualQuantumWeyl,
        weight: Weight::from_ints(&w),
        level: -(l.level.clone() + LevelScalar::from_i64(rd.h_dual())),
        shift: l.shift,
    })
}

/// `kl_positive ∘ dual_GO` against `dual_q ∘ kl_negative` on a negative-level
/// Weyl label. Returns both sides.
pub fn positive_square(rd: &RootDatum, l: &ModuleLabel) -> Result<(ModuleLabel, ModuleLabel), LabelError> {
    let left = kl_positive(rd, &dual_go(rd, l)?)?;
    let right = dual_q(rd, &kl_negative(rd, l)?)?;
    Ok((left, right))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Convolution {
    /// `j_{−μ̌,*} ⋆`: weight moves by `−φ_κ(μ̌)`.
    Star,
    /// `j_{μ̌,!} ⋆`: weight moves by `+φ_κ(μ̌)`.
    Shriek,
}

/// Convolution of a Wakimoto label with a standard object of the affine
/// flag variety indexed by a dominant coweight (simple-coroot coordinates).
pub fn wakimoto_convolution(
    rd: &RootDatum,
    l: &ModuleLabel,
    coweight: &[Rational],
    flavor: Convolution,
) -> Result<ModuleLabel, LabelError> {
    if !matches!(l.kind, LabelKind::WakimotoStar | LabelKind::WakimotoW0) {
        return Err(LabelError::UnsupportedKind {
            op: "wakimoto_convolution",
            kind: l.kind,
        });
    }
    let n = rd.rank();
    if coweight.len() != n {
        return Err(LabelError::NotDominantCoweight(coweight.to_vec()));
    }
    let dominant = (0..n).all(|i| {
        let pairing = (0..n).fold(Rational::zero(), |acc, j| acc + Rational::from_integer(rd.a(j, i).into()) * &coweight[j]);
        !pairing.is_negative()
    });
    if !dominant {
        return Err(LabelError::NotDominantCoweight(coweight.to_vec()));
    }
    let phi = rd.phi_kappa(coweight, &l.level)?;
    let weight = match flavor {
        Convolution::Star => l.weight.clone() - phi,
        Convolution::Shriek => l.weight.clone() + phi,
    };
    Ok(ModuleLabel { weight, ..l.clone() })
}

/// The Wakimoto label paired against `M` to extract semi-infinite
/// cohomology in weight `μ`: weight `−μ − 2ρ`, shift `|R⁺|`.
pub fn pairing_label(rd: &RootDatum, mu: &[i64], kappa_neg: &LevelScalar) -> ModuleLabel {
    let w: Vec<i64> = mu.iter().zip(rd.rho()).map(|(m, r)| -m - 2 * r).collect();
    ModuleLabel::new(LabelKind::Verma, &w, kappa_neg.clone(), rd.num_positive_roots() as i64)
}

#[derive(Clone, Debug, Serialize)]
pub struct PairingIndexCheck {
    pub mu: Vec<i64>,
    pub dualized: LabelRecord,
    /// `dual_I(pairing label) − μ`, zero iff the two index conventions agree.
    pub weight_offset: Vec<String>,
    pub shift_ok: bool,
}

/// Sends the pairing label through `dual_I` and compares with `(Verma, μ, κ, 0)`.
pub fn pairing_index_check(rd: &RootDatum, mu: &[i64], kappa_neg: &LevelScalar) -> Result<PairingIndexCheck, LabelError> {
    let d = dual_i(rd, &pairing_label(rd, mu, kappa_neg))?;
    let offset = d.weight.clone() - Weight::from_ints(mu);
    Ok(PairingIndexCheck {
        mu: mu.to_vec(),
        dualized: LabelRecord::from(&d),
        weight_offset: offset.coords.iter().map(|c| c.fmt_with("κ")).collect(),
        shift_ok: d.shift == 0,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct LabelRow {
    pub op: String,
    pub input: LabelRecord,
    pub output: LabelRecord,
    pub round_trip: bool,
}

/// Transformation table for all dominant `λ` with coordinates `≤ max`:
/// `dual_I`, `dual_GO`, and both routes around the positive-level square.
pub fn label_table(rd: &RootDatum, max: i64, kappa_neg: &LevelScalar) -> Result<(Vec<LabelRow>, bool), LabelError> {
    let mut rows = Vec::new();
    let mut ok = true;
    for lambda in dominant_box(rd.rank(), max) {
        let v = ModuleLabel::new(LabelKind::Verma, &lambda, kappa_neg.clone(), 0);
        let dv = dual_i(rd, &v)?;
        let rt = dual_i(rd, &dv)? == v;
        rows.push(LabelRow {
            op: "dual_I".into(),
            input: (&v).into(),
            output: (&dv).into(),
            round_trip: rt,
        });
        let w = ModuleLabel::new(LabelKind::Weyl, &lambda, kappa_neg.clone(), 0);
        let dw = dual_go(rd, &w)?;
        let rt2 = dual_go(rd, &dw)? == w;
        rows.push(LabelRow {
            op: "dual_GO".into(),
            input: (&w).into(),
            output: (&dw).into(),
            round_trip: rt2,
        });
        let (left, right) = positive_square(rd, &w)?;
        let sq = left == right;
        rows.push(LabelRow {
            op: "kl_positive∘dual_GO".into(),
            input: (&w).into(),
            output: (&left).into(),
            round_trip: sq,
        });
        rows.push(LabelRow {
            op: "dual_q∘kl_negative".into(),
            input: (&w).into(),
            output: (&right).into(),
            round_trip: sq,
        });
        ok &= rt && rt2 && sq;
    }
    Ok((rows, ok))
}

/// Dominant integral weights with every coordinate in `[0, max]`.
pub fn dominant_box(rank: usize, max: i64) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for _ in 0..rank {
        out = out
            .into_iter()
            .flat_map(|w: Vec<i64>| {
                (0..=max).map(move |x| {
                    let mut w = w.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::{rat, rat_int, RatFunc};
    use proptest::prelude::*;

    fn neg_symbolic(rd: &RootDatum) -> LevelScalar {
        -RatFunc::var() - LevelScalar::from_i64(rd.h_dual())
    }

    #[test]
    fn dual_i_examples() {
        let a1 = RootDatum::a1();
        let k = neg_symbolic(&a1);
        let d = dual_i(&a1, &ModuleLabel::new(LabelKind::Verma, &[0], k.clone(), 0)).unwrap();
        assert_eq!(d, ModuleLabel::new(LabelKind::Verma, &[2], RatFunc::var() - LevelScalar::from_i64(2), 1));
        let a2 = RootDatum::a2();
        let d = dual_i(&a2, &ModuleLabel::new(LabelKind::Verma, &[1, 1], neg_symbolic(&a2), 0)).unwrap();
        assert_eq!((d.int_weight(), d.shift), (Some(vec![1, 1]), 3));
    }

    #[test]
    fn dual_go_examples() {
        let a2 = RootDatum::a2();
        let k = neg_symbolic(&a2);
        let d = dual_go(&a2, &ModuleLabel::new(LabelKind::Weyl, &[1, 0], k.clone(), 0)).unwrap();
        assert_eq!(d.int_weight(), Some(vec![0, 1]));
        let a1 = RootDatum::a1();
        let d = dual_go(&a1, &ModuleLabel::new(LabelKind::Weyl, &[3], k, 0)).unwrap();
        assert_eq!(d.int_weight(), Some(vec![3]));
        let bad = ModuleLabel::new(LabelKind::Weyl, &[-1], neg_symbolic(&a1), 0);
        assert!(matches!(dual_go(&a1, &bad), Err(LabelError::NotDominant(_))));
    }

    #[test]
    fn kl_functors_respect_level_sign() {
        let a1 = RootDatum::a1();
        let pos = ModuleLabel::new(LabelKind::Weyl, &[2], RatFunc::var(), 0);
        assert!(matches!(kl_negative(&a1, &pos), Err(LabelError::WrongLevelSign { .. })));
        let l = kl_positive(&a1, &pos).unwrap();
        assert_eq!((l.kind, l.int_weight()), (LabelKind::DualQuantumWeyl, Some(vec![2])));
        let crit = ModuleLabel::new(LabelKind::Weyl, &[0], LevelScalar::from_i64(-2), 0);
        assert!(kl_positive(&a1, &crit).is_err() && kl_negative(&a1, &crit).is_err());
    }

    #[test]
    fn square_commutes_on_boxes() {
        for rd in [RootDatum::a1(), RootDatum::a2(), RootDatum::b2()] {
            let (_, ok) = label_table(&rd, 4, &neg_symbolic(&rd)).unwrap();
            assert!(ok, "{}", rd.name());
        }
    }

    #[test]
    fn wakimoto_shifts_cancel() {
        let a1 = RootDatum::a1();
        let w = ModuleLabel::new(LabelKind::WakimotoStar, &[1], RatFunc::var(), 0);
        let c = vec![rat_int(1)];
        let up = wakimoto_convolution(&a1, &w, &c, Convolution::Shriek).unwrap();
        // φ_κ(α̌) = α/(κ+2) = 2/(κ+2) in ω coordinates
        let expected = LevelScalar::from_i64(1) + LevelScalar::from_i64(2) * (RatFunc::var() + LevelScalar::from_i64(2)).inv().unwrap();
        assert_eq!(up.weight.coords[0], expected);
        assert_eq!(wakimoto_convolution(&a1, &up, &c, Convolution::Star).unwrap(), w);
        assert!(wakimoto_convolution(&a1, &w, &[rat(-1, 1)], Convolution::Star).is_err());
        let v = ModuleLabel::new(LabelKind::Verma, &[1], RatFunc::var(), 0);
        assert!(wakimoto_convolution(&a1, &v, &c, Convolution::Star).is_err());
    }

    #[test]
    fn pairing_index_offset() {
        // dual_I(−μ−2ρ) = μ + 4ρ: the two index conventions differ by 4ρ
        let a2 = RootDatum::a2();
        let r = pairing_index_check(&a2, &[1, 0], &neg_symbolic(&a2)).unwrap();
        assert!(r.shift_ok);
        assert_eq!(r.weight_offset, vec!["4", "4"]);
    }

    proptest! {
        #[test]
        fn dualities_are_involutions(rank_pick in 0usize..3, a in 0i64..6, b in 0i64..6, s in -3i64..4, p in -9i64..9, q in 1i64..5) {
            let rd = [RootDatum::a1(), RootDatum::a2(), RootDatum::b2()][rank_pick].clone();
            let w: Vec<i64> = [a, b][..rd.rank()].to_vec();
            let level = LevelScalar::from_rational(&rat(p, q));
            let v = ModuleLabel::new(LabelKind::Verma, &w.iter().map(|x| x - 2).collect::<Vec<_>>(), level.clone(), s);
            prop_assert_eq!(dual_i(&rd, &dual_i(&rd, &v).unwrap()).unwrap(), v);
            let wl = ModuleLabel::new(LabelKind::Weyl, &w, level, s);
            prop_assert_eq!(dual_go(&rd, &dual_go(&rd, &wl).unwrap()).unwrap(), wl);
        }
    }
}
