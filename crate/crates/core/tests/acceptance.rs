//! Acceptance criteria 1–10, one line each. Criterion 9 is reported but does
//! not fail the run.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use seminf::characters::{verma_character, wakimoto_character, Truncation};
use seminf::cli;
use seminf::cohomology::verify_quantum_inv;
use seminf::kac_kazhdan::{wakimoto_verma_check, Cutoffs};
use seminf::kl_bookkeeping::{dual_go, dual_i, positive_square, LabelError, LabelKind, ModuleLabel};
use seminf::quantum_algebra::{degrees_up_to, QuantumAlgebra};
use seminf::root_datum::RootDatum;
use seminf::scalars::{Field, GenericCtx, LevelScalar, RatFunc, Rational, RootOfUnityCtx};
use seminf::semiinf_brst::{positive_level_spot_check, verify_main_formula, wakimoto_calibration, Corruptions};

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn box_weights(rank: usize, lo: i64, hi: i64) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for _ in 0..rank {
        out = out
            .into_iter()
            .flat_map(|w: Vec<i64>| {
                (lo..=hi).map(move |x| {
                    let mut w = w.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    out
}

fn c1() -> Check {
    let k = RatFunc::var();
    for (name, n, lambdas) in [("A1", 6, vec![vec![0], vec![3], vec![-2]]), ("A2", 4, vec![vec![0, 0], vec![1, 2], vec![-1, 3]])] {
        let rd = RootDatum::from_name(name).unwrap();
        let t = Truncation::new(n, n);
        for l in &lambdas {
            let w = wakimoto_character(&rd, l, &k, t);
            let v = verma_character(&rd, l, &k, t);
            ensure(w.coeffs() == v.coeffs(), || format!("{name} λ={l:?}: characters differ"))?;
        }
    }
    Ok("A1 (6,6), A2 (4,4)".into())
}

fn c2() -> Check {
    let mut terms = 0;
    for name in ["A1", "A2"] {
        let rd = RootDatum::from_name(name).unwrap();
        let oracle = common::affine_kostant(rd.cartan(), 4, 4);
        let v = verma_character(&rd, &vec![0; rd.rank()], &RatFunc::var(), Truncation::new(4, 4));
        let got = common::nonzero(v.coeffs());
        ensure(got == oracle, || format!("{name}: {} vs {} nonzero drops", got.len(), oracle.len()))?;
        terms += oracle.len();
    }
    Ok(format!("{terms} drops agree"))
}

fn c3() -> Check {
    let k = RatFunc::var();
    let cut = Cutoffs {
        max_energy: 4,
        max_depth: 4,
    };
    let mut n = 0;
    for name in ["A1", "A2"] {
        let rd = RootDatum::from_name(name).unwrap();
        for l in box_weights(rd.rank(), -4, 4) {
            let r = wakimoto_verma_check(&rd, &l, &k, cut);
            ensure(r.passed, || format!("{name} λ={l:?}: witnesses {:?}", r.witnesses))?;
            ensure(r.shape_ok, || format!("{name} λ={l:?}: candidate of the wrong shape"))?;
            n += 1;
        }
    }
    Ok(format!("{n} weights"))
}

fn c4() -> Check {
    for name in ["A2", "B2"] {
        let rd = RootDatum::from_name(name).unwrap();
        let alg = QuantumAlgebra::new(&rd, GenericCtx).map_err(|e| e.to_string())?;
        let pos = common::positive_roots(rd.cartan());
        for nu in degrees_up_to(rd.rank(), 6) {
            let kd = alg.kd_component(&nu).dim() as u64;
            let kostant = common::partition_count(&pos, &nu);
            ensure(kd == kostant, || format!("{name} ν={nu:?}: KD {kd}, Kostant {kostant}"))?;
        }
        ensure(alg.serre_vanishing_check(6), || format!("{name}: Serre elements not in the radical"))?;
    }
    let a1 = RootDatum::a1();
    for (ell, expected) in [(3u32, vec![1, 1, 1, 0]), (5, vec![1, 1, 1, 1, 1, 0])] {
        let alg = QuantumAlgebra::new(&a1, RootOfUnityCtx::new(ell)).map_err(|e| e.to_string())?;
        let mut dims = vec![1];
        for h in 1..expected.len() as i64 {
            dims.push(alg.small_component(&[h]).map_err(|e| e.to_string())?.dim);
        }
        ensure(dims == expected, || format!("A1 ℓ={ell}: small dims {dims:?}"))?;
    }
    Ok("KD = Kostant to height 6; small A1 ℓ=3,5".into())
}

fn c5() -> Check {
    let cases: [(&str, Vec<Vec<i64>>); 2] = [("A1", (0..=4).map(|l| vec![l]).collect()), ("A2", vec![vec![0, 0]])];
    for (name, lambdas) in cases {
        let rd = RootDatum::from_name(name).unwrap();
        let r = verify_quantum_inv(&rd, &lambdas, 6, false);
        for e in &r.entries {
            ensure(e.bgg_agrees && e.bgg_resolution_ok, || format!("{name} λ={:?}: {:?}", e.lambda, e.mismatches))?;
            ensure(e.resolution_agrees == Some(true), || format!("{name} λ={:?}: resolution route {:?}", e.lambda, e.mismatches))?;
        }
        ensure(r.passed, || format!("{name}: report failed"))?;
    }
    Ok("A1 λ=0..4, A2 λ=0, both routes".into())
}

fn c6() -> Check {
    for l in 0..=2 {
        let r = wakimoto_calibration(l, Truncation::new(4, 4), 0);
        ensure(r.passed, || format!("λ={l}: fock {:?}, error {:?}", r.fock, r.error))?;
    }
    Ok("degree 0 is π_λ, nothing else".into())
}

fn c7() -> Check {
    let r = verify_main_formula(&[0, 1, 2], Truncation::new(4, 4), 0, Corruptions::default()).map_err(|e| e.to_string())?;
    ensure(r.passed, || format!("{:?}", r.entries))?;
    Ok("λ=0,1,2".into())
}

fn random_level(rng: &mut ChaCha8Rng) -> LevelScalar {
    let q = Rational::new(rng.gen_range(-20..=20).into(), rng.gen_range(1..=6).into());
    if rng.gen_bool(0.5) {
        RatFunc::var() + LevelScalar::from_rational(&q)
    } else {
        LevelScalar::from_rational(&q)
    }
}

fn c8() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for name in ["A1", "A2", "B2"] {
        let rd = RootDatum::from_name(name).unwrap();
        for _ in 0..100 {
            let w: Vec<i64> = (0..rd.rank()).map(|_| rng.gen_range(-10..=10)).collect();
            let l = ModuleLabel::new(LabelKind::Verma, &w, random_level(&mut rng), rng.gen_range(-3..=3));
            let back = dual_i(&rd, &dual_i(&rd, &l).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
            ensure(back == l, || format!("{name}: dual_I² ≠ id on {l}"))?;
            let d: Vec<i64> = (0..rd.rank()).map(|_| rng.gen_range(0..=10)).collect();
            let l = ModuleLabel::new(LabelKind::Weyl, &d, random_level(&mut rng), rng.gen_range(-3..=3));
            let back = dual_go(&rd, &dual_go(&rd, &l).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
            ensure(back == l, || format!("{name}: dual_GO² ≠ id on {l}"))?;
        }
    }
    let mut squares = 0;
    for name in ["A1", "A2"] {
        let rd = RootDatum::from_name(name).unwrap();
        let hd = LevelScalar::from_i64(rd.h_dual());
        let levels = [
            -RatFunc::var() - hd.clone(),
            LevelScalar::from_rational(&Rational::new((-3).into(), 2.into())) - hd.clone(),
        ];
        for k in &levels {
            for w in box_weights(rd.rank(), -4, 4) {
                let l = ModuleLabel::new(LabelKind::Weyl, &w, k.clone(), 0);
                match positive_square(&rd, &l) {
                    Ok((left, right)) => {
                        ensure(rd.is_dominant(&w), || format!("{name} λ={w:?}: accepted a non-dominant weight"))?;
                        ensure(left == right, || format!("{name} λ={w:?}: {left} ≠ {right}"))?;
                        squares += 1;
                    }
                    Err(LabelError::NotDominant(_)) if !rd.is_dominant(&w) => {}
                    Err(e) => return Err(format!("{name} λ={w:?}: {e}")),
                }
            }
        }
    }
    Ok(format!("300 + 300 involutions, {squares} squares"))
}

fn c9() -> Check {
    let r = positive_level_spot_check(0, 3, Truncation::new(3, 3), 0).map_err(|e| e.to_string())?;
    ensure(r.passed, || format!("mismatches {:?}, error {:?}", r.mismatches, r.error))?;
    Ok(format!("{} classes match", r.root_of_unity.len()))
}

fn run_cli(args: &[&str]) -> cli::Outcome {
    cli::run(std::iter::once("seminf").chain(args.iter().copied()))
}

fn c10() -> Check {
    let runs: [&[&str]; 8] = [
        &["character", "--root-datum", "A2", "--lambda", "0..1", "--energy", "2", "--depth", "2"],
        &["kk-check", "--lambda", "-2..2"],
        &["uq-dims", "--root-datum", "B2", "--depth", "4"],
        &["qcoh", "--root-datum", "A2", "--lambda", "0..1"],
        &["semiinf", "--module", "wakimoto", "--lambda", "1", "--energy", "2", "--depth", "2", "--seed", "7"],
        &["verify-formula", "--energy", "3", "--depth", "3"],
        &["kl-labels", "--root-datum", "A2", "--lambda", "0..2"],
        &["uq-dims", "--ell", "5", "--depth", "6", "--format", "csv"],
    ];
    for args in runs {
        let a = run_cli(args);
        let b = run_cli(args);
        ensure(a.code == 0, || format!("{args:?}: exit {} {}", a.code, a.stderr))?;
        ensure(a.stdout == b.stdout && !a.stdout.is_empty(), || format!("{args:?}: reports differ"))?;
    }
    let corrupt: [&[&str]; 7] = [
        &["character", "--debug-corrupt", "sign"],
        &["uq-dims", "--root-datum", "A2", "--depth", "4", "--debug-corrupt", "binomial"],
        &["qcoh", "--debug-corrupt", "sign"],
        &["qcoh", "--debug-corrupt", "differential"],
        &["semiinf", "--lambda", "0", "--energy", "2", "--depth", "2", "--debug-corrupt", "sign"],
        &["verify-formula", "--debug-corrupt", "sign"],
        &["verify-formula", "--debug-corrupt", "differential"],
    ];
    for args in corrupt {
        let out = run_cli(args);
        let v: serde_json::Value = serde_json::from_slice(&out.stdout).map_err(|e| format!("{args:?}: {e} {}", out.stderr))?;
        ensure(out.code == 1 && v["verdict"] == "fail", || format!("{args:?}: verdict {} exit {}", v["verdict"], out.code))?;
    }
    Ok("8 reports byte-identical; 7 corrupted runs fail".into())
}

fn main() -> ExitCode {
    let criteria: [(u32, &str, u64, bool, fn() -> Check); 10] = [
        (1, "wakimoto character = verma character", 10, false, c1),
        (2, "verma character = affine Kostant enumeration", 30, false, c2),
        (3, "wakimoto/verma Kac-Kazhdan exclusion", 30, false, c3),
        (4, "quantum tower dimensions and Serre vanishing", 60, false, c4),
        (5, "quantum n-cohomology: BGG, closed form, resolution", 60, false, c5),
        (6, "wakimoto BRST calibration", 120, false, c6),
        (7, "semi-infinite = quantum cohomology, symbolic level", 300, false, c7),
        (8, "duality involutions and positive KL square", 5, false, c8),
        (9, "positive level spot check (optional)", 600, true, c9),
        (10, "deterministic reports and negative controls", 120, false, c10),
    ];
    let mut failed = false;
    for (id, name, limit, optional, f) in criteria {
        let start = Instant::now();
        let result = f();
        let elapsed = start.elapsed();
        let result = match result {
            Ok(s) if elapsed > Duration::from_secs(limit) => Err(format!("{s}; over the time limit")),
            r => r,
        };
        let (verdict, detail) = match &result {
            Ok(s) => ("PASS", s.as_str()),
            Err(s) => ("FAIL", s.as_str()),
        };
        println!(
            "criterion {id:>2} {verdict} [{:.2}s / {limit}s] {name}: {detail}",
            elapsed.as_secs_f64()
        );
        failed |= result.is_err() && !optional;
    }
    if failed {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
