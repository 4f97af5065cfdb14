//! Command-line driver: configuration, task dispatch and report emission.
//!
//! Reports are JSON objects `{task, config, verdict, data, timing,
//! conventions_digest}` with sorted keys, or CSV tables. Exit codes: 0 pass,
//! 1 verification failed, 2 usage, 3 truncation boundary, 4 internal error.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::characters::{bgg_euler_check, verma_character, wakimoto_character, Truncation};
use crate::cohomology::verify_quantum_inv;
use crate::kac_kazhdan::{wakimoto_verma_check, Cutoffs};
use crate::kl_bookkeeping::{label_table, level_sign, pairing_index_check};
use crate::quantum_algebra::{degrees_up_to, words_of_degree, AlgebraError, QuantumAlgebra};
use crate::root_datum::RootDatum;
use crate::scalars::{Field, GenericCtx, LevelScalar, QuantumCtx, RatFunc, Rational, RootOfUnityCtx};
use crate::semiinf_brst::{
    brst_cohomology, check_commutators, fock_decompose, positive_level_spot_check, verify_main_formula, BrstError,
    Corruptions, Slice, WakimotoSlice, WeylSlice,
};

/// Conventions the BRST engine is calibrated against; their hash goes into
/// every report.
pub const CONVENTIONS: &str = "\
cartan a_ij = <alpha_j, coroot_i>; weights in fundamental-weight coordinates
affine drop (n, beta) is the weight (-n, lambda - beta)
ghost vacuum killed by b_n (n >= 0) and c_n (n >= 1); c weight -2 ghost +1; b weight +2 ghost -1
d = sum_n e_n c_{-n}; fermionic order (kind, mode) with c before b
free fields: [a_n, a*_m] = delta_{n+m}; [b_m, b_n] = 2(k+2) m delta_{m+n}; b_0 = lambda
e = a; h = -2 :a* a: + b; f = -:a* a* a: + k da* + :a* b:
loop algebra: [x_m, y_n] = [x,y]_{m+n} + m k (x,y) delta_{m+n}; (e,f) = 1, (h,h) = 2
quantum: sym(i,j) = m a_ij / d_i; serre exponent 1 - a_ij; pairing <E_i, F_j> = delta_ij
";

pub fn conventions_digest() -> String {
    hex::encode(Sha256::digest(CONVENTIONS.as_bytes()))
}

#[derive(Parser, Debug)]
#[command(name = "seminf", version, about = "Exact checks of semi-infinite and quantum nilpotent cohomology at small rank")]
pub struct Cli {
    #[command(subcommand)]
    pub task: Task,
    #[command(flatten)]
    pub options: Options,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    /// Wakimoto vs Verma characters and the BGG Euler sum.
    Character,
    /// Kac-Kazhdan exclusion of Wakimoto/dual-Verma mismatches.
    KkCheck,
    /// Graded dimensions of the quantum nilpotent algebras.
    UqDims,
    /// Quantum n-cohomology of Weyl modules by BGG and by resolution.
    Qcoh,
    /// Semi-infinite cohomology of a Weyl or Wakimoto module.
    Semiinf,
    /// Semi-infinite side against the quantum side, symbolic level.
    VerifyFormula,
    /// Duality and Kazhdan-Lusztig label tables.
    KlLabels,
    /// Positive integral level against the root-of-unity engine.
    SpotCheck,
}

impl Task {
    fn name(self) -> &'static str {
        match self {
            Task::Character => "character",
            Task::KkCheck => "kk-check",
            Task::UqDims => "uq-dims",
            Task::Qcoh => "qcoh",
            Task::Semiinf => "semiinf",
            Task::VerifyFormula => "verify-formula",
            Task::KlLabels => "kl-labels",
            Task::SpotCheck => "spot-check",
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ModuleKind {
    #[default]
    Weyl,
    Wakimoto,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Corruption {
    /// Wrong sign in a fermionic or alternating sum.
    Sign,
    /// Wrong quantum binomial in the Serre elements.
    Binomial,
    /// Wrong differential in the BGG resolution.
    Differential,
}

/// Flags, also accepted as keys of a TOML config file. Flags win.
#[derive(Args, Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    /// TOML file with any of the options below (snake_case keys).
    #[arg(long, global = true)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// A1, A2 or B2.
    #[arg(long, global = true)]
    pub root_datum: Option<String>,
    /// `symbolic` or a rational `P/Q`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub level: Option<String>,
    /// Order of the root of unity.
    #[arg(long, global = true)]
    pub ell: Option<u32>,
    /// `A..B` (every coordinate in the range), `A`, or `a,b`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub lambda: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub energy: Option<i64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub depth: Option<i64>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true, value_enum)]
    pub module: Option<ModuleKind>,
    /// Negative control: run with a deliberately broken convention.
    #[arg(long, global = true, value_enum)]
    pub debug_corrupt: Option<Corruption>,
    /// Record wall-clock time in the report (breaks byte-identity).
    #[arg(long, global = true)]
    #[serde(default)]
    pub timing: bool,
}

impl Options {
    fn merge(self, file: Options) -> Options {
        Options {
            config: self.config,
            root_datum: self.root_datum.or(file.root_datum),
            level: self.level.or(file.level),
            ell: self.ell.or(file.ell),
            lambda: self.lambda.or(file.lambda),
            energy: self.energy.or(file.energy),
            depth: self.depth.or(file.depth),
            format: self.format.or(file.format),
            out: self.out.or(file.out),
            seed: self.seed.or(file.seed),
            module: self.module.or(file.module),
            debug_corrupt: self.debug_corrupt.or(file.debug_corrupt),
            timing: self.timing || file.timing,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum LevelMode {
    Symbolic,
    Rational(Rational),
}

impl LevelMode {
    fn describe(&self) -> String {
        match self {
            LevelMode::Symbolic => "symbolic".into(),
            LevelMode::Rational(q) => q.to_string(),
        }
    }

    fn scalar(&self) -> LevelScalar {
        match self {
            LevelMode::Symbolic => RatFunc::var(),
            LevelMode::Rational(q) => LevelScalar::from_rational(q),
        }
    }
}

/// A validated configuration.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub task: Task,
    pub root_datum: RootDatum,
    pub level: LevelMode,
    pub ell: Option<u32>,
    pub lambda_spec: String,
    pub lambdas: Vec<Vec<i64>>,
    pub truncation: Truncation,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub seed: u64,
    pub module: ModuleKind,
    pub corrupt: Option<Corruption>,
    pub timing: bool,
}

impl RunConfig {
    fn echo(&self) -> Value {
        json!({
            "root_datum": self.root_datum.name(),
            "level": self.level.describe(),
            "ell": self.ell,
            "lambda": self.lambda_spec,
            "lambdas": self.lambdas,
            "energy": self.truncation.energy,
            "depth": self.truncation.depth,
            "seed": self.seed,
            "module": self.module,
            "debug_corrupt": self.corrupt,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Failure {
    Usage(String),
    Boundary(String),
    Internal(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Boundary(_) => 3,
            Failure::Internal(_) => 4,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Boundary(m) | Failure::Internal(m) => m,
        }
    }
}

fn usage(m: impl Into<String>) -> Failure {
    Failure::Usage(m.into())
}

fn internal(e: impl std::fmt::Display) -> Failure {
    Failure::Internal(e.to_string())
}

fn brst_failure(e: BrstError) -> Failure {
    match e {
        BrstError::Boundary { .. } => Failure::Boundary(e.to_string()),
        BrstError::NotDominant(_) => Failure::Usage(e.to_string()),
        other => Failure::Internal(other.to_string()),
    }
}

/// `A..B`, `A` or `a,b,…`; a range fills every coordinate.
pub fn parse_lambdas(spec: &str, rank: usize) -> Result<Vec<Vec<i64>>, Failure> {
    let bad = || usage(format!("cannot parse --lambda `{spec}`"));
    let int = |s: &str| s.trim().parse::<i64>().map_err(|_| bad());
    if let Some((a, b)) = spec.split_once("..") {
        let (a, b) = (int(a)?, int(b)?);
        if a > b {
            return Err(bad());
        }
        let mut out = vec![vec![]];
        for _ in 0..rank {
            out = out
                .into_iter()
                .flat_map(|w: Vec<i64>| {
                    (a..=b).map(move |x| {
                        let mut w = w.clone();
                        w.push(x);
                        w
                    })
                })
                .collect();
        }
        return Ok(out);
    }
    let parts: Vec<i64> = spec.split(',').map(int).collect::<Result<_, _>>()?;
    match parts.len() {
        1 => Ok(vec![vec![parts[0]; rank]]),
        n if n == rank => Ok(vec![parts]),
        _ => Err(usage(format!("--lambda `{spec}` has the wrong rank for rank {rank}"))),
    }
}

fn parse_level(s: &str) -> Result<LevelMode, Failure> {
    if s == "symbolic" {
        return Ok(LevelMode::Symbolic);
    }
    s.parse::<Rational>()
        .map(LevelMode::Rational)
        .map_err(|_| usage(format!("--level must be `symbolic` or P/Q, got `{s}`")))
}

/// Validates options (after merging a config file) into a [`RunConfig`].
pub fn parse_config(task: Task, flags: Options) -> Result<RunConfig, Failure> {
    let opts = match &flags.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| usage(format!("config {}: {e}", path.display())))?;
            let file: Options = toml::from_str(&text).map_err(|e| usage(format!("config {}: {e}", path.display())))?;
            flags.merge(file)
        }
        None => flags,
    };
    let rd = RootDatum::from_name(opts.root_datum.as_deref().unwrap_or("A1")).map_err(|e| usage(e.to_string()))?;
    let level = parse_level(opts.level.as_deref().unwrap_or("symbolic"))?;
    let energy = opts.energy.unwrap_or(4);
    let depth = opts.depth.unwrap_or(4);
    let mut problems = Vec::new();
    if energy < 0 || depth < 0 {
        problems.push(format!("truncation ({energy}, {depth}) must be nonnegative"));
    }
    let default_lambda = if task == Task::SpotCheck { "0" } else { "0..2" };
    let lambda_spec = opts.lambda.clone().unwrap_or_else(|| default_lambda.to_string());
    let lambdas = parse_lambdas(&lambda_spec, rd.rank())?;
    let a1_only = matches!(task, Task::Semiinf | Task::VerifyFormula | Task::SpotCheck);
    if a1_only && rd.rank() != 1 {
        problems.push(format!("{} supports only A1, got {}", task.name(), rd.name()));
    }
    if task == Task::VerifyFormula && level != LevelMode::Symbolic {
        problems.push("verify-formula requires --level symbolic".into());
    }
    let needs_dominant = matches!(task, Task::Qcoh | Task::Semiinf | Task::VerifyFormula | Task::KlLabels | Task::SpotCheck);
    if needs_dominant && lambdas.iter().any(|l| !rd.is_dominant(l)) {
        problems.push(format!("{} needs dominant weights, --lambda `{lambda_spec}`", task.name()));
    }
    if let Some(ell) = opts.ell {
        if ell < 2 {
            problems.push(format!("--ell must be at least 2, got {ell}"));
        }
    }
    if opts.ell.is_some_and(|l| l % 2 == 0) {
        problems.push("even --ell is not supported".into());
    }
    if opts.ell.is_some() && !matches!(task, Task::UqDims | Task::SpotCheck) {
        problems.push(format!("--ell does not apply to {}", task.name()));
    }
    if let LevelMode::Rational(q) = &level {
        let k = LevelScalar::from_rational(q);
        if level_sign(&rd, &k) == 0 {
            problems.push(format!("critical level {q}"));
        }
        if task == Task::KlLabels && level_sign(&rd, &k) > 0 {
            problems.push("kl-labels takes the negative level κ'".into());
        }
    }
    let allowed: &[Corruption] = match task {
        Task::Character => &[Corruption::Sign],
        Task::UqDims => &[Corruption::Binomial],
        Task::Qcoh => &[Corruption::Sign, Corruption::Differential],
        Task::Semiinf => &[Corruption::Sign],
        Task::VerifyFormula => &[Corruption::Sign, Corruption::Differential],
        Task::KkCheck | Task::KlLabels | Task::SpotCheck => &[],
    };
    if let Some(c) = opts.debug_corrupt {
        if !allowed.contains(&c) {
            problems.push(format!("--debug-corrupt {c:?} is not available for {}", task.name()));
        }
    }
    if !problems.is_empty() {
        return Err(usage(problems.join("; ")));
    }
    Ok(RunConfig {
        task,
        root_datum: rd,
        level,
        ell: opts.ell,
        lambda_spec,
        lambdas,
        truncation: Truncation::new(energy, depth),
        format: opts.format.unwrap_or_default(),
        out: opts.out,
        seed: opts.seed.unwrap_or(0),
        module: opts.module.unwrap_or_default(),
        corrupt: opts.debug_corrupt,
        timing: opts.timing,
    })
}

/// Task output before serialization.
pub struct Report {
    pub task: Task,
    pub config: Value,
    pub passed: bool,
    pub data: Value,
    pub table: (Vec<&'static str>, Vec<Vec<String>>),
    pub elapsed_ms: Option<u128>,
}

fn to_value<T: Serialize>(x: &T) -> Result<Value, Failure> {
    serde_json::to_value(x).map_err(internal)
}

fn weight_str(w: &[i64]) -> String {
    w.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

pub fn run_task(cfg: &RunConfig) -> Result<Report, Failure> {
    let start = Instant::now();
    let (passed, data, table) = match cfg.task {
        Task::Character => task_character(cfg)?,
        Task::KkCheck => task_kk(cfg)?,
        Task::UqDims => match cfg.ell {
            Some(ell) => task_uq_dims(cfg, RootOfUnityCtx::new(ell))?,
            None => task_uq_dims(cfg, GenericCtx)?,
        },
        Task::Qcoh => task_qcoh(cfg)?,
        Task::Semiinf => task_semiinf(cfg)?,
        Task::VerifyFormula => task_verify(cfg)?,
        Task::KlLabels => task_kl(cfg)?,
        Task::SpotCheck => task_spot(cfg)?,
    };
    Ok(Report {
        task: cfg.task,
        config: cfg.echo(),
        passed,
        data,
        table,
        elapsed_ms: cfg.timing.then(|| start.elapsed().as_millis()),
    })
}

type TaskOutput = (bool, Value, (Vec<&'static str>, Vec<Vec<String>>));

fn task_character(cfg: &RunConfig) -> Result<TaskOutput, Failure> {
    let rd = &cfg.root_datum;
    let k = cfg.level.scalar();
    let flip = cfg.corrupt == Some(Corruption::Sign);
    let mut entries = Vec::new();
    let mut rows = Vec::new();
    let mut ok = true;
    for l in &cfg.lambdas {
        let v = verma_character(rd, l, &k, cfg.truncation);
        let w = wakimoto_character(rd, l, &k, cfg.truncation);
        let same = v.coeffs() == w.coeffs();
        let euler = if rd.is_dominant(l) {
            Some(bgg_euler_check(rd, l, &k, cfg.truncation, flip).map_err(internal)?)
        } else {
            None
        };
        ok &= same && euler != Some(false);
        let coefficients = v.coefficient_table();
        for (n, beta, c) in &coefficients {
            rows.push(vec![weight_str(l), n.to_string(), weight_str(beta), c.to_string()]);
        }
        entries.push(json!({
            "lambda": l,
            "wakimoto_equals_verma": same,
            "bgg_euler_ok": euler,
            "verma_coefficients": coefficients,
        }));
    }
    Ok((ok, Value::Array(entries), (vec!["lambda", "energy_drop", "root_drop", "coefficient"], rows)))
}

fn task_kk(cfg: &RunConfig) -> Result<TaskOutput, Failure> {
    let rd = &cfg.root_datum;
    let k = cfg.level.scalar();
    let cut = Cutoffs {
        max_energy: cfg.truncation.energy,
        max_depth: cfg.truncation.depth,
    };
    let reports: Vec<_> = cfg.lambdas.iter().map(|l| (l, wakimoto_verma_check(rd, l, &k, cut))).collect();
    let ok = reports.iter().all(|(_, r)| r.passed && r.shape_ok);
    let rows = reports
        .iter()
        .map(|(l, r)| {
            vec![
                weight_str(l),
                r.passed.to_string(),
                r.shape_ok.to_string(),
                r.candidates.len().to_string(),
                r.witnesses.len().to_string(),
            ]
        })
        .collect();
    let data: Vec<Value> = reports
        .iter()
        .map(|(l, r)| Ok(json!({"lambda": l, "report": to_value(r)?})))
        .collect::<Result<_, Failure>>()?;
    Ok((
        ok,
        Value::Array(data),
        (vec!["lambda", "passed", "shape_ok", "candidates", "witnesses"], rows),
    ))
}

fn task_uq_dims<C: QuantumCtx>(cfg: &RunConfig, ctx: C) -> Result<TaskOutput, Failure> {
    let rd = &cfg.root_datum;
    let alg = QuantumAlgebra::new(rd, ctx)
        .map_err(|e| usage(e.to_string()))?
        .with_corrupted_serre(cfg.corrupt == Some(Corruption::Binomial));
    let max_h = cfg.truncation.depth;
    let mut by_height: BTreeMap<i64, [usize; 4]> = BTreeMap::from([(0, [1, 1, 1, 1])]);
    let mut components = Vec::new();
    for nu in degrees_up_to(rd.rank(), max_h) {
        let h: i64 = nu.iter().sum();
        let free = words_of_degree(&nu).len();
        let kd = alg.kd_component(&nu).dim();
        let small = if cfg.ell.is_some() {
            match alg.small_component(&nu) {
                Ok(s) => s.dim,
                Err(e @ AlgebraError::EllNotDivisible { .. }) => return Err(usage(e.to_string())),
                Err(e) => return Err(internal(e)),
            }
        } else {
            kd
        };
        let lus = alg.lusztig_dim(&nu);
        let e = by_height.entry(h).or_insert([0; 4]);
        e[0] += free;
        e[1] += kd;
        e[2] += small;
        e[3] += lus;
        components.push(json!({"degree": nu, "free": free, "kd": kd, "small": small, "lusztig": lus}));
    }
    for h in 1..=max_h {
        by_height.entry(h).or_insert([0; 4]);
    }
    let serre_ok = alg.serre_vanishing_check(max_h);
    let rows: Vec<Vec<String>> = by_height
        .iter()
        .map(|(h, d)| {
            let mut r = vec![h.to_string()];
            r.extend(d.iter().map(|x| x.to_string()));
            r
        })
        .collect();
    let data = json!({
        "serre_vanishing": serre_ok,
        "by_height": by_height.iter().map(|(h, d)| json!({"degree": h, "free": d[0], "kd": d[1], "small": d[2], "lusztig": d[3]})).collect::<Vec<_>>(),
        "components": components,
        "mode": if cfg.ell.is_some() { "root-of-unity" } else { "generic" },
    });
    Ok((serre_ok, data, (vec!["degree", "free", "kd", "small", "lusztig"], rows)))
}

fn task_qcoh(cfg: &RunConfig) -> Result<TaskOutput, Failure> {
    let rd = &cfg.root_datum;
    let corrupt = cfg.corrupt.is_some();
    let r = verify_quantum_inv(rd, &cfg.lambdas, cfg.truncation.depth, corrupt);
    let mut rows = Vec::new();
    for e in &r.entries {
        for (g, w, n) in &e.closed_form {
            rows.push(vec![
                weight_str(&e.lambda),
                g.to_string(),
                weight_str(w),
                n.to_string(),
                e.bgg_agrees.to_string(),
                e.resolution_agrees.map_or("n/a".into(), |b| b.to_string()),
            ]);
        }
    }
    Ok((
        r.passed,
        to_value(&r)?,
        (vec!["lambda", "degree", "weight", "dim", "bgg_agrees", "resolution_agrees"], rows),
    ))
}

fn task_semiinf(cfg: &RunConfig) -> Result<TaskOutput, Failure> {
    let k = cfg.level.scalar();
    let ignore_signs = cfg.corrupt == Some(Corruption::Sign);
    let mut ok = true;
    let mut data = Vec::new();
    let mut rows = Vec::new();
    for l in &cfg.lambdas {
        let lambda = l[0];
        let slice: Box<dyn Slice> = match cfg.module {
            ModuleKind::Weyl => Box::new(WeylSlice::new(lambda, k.clone(), cfg.truncation.energy)),
            ModuleKind::Wakimoto => Box::new(WakimotoSlice::new(lambda, k.clone(), cfg.truncation.energy)),
        };
        let commutators_ok = check_commutators(slice.as_ref(), 2.min(cfg.truncation.energy));
        let c = brst_cohomology(slice.as_ref(), cfg.truncation, cfg.seed, ignore_signs);
        let fock = fock_decompose(&c, &k);
        ok &= commutators_ok && c.d_squared_zero && c.euler_ok && fock.is_ok();
        for b in &c.blocks {
            for (g, n) in &b.homology_dims {
                rows.push(vec![lambda.to_string(), g.to_string(), b.energy.to_string(), b.weight.to_string(), n.to_string()]);
            }
        }
        data.push(json!({
            "lambda": lambda,
            "commutators_ok": commutators_ok,
            "cohomology": to_value(&c)?,
            "fock": fock.as_ref().ok().map(to_value).transpose()?,
            "fock_error": fock.as_ref().err().map(|e| e.to_string()),
        }));
    }
    Ok((ok, Value::Array(data), (vec!["lambda", "degree", "energy", "weight", "dim"], rows)))
}

fn task_verify(cfg: &RunConfig) -> Result<TaskOutput, Failure> {
    let lambdas: Vec<i64> = cfg.lambdas.iter().map(|l| l[0]).collect();
    let corrupt = Corruptions {
        ghost_signs: cfg.corrupt == Some(Corruption::Sign),
        quantum_differential: cfg.corrupt == Some(Corruption::Differential),
    };
    let r = verify_main_formula(&lambdas, cfg.truncation, cfg.seed, corrupt).map_err(brst_failure)?;
    let mut rows = Vec::new();
    for e in &r.entries {
        for (g, labels) in e.semi_infinite.iter().flatten() {
            for f in labels {
                let q = e.quantum.iter().find(|x| x.0 == *g && x.1 == f.weight).map_or(0, |x| x.2);
                rows.push(vec![
                    e.lambda.to_string(),
                    g.to_string(),
                    f.weight.to_string(),
                    f.energy_shift.to_string(),
                    f.multiplicity.to_string(),
                    q.to_string(),
                ]);
            }
        }
    }
    Ok((
        r.passed,
        to_value(&r)?,
        (vec!["lambda", "degree", "weight", "energy_shift", "multiplicity", "quantum_dim"], rows),
    ))
}

fn task_kl(cfg: &RunConfig) -> Result<TaskOutput, Failure> {
    let rd = &cfg.root_datum;
    let k_neg = match &cfg.level {
        LevelMode::Symbolic => -RatFunc::var() - LevelScalar::from_i64(rd.h_dual()),
        LevelMode::Rational(q) => LevelScalar::from_rational(q),
    };
    let max = cfg.lambdas.iter().flatten().copied().max().unwrap_or(0);
    let (table, ok) = label_table(rd, max, &k_neg).map_err(internal)?;
    let pairing: Vec<_> = cfg
        .lambdas
        .iter()
        .map(|l| pairing_index_check(rd, l, &k_neg))
        .collect::<Result<_, _>>()
        .map_err(internal)?;
    let rows = table
        .iter()
        .map(|r| {
            vec![
                r.op.clone(),
                format!("{:?}({})", r.input.kind, r.input.weight.join(" ")),
                format!("{:?}({}) shift {}", r.output.kind, r.output.weight.join(" "), r.output.shift),
                r.round_trip.to_string(),
            ]
        })
        .collect();
    let data = json!({"table": to_value(&table)?, "pairing_index": to_value(&pairing)?});
    Ok((ok, data, (vec!["op", "input", "output", "consistent"], rows)))
}

fn task_spot(cfg: &RunConfig) -> Result<TaskOutput, Failure> {
    let ell = cfg.ell.unwrap_or(3) as i64;
    let mut reports = Vec::new();
    for l in &cfg.lambdas {
        reports.push(positive_level_spot_check(l[0], ell, cfg.truncation, cfg.seed).map_err(brst_failure)?);
    }
    let ok = reports.iter().all(|r| r.passed);
    let mut rows = Vec::new();
    for r in &reports {
        for (g, w, n) in r.semi_infinite.iter().flatten() {
            let q = r.root_of_unity.iter().find(|x| x.0 == *g && x.1 == *w).map_or(0, |x| x.2);
            rows.push(vec![r.lambda.to_string(), g.to_string(), w.to_string(), n.to_string(), q.to_string()]);
        }
    }
    Ok((
        ok,
        to_value(&reports)?,
        (vec!["lambda", "degree", "weight", "semi_infinite", "root_of_unity"], rows),
    ))
}

/// Stable serialization: JSON with sorted keys, or CSV.
pub fn emit_report(r: &Report, format: Format) -> Result<Vec<u8>, Failure> {
    match format {
        Format::Json => {
            let timing = match r.elapsed_ms {
                Some(ms) => json!({"recorded": true, "wall_clock_ms": ms}),
                None => json!({"recorded": false}),
            };
            let v = json!({
                "task": r.task.name(),
                "config": r.config,
                "verdict": if r.passed { "pass" } else { "fail" },
                "data": r.data,
                "timing": timing,
                "conventions_digest": conventions_digest(),
            });
            let mut out = serde_json::to_vec_pretty(&v).map_err(internal)?;
            out.push(b'\n');
            Ok(out)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&r.table.0).map_err(internal)?;
            for row in &r.table.1 {
                w.write_record(row).map_err(internal)?;
            }
            w.into_inner().map_err(internal)
        }
    }
}

/// Result of one invocation.
pub struct Outcome {
    pub code: i32,
    pub stdout: Vec<u8>,
    pub stderr: String,
}

/// Parses, runs and serializes; never exits the process.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome {
                    code,
                    stdout: text.into_bytes(),
                    stderr: String::new(),
                }
            } else {
                Outcome {
                    code,
                    stdout: Vec::new(),
                    stderr: text,
                }
            };
        }
    };
    let fail = |f: Failure| Outcome {
        code: f.exit_code(),
        stdout: Vec::new(),
        stderr: format!("error: {}\n", f.message()),
    };
    let cfg = match parse_config(cli.task, cli.options) {
        Ok(c) => c,
        Err(f) => return fail(f),
    };
    let report = match run_task(&cfg) {
        Ok(r) => r,
        Err(f) => return fail(f),
    };
    let bytes = match emit_report(&report, cfg.format) {
        Ok(b) => b,
        Err(f) => return fail(f),
    };
    let code = if report.passed { 0 } else { 1 };
    let stderr = format!("{}: {}\n", report.task.name(), if report.passed { "pass" } else { "fail" });
    match &cfg.out {
        Some(path) => match std::fs::write(path, &bytes) {
            Ok(()) => Outcome {
                code,
                stdout: Vec::new(),
                stderr,
            },
            Err(e) => fail(Failure::Internal(format!("writing {}: {e}", path.display()))),
        },
        None => Outcome {
            code,
            stdout: bytes,
            stderr,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts() -> Options {
        Options::default()
    }

    #[test]
    fn lambda_specs() {
        assert_eq!(parse_lambdas("0..2", 1).unwrap(), vec![vec![0], vec![1], vec![2]]);
        assert_eq!(parse_lambdas("-1..0", 2).unwrap().len(), 4);
        assert_eq!(parse_lambdas("1,0", 2).unwrap(), vec![vec![1, 0]]);
        assert!(parse_lambdas("2..1", 1).is_err());
        assert!(parse_lambdas("1,2,3", 2).is_err());
    }

    #[test]
    fn validation() {
        let mut o = opts();
        o.lambda = Some("0..2".into());
        o.energy = Some(4);
        assert!(parse_config(Task::VerifyFormula, o.clone()).is_ok());
        let mut bad = opts();
        bad.level = Some("3/2".into());
        bad.root_datum = Some("A2".into());
        let e = parse_config(Task::Semiinf, bad).unwrap_err();
        assert_eq!(e.exit_code(), 2);
        assert!(e.message().contains("only A1"));
        let mut c = opts();
        c.debug_corrupt = Some(Corruption::Binomial);
        assert!(parse_config(Task::Semiinf, c).is_err());
    }

    #[test]
    fn config_file_and_override() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        std::fs::write(&path, "root_datum = \"A2\"\nenergy = 3\nlambda = \"0\"\n").unwrap();
        let mut o = opts();
        o.config = Some(path.clone());
        o.energy = Some(2);
        let cfg = parse_config(Task::Character, o).unwrap();
        assert_eq!((cfg.root_datum.name(), cfg.truncation.energy), ("A2", 2));
        std::fs::write(&path, "rootdatum = \"A2\"\n").unwrap();
        let mut o = opts();
        o.config = Some(path);
        assert_eq!(parse_config(Task::Character, o).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn json_keys_are_sorted() {
        let out = run(["seminf", "kl-labels", "--lambda", "0..1"]);
        assert_eq!(out.code, 0, "{}", out.stderr);
        let text = String::from_utf8(out.stdout).unwrap();
        let v: Value = serde_json::from_str(&text).unwrap();
        let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
        assert_eq!(keys, ["config", "conventions_digest", "data", "task", "timing", "verdict"]);
        assert!(text.find("\"config\"").unwrap() < text.find("\"verdict\"").unwrap());
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run(["seminf", "no-such-task"]).code, 2);
        assert_eq!(run(["seminf", "character", "--level", "x"]).code, 2);
    }
}
