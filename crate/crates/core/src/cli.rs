//! The `igusa-lab` command line: argument parsing, dispatch and reports.
//!
//! Every command builds one `serde_json::Value`; JSON and text output are two
//! renderings of it. Exit codes: 0 success (warnings allowed), 1 an exact
//! identity came out false, 2 bad input, 3 over budget.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde_json::{json, Map, Value};

use crate::arith::{is_prime, primes_in, rational_string};
use crate::bounds::{self, BoundCheckReport, BoundOptions, ConeSpec, TwistPolicy};
use crate::decomp::{verify_decomposition, DecompOptions, Mode, Verdict, DEFAULT_DEPTH};
use crate::error::{Error, Result};
use crate::field::GaloisField;
use crate::homogenize::{homogenization_chain, verify_nondeg_transport, verify_sigma_invariance, verify_torus_sum_invariance};
use crate::newton::{nondegenerate_for_prime, NewtonPolyhedron};
use crate::poly::Polynomial;
use crate::sums::{e_sum, s_sum, s_sum_laurent, t_sum, Budget, ExpSumValue, UnitTwist};

pub const SCHEMA: &str = "igusa-lab/report/v1";

pub const EXIT_OK: i32 = 0;
pub const EXIT_FALSE_IDENTITY: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "igusa-lab", version, about = "Newton polyhedra, exponential sums mod p^m and their face decompositions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Support, faces, sigma, kappa, weights and nondegeneracy per prime.
    Analyze(CommonArgs),
    /// Exponential sums with their exact histograms.
    Sum {
        #[arg(long, value_enum, default_value = "s")]
        kind: SumArg,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Runs identity and bound checks.
    Verify {
        /// df, df2, nu, cone, ab, mt1, katz, quasinondeg, dims, mt2, trivlem or all.
        #[arg(long, value_delimiter = ',', default_value = "all")]
        check: Vec<CheckArg>,
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        extra: VerifyArgs,
    },
    /// Homogenization chain of a quasi-homogeneous polynomial.
    Homogenize {
        #[arg(long)]
        verify_invariance: bool,
        #[command(flatten)]
        common: CommonArgs,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SumArg {
    /// Full box mod p^m.
    #[value(alias = "S")]
    S,
    /// Multiples of p mod p^m.
    #[value(alias = "T")]
    T,
    /// Torus sum over F_p^*.
    #[value(alias = "E")]
    E,
    /// F_p[t]/t^m model.
    #[value(alias = "L", alias = "laurent")]
    L,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CheckArg {
    Df,
    Df2,
    Nu,
    Cone,
    Ab,
    Mt1,
    Katz,
    Quasinondeg,
    Dims,
    Mt2,
    Trivlem,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Polynomial text, e.g. "x1^2 + x2^3".
    #[arg(long)]
    pub poly: Option<String>,
    /// Number of variables; inferred from the largest index if absent.
    #[arg(long)]
    pub n: Option<usize>,
    /// Catalog file with lines `name | n | poly-text`.
    #[arg(long, conflicts_with = "poly")]
    pub catalog: Option<PathBuf>,
    /// A single prime; overrides --primes.
    #[arg(long)]
    pub p: Option<u64>,
    /// Prime range `lo..hi` (inclusive) or list `5,7,11`.
    #[arg(long, default_value = "5..31")]
    pub primes: String,
    /// Exponent range `lo..hi` or list.
    #[arg(long)]
    pub m: Option<String>,
    /// `one`, `default`, `all` or a list of units.
    #[arg(long)]
    pub twists: Option<String>,
    /// Starting truncation depth V.
    #[arg(long, default_value_t = DEFAULT_DEPTH)]
    pub depth: u32,
    /// Keep V fixed instead of deepening until the tail is negligible.
    #[arg(long)]
    pub fixed_depth: bool,
    #[arg(long, default_value_t = 1e-9)]
    pub tolerance: f64,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Largest number of points per brute-force sum; overrides the environment.
    #[arg(long)]
    pub budget: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Largest nu(k) enumerated by exact checks.
    #[arg(long, default_value_t = 20)]
    pub cap: u32,
    /// Extension field orders for the katz check.
    #[arg(long, value_delimiter = ',', default_value = "4,9,25")]
    pub q: Vec<u64>,
    /// Cone generators `1,0;0,1` for the cone check (default: the orthant).
    #[arg(long)]
    pub cone: Option<String>,
    /// Linear form `1,1` for the cone check (default: all ones).
    #[arg(long)]
    pub form: Option<String>,
    /// sigma for the cone check as `a/b` (default: sigma of the polynomial).
    #[arg(long)]
    pub sigma: Option<String>,
    #[arg(long, default_value = "0")]
    pub gamma: String,
    /// Warn when a fitted constant exceeds this value by more than the tolerance.
    #[arg(long)]
    pub c_max: Option<f64>,
}

/// Validated configuration for one polynomial.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub name: Option<String>,
    pub poly_text: String,
    pub n: usize,
    pub primes: Vec<u64>,
    pub m: Vec<u32>,
    pub twists: TwistSpec,
    pub depth: u32,
    pub adaptive: bool,
    pub tolerance: f64,
    pub format: Format,
    pub budget: Budget,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TwistSpec {
    Policy(TwistPolicy),
    List(Vec<u64>),
}

impl TwistSpec {
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "one" => Ok(TwistSpec::Policy(TwistPolicy::One)),
            "default" => Ok(TwistSpec::Policy(TwistPolicy::Default)),
            "all" => Ok(TwistSpec::Policy(TwistPolicy::All)),
            list => Ok(TwistSpec::List(parse_list(list)?)),
        }
    }

    /// Units to use at `p`; listed twists that are not units mod `p` are dropped.
    pub fn at(&self, p: u64) -> Vec<u64> {
        match self {
            TwistSpec::Policy(t) => t.twists(p),
            TwistSpec::List(l) => l.iter().copied().filter(|u| u % p != 0).collect(),
        }
    }

    fn policy(&self) -> TwistPolicy {
        match self {
            TwistSpec::Policy(t) => t.clone(),
            TwistSpec::List(_) => TwistPolicy::Default,
        }
    }
}

fn parse_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>> {
    s.split(',')
        .map(|t| t.trim().parse::<T>().map_err(|_| Error::InvalidInput(format!("cannot read '{t}' as a number"))))
        .collect()
}

fn parse_range(s: &str) -> Result<Vec<u64>> {
    if let Some((lo, hi)) = s.split_once("..") {
        let lo: u64 = lo.trim().parse().map_err(|_| Error::InvalidInput(format!("bad range '{s}'")))?;
        let hi: u64 = hi.trim().trim_start_matches('=').parse().map_err(|_| Error::InvalidInput(format!("bad range '{s}'")))?;
        if lo > hi {
            return Err(Error::InvalidInput(format!("empty range '{s}'")));
        }
        Ok((lo..=hi).collect())
    } else {
        parse_list(s)
    }
}

/// `5..31` (primes in the inclusive range) or an explicit list of primes.
pub fn parse_primes(s: &str) -> Result<Vec<u64>> {
    if s.contains("..") {
        let r = parse_range(s)?;
        let ps = primes_in(r[0], *r.last().expect("nonempty"));
        if ps.is_empty() {
            return Err(Error::InvalidInput(format!("no primes in '{s}'")));
        }
        return Ok(ps);
    }
    let ps: Vec<u64> = parse_list(s)?;
    if let Some(&p) = ps.iter().find(|&&p| !is_prime(p)) {
        return Err(Error::NotPrime(p));
    }
    Ok(ps)
}

/// Largest `k` in a variable name `xk` (a bare `x` counts as `x1`).
pub fn infer_num_vars(text: &str) -> usize {
    let bytes = text.as_bytes();
    let mut n = 1;
    for (i, &b) in bytes.iter().enumerate() {
        if b == b'x' {
            let digits: String = text[i + 1..].chars().take_while(char::is_ascii_digit).collect();
            if let Ok(k) = digits.parse::<usize>() {
                n = n.max(k);
            }
        }
    }
    n
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CatalogEntry {
    pub name: String,
    pub n: usize,
    pub poly: String,
}

/// One entry per line `name | n | poly-text`; `#` starts a comment.
pub fn parse_catalog(text: &str) -> Result<Vec<CatalogEntry>> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('|').map(str::trim).collect();
        let [name, n, poly] = fields[..] else {
            return Err(Error::InvalidInput(format!("catalog line {}: expected `name | n | poly`", lineno + 1)));
        };
        let n = n.parse().map_err(|_| Error::InvalidInput(format!("catalog line {}: bad n '{n}'", lineno + 1)))?;
        out.push(CatalogEntry { name: name.to_string(), n, poly: poly.to_string() });
    }
    Ok(out)
}

impl RunConfig {
    fn from_args(args: &CommonArgs, entry: Option<&CatalogEntry>, default_twists: TwistPolicy, default_m: &str) -> Result<Self> {
        let (name, poly_text, n) = match entry {
            Some(e) => (Some(e.name.clone()), e.poly.clone(), e.n),
            None => {
                let text = args.poly.clone().ok_or_else(|| Error::InvalidInput("--poly or --catalog is required".into()))?;
                let n = args.n.unwrap_or_else(|| infer_num_vars(&text));
                (None, text, n)
            }
        };
        let primes = match args.p {
            Some(p) if is_prime(p) => vec![p],
            Some(p) => return Err(Error::NotPrime(p)),
            None => parse_primes(&args.primes)?,
        };
        let m: Vec<u32> = parse_range(args.m.as_deref().unwrap_or(default_m))?.into_iter().map(|v| v as u32).collect();
        let twists = match &args.twists {
            Some(s) => TwistSpec::parse(s)?,
            None => TwistSpec::Policy(default_twists),
        };
        let budget = match args.budget {
            Some(b) if b >= 1.0 => Budget(b as u128),
            Some(b) => return Err(Error::InvalidInput(format!("budget {b} must be at least 1"))),
            None => Budget::from_env(),
        };
        if !(args.tolerance > 0.0) {
            return Err(Error::InvalidInput("tolerance must be positive".into()));
        }
        Ok(RunConfig {
            name,
            poly_text,
            n,
            primes,
            m,
            twists,
            depth: args.depth,
            adaptive: !args.fixed_depth,
            tolerance: args.tolerance,
            format: args.format,
            budget,
        })
    }

    pub fn polynomial(&self) -> Result<Polynomial> {
        Polynomial::parse(&self.poly_text, self.n)
    }

    fn bound_options(&self) -> BoundOptions {
        BoundOptions { budget: self.budget, twists: self.twists.policy() }
    }
}

/// A finished report and its exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub report: Value,
    pub exit_code: i32,
}

pub fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::BudgetExceeded { .. } | Error::ModulusTooLarge(_) | Error::EnumerationLimit { .. } => EXIT_BUDGET,
        _ => EXIT_INPUT,
    }
}

fn error_outcome(e: &Error) -> Outcome {
    Outcome { report: json!({ "error": e.to_string() }), exit_code: exit_code_for(e) }
}

fn rational_json(r: &BigRational) -> Value {
    Value::String(rational_string(r))
}

fn sum_json(v: &ExpSumValue, p: u64, m: u32) -> Value {
    let (abs, err) = v.magnitude();
    json!({
        "p": p,
        "m": m,
        "u": v.twist,
        "kind": v.kind,
        "re": v.re,
        "im": v.im,
        "abs": abs,
        "abs_error": err,
        "exact": v.rational_value().as_ref().map(rational_string),
        "is_zero": v.is_exactly_zero(),
        "normalization": rational_string(&v.normalization),
        "histogram": v.histogram,
    })
}

pub fn cmd_analyze(config: &RunConfig) -> Result<Outcome> {
    let f = config.polynomial()?;
    let poly = NewtonPolyhedron::new(&f)?;
    let faces: Vec<Value> = poly
        .faces
        .iter()
        .map(|t| {
            json!({
                "id": t.id,
                "label": t.label(),
                "dim": t.dim,
                "compact": t.compact,
                "witness": t.witness,
                "min_value": t.min_value,
                "points": t.support_points.iter().map(|e| e.0.clone()).collect::<Vec<_>>(),
            })
        })
        .collect();
    let weights = match f.quasi_weights() {
        Ok(w) => json!(w),
        Err(e) => json!({ "error": e.to_string() }),
    };
    let trivlem = match bounds::check_trivlem(&f) {
        Ok(v) => {
            let verdict = if v.origin_critical { "0 critical".to_string() } else { "linear term, 0 not critical".to_string() };
            json!({ "verdict": verdict, "detail": v })
        }
        Err(e) => json!({ "error": e.to_string() }),
    };
    let mut table = Vec::new();
    for &p in &config.primes {
        let all = nondegenerate_for_prime(&f, &poly.faces, p, false)?;
        let compact = all.checks.iter().filter(|c| c.compact).all(|c| c.critical_point.is_none());
        let bad: Vec<Value> = all
            .checks
            .iter()
            .filter_map(|c| c.critical_point.as_ref().map(|x| json!({ "face": c.face, "point": x })))
            .collect();
        table.push(json!({ "p": p, "all_faces": all.certified, "compact_faces": compact, "critical_points": bad }));
    }
    let certified: Vec<u64> = table.iter().filter(|r| r["all_faces"] == json!(true)).map(|r| r["p"].as_u64().expect("p")).collect();
    let report = json!({
        "polynomial": f.to_string(),
        "n": f.num_vars(),
        "support": poly.support.iter().map(|e| e.0.clone()).collect::<Vec<_>>(),
        "faces": faces,
        "face_count": poly.faces.len(),
        "sigma": rational_json(poly.sigma()),
        "t_star": rational_json(&poly.diagonal.t_star),
        "kappa": poly.kappa(),
        "f0": poly.f0().id,
        "f0_label": poly.f0().label(),
        "quasi_weights": weights,
        "trivlem": trivlem,
        "nondegeneracy": table,
        "certified_primes": certified,
    });
    Ok(Outcome { report, exit_code: EXIT_OK })
}

pub fn cmd_sum(config: &RunConfig, kind: SumArg) -> Result<Outcome> {
    let f = config.polynomial()?;
    let mut rows = Vec::new();
    let ms: Vec<u32> = if kind == SumArg::E { vec![1] } else { config.m.clone() };
    for &p in &config.primes {
        for &m in &ms {
            let base = match kind {
                SumArg::S => s_sum(&f, p, m, UnitTwist::ONE, config.budget)?,
                SumArg::T => t_sum(&f, p, m, UnitTwist::ONE, config.budget)?,
                SumArg::E => e_sum(&f, p, UnitTwist::ONE, config.budget)?,
                SumArg::L => s_sum_laurent(&f, p, m, UnitTwist::ONE, config.budget)?,
            };
            for u in config.twists.at(p) {
                rows.push(sum_json(&base.twisted(u), p, m));
            }
        }
    }
    let kind_name = match kind {
        SumArg::S => "S",
        SumArg::T => "T",
        SumArg::E => "E",
        SumArg::L => "S-laurent",
    };
    Ok(Outcome { report: json!({ "polynomial": f.to_string(), "kind": kind_name, "sums": rows }), exit_code: EXIT_OK })
}

#[derive(Debug, Default)]
struct Tally {
    hard: usize,
    warnings: Vec<String>,
}

fn bound_json(r: &BoundCheckReport) -> Value {
    serde_json::to_value(r).expect("serializable")
}

fn c_max_warning(tally: &mut Tally, name: &str, r: &BoundCheckReport, extra: &VerifyArgs, tol: f64) {
    if let (Some(c), Some(max)) = (r.fitted_c, extra.c_max) {
        if c > max + tol {
            tally.warnings.push(format!("{name}: fitted c = {c:.6} above {max}"));
        }
    }
    if let Some(s) = &r.stability {
        if !s.stable {
            tally.warnings.push(format!("{name}: fitted constant grows by {:.3}", s.growth));
        }
    }
}

fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::InvalidInput(format!("cannot read '{s}' as a rational"));
    match s.split_once('/') {
        Some((a, b)) => {
            let (a, b): (i64, i64) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
            if b == 0 {
                return Err(bad());
            }
            Ok(BigRational::new(a.into(), b.into()))
        }
        None => Ok(BigRational::from_integer(s.trim().parse::<i64>().map_err(|_| bad())?.into())),
    }
}

fn cone_from_args(extra: &VerifyArgs, n: usize) -> Result<ConeSpec> {
    let generators = match &extra.cone {
        Some(s) => s.split(';').map(parse_list::<u64>).collect::<Result<Vec<_>>>()?,
        None => (0..n).map(|j| (0..n).map(|i| u64::from(i == j)).collect()).collect(),
    };
    let dim = generators.first().map_or(n, Vec::len);
    let linear_form = match &extra.form {
        Some(s) => parse_list(s)?,
        None => vec![1; dim],
    };
    Ok(ConeSpec { generators, linear_form })
}

fn run_check(check: CheckArg, f: &Polynomial, config: &RunConfig, extra: &VerifyArgs, tally: &mut Tally) -> Result<Value> {
    let opts = config.bound_options();
    let name = format!("{check:?}").to_lowercase();
    let status = |ok: bool| if ok { "pass" } else { "fail" };
    match check {
        CheckArg::Df | CheckArg::Df2 => {
            let mode = if check == CheckArg::Df { Mode::Global } else { Mode::Local };
            let mut runs = Vec::new();
            let (mut verified, mut failed, mut na, mut skipped) = (0, 0, 0, Vec::new());
            for &p in &config.primes {
                for &m in &config.m {
                    if mode == Mode::Local && m == 0 {
                        continue;
                    }
                    for u in config.twists.at(p) {
                        let o = DecompOptions { mode, depth: config.depth, adaptive: config.adaptive, budget: config.budget, dump_terms: false };
                        match verify_decomposition(f, p, m, UnitTwist::new(u, p)?, o) {
                            Ok(r) => {
                                match r.verdict {
                                    Verdict::Verified => verified += 1,
                                    Verdict::Failed => failed += 1,
                                    Verdict::NotApplicable => na += 1,
                                }
                                let bf = r.brute_force.as_ref().map(|b| json!([b.re, b.im]));
                                let asm = r.assembled.map(|b| json!({ "re": [b.re.lo, b.re.hi], "im": [b.im.lo, b.im.hi] }));
                                runs.push(json!({
                                    "p": p, "m": m, "u": u, "verdict": r.verdict, "depth": r.depth,
                                    "tail": rational_string(&r.tail), "brute_force": bf, "assembled": asm,
                                }));
                            }
                            Err(e @ (Error::BudgetExceeded { .. } | Error::ModulusTooLarge(_))) => {
                                skipped.push(format!("p={p} m={m} u={u}: {e}"));
                            }
                            Err(e) => return Err(e),
                        }
                    }
                }
            }
            if verified + failed + na == 0 && !skipped.is_empty() {
                return Err(Error::BudgetExceeded { points: u128::MAX, budget: config.budget.0 });
            }
            tally.hard += failed;
            Ok(json!({
                "check": name, "status": status(failed == 0),
                "verified": verified, "failed": failed, "not_applicable": na,
                "skipped": skipped, "runs": runs,
            }))
        }
        CheckArg::Nu => {
            let r = bounds::check_nu_inequality(f, None, extra.cap)?;
            tally.hard += usize::from(!r.holds());
            Ok(json!({ "check": name, "status": status(r.holds()), "report": bound_json(&r) }))
        }
        CheckArg::Cone => {
            let cone = cone_from_args(extra, f.num_vars())?;
            let sigma = match &extra.sigma {
                Some(s) => parse_rational(s)?,
                None => NewtonPolyhedron::new(f)?.sigma().clone(),
            };
            let gamma = parse_rational(&extra.gamma)?;
            let r = bounds::check_cone_lemma(&cone, &sigma, &gamma, &config.primes, &config.m, extra.cap)?;
            // a failed hypothesis makes the lemma inapplicable, not false
            if !r.holds() {
                tally.warnings.push("cone: precondition fails; bound not applicable".into());
            }
            c_max_warning(tally, &name, &r, extra, config.tolerance);
            let st = if r.holds() { "pass" } else { "not-applicable" };
            Ok(json!({ "check": name, "status": st, "sigma": rational_string(&sigma), "report": bound_json(&r) }))
        }
        CheckArg::Ab => {
            let r = bounds::check_ab_bounds(f, &config.primes, &config.m, Mode::Global, config.depth)?;
            c_max_warning(tally, &name, &r, extra, config.tolerance);
            Ok(json!({ "check": name, "status": "pass", "report": bound_json(&r) }))
        }
        CheckArg::Mt1 => {
            let mut out = Vec::new();
            for mode in [Mode::Global, Mode::Local] {
                let r = bounds::fit_mt1(f, &config.primes, &config.m, mode, &opts)?;
                c_max_warning(tally, &name, &r, extra, config.tolerance);
                out.push(bound_json(&r));
            }
            Ok(json!({ "check": name, "status": "pass", "reports": out }))
        }
        CheckArg::Katz => {
            let qs: Vec<u64> = extra
                .q
                .iter()
                .copied()
                .filter(|&q| (q as u128).checked_pow(f.num_vars() as u32).is_some_and(|pts| pts <= config.budget.0))
                .collect();
            for &q in &extra.q {
                GaloisField::builtin(q)?;
            }
            let r = bounds::check_katz_bounds(f, &config.primes, &qs, &opts)?;
            c_max_warning(tally, &name, &r, extra, config.tolerance);
            Ok(json!({ "check": name, "status": "pass", "report": bound_json(&r) }))
        }
        CheckArg::Quasinondeg => {
            let mut r = bounds::check_quasinondeg_bound(f, &config.primes, &opts)?;
            c_max_warning(tally, &name, &r, extra, config.tolerance);
            let faces = bounds::check_face_torus_bounds(f, &config.primes, &opts)?;
            r.notes.push(format!("per-face torus fit {:?}", faces.fitted_c));
            Ok(json!({ "check": name, "status": "pass", "report": bound_json(&r), "faces": bound_json(&faces) }))
        }
        CheckArg::Dims => {
            let est = bounds::critical_dim_estimate(f, &config.primes)?;
            let mut v = json!({ "check": name, "status": "pass", "critical_locus": est });
            if est.dimension.is_none() {
                tally.warnings.push("dims: critical locus dimension inconclusive".into());
                v["status"] = json!("inconclusive");
            }
            match bounds::check_intersect_and_fg(f, &config.primes) {
                Ok(r) => {
                    if !r.holds() {
                        tally.warnings.push("dims: dim C_g > dim C_f + 1 on point counts".into());
                    }
                    v["fg"] = bound_json(&r);
                }
                Err(e) => v["fg"] = json!({ "skipped": e.to_string() }),
            }
            Ok(v)
        }
        CheckArg::Mt2 => {
            let r = bounds::check_mt2(f, &config.primes, &opts)?;
            tally.hard += usize::from(!r.holds());
            c_max_warning(tally, &name, &r, extra, config.tolerance);
            Ok(json!({ "check": name, "status": status(r.holds()), "report": bound_json(&r) }))
        }
        CheckArg::Trivlem => {
            let v = bounds::check_trivlem(f)?;
            tally.hard += usize::from(!v.exclusive);
            Ok(json!({ "check": name, "status": status(v.exclusive), "verdict": v }))
        }
        CheckArg::All => unreachable!("expanded by the caller"),
    }
}

const ALL_CHECKS: [CheckArg; 11] = [
    CheckArg::Df,
    CheckArg::Df2,
    CheckArg::Nu,
    CheckArg::Cone,
    CheckArg::Ab,
    CheckArg::Mt1,
    CheckArg::Katz,
    CheckArg::Quasinondeg,
    CheckArg::Dims,
    CheckArg::Mt2,
    CheckArg::Trivlem,
];

fn needs_quasi_homogeneous(c: CheckArg) -> bool {
    matches!(c, CheckArg::Katz | CheckArg::Quasinondeg | CheckArg::Mt2 | CheckArg::Trivlem)
}

pub fn cmd_verify(config: &RunConfig, checks: &[CheckArg], extra: &VerifyArgs) -> Result<Outcome> {
    let f = config.polynomial()?;
    let expand = checks.contains(&CheckArg::All);
    let list: Vec<CheckArg> = if expand { ALL_CHECKS.to_vec() } else { checks.to_vec() };
    let qh = f.quasi_weights().is_ok();
    let mut tally = Tally::default();
    let mut results = Vec::new();
    for c in list {
        if expand && needs_quasi_homogeneous(c) && !qh {
            results.push(json!({ "check": format!("{c:?}").to_lowercase(), "status": "skipped", "reason": "not quasi-homogeneous" }));
            continue;
        }
        results.push(run_check(c, &f, config, extra, &mut tally)?);
    }
    let code = if tally.hard > 0 { EXIT_FALSE_IDENTITY } else { EXIT_OK };
    let report = json!({
        "polynomial": f.to_string(),
        "checks": results,
        "hard_failures": tally.hard,
        "warnings": tally.warnings,
    });
    Ok(Outcome { report, exit_code: code })
}

pub fn cmd_homogenize(config: &RunConfig, verify_invariance: bool) -> Result<Outcome> {
    let f = config.polynomial()?;
    let chain = homogenization_chain(&f)?;
    let sig = verify_sigma_invariance(&chain)?;
    let mut stages = vec![json!({ "stage": 0, "poly": chain.initial.to_string(), "sigma": sig.sigmas[0] })];
    for (i, s) in chain.steps.iter().enumerate() {
        stages.push(json!({
            "stage": i + 1,
            "variable": s.variable + 1,
            "repetition": s.repetition,
            "new_variable": s.new_variable + 1,
            "poly": s.poly.to_string(),
            "sigma": sig.sigmas[i + 1],
        }));
    }
    let mut hard = usize::from(!sig.constant);
    let mut warnings = Vec::new();
    let mut report = json!({
        "polynomial": f.to_string(),
        "weights": chain.weights,
        "steps": chain.steps.len(),
        "total_new_vars": chain.total_new_vars,
        "final": chain.final_poly.to_string(),
        "final_vars": chain.final_poly.num_vars(),
        "final_homogeneous": chain.final_poly.is_homogeneous(),
        "stages": stages,
        "sigma_constant": sig.constant,
    });
    if verify_invariance {
        let mut transport = Vec::new();
        let mut torus = Vec::new();
        for &p in &config.primes {
            let t = verify_nondeg_transport(&chain, p)?;
            if !t.holds() {
                warnings.push(format!("p={p}: nondegeneracy lost at stages {:?}", t.counterexamples));
            }
            transport.push(json!({ "p": p, "stages": t.stages, "vacuous": t.vacuous(), "counterexamples": t.counterexamples }));
            for u in config.twists.at(p) {
                let inv = verify_torus_sum_invariance(&chain, p, UnitTwist::new(u, p)?, config.budget)?;
                hard += usize::from(!inv.holds());
                torus.push(json!({ "p": p, "u": u, "equal": inv.holds(), "values": inv.values }));
            }
        }
        report["nondeg_transport"] = json!(transport);
        report["torus_invariance"] = json!(torus);
        report["torus_invariant"] = json!(torus.iter().all(|t| t["equal"] == json!(true)));
    }
    report["warnings"] = json!(warnings);
    report["hard_failures"] = json!(hard);
    Ok(Outcome { report, exit_code: if hard > 0 { EXIT_FALSE_IDENTITY } else { EXIT_OK } })
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Analyze(_) => "analyze",
        Command::Sum { .. } => "sum",
        Command::Verify { .. } => "verify",
        Command::Homogenize { .. } => "homogenize",
    }
}

fn run_one(cli: &Cli, entry: Option<&CatalogEntry>) -> Result<Outcome> {
    match &cli.command {
        Command::Analyze(a) => cmd_analyze(&RunConfig::from_args(a, entry, TwistPolicy::One, "1")?),
        Command::Sum { kind, common } => cmd_sum(&RunConfig::from_args(common, entry, TwistPolicy::One, "1")?, *kind),
        Command::Verify { check, common, extra } => {
            cmd_verify(&RunConfig::from_args(common, entry, TwistPolicy::One, "1..3")?, check, extra)
        }
        Command::Homogenize { verify_invariance, common } => {
            cmd_homogenize(&RunConfig::from_args(common, entry, TwistPolicy::All, "1")?, *verify_invariance)
        }
    }
}

fn common(c: &Command) -> &CommonArgs {
    match c {
        Command::Analyze(a) => a,
        Command::Sum { common, .. } | Command::Verify { common, .. } | Command::Homogenize { common, .. } => common,
    }
}

/// Runs a parsed command line, over the catalog if one is given.
pub fn run(cli: &Cli) -> Outcome {
    let args = common(&cli.command);
    let mut outcome = match &args.catalog {
        None => run_one(cli, None).unwrap_or_else(|e| error_outcome(&e)),
        Some(path) => {
            let entries = std::fs::read_to_string(path)
                .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))
                .and_then(|t| parse_catalog(&t));
            match entries {
                Err(e) => error_outcome(&e),
                Ok(entries) => {
                    let mut code = EXIT_OK;
                    let mut rows = Vec::new();
                    for entry in &entries {
                        let o = run_one(cli, Some(entry)).unwrap_or_else(|e| error_outcome(&e));
                        code = code.max(o.exit_code);
                        rows.push(json!({ "name": entry.name, "n": entry.n, "poly": entry.poly, "exit_code": o.exit_code, "report": o.report }));
                    }
                    Outcome { report: json!({ "catalog": rows }), exit_code: code }
                }
            }
        }
    };
    let mut top = Map::new();
    top.insert("schema".into(), json!(SCHEMA));
    top.insert("command".into(), json!(command_name(&cli.command)));
    top.insert("exit_code".into(), json!(outcome.exit_code));
    if let Value::Object(body) = outcome.report {
        top.extend(body);
    }
    outcome.report = Value::Object(top);
    outcome
}

fn flatten(v: &Value, path: &str, out: &mut Vec<(String, String)>) {
    let join = |k: &str| if path.is_empty() { k.to_string() } else { format!("{path}.{k}") };
    match v {
        Value::Object(m) if !m.is_empty() => m.iter().for_each(|(k, x)| flatten(x, &join(k), out)),
        Value::Array(a) if !a.is_empty() => a.iter().enumerate().for_each(|(i, x)| flatten(x, &format!("{path}[{i}]"), out)),
        scalar => out.push((path.to_string(), scalar.to_string())),
    }
}

/// `(path, JSON scalar)` pairs, the content of the text rendering.
pub fn flattened(v: &Value) -> Vec<(String, String)> {
    let mut out = Vec::new();
    flatten(v, "", &mut out);
    out
}

pub fn render(v: &Value, format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(v).expect("serializable"),
        Format::Text => flattened(v).into_iter().map(|(k, x)| format!("{k} = {x}")).collect::<Vec<_>>().join("\n"),
    }
}

/// Entry point for the binary: parses, runs, prints; returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    let outcome = run(&cli);
    println!("{}", render(&outcome.report, common(&cli.command).format));
    if let Some(msg) = outcome.report.get("error").and_then(Value::as_str) {
        eprintln!("error: {msg}");
    }
    outcome.exit_code
}

#[cfg(test)]
mod tests {
    use super::*;

    fn go(args: &[&str]) -> Outcome {
        let mut v = vec!["igusa-lab"];
        v.extend_from_slice(args);
        run(&Cli::try_parse_from(v).unwrap())
    }

    #[test]
    fn ranges_and_lists() {
        assert_eq!(parse_primes("5..13").unwrap(), vec![5, 7, 11, 13]);
        assert_eq!(parse_primes("3,7").unwrap(), vec![3, 7]);
        assert_eq!(parse_primes("3,9").unwrap_err(), Error::NotPrime(9));
        assert!(parse_primes("8..10").is_err());
        assert_eq!(parse_range("1..3").unwrap(), vec![1, 2, 3]);
        assert_eq!(TwistSpec::parse("2,3").unwrap().at(3), vec![2]);
        assert_eq!(infer_num_vars("x1^2 + x12"), 12);
        assert_eq!(infer_num_vars("x^2"), 1);
    }

    #[test]
    fn catalog_lines() {
        let c = parse_catalog("# cusp\ncusp | 2 | x1^2 + x2^3\n\nline|1|x1\n").unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c[0], CatalogEntry { name: "cusp".into(), n: 2, poly: "x1^2 + x2^3".into() });
        assert!(parse_catalog("just a poly").is_err());
    }

    #[test]
    fn analyze_cusp() {
        let o = go(&["analyze", "--poly", "x1^2+x2^3", "--n", "2", "--primes", "2..31"]);
        assert_eq!(o.exit_code, 0);
        let r = &o.report;
        assert_eq!(r["sigma"], "5/6");
        assert_eq!(r["kappa"], 1);
        assert_eq!(r["face_count"], 6);
        assert_eq!(r["certified_primes"], json!([5, 7, 11, 13, 17, 19, 23, 29, 31]));
        assert_eq!(r["schema"], SCHEMA);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(go(&["analyze", "--poly", "x1 x2", "--n", "2"]).exit_code, EXIT_INPUT);
        assert_eq!(go(&["homogenize", "--poly", "x1^2+x1*x2+x2^3"]).exit_code, EXIT_INPUT);
        assert_eq!(go(&["sum", "--poly", "x1^2+x2^2+x3^2", "--p", "97", "--m", "3"]).exit_code, EXIT_BUDGET);
        assert_eq!(go(&["sum", "--poly", "x1^2", "--p", "5", "--budget", "4"]).exit_code, EXIT_BUDGET);
    }

    #[test]
    fn text_and_json_agree() {
        let o = go(&["sum", "--kind", "E", "--poly", "x1", "--p", "7"]);
        assert_eq!(o.report["sums"][0]["exact"], "-1/6");
        let text = render(&o.report, Format::Text);
        let back: Vec<(String, String)> =
            text.lines().map(|l| l.split_once(" = ").map(|(a, b)| (a.to_string(), b.to_string())).unwrap()).collect();
        assert_eq!(back, flattened(&o.report));
    }
}
