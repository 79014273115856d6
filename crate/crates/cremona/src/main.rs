//! Command-line front end: parse polynomials, maps and words, dispatch to
//! the verification suites and oracles, and emit deterministic JSON-line
//! reports.
//!
//! Exit codes: 0 when every requested check passes, 1 when any check
//! fails, 2 on usage or parse errors. Reports go to stdout, diagnostics to
//! stderr; identical inputs and seeds produce byte-identical reports
//! (timing is opt-in through `--timings` for exactly that reason).

use clap::{Args, Parser, Subcommand};
use cremona::constructions::{verify_identity, verify_suite, Identity, VerifyOpts};
use cremona::freeness::{certify_free_product, certify_free_subgroup};
use cremona::pan::{
    birationality_criterion, blowdown_build, build_psi, build_psi_tilde, contraction_check,
    generic_fiber_size, OracleOpts, PanSpec,
};
use cremona::poly::{parse_fraction, parse_poly};
use cremona::ratmap::{standard_involution, RatMap};
use cremona::words::{evaluate, Alphabet, GroupWord};
use cremona::{FieldDescriptor, HomPoly};
use serde_json::json;
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "cremona", version, about = "exact engine for birational self-maps of P^n")]
struct Cli {
    /// seed for every randomized choice (identical seeds give identical reports)
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// coefficient field: Q, GF(p) or CYC(p)
    #[arg(long, global = true, default_value = "Q")]
    field: String,
    /// suppress report lines (exit code still reflects the outcome)
    #[arg(long, global = true)]
    quiet: bool,
    /// include wall-clock timings in report lines (breaks byte determinism)
    #[arg(long, global = true)]
    timings: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the named-identity verification suite
    Verify {
        /// ambient dimensions, e.g. --n 2,3
        #[arg(long, value_delimiter = ',', default_value = "2,3")]
        n: Vec<usize>,
        /// run every identity in the registry
        #[arg(long)]
        all: bool,
        /// run a single identity by name
        #[arg(long, conflicts_with = "all")]
        check: Option<String>,
        /// primes for the root-of-unity checks
        #[arg(long, value_delimiter = ',', default_value = "3,5")]
        prime: Vec<u32>,
        /// sample count for the randomized relations
        #[arg(long, default_value_t = 20)]
        samples: usize,
    },
    /// Compose maps (later maps are applied first)
    Compose {
        /// map in `[p0; p1; ...]` syntax; repeatable
        #[arg(long = "map", required = true)]
        maps: Vec<String>,
        /// read components as affine-chart fractions num/den
        #[arg(long)]
        chart: bool,
    },
    /// Degree of a map after canonical normalization
    Degree {
        #[arg(long)]
        map: String,
        #[arg(long)]
        chart: bool,
    },
    /// Evaluate a word over a generator alphabet
    Word {
        /// whitespace-separated letters with optional ^-1, e.g. "a1 s a2"
        #[arg(long)]
        word: String,
        /// alphabet file: lines `name = [p0; p1; ...]` (and `name^-1 = ...`)
        #[arg(long)]
        alphabet: Option<PathBuf>,
        /// ambient dimension when no alphabet file fixes it
        #[arg(long)]
        n: Option<usize>,
        /// compare the value against this map; mismatch exits 1
        #[arg(long)]
        equals: Option<String>,
    },
    /// Psi construction machinery
    Pan {
        #[command(subcommand)]
        sub: PanCmd,
    },
    /// Free-product and free-subgroup certificates
    Freeness {
        #[arg(long = "max-len")]
        max_len: usize,
        /// index bound k: generators g_0..g_k
        #[arg(long = "gens", default_value_t = 0)]
        gens: usize,
        /// certify words in h_i = g_i sigma instead
        #[arg(long)]
        subgroup: bool,
    },
    /// Generic fiber size of a map over GF(p)
    Fiber {
        #[arg(long)]
        map: String,
        #[arg(long, value_delimiter = ',', default_value = "7")]
        prime: Vec<u32>,
        #[arg(long, default_value_t = 7)]
        trials: u32,
    },
}

#[derive(Subcommand)]
enum PanCmd {
    /// Assemble Psi and its shadow map from (P, Q, R_0..R_{n-1})
    Build(PanSpecArgs),
    /// Decide birationality with a certificate trail
    Check {
        #[command(flatten)]
        spec: PanSpecArgs,
        #[arg(long, value_delimiter = ',', default_value = "7,11,13")]
        prime: Vec<u32>,
        #[arg(long, default_value_t = 7)]
        trials: u32,
    },
    /// Build a map blowing the hypersurface q' = 0 down to (0:...:0:1)
    Blowdown {
        /// hypersurface equation in z0..zn
        #[arg(long)]
        q: String,
        /// target degree (defaults to deg q' + 1)
        #[arg(long)]
        d: Option<usize>,
        /// ambient dimension (defaults to the largest variable index in q)
        #[arg(long)]
        n: Option<usize>,
        /// verify the contraction over these primes
        #[arg(long = "check-prime")]
        check_prime: Vec<u32>,
    },
    /// Generic fiber size of a map over GF(p)
    Fiber {
        #[arg(long)]
        map: String,
        #[arg(long, value_delimiter = ',', default_value = "7")]
        prime: Vec<u32>,
        #[arg(long, default_value_t = 7)]
        trials: u32,
    },
}

#[derive(Args)]
struct PanSpecArgs {
    /// the last component P (degree d, z_n-degree <= 1)
    #[arg(long)]
    p: String,
    /// the common factor Q (degree ell, z_n-degree <= 1)
    #[arg(long)]
    q: String,
    /// the R_i in z0..z_{n-1}; n copies
    #[arg(long = "r", required = true)]
    r: Vec<String>,
}

/// Anything that should reach the user as a one-line usage hint + exit 2.
struct UsageError(String);

impl<E: std::fmt::Display> From<E> for UsageError {
    fn from(e: E) -> Self {
        UsageError(e.to_string())
    }
}

struct Emitter {
    quiet: bool,
}

impl Emitter {
    fn line(&self, value: &serde_json::Value) {
        if !self.quiet {
            println!("{value}");
        }
    }
}

fn parse_map(text: &str, field: FieldDescriptor, chart: bool) -> Result<RatMap, UsageError> {
    let inner = text.trim();
    let inner = inner
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .unwrap_or(inner);
    let parts: Vec<&str> = inner.split(';').map(str::trim).collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(UsageError("empty map component".into()));
    }
    if chart {
        let n = parts.len();
        let comps = parts
            .iter()
            .map(|t| parse_fraction(t, n, field))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(RatMap::from_affine_chart(&comps)?)
    } else {
        let nvars = parts.len();
        let comps = parts
            .iter()
            .map(|t| parse_poly(t, nvars, field))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(RatMap::new_normalized(comps)?)
    }
}

/// Largest `z<index>` mentioned in a polynomial text.
fn max_var_index(text: &str) -> Option<usize> {
    let bytes = text.as_bytes();
    let mut best = None;
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'z' {
            let mut j = i + 1;
            while j < bytes.len() && bytes[j].is_ascii_digit() {
                j += 1;
            }
            if j > i + 1 {
                if let Ok(idx) = text[i + 1..j].parse::<usize>() {
                    best = Some(best.map_or(idx, |b: usize| b.max(idx)));
                }
            }
            i = j;
        } else {
            i += 1;
        }
    }
    best
}

fn load_alphabet(
    path: &PathBuf,
    field: FieldDescriptor,
    fixed_n: Option<usize>,
) -> Result<Alphabet, UsageError> {
    let text = std::fs::read_to_string(path)?;
    let mut entries: Vec<(String, RatMap)> = Vec::new();
    let mut inverses: Vec<(String, RatMap)> = Vec::new();
    let mut n = fixed_n;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (name, rhs) = line
            .split_once('=')
            .ok_or_else(|| UsageError(format!("line {}: expected `name = [...]`", lineno + 1)))?;
        let name = name.trim();
        let map = parse_map(rhs.trim(), field, false)?;
        if let Some(expected) = n {
            if map.n() != expected {
                return Err(UsageError(format!(
                    "line {}: map lives on P^{} but the alphabet is on P^{}",
                    lineno + 1,
                    map.n(),
                    expected
                )));
            }
        } else {
            n = Some(map.n());
        }
        match name.strip_suffix("^-1") {
            Some(base) => inverses.push((base.trim().to_string(), map)),
            None => entries.push((name.to_string(), map)),
        }
    }
    let n = n.ok_or_else(|| UsageError("alphabet file defines no generators".into()))?;
    let mut alphabet = Alphabet::new(n, field);
    for (name, map) in entries {
        match inverses.iter().find(|(base, _)| *base == name) {
            Some((_, inv)) => alphabet.register_with_inverse(&name, map, inv.clone())?,
            None => alphabet.register(&name, map)?,
        }
    }
    for (base, _) in &inverses {
        alphabet.get(base)?;
    }
    Ok(alphabet)
}

fn parse_pan_spec(args: &PanSpecArgs, field: FieldDescriptor) -> Result<PanSpec, UsageError> {
    let n = args.r.len();
    if n < 2 {
        return Err(UsageError("need at least two --r components".into()));
    }
    let nvars = n + 1;
    let p = parse_poly(&args.p, nvars, field)?;
    let q = parse_poly(&args.q, nvars, field)?;
    let r = args
        .r
        .iter()
        .map(|t| parse_poly(t, nvars, field))
        .collect::<Result<Vec<_>, _>>()?;
    let d = p
        .degree()
        .ok_or_else(|| UsageError("P must be nonzero".into()))?;
    let ell = q
        .degree()
        .ok_or_else(|| UsageError("Q must be nonzero".into()))?;
    Ok(PanSpec::new(n, d, ell, p, q, r)?)
}

fn main() {
    let cli = Cli::parse();
    std::process::exit(run(cli));
}

fn run(cli: Cli) -> i32 {
    let field = match FieldDescriptor::parse_selector(&cli.field) {
        Ok(f) => f,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let emit = Emitter { quiet: cli.quiet };
    match dispatch(&cli, field, &emit) {
        Ok(all_passed) => {
            if all_passed {
                0
            } else {
                1
            }
        }
        Err(UsageError(msg)) => {
            eprintln!("error: {msg}");
            2
        }
    }
}

fn dispatch(cli: &Cli, field: FieldDescriptor, emit: &Emitter) -> Result<bool, UsageError> {
    match &cli.cmd {
        Cmd::Verify { n, all, check, prime, samples } => {
            let opts = VerifyOpts { seed: cli.seed, samples: *samples, prime: None };
            let outcomes = match (all, check) {
                (_, Some(name)) => {
                    let id = Identity::parse(name)?;
                    let mut list = Vec::new();
                    for &dim in n {
                        if id.needs_prime() {
                            for &p in prime {
                                let mut o = opts.clone();
                                o.prime = Some(p);
                                list.push(verify_identity(id, dim, &o)?);
                            }
                        } else {
                            list.push(verify_identity(id, dim, &opts)?);
                        }
                    }
                    list
                }
                _ => verify_suite(n, &opts, prime),
            };
            let mut pass = true;
            for mut outcome in outcomes {
                if !cli.timings {
                    outcome.millis = None;
                }
                pass &= outcome.pass;
                emit.line(&serde_json::to_value(&outcome).expect("serializable"));
            }
            Ok(pass)
        }
        Cmd::Compose { maps, chart } => {
            let parsed = maps
                .iter()
                .map(|t| parse_map(t, field, *chart))
                .collect::<Result<Vec<_>, _>>()?;
            let mut acc = parsed[0].clone();
            for m in &parsed[1..] {
                acc = acc.compose(m)?;
            }
            emit.line(&json!({
                "map": acc.format(),
                "degree": acc.degree(),
                "n": acc.n(),
                "identity": acc.is_identity(),
            }));
            Ok(true)
        }
        Cmd::Degree { map, chart } => {
            let m = parse_map(map, field, *chart)?;
            emit.line(&json!({"degree": m.degree(), "n": m.n(), "map": m.format()}));
            Ok(true)
        }
        Cmd::Word { word, alphabet, n, equals } => {
            let parsed = GroupWord::parse(word)?;
            let alphabet = match alphabet {
                Some(path) => {
                    let mut a = load_alphabet(path, field, *n)?;
                    if a.get("s").is_err() {
                        a.register("s", standard_involution(a.n(), field))?;
                    }
                    a
                }
                None => {
                    let dim = n.ok_or_else(|| {
                        UsageError("--n is required when no --alphabet file is given".into())
                    })?;
                    let mut a = Alphabet::new(dim, field);
                    a.register("s", standard_involution(dim, field))?;
                    a
                }
            };
            let value = evaluate(&parsed, &alphabet)?;
            let mut pass = true;
            let mut record = json!({
                "word": parsed.format(),
                "map": value.format(),
                "degree": value.degree(),
                "n": value.n(),
            });
            if let Some(expected_text) = equals {
                let expected = parse_map(expected_text, field, false)?;
                pass = value.equals(&expected);
                record["equals"] = json!(pass);
            }
            emit.line(&record);
            Ok(pass)
        }
        Cmd::Pan { sub } => run_pan(sub, cli, field, emit),
        Cmd::Freeness { max_len, gens, subgroup } => {
            let report = if *subgroup {
                certify_free_subgroup(*max_len, *gens)
            } else {
                certify_free_product(*max_len, *gens)
            };
            for cert in &report.words {
                emit.line(&serde_json::to_value(cert).expect("serializable"));
            }
            emit.line(&json!({
                "mode": report.mode,
                "gens": report.gens,
                "max_len": report.max_len,
                "words_checked": report.words_checked,
                "complete": report.complete,
                "pass": report.pass,
                "failures": report.failures,
            }));
            Ok(report.pass)
        }
        Cmd::Fiber { map, prime, trials } => fiber_command(map, prime, *trials, cli, field, emit),
    }
}

fn run_pan(
    cmd: &PanCmd,
    cli: &Cli,
    field: FieldDescriptor,
    emit: &Emitter,
) -> Result<bool, UsageError> {
    match cmd {
        PanCmd::Build(args) => {
            let spec = parse_pan_spec(args, field)?;
            let psi = build_psi(&spec)?;
            let tilde = build_psi_tilde(&spec)?;
            emit.line(&json!({
                "n": spec.n(),
                "d": spec.d(),
                "ell": spec.ell(),
                "psi": psi.format(),
                "psi_degree": psi.degree(),
                "psi_tilde": tilde.format(),
                "psi_tilde_degree": tilde.degree(),
            }));
            Ok(true)
        }
        PanCmd::Check { spec, prime, trials } => {
            let spec = parse_pan_spec(spec, field)?;
            let opts = OracleOpts { primes: prime.clone(), trials: *trials, seed: cli.seed };
            let verdict = birationality_criterion(&spec, &opts)?;
            emit.line(&serde_json::to_value(&verdict).expect("serializable"));
            Ok(true)
        }
        PanCmd::Blowdown { q, d, n, check_prime } => {
            let n = match n.or_else(|| max_var_index(q)) {
                Some(n) => n,
                None => return Err(UsageError("cannot infer n from --q; pass --n".into())),
            };
            let q_poly: HomPoly = parse_poly(q, n + 1, field)?;
            let ell = q_poly
                .degree()
                .ok_or_else(|| UsageError("q' must be nonzero".into()))?;
            let d = d.unwrap_or(ell + 1);
            let (bspec, psi) = blowdown_build(&q_poly, d, cli.seed)?;
            let mut checks = Vec::new();
            let mut pass = true;
            for &p in check_prime {
                let report = contraction_check(&psi, &q_poly, p)?;
                pass &= report.pass;
                checks.push(serde_json::to_value(&report).expect("serializable"));
            }
            emit.line(&json!({
                "n": bspec.n,
                "d": bspec.d,
                "ell": ell,
                "q": bspec.q_prime.format(),
                "h": bspec.h.format(),
                "p_component": bspec.p.format(),
                "psi": psi.format(),
                "psi_degree": psi.degree(),
                "seed": bspec.seed,
                "contraction_checks": checks,
            }));
            Ok(pass)
        }
        PanCmd::Fiber { map, prime, trials } => {
            fiber_command(map, prime, *trials, cli, field, emit)
        }
    }
}

fn fiber_command(
    map: &str,
    primes: &[u32],
    trials: u32,
    cli: &Cli,
    field: FieldDescriptor,
    emit: &Emitter,
) -> Result<bool, UsageError> {
    let m = parse_map(map, field, false)?;
    for &p in primes {
        let report = generic_fiber_size(&m, p, trials, cli.seed)?;
        emit.line(&serde_json::to_value(&report).expect("serializable"));
    }
    Ok(true)
}
