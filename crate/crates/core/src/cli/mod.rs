//! `ncample` command-line front end.
//!
//! Exit codes: 0 decisive success, 2 undetermined within the search bound,
//! 1 invalid input or a decisive failure of a precondition, 64 usage error.

pub mod payload;
mod report;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use thiserror::Error;

pub use report::{digest, RunReport};

use crate::ampleness::{nc_ample_verdict, sigma_ample_verdict, VerdictKind, DEFAULT_SEARCH_BOUND};
use crate::document::{self, Document};
use crate::gk::{gk_from_verdict, hilbert_value, GkError};
use crate::oracle::{OracleError, OracleRing};
use crate::scheme::{NumericalScheme, SchemeError};
use crate::system::{BimoduleSystem, SystemError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_UNDETERMINED: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Parser)]
#[command(name = "ncample", version, about = "Numerical NC-ampleness verdicts and GK-dimension certificates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Input {
    /// JSON document, or `builtin:<name>` for a built-in scheme.
    #[arg(value_name = "INPUT", required_unless_present = "scheme", conflicts_with = "scheme")]
    input: Option<String>,
    /// Same as INPUT.
    #[arg(long, value_name = "PATH")]
    scheme: Option<String>,
}

impl Input {
    fn source(&self) -> &str {
        self.input.as_deref().or(self.scheme.as_deref()).expect("clap enforces one of them")
    }
}

#[derive(Debug, Args)]
struct Output {
    /// Print a machine-readable run report.
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct Bound {
    /// Search bound for positivity certificates.
    #[arg(long, default_value_t = DEFAULT_SEARCH_BOUND, value_parser = clap::value_parser!(u64).range(1..))]
    bound: u64,
}

#[derive(Debug, Args)]
struct Emit {
    /// Write the constructed document here instead of standard output.
    #[arg(long, value_name = "PATH")]
    emit: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Load and validate a scheme or bimodule system.
    Validate {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        output: Output,
    },
    /// NC-ampleness verdict.
    Verdict {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        bound: Bound,
        #[command(flatten)]
        output: Output,
    },
    /// GK-dimension certificate.
    Gk {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        bound: Bound,
        #[command(flatten)]
        output: Output,
    },
    /// Class and Euler characteristic of one graded piece.
    Class {
        #[command(flatten)]
        input: Input,
        /// Comma-separated exponents, e.g. `2,3`.
        #[arg(long, value_delimiter = ',', required = true, num_args = 1..)]
        at: Vec<u64>,
        #[command(flatten)]
        output: Output,
    },
    /// Dual system (inverse twists).
    Dual {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        emit: Emit,
        #[command(flatten)]
        output: Output,
    },
    /// Multi-Veronese system.
    Veronese {
        #[command(flatten)]
        input: Input,
        /// Comma-separated positive exponents.
        #[arg(long, value_delimiter = ',', required = true, num_args = 1..)]
        n: Vec<u64>,
        #[command(flatten)]
        emit: Emit,
        #[command(flatten)]
        output: Output,
    },
    /// Rees-type system of a single bimodule.
    Rees {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        emit: Emit,
        #[command(flatten)]
        output: Output,
    },
    /// System on the product of two schemes.
    Tensor {
        #[arg(value_name = "FIRST")]
        first: String,
        #[arg(value_name = "SECOND")]
        second: String,
        #[command(flatten)]
        emit: Emit,
        #[command(flatten)]
        output: Output,
    },
    /// Exact section-ring oracle on products of projective lines.
    Oracle {
        #[command(subcommand)]
        action: OracleCommand,
    },
}

#[derive(Debug, Subcommand)]
enum OracleCommand {
    /// Cross-check the numerical engine against the exact ring.
    Compare {
        #[command(flatten)]
        input: Input,
        /// Compare graded pieces for grades in [1, range]^s.
        #[arg(long, default_value_t = 6)]
        range: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Random samples for the associativity and opposite-ring checks.
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Debug, Error)]
enum CliError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: String, source: std::io::Error },
    #[error("unknown built-in {0:?} (available: {avail})", avail = document::BUILTIN_NAMES.join(", "))]
    UnknownBuiltin(String),
    #[error("malformed document: {0}")]
    Parse(String),
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    #[error(transparent)]
    System(#[from] SystemError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("document has no bimodules")]
    NoBimodules,
}

struct Source {
    text: String,
    doc: Document,
}

fn load(spec: &str) -> Result<Source, CliError> {
    if let Some(name) = spec.strip_prefix("builtin:") {
        let doc = document::builtin(name).ok_or_else(|| CliError::UnknownBuiltin(name.to_string()))?;
        return Ok(Source { text: doc.to_json(), doc });
    }
    let text = fs::read_to_string(spec).map_err(|source| CliError::Io { path: spec.to_string(), source })?;
    let doc = Document::parse(&text).map_err(|e| CliError::Parse(e.to_string()))?;
    Ok(Source { text, doc })
}

fn load_system(src: &Source) -> Result<BimoduleSystem, CliError> {
    if src.doc.bimodules.is_empty() {
        // still surface scheme errors first
        NumericalScheme::from_document(&src.doc)?;
        return Err(CliError::NoBimodules);
    }
    Ok(BimoduleSystem::from_document(&src.doc)?)
}

/// What a command produced, before rendering.
struct Outcome {
    exit: i32,
    payload: Value,
    text: String,
    warnings: Vec<String>,
}

impl Outcome {
    fn ok(payload: Value, text: String) -> Self {
        Outcome { exit: EXIT_OK, payload, text, warnings: Vec::new() }
    }
}

fn fmt_tuple<T: std::fmt::Display>(xs: &[T]) -> String {
    let parts: Vec<String> = xs.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(", "))
}

fn header(sys: &BimoduleSystem) -> String {
    let sch = sys.scheme();
    format!("system: {} (dim {}, rho {}, s = {})\n", sch.name(), sch.dim(), sch.rho(), sys.s())
}

fn cmd_validate(src: &Source) -> Result<Outcome, CliError> {
    let scheme = NumericalScheme::from_document(&src.doc)?;
    if src.doc.bimodules.is_empty() {
        let payload = json!({
            "valid": true,
            "scheme": {
                "name": scheme.name(),
                "dim": scheme.dim(),
                "rho": scheme.rho(),
                "euler": scheme.euler().to_string(),
                "interior_point": payload::class(&scheme.interior_point()),
            },
        });
        let text = format!(
            "valid scheme {} (dim {}, rho {}), chi = {}, interior point {}\n",
            scheme.name(),
            scheme.dim(),
            scheme.rho(),
            scheme.euler(),
            scheme.interior_point()
        );
        return Ok(Outcome::ok(payload, text));
    }
    let sys = BimoduleSystem::from_document(&src.doc)?;
    let mut payload = json!({"valid": true, "system": payload::system_summary(&sys)});
    let mut text = header(&sys);
    text.push_str("valid: matrices and classes commute pairwise\n");
    if src.doc.oracle.is_some() {
        let (ring, _) = OracleRing::from_document(&src.doc)?;
        payload["oracle"] = json!({"d": ring.d(), "valid": true});
        text.push_str(&format!("oracle ring on (P1)^{} is consistent with the numerical data\n", ring.d()));
    }
    text.push_str("commutation is checked numerically; sheaf-level commutation and overlap compatibility are assumed\n");
    Ok(Outcome::ok(payload, text))
}

fn cmd_verdict(src: &Source, bound: u64) -> Result<Outcome, CliError> {
    let sys = load_system(src)?;
    let v = nc_ample_verdict(&sys, bound);
    let mut payload = payload::verdict(&v, &sys);
    let mut text = header(&sys);
    match &v.kind {
        VerdictKind::NcAmple { start } => text.push_str(&format!("verdict: NCAmple, m0 = {}\n", fmt_tuple(start))),
        VerdictKind::QuasiUnipotentFail { index } => {
            text.push_str(&format!("verdict: QuasiUnipotentFail (bimodule {index})\n"))
        }
        VerdictKind::EventualAmplenessFail { functional, residue, ray } => text.push_str(&format!(
            "verdict: EventualAmplenessFail (cone row {functional}, residue {}), ray {} + t*{} fails for t >= {}\n",
            fmt_tuple(residue),
            fmt_tuple(&ray.base),
            fmt_tuple(&ray.direction),
            ray.threshold
        )),
        VerdictKind::Undetermined { bound } => {
            text.push_str(&format!("verdict: Undetermined within search bound {bound}\n"))
        }
    }
    if let Some(orders) = v.screen.orders() {
        text.push_str(&format!("orders: r = {}\n", fmt_tuple(&orders)));
    }
    if sys.s() == 1 {
        let sv = sigma_ample_verdict(&sys, bound).expect("s = 1");
        text.push_str(&format!("single-bimodule criterion: {}\n", sv.kind.name()));
        payload["sigma"] = payload::sigma(&sv);
    }
    text.push_str(&format!("search bound {bound}; ampleness is relative to the declared polyhedral cone\n"));
    let exit = if v.kind.is_decisive() { EXIT_OK } else { EXIT_UNDETERMINED };
    let warnings = v.screen.warnings.iter().map(|w| w.to_string()).collect();
    Ok(Outcome { exit, payload, text, warnings })
}

fn cmd_gk(src: &Source, bound: u64) -> Result<Outcome, CliError> {
    let sys = load_system(src)?;
    let v = nc_ample_verdict(&sys, bound);
    let warnings: Vec<String> = v.screen.warnings.iter().map(|w| w.to_string()).collect();
    match gk_from_verdict(&sys, &v) {
        Ok(c) => {
            let mut text = header(&sys);
            text.push_str(&format!("GKdim = {}\n", c.gk));
            text.push_str(&format!("bounds: {} <= GKdim <= {} (ell = {})\n", c.lower, c.upper, c.ell));
            text.push_str(&format!("Veronese exponents: {}\n", fmt_tuple(&c.veronese_used)));
            text.push_str(&format!("Hilbert polynomial: {}\n", c.hilbert));
            text.push_str(&format!("cube sum f(n) = {}\n", c.box_poly));
            if !sys.star_flags().iter().all(|&b| b) {
                text.push_str("note: noetherianity is not asserted for every bimodule\n");
            }
            Ok(Outcome { exit: EXIT_OK, payload: payload::gk(&c, &sys), text, warnings })
        }
        Err(e) => {
            let exit = match e {
                GkError::Undetermined { .. } => EXIT_UNDETERMINED,
                _ => EXIT_INVALID,
            };
            let payload = json!({"error": e.to_string(), "verdict": payload::verdict(&v, &sys)});
            Ok(Outcome { exit, payload, text: format!("{}gk: {e}\n", header(&sys)), warnings })
        }
    }
}

fn cmd_class(src: &Source, at: &[u64]) -> Result<Outcome, CliError> {
    let sys = load_system(src)?;
    if at.len() != sys.s() {
        return Err(SystemError::ExponentLength { expected: sys.s(), found: at.len() }.into());
    }
    let c = sys.class_at(at);
    let chi = hilbert_value(&sys, at);
    let ample = sys.scheme().is_ample(&c);
    let payload = json!({"at": at, "class": payload::class(&c), "chi": payload::int(&chi), "ample": ample});
    let text = format!("class at {} = {}, chi = {}, ample: {}\n", fmt_tuple(at), c, chi, ample);
    Ok(Outcome::ok(payload, text))
}

fn emit(out: BimoduleSystem, target: &Option<PathBuf>) -> Result<Outcome, CliError> {
    let doc = out.to_document();
    let json_text = doc.to_json();
    let doc_value = serde_json::to_value(&doc).expect("documents serialize");
    match target {
        Some(path) => {
            fs::write(path, format!("{json_text}\n"))
                .map_err(|source| CliError::Write { path: path.display().to_string(), source })?;
            let payload = json!({"emitted": path.display().to_string(), "document": doc_value});
            Ok(Outcome::ok(payload, format!("wrote {}\n", path.display())))
        }
        None => Ok(Outcome::ok(json!({"emitted": Value::Null, "document": doc_value}), format!("{json_text}\n"))),
    }
}

fn cmd_oracle_compare(src: &Source, range: u64, seed: u64, samples: usize) -> Result<Outcome, CliError> {
    let (ring, sys) = OracleRing::from_document(&src.doc)?;
    let hilbert = ring.hilbert_match(&sys, range);
    let max_grade = 3;
    let assoc = ring.associativity_check(samples, max_grade, seed);
    let opposite = ring.opposite_check(samples, max_grade, seed.wrapping_add(1));
    let mut bergman = Vec::new();
    for i in 0..ring.s() {
        for j in 0..ring.s() {
            for k in 0..ring.s() {
                let ok = ring.bergman_check(i, j, k)?;
                bergman.push(json!({"triple": [i + 1, j + 1, k + 1], "passed": ok}));
            }
        }
    }
    let bergman_ok = bergman.iter().all(|b| b["passed"] == json!(true));
    let all = hilbert.passed() && assoc.passed() && opposite.passed() && bergman_ok;
    let payload = json!({
        "passed": all,
        "hilbert": payload::hilbert_match(&hilbert),
        "associativity": {"checked": assoc.checked, "failures": assoc.failures, "max_grade": max_grade},
        "opposite": {"checked": opposite.checked, "failures": opposite.failures, "max_grade": max_grade},
        "bergman": bergman,
        "seed": seed,
        "range": range,
    });
    let mut text = header(&sys);
    text.push_str(&format!(
        "dimensions: {} compared, {} skipped, {} mismatches\n",
        hilbert.compared,
        hilbert.skipped,
        hilbert.mismatches.len()
    ));
    text.push_str(&format!("associativity: {}/{} exact\n", assoc.checked - assoc.failures, assoc.checked));
    text.push_str(&format!("opposite ring: {}/{} exact\n", opposite.checked - opposite.failures, opposite.checked));
    text.push_str(&format!("overlap compatibility: {}\n", if bergman_ok { "passed" } else { "FAILED" }));
    text.push_str(if all { "oracle agrees with the numerical engine\n" } else { "oracle DISAGREES with the numerical engine\n" });
    Ok(Outcome { exit: if all { EXIT_OK } else { EXIT_INVALID }, payload, text, warnings: Vec::new() })
}

fn dispatch(cmd: &Command) -> (Vec<Source>, Result<Outcome, CliError>, bool) {
    fn with<F: FnOnce(&Source) -> Result<Outcome, CliError>>(spec: &str, f: F) -> (Vec<Source>, Result<Outcome, CliError>) {
        match load(spec) {
            Ok(src) => {
                let r = f(&src);
                (vec![src], r)
            }
            Err(e) => (vec![], Err(e)),
        }
    }
    let (sources, result) = match cmd {
        Command::Validate { input, .. } => with(input.source(), cmd_validate),
        Command::Verdict { input, bound, .. } => with(input.source(), |s| cmd_verdict(s, bound.bound)),
        Command::Gk { input, bound, .. } => with(input.source(), |s| cmd_gk(s, bound.bound)),
        Command::Class { input, at, .. } => with(input.source(), |s| cmd_class(s, at)),
        Command::Dual { input, emit: e, .. } => with(input.source(), |s| emit(load_system(s)?.dual(), &e.emit)),
        Command::Veronese { input, n, emit: e, .. } => {
            with(input.source(), |s| emit(load_system(s)?.veronese(n)?, &e.emit))
        }
        Command::Rees { input, emit: e, .. } => with(input.source(), |s| emit(load_system(s)?.rees()?, &e.emit)),
        Command::Tensor { first, second, emit: e, .. } => match (load(first), load(second)) {
            (Ok(a), Ok(b)) => {
                let r = (|| {
                    let x = load_system(&a)?;
                    let y = load_system(&b)?;
                    emit(BimoduleSystem::product(&x, &y), &e.emit)
                })();
                (vec![a, b], r)
            }
            (Err(e), _) | (_, Err(e)) => (vec![], Err(e)),
        },
        Command::Oracle { action: OracleCommand::Compare { input, range, seed, samples, .. } } => {
            with(input.source(), |s| cmd_oracle_compare(s, *range, *seed, *samples))
        }
    };
    let json = match cmd {
        Command::Validate { output, .. }
        | Command::Verdict { output, .. }
        | Command::Gk { output, .. }
        | Command::Class { output, .. }
        | Command::Dual { output, .. }
        | Command::Veronese { output, .. }
        | Command::Rees { output, .. }
        | Command::Tensor { output, .. }
        | Command::Oracle { action: OracleCommand::Compare { output, .. } } => output.json,
    };
    (sources, result, json)
}

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{rendered}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{rendered}");
                    EXIT_USAGE
                }
            };
        }
    };
    let start = Instant::now();
    let (sources, result, json_mode) = dispatch(&cli.command);
    let texts: Vec<&str> = sources.iter().map(|s| s.text.as_str()).collect();
    let command: Vec<String> = args.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    let outcome = match result {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            Outcome { exit: EXIT_INVALID, payload: json!({"error": e.to_string()}), text: String::new(), warnings: vec![] }
        }
    };
    if json_mode {
        let report = RunReport {
            command,
            input_digest: digest(&texts),
            payload: outcome.payload,
            warnings: outcome.warnings,
            timing_ms: start.elapsed().as_secs_f64() * 1000.0,
        };
        let _ = writeln!(out, "{}", report.to_json());
    } else {
        let _ = write!(out, "{}", outcome.text);
        for w in &outcome.warnings {
            let _ = writeln!(err, "warning: {w}");
        }
    }
    outcome.exit
}
