//! Command-line front end for `symcanon`.
//!
//! [`run`] executes one parsed invocation and returns the exit code together
//! with the text destined for standard output and standard error, so the
//! binary stays a thin shell and tests can drive every path in-process.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};
use thiserror::Error;

use symcanon::blocks::{make_block, BlockKind, BlockSpec};
use symcanon::canonical::{
    canonicalize_hamiltonian, canonicalize_pair, congruent_pairs, symplectically_similar,
    williamson, Canonicalize,
};
use symcanon::io::{self, decomposition_to_json, float_json, matrix_to_json, JsonScalar};
use symcanon::verify::{verify_suite_with, Constructors, VerifyReport};
use symcanon::{set_tolerance, ErrorKind, Gaussian, Matrix, Polynomial, Rational, C64};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub mod exit {
    pub const OK: i32 = 0;
    pub const MALFORMED: i32 = 1;
    pub const PRECONDITION: i32 = 2;
    pub const INDETERMINATE: i32 = 3;
    pub const VERIFY_FAILED: i32 = 4;
}

#[derive(Debug, Parser)]
#[command(
    name = "symcanon",
    version,
    about = "Canonical forms of symmetric/skew-symmetric pairs and Hamiltonian matrices"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub global: GlobalArgs,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// Scalar field; defaults to the `field` member of each input, then rational.
    #[arg(long, global = true, value_enum)]
    pub field: Option<Field>,
    /// Comparison tolerance of the floating backends.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Process every `*.json` file of this directory independently.
    #[arg(long, global = true)]
    pub batch: Option<PathBuf>,
    /// Include the transform `S` in decompositions when one was computed.
    #[arg(long, global = true)]
    pub certificate: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Field {
    Rational,
    Gaussian,
    Real,
    Complex,
}

impl Field {
    fn name(self) -> &'static str {
        match self {
            Field::Rational => "rational",
            Field::Gaussian => "gaussian",
            Field::Real => "real",
            Field::Complex => "complex",
        }
    }

    fn parse(name: &str) -> Option<Field> {
        Field::from_str(name, false).ok()
    }

    fn is_exact(self) -> bool {
        matches!(self, Field::Rational | Field::Gaussian)
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Emit a named block as matrix JSON.
    Gen(GenArgs),
    /// Canonical form of a pair `{"a", "b"}` or of a symmetric matrix paired with Omega.
    Canon { input: Option<PathBuf> },
    /// Canonical form of a Hamiltonian matrix under symplectic similarity.
    HamCanon { input: Option<PathBuf> },
    /// Williamson normal form of a real positive definite matrix.
    Williamson { input: Option<PathBuf> },
    /// Decide congruence of two pairs.
    CheckCongruent { first: PathBuf, second: PathBuf },
    /// Decide symplectic similarity of two Hamiltonian matrices.
    CheckSymplSimilar { first: PathBuf, second: PathBuf },
    /// Run the structural identity battery in exact arithmetic.
    VerifySuite {
        #[arg(long, default_value_t = 3)]
        bound: usize,
    },
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, value_parser = parse_block_kind)]
    pub block: BlockKind,
    #[arg(long)]
    pub n: usize,
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub c: Option<String>,
    /// Coefficients of the monic polynomial of an `F` block, constant term first, as a JSON array.
    #[arg(long)]
    pub poly: Option<String>,
    #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
    pub sign: i8,
}

fn parse_block_kind(code: &str) -> Result<BlockKind, String> {
    BlockKind::from_code(code)
        .ok_or_else(|| format!("unknown block {code:?}; expected J, JR, F, Omega, P, Pp, Q or Qp"))
}

/// Failure of one command, carrying its exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Library(#[from] symcanon::Error),
    #[error("identity check failed: {}", .0.join("; "))]
    VerifyFailed(Vec<String>),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Read { .. } | CliError::Write { .. } => exit::MALFORMED,
            CliError::Library(e) => match e.kind() {
                ErrorKind::Malformed => exit::MALFORMED,
                ErrorKind::Precondition => exit::PRECONDITION,
                ErrorKind::Indeterminate => exit::INDETERMINATE,
            },
            CliError::VerifyFailed(_) => exit::VERIFY_FAILED,
        }
    }

    fn kind(&self) -> &'static str {
        match self.code() {
            exit::MALFORMED => "malformed",
            exit::PRECONDITION => "precondition",
            exit::INDETERMINATE => "indeterminate",
            _ => "verification",
        }
    }

    fn to_json(&self) -> Value {
        let mut obj = Map::new();
        obj.insert("code".into(), Value::from(self.code()));
        obj.insert("kind".into(), Value::from(self.kind()));
        obj.insert("message".into(), Value::from(self.to_string()));
        Value::Object(obj)
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Exit code plus the text for both output streams.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn failure(err: &CliError) -> Self {
        Outcome {
            code: err.code(),
            stdout: String::new(),
            stderr: format!("error: {err}\n"),
        }
    }
}

/// An input file read once: its text, parsed JSON and digest.
struct Input {
    path: String,
    sha256: String,
    json: Value,
}

impl Input {
    fn load(path: &Path) -> CliResult<Input> {
        let bytes = fs::read(path).map_err(|source| CliError::Read {
            path: path.display().to_string(),
            source,
        })?;
        let text = String::from_utf8(bytes.clone()).map_err(|_| {
            CliError::Library(symcanon::Error::Parse(format!(
                "{} is not UTF-8",
                path.display()
            )))
        })?;
        Ok(Input {
            path: path.display().to_string(),
            sha256: sha256_hex(&bytes),
            json: io::parse(&text)?,
        })
    }

    fn descriptor(&self) -> Value {
        let mut obj = Map::new();
        obj.insert("path".into(), Value::from(self.path.clone()));
        obj.insert("sha256".into(), Value::from(self.sha256.clone()));
        Value::Object(obj)
    }

    /// The field named in the file: on the matrix itself or on `a` of a pair.
    fn declared_field(&self) -> Option<&str> {
        let j = &self.json;
        j.get("field")
            .or_else(|| j.get("a").and_then(|a| a.get("field")))
            .and_then(Value::as_str)
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

fn resolve_field(flag: Option<Field>, inputs: &[&Input]) -> CliResult<Field> {
    if let Some(f) = flag {
        return Ok(f);
    }
    let mut found: Option<Field> = None;
    for input in inputs {
        let Some(name) = input.declared_field() else {
            continue;
        };
        let f = Field::parse(name).ok_or_else(|| {
            CliError::Library(symcanon::Error::Parse(format!(
                "unknown field {name:?} in {}",
                input.path
            )))
        })?;
        match found {
            Some(prev) if prev != f => {
                return Err(CliError::Library(symcanon::Error::BackendMismatch(
                    prev.name(),
                    f.name(),
                )));
            }
            _ => found = Some(f),
        }
    }
    Ok(found.unwrap_or(Field::Rational))
}

/// Applies `--tol` for floating fields; exact fields reject it.
fn apply_tolerance(tol: Option<f64>, field: Field) -> CliResult<()> {
    match tol {
        None => Ok(()),
        Some(_) if field.is_exact() => Err(CliError::Usage(format!(
            "--tol applies only to floating fields, not {}",
            field.name()
        ))),
        Some(t) => set_tolerance(t).map_err(|e| CliError::Usage(e.to_string())),
    }
}

fn report(command: &str, field: Option<Field>, inputs: &[&Input], result: Value) -> Value {
    let mut obj = Map::new();
    obj.insert("command".into(), Value::from(command));
    obj.insert("version".into(), Value::from(VERSION));
    if let Some(f) = field {
        obj.insert("field".into(), Value::from(f.name()));
    }
    obj.insert(
        "inputs".into(),
        Value::Array(inputs.iter().map(|i| i.descriptor()).collect()),
    );
    obj.insert("result".into(), result);
    Value::Object(obj)
}

/// Runs a whole invocation, catching panics so that none reaches the user.
pub fn run(cli: Cli) -> Outcome {
    match std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| run_inner(&cli))) {
        Ok(outcome) => outcome,
        Err(payload) => {
            let text = payload
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| payload.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "unknown failure".into());
            Outcome {
                code: exit::INDETERMINATE,
                stdout: String::new(),
                stderr: format!("error: internal failure: {text}\n"),
            }
        }
    }
}

/// Parses `args` (program name first) and runs them. Usage errors exit 1;
/// `--help` and `--version` exit 0.
pub fn run_args<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(cli),
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                Outcome {
                    code: exit::MALFORMED,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Outcome {
                    code: exit::OK,
                    stdout: text,
                    stderr: String::new(),
                }
            }
        }
    }
}

fn run_inner(cli: &Cli) -> Outcome {
    let g = &cli.global;
    let produced = match (&cli.command, &g.batch) {
        (Command::Canon { input }, batch) => single_or_batch("canon", input, batch, g, canon),
        (Command::HamCanon { input }, batch) => {
            single_or_batch("ham-canon", input, batch, g, ham_canon)
        }
        (Command::Williamson { input }, batch) => {
            single_or_batch("williamson", input, batch, g, williamson_report)
        }
        (_, Some(_)) => Err(CliError::Usage(
            "--batch applies to canon, ham-canon and williamson".into(),
        )),
        (Command::Gen(args), None) => gen(args, g).map(|v| (exit::OK, v)),
        (Command::CheckCongruent { first, second }, None) => {
            check_two("check-congruent", first, second, g)
        }
        (Command::CheckSymplSimilar { first, second }, None) => {
            check_two("check-sympl-similar", first, second, g)
        }
        (Command::VerifySuite { bound }, None) => verify_report(*bound, &Constructors::default()),
    };
    match produced {
        Ok((code, value)) => deliver(code, &value, g.out.as_deref()),
        Err(e) => Outcome::failure(&e),
    }
}

/// Writes the report to `--out` or returns it as standard output.
fn deliver(code: i32, value: &Value, out: Option<&Path>) -> Outcome {
    let text = io::to_pretty(value);
    let mut stderr = String::new();
    if code == exit::VERIFY_FAILED {
        let names: Vec<String> = value["result"]["failing_identities"]
            .as_array()
            .map(|a| {
                a.iter()
                    .filter_map(Value::as_str)
                    .map(String::from)
                    .collect()
            })
            .unwrap_or_default();
        stderr = format!("error: {}\n", CliError::VerifyFailed(names));
    }
    match out {
        None => Outcome {
            code,
            stdout: text,
            stderr,
        },
        Some(path) => match fs::write(path, &text) {
            Ok(()) => Outcome {
                code,
                stdout: String::new(),
                stderr,
            },
            Err(source) => Outcome::failure(&CliError::Write {
                path: path.display().to_string(),
                source,
            }),
        },
    }
}

type SingleCommand = fn(&Input, &GlobalArgs) -> CliResult<(Field, Value)>;

fn single_or_batch(
    name: &str,
    input: &Option<PathBuf>,
    batch: &Option<PathBuf>,
    g: &GlobalArgs,
    f: SingleCommand,
) -> CliResult<(i32, Value)> {
    match (input, batch) {
        (Some(path), None) => {
            let input = Input::load(path)?;
            let (field, result) = f(&input, g)?;
            Ok((exit::OK, report(name, Some(field), &[&input], result)))
        }
        (None, Some(dir)) => run_batch(name, dir, g, f),
        (Some(_), Some(_)) => Err(CliError::Usage(
            "give either an input file or --batch, not both".into(),
        )),
        (None, None) => Err(CliError::Usage(format!(
            "{name} needs an input file or --batch DIR"
        ))),
    }
}

fn run_batch(name: &str, dir: &Path, g: &GlobalArgs, f: SingleCommand) -> CliResult<(i32, Value)> {
    let entries = fs::read_dir(dir).map_err(|source| CliError::Read {
        path: dir.display().to_string(),
        source,
    })?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    let results: Vec<(i32, Value)> = paths
        .par_iter()
        .map(|path| {
            let mut obj = Map::new();
            obj.insert("path".into(), Value::from(path.display().to_string()));
            let outcome = Input::load(path).and_then(|input| {
                obj.insert("sha256".into(), Value::from(input.sha256.clone()));
                f(&input, g)
            });
            let code = match outcome {
                Ok((field, result)) => {
                    obj.insert("field".into(), Value::from(field.name()));
                    obj.insert("result".into(), result);
                    exit::OK
                }
                Err(e) => {
                    obj.insert("error".into(), e.to_json());
                    e.code()
                }
            };
            obj.insert("exit_code".into(), Value::from(code));
            (code, Value::Object(obj))
        })
        .collect();
    let code = results.iter().map(|r| r.0).max().unwrap_or(exit::OK);
    let failed = results.iter().filter(|r| r.0 != exit::OK).count();
    let mut result = Map::new();
    result.insert("directory".into(), Value::from(dir.display().to_string()));
    result.insert("failed".into(), Value::from(failed));
    result.insert(
        "files".into(),
        Value::Array(results.into_iter().map(|r| r.1).collect()),
    );
    Ok((code, report(name, g.field, &[], Value::Object(result))))
}

fn decomposition_value<T: Canonicalize + JsonScalar>(
    d: &symcanon::canonical::CanonicalDecomposition<T>,
    g: &GlobalArgs,
) -> Value {
    decomposition_to_json(d, g.certificate)
}

fn canon(input: &Input, g: &GlobalArgs) -> CliResult<(Field, Value)> {
    fn go<T: Canonicalize + JsonScalar>(input: &Input, g: &GlobalArgs) -> CliResult<Value> {
        let pair = io::pair_from_json::<T>(&input.json)?;
        Ok(decomposition_value(&canonicalize_pair(&pair)?, g))
    }
    let field = resolve_field(g.field, &[input])?;
    apply_tolerance(g.tol, field)?;
    let value = match field {
        Field::Rational => go::<Rational>(input, g)?,
        Field::Gaussian => go::<Gaussian>(input, g)?,
        Field::Real => go::<f64>(input, g)?,
        Field::Complex => go::<C64>(input, g)?,
    };
    Ok((field, value))
}

fn ham_canon(input: &Input, g: &GlobalArgs) -> CliResult<(Field, Value)> {
    fn go<T: Canonicalize + JsonScalar>(input: &Input, g: &GlobalArgs) -> CliResult<Value> {
        let h = io::matrix_from_json::<T>(&input.json)?;
        Ok(decomposition_value(&canonicalize_hamiltonian(&h)?, g))
    }
    let field = resolve_field(g.field, &[input])?;
    apply_tolerance(g.tol, field)?;
    let value = match field {
        Field::Rational => go::<Rational>(input, g)?,
        Field::Gaussian => go::<Gaussian>(input, g)?,
        Field::Real => go::<f64>(input, g)?,
        Field::Complex => go::<C64>(input, g)?,
    };
    Ok((field, value))
}

/// Williamson runs in `f64`; rational input is converted, complex input is
/// rejected as a precondition violation.
fn williamson_report(input: &Input, g: &GlobalArgs) -> CliResult<(Field, Value)> {
    let field = resolve_field(g.field, &[input])?;
    if matches!(field, Field::Gaussian | Field::Complex) {
        return Err(
            symcanon::Error::InvalidArgument("williamson needs a real matrix".into()).into(),
        );
    }
    apply_tolerance(g.tol, Field::Real)?;
    let a = io::matrix_from_json::<f64>(&input.json)?;
    let w = williamson(&a)?;
    let mut obj = Map::new();
    obj.insert(
        "symplectic_eigenvalues".into(),
        Value::Array(w.alphas.iter().map(|x| float_json(*x)).collect()),
    );
    obj.insert("d".into(), matrix_to_json(&w.d()));
    obj.insert("s".into(), matrix_to_json(&w.s));
    obj.insert("residual_form".into(), float_json(w.residual_form));
    obj.insert(
        "residual_symplectic".into(),
        float_json(w.residual_symplectic),
    );
    Ok((Field::Real, Value::Object(obj)))
}

fn check_two(name: &str, first: &Path, second: &Path, g: &GlobalArgs) -> CliResult<(i32, Value)> {
    fn congruent<T: Canonicalize + JsonScalar>(x: &Input, y: &Input) -> CliResult<bool> {
        Ok(congruent_pairs(
            &io::pair_from_json::<T>(&x.json)?,
            &io::pair_from_json::<T>(&y.json)?,
        )?)
    }
    fn similar<T: Canonicalize + JsonScalar>(x: &Input, y: &Input) -> CliResult<bool> {
        let h1 = io::matrix_from_json::<T>(&x.json)?;
        let h2 = io::matrix_from_json::<T>(&y.json)?;
        Ok(symplectically_similar(&h1, &h2)?)
    }
    let x = Input::load(first)?;
    let y = Input::load(second)?;
    let field = resolve_field(g.field, &[&x, &y])?;
    apply_tolerance(g.tol, field)?;
    let is_pair = name == "check-congruent";
    let answer = match (field, is_pair) {
        (Field::Rational, true) => congruent::<Rational>(&x, &y)?,
        (Field::Gaussian, true) => congruent::<Gaussian>(&x, &y)?,
        (Field::Real, true) => congruent::<f64>(&x, &y)?,
        (Field::Complex, true) => congruent::<C64>(&x, &y)?,
        (Field::Rational, false) => similar::<Rational>(&x, &y)?,
        (Field::Gaussian, false) => similar::<Gaussian>(&x, &y)?,
        (Field::Real, false) => similar::<f64>(&x, &y)?,
        (Field::Complex, false) => similar::<C64>(&x, &y)?,
    };
    let key = if is_pair {
        "congruent"
    } else {
        "symplectically_similar"
    };
    let mut obj = Map::new();
    obj.insert(key.into(), Value::Bool(answer));
    Ok((
        exit::OK,
        report(name, Some(field), &[&x, &y], Value::Object(obj)),
    ))
}

/// Parses a scalar given on the command line: JSON text such as `2`, `0.5`
/// or `[1, 2]`, or a bare string such as `1/3`.
fn scalar_arg<S: JsonScalar>(name: &str, text: &Option<String>) -> CliResult<Option<S>> {
    let Some(text) = text else { return Ok(None) };
    let value = serde_json::from_str::<Value>(text).unwrap_or_else(|_| Value::String(text.clone()));
    S::from_json(&value)
        .map(Some)
        .map_err(|e| CliError::Usage(format!("--{name}: {e}")))
}

fn gen(args: &GenArgs, g: &GlobalArgs) -> CliResult<Value> {
    fn go<S: JsonScalar>(args: &GenArgs) -> CliResult<Value> {
        let poly = match &args.poly {
            None => None,
            Some(text) => {
                let v: Value = serde_json::from_str(text)
                    .map_err(|e| CliError::Usage(format!("--poly: {e}")))?;
                let coeffs = v
                    .as_array()
                    .ok_or_else(|| CliError::Usage("--poly must be a JSON array".into()))?
                    .iter()
                    .map(S::from_json)
                    .collect::<symcanon::Result<Vec<S>>>()
                    .map_err(|e| CliError::Usage(format!("--poly: {e}")))?;
                Some(Polynomial::new(coeffs))
            }
        };
        let spec = BlockSpec {
            kind: args.block,
            n: args.n,
            a: scalar_arg("a", &args.a)?,
            b: scalar_arg("b", &args.b)?,
            c: scalar_arg("c", &args.c)?,
            poly,
            sign: args.sign,
        };
        let m: Matrix<S> = make_block(&spec)?;
        Ok(matrix_to_json(&m))
    }
    let field = g.field.unwrap_or(Field::Rational);
    apply_tolerance(g.tol, field)?;
    match field {
        Field::Rational => go::<Rational>(args),
        Field::Gaussian => go::<Gaussian>(args),
        Field::Real => go::<f64>(args),
        Field::Complex => go::<C64>(args),
    }
}

fn verify_value(report: &VerifyReport) -> Value {
    let checks = report
        .checks
        .iter()
        .map(|c| {
            let mut obj = Map::new();
            obj.insert("identity".into(), Value::from(c.identity));
            obj.insert("n".into(), Value::from(c.n));
            obj.insert(
                "c".into(),
                c.c.as_ref().map(JsonScalar::to_json).unwrap_or(Value::Null),
            );
            obj.insert("passed".into(), Value::Bool(c.passed));
            Value::Object(obj)
        })
        .collect();
    let mut obj = Map::new();
    obj.insert("bound".into(), Value::from(report.bound));
    obj.insert("all_passed".into(), Value::Bool(report.all_passed()));
    obj.insert(
        "failing_identities".into(),
        Value::from(report.failing_identities()),
    );
    obj.insert("checks".into(), Value::Array(checks));
    Value::Object(obj)
}

/// Runs the identity battery against `ctor`; exit 4 when any identity fails.
pub fn verify_report(bound: usize, ctor: &Constructors) -> CliResult<(i32, Value)> {
    let r = verify_suite_with(bound, ctor)?;
    let code = if r.all_passed() {
        exit::OK
    } else {
        exit::VERIFY_FAILED
    };
    Ok((code, report("verify-suite", None, &[], verify_value(&r))))
}

/// [`verify_report`] rendered as an [`Outcome`].
pub fn run_verify_suite(bound: usize, ctor: &Constructors, out: Option<&Path>) -> Outcome {
    match verify_report(bound, ctor) {
        Ok((code, value)) => deliver(code, &value, out),
        Err(e) => Outcome::failure(&e),
    }
}
