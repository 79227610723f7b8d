use std::io::Read;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use pairqe::decomposition::{decompose, generic_type_contains, is_small};
use pairqe::formula::{literals_of, parse, parse_model_element, Formula as F, TheoryMode, Var};
use pairqe::imaginaries::{code_function, code_unary_set};
use pairqe::measure::{bucket_partition, measure};
use pairqe::model::eval;
use pairqe::qe::{decide_sentence, qe, split_atom};
use pairqe::sample::{random_assignment, random_single_quantifier, GenConfig};
use pairqe::{Assignment, Error, ErrorClass, Formula, Model, Value};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value as Json};

#[derive(Parser)]
#[command(
    name = "pairqe",
    version,
    about = "Decide, eliminate quantifiers and analyse definable sets in dense pairs of ordered vector spaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[arg(long, global = true, value_enum, default_value_t = Theory::Povs)]
    theory: Theory,
    /// Dimension of the reference model over Q (basis 1, r2, r3, ...).
    #[arg(long = "model-dim", global = true, default_value_t = 3, value_parser = clap::value_parser!(u32).range(2..=64))]
    model_dim: u32,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Seed for oracle-check.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Number of oracle-check instances.
    #[arg(long, global = true, default_value_t = 100)]
    count: usize,
    /// Decimal digits for measure approximations.
    #[arg(long, global = true, default_value_t = 10)]
    precision: usize,
    /// Echo the normalized input on stderr.
    #[arg(long, short, global = true)]
    verbose: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Theory {
    Ovs,
    Povs,
    PovsPrec,
}

impl From<Theory> for TheoryMode {
    fn from(t: Theory) -> Self {
        match t {
            Theory::Ovs => TheoryMode::Ovs,
            Theory::Povs => TheoryMode::Povs,
            Theory::PovsPrec => TheoryMode::PovsPrec,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(clap::Args)]
struct Unary {
    /// Formula text; read from stdin when absent.
    formula: Option<String>,
    /// The variable the set lives in. Defaults to the lowest free one not fixed by --set.
    #[arg(long)]
    var: Option<Var>,
    /// Fixes a parameter, e.g. `--set x2=1/2+r2` or `--set u1=pi(r3)`.
    #[arg(long = "set", value_name = "VAR=VALUE")]
    set: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Eliminate quantifiers and print the equivalent quantifier-free formula.
    Qe { formula: Option<String> },
    /// Decide a sentence.
    Decide { formula: Option<String> },
    /// Decompose a unary set into points and near-intervals.
    Decompose(Unary),
    /// Measure of a unary set, concentrated on (0, 1).
    Measure {
        #[command(flatten)]
        unary: Unary,
        /// Report buckets of width 1/K over the --param tuples.
        #[arg(long, value_name = "K")]
        buckets: Option<u64>,
        /// One parameter tuple, e.g. `--param x2=1/4,x3=0`.
        #[arg(long = "param", value_name = "VAR=VALUE,...")]
        params: Vec<String>,
    },
    /// Whether a unary set is small.
    Small(Unary),
    /// Whether the generic quotient type contains a formula in a quotient variable.
    Generic(Unary),
    /// Canonical code of a unary set.
    CodeSet(Unary),
    /// Canonical code of a definable partial function x -> y.
    CodeFn {
        formula: Option<String>,
        #[arg(long)]
        x: Option<Var>,
        #[arg(long)]
        y: Option<Var>,
        #[arg(long = "set", value_name = "VAR=VALUE")]
        set: Vec<String>,
    },
    /// Split an atom into its home part and its quotient part.
    Split { atom: Option<String> },
    /// Compare qe against the model oracles on random single-quantifier instances.
    OracleCheck,
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e.class() {
            ErrorClass::Input => 2,
            ErrorClass::Precondition => 3,
            ErrorClass::Internal => 4,
        };
        Failure { code, message: e.to_string() }
    }
}

fn input_failure(message: impl Into<String>) -> Failure {
    Failure { code: 2, message: message.into() }
}

struct Output {
    text: String,
    json: Json,
}

fn read_input(arg: &Option<String>) -> Result<String, Failure> {
    match arg {
        Some(s) => Ok(s.clone()),
        None => {
            let mut buf = String::new();
            std::io::stdin().read_to_string(&mut buf).map_err(|e| input_failure(format!("cannot read stdin: {e}")))?;
            Ok(buf.trim().to_string())
        }
    }
}

fn parse_input(cli: &Cli, text: &str) -> Result<Formula, Failure> {
    let f = parse(text, cli.theory.into()).map_err(|e| {
        let mut f = Failure::from(e.clone());
        if let Error::Parse { position, .. } = e {
            f.message = format!("{}\n  {text}\n  {}^", f.message, " ".repeat(text[..position.min(text.len())].chars().count()));
        }
        f
    })?;
    if cli.verbose {
        eprintln!("input: {f}");
    }
    Ok(f)
}

fn parse_binding(text: &str) -> Result<(Var, Value), Failure> {
    let (name, value) = text.split_once('=').ok_or_else(|| input_failure(format!("expected VAR=VALUE, found {text:?}")))?;
    let var: Var = name.trim().parse().map_err(input_failure)?;
    let value = value.trim();
    if var.is_home() {
        Ok((var, Value::Home(parse_model_element(value)?)))
    } else {
        let inner = value.strip_prefix("pi(").and_then(|v| v.strip_suffix(')')).unwrap_or(value);
        Ok((var, Value::Quotient(parse_model_element(inner)?.project())))
    }
}

fn assignment<'a>(bindings: impl IntoIterator<Item = &'a str>) -> Result<Assignment, Failure> {
    let mut sigma = Assignment::new();
    for b in bindings {
        let (v, value) = parse_binding(b)?;
        sigma.insert(v, value)?;
    }
    Ok(sigma)
}

/// The requested variable, or the lowest free one of the right sort that
/// `sigma` leaves open.
fn pick_var(f: &Formula, requested: Option<Var>, sigma: &Assignment, home: bool) -> Var {
    requested.unwrap_or_else(|| {
        f.free_vars().into_iter().find(|v| v.is_home() == home && !sigma.contains(v)).unwrap_or(if home {
            Var::home(1)
        } else {
            Var::quotient(1)
        })
    })
}

fn boolean(key: &str, b: bool) -> Output {
    Output { text: b.to_string(), json: json!({ key: b }) }
}

fn to_json<T: serde::Serialize>(t: &T) -> Json {
    serde_json::to_value(t).expect("serializable")
}

fn unary_input(cli: &Cli, u: &Unary, home: bool) -> Result<(Formula, Var, Assignment), Failure> {
    let f = parse_input(cli, &read_input(&u.formula)?)?;
    let sigma = assignment(u.set.iter().map(String::as_str))?;
    let v = pick_var(&f, u.var, &sigma, home);
    Ok((f, v, sigma))
}

fn run(cli: &Cli) -> Result<Output, Failure> {
    let mode: TheoryMode = cli.theory.into();
    match &cli.command {
        Command::Qe { formula } => {
            let g = qe(&parse_input(cli, &read_input(formula)?)?, mode)?;
            Ok(Output { text: g.to_string(), json: json!({ "result": g.to_string() }) })
        }
        Command::Decide { formula } => Ok(boolean("result", decide_sentence(&parse_input(cli, &read_input(formula)?)?, mode)?)),
        Command::Decompose(u) => {
            let (f, v, sigma) = unary_input(cli, u, true)?;
            let d = decompose(&f, v, &sigma)?;
            Ok(Output { text: d.to_string(), json: to_json(&d) })
        }
        Command::Measure { unary, buckets, params } => {
            let (f, v, sigma) = unary_input(cli, unary, true)?;
            match buckets {
                Some(k) => {
                    let tuples: Vec<Assignment> =
                        params.iter().map(|p| assignment(p.split(',').filter(|s| !s.trim().is_empty()))).collect::<Result<_, _>>()?;
                    let report = bucket_partition(&f, v, &tuples, *k)?;
                    let mut lines = Vec::new();
                    for e in &report.entries {
                        let ps: Vec<String> = e.params.iter().map(|(w, val)| format!("{w}={}", value_text(val))).collect();
                        lines.push(format!("{}: bucket {} measure {}", ps.join(","), e.bucket, e.measure));
                    }
                    Ok(Output { text: lines.join("\n"), json: to_json(&report) })
                }
                None => {
                    let m = measure(&f, v, &sigma)?;
                    let decimal = m.to_decimal(cli.precision);
                    let text = if m.value.is_rational() { m.to_string() } else { format!("{m}\n~ {decimal}") };
                    Ok(Output { text, json: json!({ "exact": to_json(&m.value), "decimal": decimal }) })
                }
            }
        }
        Command::Small(u) => {
            let (f, v, sigma) = unary_input(cli, u, true)?;
            Ok(boolean("small", is_small(&decompose(&f, v, &sigma)?)))
        }
        Command::Generic(u) => {
            let (f, v, sigma) = unary_input(cli, u, false)?;
            Ok(boolean("contains", generic_type_contains(&f, v, &sigma)?))
        }
        Command::CodeSet(u) => {
            let (f, v, sigma) = unary_input(cli, u, true)?;
            let code = code_unary_set(&f, v, &sigma)?;
            Ok(Output { text: code.to_string(), json: to_json(&code) })
        }
        Command::CodeFn { formula, x, y, set } => {
            let f = parse_input(cli, &read_input(formula)?)?;
            let sigma = assignment(set.iter().map(String::as_str))?;
            let x = pick_var(&f, *x, &sigma, true);
            let y = y.unwrap_or_else(|| {
                f.free_vars().into_iter().find(|v| v.is_home() && *v != x && !sigma.contains(v)).unwrap_or(Var::home(x.index + 1))
            });
            let code = code_function(&f, x, y, &sigma)?;
            Ok(Output { text: code.to_string(), json: to_json(&code) })
        }
        Command::Split { atom } => {
            let text = read_input(atom)?;
            let F::Atom(a) = parse_input(cli, &text)? else {
                return Err(input_failure(format!("expected a single atom, found {text:?}")));
            };
            let parts = split_atom(&a);
            let show = |p: &Option<Formula>| p.as_ref().map(|g| g.to_string());
            let images: Vec<String> = parts.images.iter().map(|(q, h)| format!("{q} = pi({h})")).collect();
            let text = format!(
                "home: {}\nquotient: {}\nimages: {}",
                show(&parts.home).unwrap_or_else(|| "none".into()),
                show(&parts.quotient).unwrap_or_else(|| "none".into()),
                if images.is_empty() { "none".into() } else { images.join(", ") }
            );
            let json = json!({
                "home": show(&parts.home),
                "quotient": show(&parts.quotient),
                "images": parts.images.iter().map(|(q, h)| json!({ "var": q.to_string(), "of": h.to_string() })).collect::<Vec<_>>(),
            });
            Ok(Output { text, json })
        }
        Command::OracleCheck => oracle_check(cli, mode),
    }
}

fn value_text(v: &Value) -> String {
    match v {
        Value::Home(e) => e.to_string(),
        Value::Quotient(q) => q.to_string(),
    }
}

const ASSIGNMENTS_PER_INSTANCE: usize = 20;

fn oracle_check(cli: &Cli, mode: TheoryMode) -> Result<Output, Failure> {
    let seed = cli.seed.unwrap_or(0);
    let model = Model::new(cli.model_dim as usize);
    let cfg = GenConfig::new(mode);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut checks, mut agreements) = (0usize, 0usize);
    let mut failures = Vec::new();
    for _ in 0..cli.count {
        let v = if mode.has_quotient() && rng.gen_bool(0.35) { Var::quotient(1) } else { Var::home(1) };
        let f: Formula = random_single_quantifier(&mut rng, &cfg, &model, v);
        let g = qe(&f, mode)?;
        let F::Exists(_, body) = &f else { unreachable!() };
        let lits = literals_of(body)?;
        for _ in 0..ASSIGNMENTS_PER_INSTANCE {
            let s = random_assignment(&mut rng, &model, f.free_vars());
            let expected = if v.is_home() {
                model.oracle_exists_home(&lits, v, &s)?.0
            } else {
                model.oracle_exists_quotient(&lits, v, &s, mode.has_prec())?.0
            };
            checks += 1;
            if eval(&g, &s)? == expected {
                agreements += 1;
            } else if failures.len() < 10 {
                failures.push(format!("{f} ~> {g} at {s:?}: oracle says {expected}"));
            }
        }
    }
    let disagreements = checks - agreements;
    let text = format!(
        "seed {seed}, theory {mode}, model dim {}: {} instances, {checks} checks, {agreements} agree, {disagreements} disagree{}",
        cli.model_dim,
        cli.count,
        failures.iter().map(|l| format!("\n  {l}")).collect::<String>()
    );
    let json = json!({
        "seed": seed,
        "theory": mode.to_string(),
        "model_dim": cli.model_dim,
        "instances": cli.count,
        "checks": checks,
        "agreements": agreements,
        "disagreements": disagreements,
        "failures": failures,
    });
    if disagreements > 0 {
        println!("{}", if cli.format == Format::Json { json.to_string() } else { text });
        return Err(Failure { code: 4, message: format!("{disagreements} disagreements between qe and the oracles") });
    }
    Ok(Output { text, json })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            match cli.format {
                Format::Text => println!("{}", out.text),
                Format::Json => println!("{}", out.json),
            }
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
