//! `iwasawa`: batch front end. Every command prints one JSON report.
//!
//! Exit codes: 0 success, 1 mathematical failure, 2 usage or bad input, 3 IO.

mod commands;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use iwasawa_core::Error;
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(name = "iwasawa", version, about = "Finite-layer Iwasawa theory of elliptic curves")]
struct Cli {
    #[command(flatten)]
    output: OutputArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
pub struct OutputArgs {
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Indented JSON.
    #[arg(long, global = true)]
    pretty: bool,
    /// Modular-symbol cache directory (default `.cache`).
    #[arg(long, global = true, env = iwasawa_core::modsym::CACHE_DIR_ENV)]
    pub cache_dir: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct CurveArgs {
    /// Curve JSON file `{"label", "a_invariants", "conductor"}`, or a built-in label.
    #[arg(long)]
    pub curve: String,
    /// Odd prime of good reduction.
    #[arg(long)]
    pub p: u64,
}

#[derive(Args, Debug, Clone)]
pub struct LayerArgs {
    #[command(flatten)]
    pub curve: CurveArgs,
    #[arg(long)]
    pub n: u32,
    /// Working precision `p^k`.
    #[arg(long, default_value_t = 4)]
    pub k: u32,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Traces of Frobenius by point counting.
    Ap {
        #[arg(long)]
        curve: String,
        /// A single prime.
        #[arg(long, conflicts_with = "bound")]
        p: Option<u64>,
        /// All good primes up to this bound.
        #[arg(long)]
        bound: Option<u64>,
    },
    /// The Mazur-Tate element theta_n, exactly and mod p^k.
    Theta(LayerArgs),
    /// p-stabilized theta_n and the principality check (ordinary p).
    Stabilize(LayerArgs),
    /// Plus/minus divisibility of theta_n.
    PmCheck(LayerArgs),
    /// The ideal (theta_n, trace theta_{n-1}).
    Ideal {
        #[command(flatten)]
        layer: LayerArgs,
        /// Ideal file to test theta_n against (weak main conjecture membership).
        #[arg(long)]
        contains: Option<PathBuf>,
    },
    /// Fitting ideal of a finitely presented module file `{"shape", "matrix"}`.
    Fitt {
        module: PathBuf,
        /// Element file to test for membership in the Fitting ideal.
        #[arg(long)]
        contains: Option<PathBuf>,
    },
    /// Kolyvagin primes up to a bound and delta~ for single primes and pairs.
    DeltaSearch {
        #[command(flatten)]
        curve: CurveArgs,
        #[arg(long)]
        bound: u64,
    },
    /// Runs every invariant suite.
    Verify {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Run only the named properties.
        #[arg(long)]
        only: Vec<String>,
        /// Run batches on one thread.
        #[arg(long)]
        sequential: bool,
        /// Random Fitt(Y') pairs per (p, n).
        #[arg(long, default_value_t = 100)]
        pairs: usize,
        /// Random instances per Fitting-ideal lemma.
        #[arg(long, default_value_t = 200)]
        instances: usize,
        /// Test hook: corrupt the named property's first verdict.
        #[arg(long, hide = true)]
        inject_fault: Option<String>,
    },
}

/// A command either fails outright or produces a report with a verdict.
pub enum Failure {
    Core(Error),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

pub struct Outcome {
    pub report: Value,
    /// `false` turns into exit code 1 after the report is written.
    pub ok: bool,
}

fn exit_code(e: &Error) -> u8 {
    if e.is_io() {
        3
    } else if e.is_math_failure() {
        1
    } else {
        2
    }
}

fn error_report(e: &Error) -> Value {
    let mut v = json!({ "kind": e.kind(), "message": e.to_string() });
    if let Error::NotDivisible(d) = e {
        v["diagnostics"] = serde_json::to_value(d).unwrap_or(Value::Null);
    }
    json!({ "error": v })
}

fn emit(output: &OutputArgs, value: &Value) -> std::io::Result<()> {
    let text = if output.pretty {
        serde_json::to_string_pretty(value)?
    } else {
        serde_json::to_string(value)?
    };
    match &output.out {
        Some(path) => std::fs::write(path, text + "\n"),
        None => writeln!(std::io::stdout(), "{text}"),
    }
}

fn run(cli: &Cli) -> Result<Outcome, Failure> {
    let out = &cli.output;
    match &cli.command {
        Command::Ap { curve, p, bound } => commands::ap(curve, *p, *bound),
        Command::Theta(a) => commands::theta(out, a),
        Command::Stabilize(a) => commands::stabilize(out, a),
        Command::PmCheck(a) => commands::pm_check(out, a),
        Command::Ideal { layer, contains } => commands::ideal(out, layer, contains.as_deref()),
        Command::Fitt { module, contains } => commands::fitt(module, contains.as_deref()),
        Command::DeltaSearch { curve, bound } => commands::delta_search(out, curve, *bound),
        Command::Verify {
            seed,
            only,
            sequential,
            pairs,
            instances,
            inject_fault,
        } => commands::verify(
            out,
            iwasawa_core::verify::VerifyConfig {
                seed: *seed,
                exec: if *sequential {
                    iwasawa_core::parallel::Execution::Sequential
                } else {
                    iwasawa_core::parallel::Execution::Parallel
                },
                cache_dir: None,
                yprime_pairs: *pairs,
                lemma_instances: *instances,
                inject_fault: inject_fault.clone(),
                only: only.clone(),
            },
        ),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let (value, code) = match run(&cli) {
        Ok(outcome) => (outcome.report, if outcome.ok { 0 } else { 1 }),
        Err(Failure::Usage(msg)) => (json!({ "error": { "kind": "usage", "message": msg } }), 2),
        Err(Failure::Core(e)) => (error_report(&e), exit_code(&e)),
    };
    if code != 0 && value.get("error").is_some() {
        // Errors go to stderr so stdout stays a clean report stream.
        eprintln!("{value}");
        return ExitCode::from(code);
    }
    match emit(&cli.output, &value) {
        Ok(()) => ExitCode::from(code),
        Err(e) => {
            eprintln!("{}", error_report(&Error::Io(e)));
            ExitCode::from(3)
        }
    }
}
