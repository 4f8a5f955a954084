//! Batch frontend: encodes Diophantine equations into control problems,
//! reduces control problems back into equations, runs the brute-force
//! searches and verifiers, and prints machine-readable reports.
//!
//! Reports are JSON on standard output with exact scalar strings; human
//! summaries go to standard error. Exit codes: 0 success, 1 when a sought
//! object does not exist (no exactly optimal policy, inequivalent sets),
//! 2 on parse or input errors, 3 on guard refusals.

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_bigint::BigUint;
use serde_json::Value;

use dioqc::io::{
    coherent_to_json, equivalence_to_json, hamiltonian_pair_from_json, legend_to_json,
    problem_file_from_str, problem_to_json, reduction_to_json, report_to_json, scheme_from_str,
    verdict_to_json, ProblemFile,
};
use dioqc::{
    coherent_encoding, coherent_search, default_policy_length, epsilon_equation, exact_equation,
    four_square, grid_search, is_controllable, parse_dio, parse_rational, verify_equivalence,
    Scheme, SearchReport,
};

#[derive(Parser)]
#[command(
    name = "dioqc",
    about = "Exact digitized quantum control and Diophantine equivalences",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compile a Diophantine text file into a control problem
    Encode {
        /// Encoding construction: shift, damping or coherent
        #[arg(long)]
        scheme: String,
        /// Per-component solution bound X (required for shift and damping)
        #[arg(long)]
        bound: Option<u64>,
        /// Policy length Q (default n*X)
        #[arg(long = "policy-length")]
        policy_length: Option<usize>,
        /// Write the problem file here instead of standard output
        #[arg(long)]
        out: Option<PathBuf>,
        /// Input .dio file
        input: PathBuf,
    },
    /// Compile a control-problem file into a Diophantine equation
    Reduce {
        /// Policy length P of the emitted unknowns
        #[arg(long = "policy-length")]
        policy_length: usize,
        /// Emit the accuracy-relaxed equation for this rational epsilon
        #[arg(long)]
        epsilon: Option<String>,
        /// Write the equation text here (legend goes to <out>.legend.json)
        #[arg(long)]
        out: Option<PathBuf>,
        /// Input problem JSON
        input: PathBuf,
    },
    /// Exhaustively search the accessible policy set (or a coherent box)
    Search {
        /// Count bound for coherent problems
        #[arg(long)]
        bound: Option<u64>,
        /// Worker count (results are identical for any value)
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Input problem JSON
        input: PathBuf,
    },
    /// Double-enumeration equivalence check of an encoding
    Verify {
        /// Encoding construction: shift, damping or coherent
        #[arg(long)]
        scheme: String,
        /// Solution box bound X
        #[arg(long)]
        bound: u64,
        /// Policy length Q (default n*X)
        #[arg(long = "policy-length")]
        policy_length: Option<usize>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Input .dio file
        input: PathBuf,
    },
    /// Lie-closure controllability verdict for {"h0": ..., "v": ...}
    LieRank {
        /// Input Hamiltonian-pair JSON
        input: PathBuf,
    },
    /// Four-square decomposition of a nonnegative integer
    Foursquare {
        /// The integer to decompose
        m: String,
    },
}

enum Failure {
    Core(dioqc::Error),
    Io(PathBuf, std::io::Error),
    Usage(String),
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Core(e) => write!(f, "{e}"),
            Failure::Io(path, e) => write!(f, "{}: {e}", path.display()),
            Failure::Usage(msg) => write!(f, "{msg}"),
        }
    }
}

impl From<dioqc::Error> for Failure {
    fn from(e: dioqc::Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Core(dioqc::Error::Guard(_)) => 3,
            _ => 2,
        }
    }
}

fn read_file(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Io(path.to_path_buf(), e))
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    std::fs::write(path, contents).map_err(|e| Failure::Io(path.to_path_buf(), e))
}

fn emit(value: &Value, out: Option<&Path>) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).expect("JSON serialization");
    match out {
        Some(path) => write_file(path, &(text + "\n")),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn cmd_encode(
    scheme: &str,
    bound: Option<u64>,
    policy_length: Option<usize>,
    out: Option<&Path>,
    input: &Path,
) -> Result<u8, Failure> {
    let dio = parse_dio(&read_file(input)?)?;
    let scheme = scheme_from_str(scheme)?;
    if scheme == Scheme::Coherent {
        let prob = coherent_encoding(&dio);
        eprintln!(
            "coherent encoding: {} mode(s), counts start at 0, channel l increments mode l",
            dio.nvars()
        );
        emit(&coherent_to_json(&prob), out)?;
        return Ok(0);
    }
    let x = bound.ok_or_else(|| {
        Failure::Usage(format!(
            "--bound is required for the {} scheme",
            scheme.name()
        ))
    })?;
    let q = policy_length.unwrap_or_else(|| default_policy_length(&dio, x));
    let enc = match scheme {
        Scheme::Shift => dioqc::shift_encoding(&dio, x, q)?,
        Scheme::Damping => dioqc::damping_encoding(&dio, x, q)?,
        Scheme::Coherent => unreachable!(),
    };
    if !enc.q_covers_box() {
        eprintln!(
            "warning: policy length {q} is below n*X = {}; only tuples reachable within \
             {q} steps are covered",
            enc.n * enc.x as usize
        );
    }
    eprintln!(
        "{} encoding: n={} X={} dim={} channels=0..{} (0 = identity) Q={q}",
        scheme.name(),
        enc.n,
        enc.x,
        enc.dim(),
        enc.n
    );
    emit(&problem_to_json(&enc.problem), out)?;
    Ok(0)
}

fn cmd_reduce(
    policy_length: usize,
    epsilon: Option<&str>,
    out: Option<&Path>,
    input: &Path,
) -> Result<u8, Failure> {
    let prob = match problem_file_from_str(&read_file(input)?)? {
        ProblemFile::Control(p) => p,
        ProblemFile::Coherent(_) => {
            return Err(Failure::Usage(
                "reduce needs a channel problem; coherent descriptors have no finite matrices"
                    .into(),
            ))
        }
    };
    let reduction = match epsilon {
        Some(text) => epsilon_equation(&prob, policy_length, &parse_rational(text)?)?,
        None => exact_equation(&prob, policy_length)?,
    };
    eprintln!(
        "equation over {} unknown(s) ({} policy, {} ancilla), {} term(s), scale {}",
        reduction.policy_vars + reduction.ancillas.len(),
        reduction.policy_vars,
        reduction.ancillas.len(),
        reduction.equation.terms().len(),
        reduction.scale
    );
    if let Some(path) = out {
        write_file(path, &format!("{}\n", reduction.equation))?;
        let legend_path = path.with_extension(match path.extension() {
            Some(ext) => format!("{}.legend.json", ext.to_string_lossy()),
            None => "legend.json".to_string(),
        });
        write_file(
            &legend_path,
            &(serde_json::to_string_pretty(&legend_to_json(&reduction)).expect("JSON") + "\n"),
        )?;
    }
    emit(&reduction_to_json(&reduction), None)?;
    Ok(0)
}

fn report_summary(report: &SearchReport) -> String {
    format!(
        "optimal value {} with {} optimizer(s) in {} evaluation(s)",
        report.optimal_value,
        report.optimizers.len(),
        report.evaluations
    )
}

fn cmd_search(bound: Option<u64>, jobs: usize, input: &Path) -> Result<u8, Failure> {
    let report = match problem_file_from_str(&read_file(input)?)? {
        ProblemFile::Control(prob) => grid_search(&prob, jobs)?,
        ProblemFile::Coherent(prob) => {
            let bound = bound.ok_or_else(|| {
                Failure::Usage("--bound is required to search a coherent problem".into())
            })?;
            coherent_search(&prob, bound)?
        }
    };
    eprintln!("{}", report_summary(&report));
    emit(&report_to_json(&report), None)?;
    Ok(if report.optimal_value == dioqc::ratio(0, 1) {
        0
    } else {
        1
    })
}

fn cmd_verify(
    scheme: &str,
    bound: u64,
    policy_length: Option<usize>,
    jobs: usize,
    input: &Path,
) -> Result<u8, Failure> {
    let dio = parse_dio(&read_file(input)?)?;
    let scheme = scheme_from_str(scheme)?;
    let report = verify_equivalence(&dio, bound, scheme, policy_length, jobs)?;
    eprintln!(
        "{} at X={bound}: decoded {} tuple(s), oracle {} tuple(s), equal: {}",
        scheme.name(),
        report.decoded.len(),
        report.oracle.len(),
        report.equal
    );
    emit(&equivalence_to_json(&report), None)?;
    Ok(if report.equal { 0 } else { 1 })
}

fn cmd_lie_rank(input: &Path) -> Result<u8, Failure> {
    let value: Value = serde_json::from_str(&read_file(input)?)
        .map_err(|e| Failure::Core(dioqc::Error::Parse(format!("lie-rank input: {e}"))))?;
    let pair = hamiltonian_pair_from_json(&value)?;
    let verdict = is_controllable(&pair)?;
    eprintln!(
        "closure dimension {} of su-dim {}: {}",
        verdict.closure_dim,
        verdict.su_dim,
        if verdict.controllable {
            "controllable"
        } else {
            "not controllable"
        }
    );
    emit(&verdict_to_json(&verdict), None)?;
    Ok(0)
}

fn cmd_foursquare(m: &str) -> Result<u8, Failure> {
    let m: BigUint = m
        .trim()
        .parse()
        .map_err(|e| Failure::Core(dioqc::Error::Parse(format!("foursquare argument: {e}"))))?;
    let squares = four_square(&m);
    eprintln!(
        "{m} = {}^2+{}^2+{}^2+{}^2",
        squares[0], squares[1], squares[2], squares[3]
    );
    let value = serde_json::json!({
        "m": m.to_string(),
        "squares": squares.iter().map(|a| a.to_string()).collect::<Vec<_>>(),
    });
    emit(&value, None)?;
    Ok(0)
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match &cli.command {
        Command::Encode {
            scheme,
            bound,
            policy_length,
            out,
            input,
        } => cmd_encode(scheme, *bound, *policy_length, out.as_deref(), input),
        Command::Reduce {
            policy_length,
            epsilon,
            out,
            input,
        } => cmd_reduce(*policy_length, epsilon.as_deref(), out.as_deref(), input),
        Command::Search { bound, jobs, input } => cmd_search(*bound, *jobs, input),
        Command::Verify {
            scheme,
            bound,
            policy_length,
            jobs,
            input,
        } => cmd_verify(scheme, *bound, *policy_length, *jobs, input),
        Command::LieRank { input } => cmd_lie_rank(input),
        Command::Foursquare { m } => cmd_foursquare(m),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("error: {failure}");
            ExitCode::from(failure.exit_code())
        }
    }
}
