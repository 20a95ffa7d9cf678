//! Command-line front end. [`run`] takes explicit streams so tests can
//! drive it without spawning a process.
//!
//! Exit codes: 0 on success, 1 when the algorithm reports failure, 2 on
//! malformed input or bad flags.

use std::fmt::Write as _;
use std::fs;
use std::io::{Read, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use serde::Deserialize;

use crate::arith::{count_bad, Bounds, Instance, ResiduePair};
use crate::error::Error;
use crate::etl::{etl, EtlConfig, EtlResult};
use crate::ftrr::{ftrr, FtrrResult};
use crate::harness::{format_table, run_experiment, write_csv, Algorithm, ExperimentSpec};
use crate::hrr::{hrr, Criterion, HrrConfig, HrrResult, DEFAULT_A_CRIT};
use crate::oracle::{vote_reconstruct, OracleResult};
use crate::BigRational;

#[derive(Debug, Parser)]
#[command(name = "ratrecon", version, about = "Fault tolerant rational reconstruction from residue-modulus pairs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Guaranteed reconstruction given numerator, denominator and bad-pair bounds
    Ftrr {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        bounds: BoundArgs,
    },
    /// Heuristic reconstruction needing no bounds (recommended)
    Hrr {
        #[command(flatten)]
        input: InputArgs,
        /// Smallest convincing partial quotient
        #[arg(long, default_value_t = DEFAULT_A_CRIT)]
        a_crit: u64,
        /// Judge by largest / second-largest partial quotient instead
        #[arg(long)]
        ratio_threshold: Option<u64>,
    },
    /// Lattice-reduction reconstruction (comparison algorithm; prefer hrr)
    Etl {
        #[command(flatten)]
        input: InputArgs,
        /// Reject answers for which half or more of the moduli are bad
        #[arg(long, overrides_with = "no_refinement_a")]
        refinement_a: bool,
        #[arg(long, overrides_with = "refinement_a")]
        no_refinement_a: bool,
        /// Accept only shortest vectors with squared norm below M / divisor
        #[arg(long, default_value_t = 100)]
        b_divisor: u64,
    },
    /// Brute-force voting over subsets (small inputs only)
    Vote {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        bounds: BoundArgs,
    },
    /// Fault-injection benchmark: pairs needed per algorithm and bit split
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Pair file; standard input when absent
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Input is a JSON array of {"x": "...", "m": "..."}
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    #[arg(long)]
    pub num_bound: BigInt,
    #[arg(long)]
    pub den_bound: BigInt,
    #[arg(long)]
    pub max_bad: usize,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Numerator bits, comma separated; paired with --den-bits
    #[arg(long, value_delimiter = ',', default_value = "2000,1600,1200,1000")]
    pub num_bits: Vec<u32>,
    #[arg(long, value_delimiter = ',', default_value = "0,400,800,1000")]
    pub den_bits: Vec<u32>,
    #[arg(long, value_delimiter = ',', default_value = "0,0.1")]
    pub bad_prob: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "hrr,etl")]
    pub algorithms: Vec<Algorithm>,
    #[arg(long, default_value_t = 25)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = crate::harness::DEFAULT_START_PRIME)]
    pub start_prime: u64,
    /// Also write per-trial rows here
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

/// A malformed pair file, with the 1-based line of the problem.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl std::fmt::Display for ParseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

/// Parsed pairs and the line each one came from.
pub type ParsedPairs = Vec<(usize, ResiduePair<BigInt>)>;

fn make_pair(line: usize, x: &str, m: &str) -> Result<(usize, ResiduePair<BigInt>), ParseError> {
    let num = |s: &str, what: &str| {
        s.trim()
            .parse::<BigInt>()
            .map_err(|_| ParseError { line, message: format!("{what} '{s}' is not a decimal integer") })
    };
    let pair = ResiduePair::new(num(x, "residue")?, num(m, "modulus")?)
        .map_err(|e| ParseError { line, message: e.to_string() })?;
    Ok((line, pair))
}

/// Whitespace format: `residue modulus` per line, `#` starts a comment line.
pub fn parse_text(src: &str) -> Result<ParsedPairs, ParseError> {
    let mut out = Vec::new();
    for (i, raw) in src.lines().enumerate() {
        let line = i + 1;
        let text = raw.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = text.split_whitespace().collect();
        let [x, m] = fields[..] else {
            return Err(ParseError { line, message: format!("expected 'residue modulus', got {} fields", fields.len()) });
        };
        out.push(make_pair(line, x, m)?);
    }
    Ok(out)
}

#[derive(Deserialize)]
struct JsonPair {
    x: String,
    m: String,
}

/// JSON format: `[{"x": "3", "m": "7"}, ...]` with decimal strings. Pair
/// `k` is reported as "line" `k + 1`.
pub fn parse_json(src: &str) -> Result<ParsedPairs, ParseError> {
    let raw: Vec<JsonPair> =
        serde_json::from_str(src).map_err(|e| ParseError { line: e.line(), message: e.to_string() })?;
    raw.iter().enumerate().map(|(i, p)| make_pair(i + 1, &p.x, &p.m)).collect()
}

fn build_instance(parsed: ParsedPairs) -> Result<Instance<BigInt>, ParseError> {
    let lines: Vec<usize> = parsed.iter().map(|(l, _)| *l).collect();
    let moduli: Vec<String> = parsed.iter().map(|(_, p)| p.modulus().to_string()).collect();
    Instance::new(parsed.into_iter().map(|(_, p)| p)).map_err(|e| {
        let line = match &e {
            Error::DuplicateOrNonCoprimeModuli { second, .. } => {
                moduli.iter().rposition(|m| m == second).map_or(0, |i| lines[i])
            }
            _ => lines.last().copied().unwrap_or(0),
        };
        ParseError { line, message: e.to_string() }
    })
}

enum Outcome {
    Value(BigRational, Vec<usize>),
    Failure(String),
}

fn format_value(r: &BigRational) -> String {
    if r.denom() == &BigInt::from(1) {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn zero_with_bad(inst: &Instance<BigInt>) -> Result<Outcome, Error> {
    let zero = BigRational::from_integer(BigInt::from(0));
    let bad = count_bad(&zero, inst)?;
    Ok(Outcome::Value(zero, bad))
}

fn reconstruct(cmd: &Command, inst: &Instance<BigInt>) -> Result<Outcome, Error> {
    let bounds = |b: &BoundArgs| Bounds::new(b.num_bound.clone(), b.den_bound.clone(), b.max_bad);
    match cmd {
        Command::Ftrr { bounds: b, .. } => match ftrr(inst, &bounds(b)?)? {
            FtrrResult::Value { value, bad, .. } => Ok(Outcome::Value(value, bad)),
            FtrrResult::Zero => zero_with_bad(inst),
            FtrrResult::Failure(why) => Ok(Outcome::Failure(why.to_string())),
        },
        Command::Hrr { a_crit, ratio_threshold, .. } => {
            let criterion = match ratio_threshold {
                Some(t) => Criterion::RatioThreshold(*t),
                None => Criterion::AbsoluteThreshold,
            };
            let res = hrr(inst, &HrrConfig::new(*a_crit, criterion)?)?;
            match &res {
                HrrResult::Value { value, .. } => Ok(Outcome::Value(value.clone(), res.bad_indices(inst))),
                HrrResult::Zero => zero_with_bad(inst),
                HrrResult::Failure => {
                    Ok(Outcome::Failure("no convincing partial quotient; more pairs are needed".into()))
                }
            }
        }
        Command::Etl { no_refinement_a, b_divisor, .. } => {
            match etl(inst, &EtlConfig::new(!no_refinement_a, *b_divisor)?)? {
                EtlResult::Value { value, bad } => Ok(Outcome::Value(value, bad)),
                EtlResult::Failure => Ok(Outcome::Failure("no acceptable short lattice vector".into())),
            }
        }
        Command::Vote { bounds: b, .. } => match vote_reconstruct(inst, &bounds(b)?)? {
            OracleResult::Value(r) => {
                let bad = count_bad(&r, inst)?;
                Ok(Outcome::Value(r, bad))
            }
            OracleResult::Ambiguous(all) => Ok(Outcome::Failure(format!(
                "ambiguous: {}",
                all.iter().map(format_value).collect::<Vec<_>>().join(", ")
            ))),
            OracleResult::Failure => Ok(Outcome::Failure("no candidate is consistent with enough pairs".into())),
        },
        Command::Bench(_) => unreachable!("bench is dispatched separately"),
    }
}

fn input_args(cmd: &Command) -> &InputArgs {
    match cmd {
        Command::Ftrr { input, .. }
        | Command::Hrr { input, .. }
        | Command::Etl { input, .. }
        | Command::Vote { input, .. } => input,
        Command::Bench(_) => unreachable!("bench reads no pairs"),
    }
}

fn run_reconstruct(cmd: &Command, stdin: &mut dyn Read, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let args = input_args(cmd);
    let src = match &args.input {
        Some(path) => fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display())),
        None => {
            let mut s = String::new();
            stdin.read_to_string(&mut s).map(|_| s).map_err(|e| format!("cannot read standard input: {e}"))
        }
    };
    let src = match src {
        Ok(s) => s,
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            return 2;
        }
    };
    let parsed = if args.json { parse_json(&src) } else { parse_text(&src) };
    let inst = match parsed.and_then(build_instance) {
        Ok(inst) => inst,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return 2;
        }
    };
    match reconstruct(cmd, &inst) {
        Ok(Outcome::Value(r, bad)) => {
            let _ = writeln!(out, "{}", format_value(&r));
            if !bad.is_empty() {
                let mut positions: Vec<usize> = bad.iter().map(|&i| inst.input_position(i) + 1).collect();
                positions.sort_unstable();
                let list: Vec<String> = positions.iter().map(usize::to_string).collect();
                let _ = writeln!(out, "bad_moduli: {}", list.join(","));
            }
            0
        }
        Ok(Outcome::Failure(why)) => {
            let _ = writeln!(err, "FAILURE: {why}");
            1
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

fn bench_specs(args: &BenchArgs) -> Result<Vec<ExperimentSpec>, String> {
    let (n, d) = (&args.num_bits, &args.den_bits);
    let splits: Vec<(u32, u32)> = match (n.len(), d.len()) {
        (a, b) if a == b => n.iter().copied().zip(d.iter().copied()).collect(),
        (1, _) => d.iter().map(|&d| (n[0], d)).collect(),
        (_, 1) => n.iter().map(|&n| (n, d[0])).collect(),
        _ => return Err("--num-bits and --den-bits must have the same number of entries".into()),
    };
    let mut specs = Vec::new();
    for &alg in &args.algorithms {
        for &p in &args.bad_prob {
            for &(nb, db) in &splits {
                let mut spec = ExperimentSpec::new(alg, nb, db, p).with_trials(args.trials).with_seed(args.seed);
                spec.start_prime = args.start_prime;
                spec.validate().map_err(|e| e.to_string())?;
                specs.push(spec);
            }
        }
    }
    if args.trials == 0 {
        return Err("--trials must be at least 1".into());
    }
    Ok(specs)
}

fn run_bench(args: &BenchArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let specs = match bench_specs(args) {
        Ok(s) => s,
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            return 2;
        }
    };
    let mut reports = Vec::new();
    for spec in &specs {
        match run_experiment(spec) {
            Ok(r) => reports.push(r),
            Err(e) => {
                let _ = writeln!(err, "FAILURE: {} {}/{} bits: {e}", spec.algorithm, spec.num_bits, spec.den_bits);
                return 1;
            }
        }
    }
    let mut text = format_table(&reports);
    for r in &reports {
        let _ = writeln!(
            text,
            "{} {}/{} bits, {}% bad: false positives {}, wall time {:.2} s",
            r.spec.algorithm,
            r.spec.num_bits,
            r.spec.den_bits,
            r.spec.bad_prob * 100.0,
            r.false_positives(),
            r.wall_time
        );
    }
    let _ = write!(out, "{text}");
    if let Some(path) = &args.csv {
        let written = fs::File::create(path)
            .map_err(|e| e.to_string())
            .and_then(|f| write_csv(&reports, f).map_err(|e| e.to_string()));
        if let Err(msg) = written {
            let _ = writeln!(err, "error: cannot write {}: {msg}", path.display());
            return 2;
        }
    }
    0
}

/// Parses `args` (including the program name) and executes the command.
pub fn run<I, S>(args: I, stdin: &mut dyn Read, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            let code = e.exit_code();
            if code == 0 {
                let _ = write!(out, "{rendered}");
            } else {
                let _ = write!(err, "{rendered}");
            }
            return code;
        }
    };
    match &cli.command {
        Command::Bench(args) => run_bench(args, out, err),
        cmd => run_reconstruct(cmd, stdin, out, err),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_parsing() {
        let parsed = parse_text("# header\n3 7\n\n  -4   11 \n").unwrap();
        assert_eq!(parsed.len(), 2);
        assert_eq!(parsed[1].0, 4);
        assert_eq!(parsed[1].1.residue(), &BigInt::from(7));
        assert_eq!(parse_text("1 2 3\n").unwrap_err().line, 1);
        assert_eq!(parse_text("1 7\nx 5\n").unwrap_err().line, 2);
        assert_eq!(parse_text("1 1\n").unwrap_err().line, 1);
    }

    #[test]
    fn json_matches_text() {
        let text = parse_text("3 7\n-4 11\n").unwrap();
        let json = parse_json(r#"[{"x": "3", "m": "7"}, {"x": "-4", "m": "11"}]"#).unwrap();
        assert_eq!(build_instance(text).unwrap(), build_instance(json).unwrap());
        assert!(parse_json(r#"[{"x": 3, "m": "7"}]"#).is_err());
    }

    #[test]
    fn non_coprime_diagnostic_names_the_line() {
        let err = build_instance(parse_text("1 4\n1 9\n1 6\n").unwrap()).unwrap_err();
        assert_eq!(err.line, 3);
    }
}
