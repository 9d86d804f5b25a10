//! Command-line front end: parse moment data as JSON, run the library
//! pipelines, emit deterministic JSON reports.
//!
//! stdout carries only results; structured errors go to stderr. Exit
//! codes: 0 success, 1 domain error, 2 input/parse error.

use std::fs;
use std::io::Read;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;
use serde_json::json;

use moment_schur::{
    ab_cascade, ab_polynomial_pairs, assemble_full, cf_expand, diagonal_extract,
    indeterminacy_sums_ab, indeterminacy_sums_ml, normal_indices, resolvent_matrix,
    roundtrip_verify, schur_decompose_ml, ContinuedFraction, DiagonalKey, DiscreteMeasure,
    IndeterminacyReport, MomentSequence, MomentTensor, Parity, Polynomial, Rational, Tail,
};

#[derive(Parser)]
#[command(
    name = "moment-schur",
    about = "Exact diagonal Schur algorithm for Stieltjes-type moment problems",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, clap::ValueEnum)]
enum ParityArg {
    Odd,
    Even,
}

impl From<ParityArg> for Parity {
    fn from(p: ParityArg) -> Parity {
        match p {
            ParityArg::Odd => Parity::Odd,
            ParityArg::Even => Parity::Even,
        }
    }
}

#[derive(Args)]
struct IoArgs {
    /// Input file (defaults to stdin).
    #[arg(short, long)]
    input: Option<String>,
    /// Output file (defaults to stdout).
    #[arg(short, long)]
    output: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Normal indices, their nu/mu classification, and regularity.
    Indices {
        #[command(flatten)]
        io: IoArgs,
    },
    /// Peel a moment sequence into (m, l) continued-fraction atoms.
    Schur {
        #[command(flatten)]
        io: IoArgs,
        #[arg(long, value_enum, default_value = "even")]
        parity: ParityArg,
    },
    /// Resolvent matrix of a moment sequence's fraction.
    Resolvent {
        #[command(flatten)]
        io: IoArgs,
        #[arg(long, value_enum, default_value = "even")]
        parity: ParityArg,
    },
    /// Expand the fraction with the distinguished tail back to a series.
    Expand {
        #[command(flatten)]
        io: IoArgs,
        #[arg(long, value_enum, default_value = "even")]
        parity: ParityArg,
        /// Number of series coefficients to produce.
        #[arg(long)]
        order: Option<usize>,
    },
    /// List the diagonal sequences of a moment tensor.
    Decompose {
        #[command(flatten)]
        io: IoArgs,
        /// Emit only this diagonal's weighted values (comma-separated
        /// offsets), as a moment-sequence JSON ready for `schur`.
        #[arg(long)]
        key: Option<String>,
    },
    /// Solve every nonempty diagonal of a moment tensor.
    Solve {
        #[command(flatten)]
        io: IoArgs,
        #[arg(long, value_enum, default_value = "odd")]
        parity: ParityArg,
    },
    /// Partial sums of the indeterminacy criteria.
    Indeterminacy {
        #[command(flatten)]
        io: IoArgs,
        #[arg(long)]
        depth: usize,
        #[arg(long, value_enum, default_value = "even")]
        parity: ParityArg,
    },
    /// Round-trip a discrete measure through the whole pipeline.
    Verify {
        /// Measure JSON file (alias for --input).
        #[arg(long)]
        measure: Option<String>,
        #[command(flatten)]
        io: IoArgs,
        #[arg(long, value_enum, default_value = "even")]
        parity: ParityArg,
    },
}

/// Moment sequences are accepted either as a bare array of rational
/// strings or wrapped in {"moments": [...]}.
#[derive(Deserialize)]
#[serde(untagged)]
enum SequenceInput {
    Plain(Vec<Rational>),
    Wrapped { moments: Vec<Rational> },
}

impl SequenceInput {
    fn into_values(self) -> Vec<Rational> {
        match self {
            SequenceInput::Plain(v) => v,
            SequenceInput::Wrapped { moments } => moments,
        }
    }
}

enum CliError {
    /// Malformed input: exit 2.
    Input(serde_json::Error),
    /// Anything the library rejected: exit 1.
    Domain(moment_schur::Error),
    /// I/O trouble reading or writing files: exit 2.
    Io(String),
}

impl From<moment_schur::Error> for CliError {
    fn from(e: moment_schur::Error) -> Self {
        CliError::Domain(e)
    }
}

fn verbose() -> bool {
    std::env::var("MOMENT_SCHUR_VERBOSE").is_ok_and(|v| v != "0" && !v.is_empty())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Domain(e)) => {
            let payload = json!({ "error": e });
            eprintln!("{}", payload);
            ExitCode::from(1)
        }
        Err(CliError::Input(e)) => {
            let payload = json!({
                "error": {
                    "kind": "parse",
                    "message": e.to_string(),
                    "line": e.line(),
                    "column": e.column(),
                }
            });
            eprintln!("{}", payload);
            ExitCode::from(2)
        }
        Err(CliError::Io(message)) => {
            let payload = json!({ "error": { "kind": "io", "message": message } });
            eprintln!("{}", payload);
            ExitCode::from(2)
        }
    }
}

fn read_input(path: &Option<String>) -> Result<String, CliError> {
    match path {
        Some(p) => fs::read_to_string(p).map_err(|e| CliError::Io(format!("{}: {}", p, e))),
        None => {
            let mut buf = String::new();
            std::io::stdin()
                .read_to_string(&mut buf)
                .map_err(|e| CliError::Io(format!("stdin: {}", e)))?;
            Ok(buf)
        }
    }
}

/// Serializing through `Value` sorts every object key, so identical
/// inputs always produce byte-identical output.
fn emit<T: serde::Serialize>(io: &IoArgs, value: &T) -> Result<(), CliError> {
    let value = serde_json::to_value(value).expect("serializable");
    let text = format!("{}\n", value);
    match &io.output {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {}", p, e))),
        None => {
            print!("{}", text);
            Ok(())
        }
    }
}

fn parse_sequence(io: &IoArgs) -> Result<MomentSequence, CliError> {
    let text = read_input(&io.input)?;
    let input: SequenceInput = serde_json::from_str(&text).map_err(CliError::Input)?;
    MomentSequence::new(input.into_values()).map_err(CliError::Domain)
}

fn parse_tensor(io: &IoArgs) -> Result<MomentTensor, CliError> {
    let text = read_input(&io.input)?;
    serde_json::from_str(&text).map_err(CliError::Input)
}

fn atoms_json(dec: &moment_schur::MlDecomposition) -> serde_json::Value {
    json!(dec
        .levels
        .iter()
        .map(|lvl| {
            json!({
                "m": lvl.m.coefficients(),
                "l": lvl.l.as_ref().map(Polynomial::coefficients),
            })
        })
        .collect::<Vec<_>>())
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Indices { io } => {
            let s = parse_sequence(&io)?;
            let set = normal_indices(&s);
            let regular = moment_schur::is_regular(&s);
            let mut report = json!({
                "indices": set.index_values(),
                "nu": set.nu_list(),
                "mu": set.mu_list(),
                "regular": regular.regular,
            });
            if !set.mu_undecidable().is_empty() {
                report["mu_undecidable"] = json!(set.mu_undecidable());
            }
            if let Some(w) = regular.witness {
                report["regular_witness"] = json!(w);
            }
            emit(&io, &report)
        }
        Command::Schur { io, parity } => {
            let s = parse_sequence(&io)?;
            let dec = schur_decompose_ml(&s, parity.into())?;
            if verbose() {
                eprintln!(
                    "peeled {} level(s) from {} moment(s)",
                    dec.level_count(),
                    s.len()
                );
            }
            let report = json!({
                "parity": dec.parity,
                "atoms": atoms_json(&dec),
                "levels": dec.level_count(),
                "tail_contract": dec.tail_contract,
                "interpolated": dec.interpolated,
            });
            emit(&io, &report)
        }
        Command::Resolvent { io, parity } => {
            let s = parse_sequence(&io)?;
            let dec = schur_decompose_ml(&s, parity.into())?;
            let cf = ContinuedFraction::from_decomposition(&dec)?;
            let w = resolvent_matrix(&cf)?;
            emit(&io, &w)
        }
        Command::Expand { io, parity, order } => {
            let s = parse_sequence(&io)?;
            let dec = schur_decompose_ml(&s, parity.into())?;
            let order = order.unwrap_or(dec.interpolated);
            let cf = ContinuedFraction::from_decomposition(&dec)?;
            let series = cf_expand(&cf, &Tail::Zero, order)?;
            emit(&io, &series)
        }
        Command::Decompose { io, key } => {
            let t = parse_tensor(&io)?;
            match key {
                Some(raw) => {
                    let offsets = parse_key(&raw)?;
                    let key = DiagonalKey::new(offsets)?;
                    let seq = diagonal_extract(&t, &key)?;
                    emit(&io, &seq.values)
                }
                None => {
                    let diagonals: Vec<serde_json::Value> =
                        moment_schur::multidiag::support_keys(&t)
                            .into_iter()
                            .map(|key| {
                                let seq = diagonal_extract(&t, &key)?;
                                Ok(json!({ "key": key, "values": seq.values }))
                            })
                            .collect::<Result<_, moment_schur::Error>>()?;
                    emit(&io, &json!({ "diagonals": diagonals }))
                }
            }
        }
        Command::Solve { io, parity } => {
            let t = parse_tensor(&io)?;
            let full = assemble_full(&t, parity.into());
            let solutions: Vec<serde_json::Value> = full
                .solutions
                .iter()
                .map(|sol| {
                    json!({
                        "key": sol.key,
                        "sequence": sol.sequence,
                        "levels": sol.decomposition.level_count(),
                        "atoms": atoms_json(&sol.decomposition),
                        "interpolated": sol.decomposition.interpolated,
                    })
                })
                .collect();
            let failures: Vec<serde_json::Value> = full
                .failures
                .iter()
                .map(|(key, e)| json!({ "key": key, "error": e }))
                .collect();
            emit(
                &io,
                &json!({ "solutions": solutions, "failures": failures }),
            )
        }
        Command::Indeterminacy { io, depth, parity } => {
            let s = parse_sequence(&io)?;
            let atoms = ab_cascade(&s)?;
            let pairs = ab_polynomial_pairs(&atoms);
            let ab = indeterminacy_sums_ab(&atoms, &pairs, depth.min(atoms.len()))?;
            let dec = schur_decompose_ml(&s, parity.into())?;
            let m: Vec<Polynomial> = dec.levels.iter().map(|l| l.m.clone()).collect();
            let l: Vec<Polynomial> = dec.levels.iter().filter_map(|l| l.l.clone()).collect();
            let ml = indeterminacy_sums_ml(&m, &l, depth.min(m.len()))?;
            let l_positive = l.iter().all(|p| p.eval_at_zero() > Rational::zero());
            let merged = IndeterminacyReport::merge(ab, ml);
            let mut report = serde_json::to_value(&merged).expect("serializable");
            report["requested_depth"] = json!(depth);
            report["l_positive"] = json!(l_positive);
            emit(&io, &report)
        }
        Command::Verify {
            measure,
            mut io,
            parity,
        } => {
            if io.input.is_none() {
                io.input = measure;
            }
            let text = read_input(&io.input)?;
            let m: DiscreteMeasure = serde_json::from_str(&text).map_err(CliError::Input)?;
            let report = roundtrip_verify(&m, parity.into())?;
            emit(&io, &report)
        }
    }
}

fn parse_key(raw: &str) -> Result<Vec<u32>, CliError> {
    raw.split(',')
        .map(|part| part.trim().parse::<u32>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::Io(format!("bad --key {:?}: {}", raw, e)))
}
