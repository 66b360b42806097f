//! `orbnet`: build, analyze, scan and search quadratic orbital networks.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 usage error, 3 a proven lemma failed.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use orbnet::ring::primes_in;
use orbnet::survey::{
    find_exceptions, scan_space, verify_lemmas, write_records, write_summaries, ExceptionPredicate, ExceptionQuery,
    InvariantSelection, LemmaSet, RecordFormat,
};
use orbnet::{analyze, build_orbital_graph, Error, ExportFormat, QuadraticFamily};

#[derive(Parser)]
#[command(name = "orbnet", version, about = "Quadratic orbital networks over Z_n")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the orbital graph of one family.
    Build {
        #[command(flatten)]
        family: FamilyArgs,
        /// dot, edgelist or json
        #[arg(long, default_value = "dot")]
        format: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute every invariant of one family as JSON.
    Analyze {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Scan every family of X_p^d over a range of primes (or one modulus).
    Scan {
        #[command(flatten)]
        range: RangeArgs,
        /// Scan this single modulus instead of a prime range; composites allowed.
        #[arg(long, conflicts_with_all = ["primes_from", "primes_up_to"])]
        modulus: Option<u64>,
        #[arg(long, short = 'd', default_value_t = 2)]
        degree: usize,
        /// Comma-separated: chi,dim,diam,planar,cliques,components,branch (or all)
        #[arg(long, default_value = "all")]
        invariants: String,
        /// csv or json (one object per line)
        #[arg(long, default_value = "csv")]
        format: String,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Where to write the per-modulus summary; stderr if omitted.
        #[arg(long)]
        summary: Option<PathBuf>,
        #[command(flatten)]
        jobs: JobsArgs,
    },
    /// Check lemma groups exhaustively; exits 3 if a proven statement fails.
    Verify {
        #[command(flatten)]
        range: RangeArgs,
        /// Comma-separated groups: d1,x2,d2,d3,dimension,branch,all
        #[arg(long, default_value = "all")]
        lemmas: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        jobs: JobsArgs,
    },
    /// Search for families with a rare property, resumable through a checkpoint file.
    Exceptions {
        #[command(flatten)]
        range: RangeArgs,
        /// disconnected, planar, k5 or k4max
        #[arg(long)]
        predicate: String,
        #[arg(long, short = 'd', default_value_t = 2)]
        degree: usize,
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        /// Stop after computing this many partitions (resume later from the checkpoint).
        #[arg(long, requires = "checkpoint")]
        max_partitions: Option<usize>,
        /// Only first coefficients in FROM..TO (half-open).
        #[arg(long, value_parser = parse_window)]
        first_coeffs: Option<(u64, u64)>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        jobs: JobsArgs,
    },
}

#[derive(Args)]
struct FamilyArgs {
    /// Any modulus n >= 2, prime or composite.
    #[arg(long, short = 'n')]
    modulus: u64,
    /// Comma-separated coefficients a_i of x^2 + a_i.
    #[arg(long, value_delimiter = ',', required = true)]
    coeffs: Vec<u64>,
}

impl FamilyArgs {
    fn family(&self) -> Result<QuadraticFamily, Error> {
        QuadraticFamily::from_unsorted(self.modulus, self.coeffs.clone())
    }
}

#[derive(Args)]
struct RangeArgs {
    #[arg(long, default_value_t = 2)]
    primes_from: u64,
    #[arg(long)]
    primes_up_to: Option<u64>,
}

impl RangeArgs {
    fn primes(&self) -> Result<Vec<u64>, CliError> {
        let to = self
            .primes_up_to
            .ok_or_else(|| CliError::Usage("--primes-up-to is required".into()))?;
        let primes = primes_in(self.primes_from, to);
        if primes.is_empty() {
            return Err(CliError::Usage(format!("no primes in {}..={to}", self.primes_from)));
        }
        Ok(primes)
    }
}

#[derive(Args)]
struct JobsArgs {
    /// Worker threads; 0 uses every core.
    #[arg(long, env = "ORBNET_JOBS", default_value_t = 0)]
    jobs: usize,
}

fn parse_window(s: &str) -> Result<(u64, u64), String> {
    let (lo, hi) = s.split_once("..").ok_or("expected FROM..TO")?;
    let lo = lo.parse::<u64>().map_err(|e| e.to_string())?;
    let hi = hi.parse::<u64>().map_err(|e| e.to_string())?;
    if lo >= hi {
        return Err("empty window".into());
    }
    Ok((lo, hi))
}

enum CliError {
    Usage(String),
    Io(String),
    LemmaFailed(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        if e.is_usage() {
            CliError::Usage(e.to_string())
        } else {
            CliError::Io(e.to_string())
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

fn sink(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_json<T: serde::Serialize>(value: &T, path: Option<&Path>) -> Result<(), CliError> {
    let mut out = sink(path)?;
    serde_json::to_writer_pretty(&mut out, value)?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Build { family, format, out } => {
            let format: ExportFormat = format.parse()?;
            let graph = build_orbital_graph(&family.family()?);
            let mut w = sink(out.as_deref())?;
            graph.write_to(format, &mut w)?;
            w.flush()?;
        }
        Command::Analyze { family, out } => {
            write_json(&analyze(&family.family()?), out.as_deref())?;
        }
        Command::Scan {
            range,
            modulus,
            degree,
            invariants,
            format,
            out,
            summary,
            jobs,
        } => {
            let sel: InvariantSelection = invariants.parse()?;
            let format: RecordFormat = format.parse()?;
            let moduli = match modulus {
                Some(n) => vec![n],
                None => range.primes()?,
            };
            let scan = scan_space(&moduli, degree, &sel, jobs.jobs)?;
            let mut w = sink(out.as_deref())?;
            write_records(&scan.records, format, &mut w)?;
            w.flush()?;
            match summary {
                Some(p) => write_summaries(&scan.summaries, sink(Some(&p))?)?,
                None => write_summaries(&scan.summaries, io::stderr().lock())?,
            }
        }
        Command::Verify {
            range,
            lemmas,
            out,
            jobs,
        } => {
            let set: LemmaSet = lemmas.parse()?;
            let reports = verify_lemmas(&range.primes()?, &set, jobs.jobs)?;
            write_json(&reports, out.as_deref())?;
            let failed: Vec<String> = reports
                .iter()
                .filter(|r| r.is_proven_failure())
                .map(|r| format!("{} (d={}) at {:?}", r.lemma, r.d, r.counterexample))
                .collect();
            if !failed.is_empty() {
                return Err(CliError::LemmaFailed(failed.join(", ")));
            }
        }
        Command::Exceptions {
            range,
            predicate,
            degree,
            checkpoint,
            max_partitions,
            first_coeffs,
            out,
            jobs,
        } => {
            let predicate: ExceptionPredicate = predicate.parse()?;
            let mut query = ExceptionQuery::new(predicate, degree, range.primes()?);
            query.first_coeffs = first_coeffs;
            let outcome = find_exceptions(&query, checkpoint.as_deref(), jobs.jobs, max_partitions)?;
            if !outcome.complete {
                eprintln!(
                    "stopped after {}/{} partitions; rerun with the same checkpoint to resume",
                    outcome.partitions_done, outcome.partitions_total
                );
            }
            write_json(&outcome, out.as_deref())?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::LemmaFailed(msg)) => {
            eprintln!("proven lemma failed: {msg}");
            ExitCode::from(3)
        }
    }
}
