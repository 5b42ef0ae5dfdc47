//! `qualprob` command line.
//!
//! Exit codes: 0 pass / feasible / always, 1 fail / infeasible / not always,
//! 2 usage or parse error, 3 cap exceeded.

use std::ffi::OsString;
use std::io::Write;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use qualprob::axioms::{check_conditional, check_partial, check_unconditional, ScanOptions};
use qualprob::oracle::enumerate_qualitative_probabilities;
use qualprob::ordering::Relation;
use qualprob::{
    parse_problem, realize_complete, realize_partial, shared, CredalSet, Entailment, Error, Event,
    PartialOrdering, Problem, Realizability, Space,
};

pub mod report;

use report::{
    masses, BoundsBody, CheckBody, EntailBody, EnumerateBody, Envelope, RealizeBody, Report, SCHEMA,
};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CAP: i32 = 3;

#[derive(Parser)]
#[command(
    name = "qualprob",
    version,
    about = "Qualitative probability orderings: checks, realizations, credal queries"
)]
struct Cli {
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Check an ordering against the axioms
    Check { file: PathBuf },
    /// Find an agreeing distribution, or a certificate that none exists
    Realize { file: PathBuf },
    /// Does every compatible distribution give lhs at least the probability of rhs?
    Entail {
        file: PathBuf,
        #[arg(long)]
        lhs: String,
        #[arg(long)]
        rhs: String,
    },
    /// Lower and upper probability of an event over all compatible distributions
    Bounds {
        file: PathBuf,
        #[arg(long)]
        event: String,
        #[arg(long)]
        given: Option<String>,
    },
    /// List every qualitative probability over a small space
    Enumerate {
        #[arg(long)]
        worlds: usize,
    },
    /// Run the HTTP session service
    Serve {
        #[arg(long, env = "QUALPROB_LISTEN", default_value = "127.0.0.1:8750")]
        listen: SocketAddr,
        /// Persist session journals here; sessions are in-memory otherwise
        #[arg(long, env = "QUALPROB_JOURNAL_DIR")]
        journal_dir: Option<PathBuf>,
        #[arg(long, env = "QUALPROB_MAX_WORLDS", default_value_t = qualprob_session::DEFAULT_MAX_WORLDS)]
        max_worlds: usize,
        /// Wall-clock limit per query, in milliseconds
        #[arg(long, env = "QUALPROB_QUERY_BUDGET_MS", default_value_t = 10_000)]
        query_budget_ms: u64,
    },
}

/// A failure that ends the command before a report is produced.
struct Abort {
    code: i32,
    message: String,
}

impl Abort {
    fn usage(message: String) -> Self {
        Abort {
            code: EXIT_USAGE,
            message,
        }
    }

    fn core(context: &str, e: Error) -> Self {
        let code = match e {
            Error::CapExceeded { .. } | Error::TooManyWorlds(..) => EXIT_CAP,
            Error::EmptyCredalSet | Error::ZeroProbabilityConditioner => EXIT_FAIL,
            _ => EXIT_USAGE,
        };
        Abort {
            code,
            message: format!("{context}: {e}"),
        }
    }
}

type Outcome = Result<(bool, String), Abort>;

fn emit<T: Report>(format: Format, command: &str, pass: bool, body: &T) -> Outcome {
    let text = match format {
        Format::Text => body.text(),
        Format::Json => {
            let env = Envelope {
                schema: SCHEMA,
                command,
                pass,
                body,
            };
            let mut s = serde_json::to_string_pretty(&env).expect("reports serialize");
            s.push('\n');
            s
        }
    };
    Ok((pass, text))
}

fn load(file: &Path) -> Result<Problem, Abort> {
    let name = file.display();
    let source = std::fs::read_to_string(file).map_err(|e| Abort::usage(format!("{name}: {e}")))?;
    parse_problem(&source).map_err(|e| {
        let code = match e.error {
            Error::CapExceeded { .. } | Error::TooManyWorlds(..) => EXIT_CAP,
            _ => EXIT_USAGE,
        };
        Abort {
            code,
            message: format!("{name}:{}:{}: {}", e.line, e.column, e.error),
        }
    })
}

/// Parses a sentence given on the command line; errors name the flag.
fn sentence(space: &Space, flag: &str, text: &str) -> Result<Event, Abort> {
    space.parse_event(text).map_err(|e| match e {
        Error::Syntax { offset, message } => {
            Abort::usage(format!("--{flag}:1:{}: {message}", offset + 1))
        }
        e => Abort::usage(format!("--{flag}: {e}")),
    })
}

/// The file's judgments with its certainty sections folded in as
/// `e = T` (`ct1`, ...) and `e = F` (`cf1`, ...).
fn judgments(problem: &Problem) -> Result<PartialOrdering, Abort> {
    let mut po = problem.judgments();
    if problem.complete().is_some() {
        return Ok(po);
    }
    let (top, bottom) = (problem.space.top(), problem.space.bottom());
    let certain = problem
        .certain_true
        .iter()
        .map(|e| (e, top, "ct"))
        .enumerate()
        .chain(
            problem
                .certain_false
                .iter()
                .map(|e| (e, bottom, "cf"))
                .enumerate(),
        );
    for (i, (e, side, prefix)) in certain {
        po.insert(format!("{prefix}{}", i + 1), *e, Relation::Eq, side)
            .map_err(|e| Abort::core("certainty", e))?;
    }
    Ok(po)
}

fn credal(problem: &Problem) -> Result<CredalSet, Abort> {
    let cs = CredalSet::new(judgments(problem)?).map_err(|e| Abort::core("credal set", e))?;
    if cs.is_empty() {
        return Err(Abort {
            code: EXIT_FAIL,
            message: "the judgments are inconsistent: no distribution satisfies them all".into(),
        });
    }
    Ok(cs)
}

fn check(format: Format, file: &Path) -> Outcome {
    let problem = load(file)?;
    let body = match problem.complete() {
        Some(o) => {
            let options = ScanOptions::default();
            let report =
                check_unconditional(o, &problem.certain_true, &problem.certain_false, &options)
                    .map_err(|e| Abort::core("check", e))?;
            let conditional = problem
                .conditional
                .as_ref()
                .map(|cs| check_conditional(cs, &options))
                .transpose()
                .map_err(|e| Abort::core("conditional check", e))?;
            CheckBody::new(&problem.space, "complete", &report, conditional.as_ref())
        }
        None => {
            let report = check_partial(&judgments(&problem)?);
            let mut body = CheckBody::new(&problem.space, "partial", &report, None);
            body.notes.push(
                "transitive consistency only; `realize` decides whether some distribution agrees"
                    .into(),
            );
            body
        }
    };
    emit(format, "check", body.pass(), &body)
}

fn realize(format: Format, file: &Path) -> Outcome {
    let problem = load(file)?;
    let outcome = match problem.complete() {
        Some(o) => realize_complete(o),
        None => realize_partial(&judgments(&problem)?),
    }
    .map_err(|e| Abort::core("realize", e))?;
    let body = match &outcome {
        Realizability::Realizable(r) => RealizeBody::Realizable {
            realizable: true,
            margin: r.margin.as_ref().map(qualprob::rational::format),
            distribution: masses(&problem.space, &r.distribution),
        },
        Realizability::NonRealizable(cert) => RealizeBody::certificate(&problem.space, cert),
    };
    emit(format, "realize", body.pass(), &body)
}

fn entail(format: Format, file: &Path, lhs: &str, rhs: &str) -> Outcome {
    let problem = load(file)?;
    let a = sentence(&problem.space, "lhs", lhs)?;
    let b = sentence(&problem.space, "rhs", rhs)?;
    let outcome = credal(&problem)?
        .entails(&a, &b)
        .map_err(|e| Abort::core("entail", e))?;
    let body = EntailBody {
        lhs: problem.space.describe(&a),
        rhs: problem.space.describe(&b),
        always: outcome.is_always(),
        witness: match &outcome {
            Entailment::Always => None,
            Entailment::NotAlways(p) => Some(masses(&problem.space, p)),
        },
    };
    emit(format, "entail", body.always, &body)
}

fn bounds(format: Format, file: &Path, event: &str, given: Option<&str>) -> Outcome {
    let problem = load(file)?;
    let a = sentence(&problem.space, "event", event)?;
    let c = given
        .map(|g| sentence(&problem.space, "given", g))
        .transpose()?;
    let cs = credal(&problem)?;
    let b = match &c {
        None => cs.bounds(&a),
        Some(c) => cs.cond_bounds(&a, c),
    }
    .map_err(|e| Abort::core("bounds", e))?;
    let body = BoundsBody::new(
        problem.space.describe(&a),
        c.map(|c| problem.space.describe(&c)),
        &b,
    );
    emit(format, "bounds", true, &body)
}

fn enumerate(format: Format, worlds: usize) -> Outcome {
    let space = Space::numbered(worlds).map_err(|e| Abort::core("--worlds", e))?;
    let result = enumerate_qualitative_probabilities(&shared(space))
        .map_err(|e| Abort::core("enumerate", e))?;
    let body = EnumerateBody::new(worlds, result.all_realizable, &result.orderings);
    emit(format, "enumerate", result.all_realizable, &body)
}

fn serve(
    listen: SocketAddr,
    journal_dir: Option<PathBuf>,
    max_worlds: usize,
    query_budget_ms: u64,
) -> Outcome {
    let config = qualprob_session::Config {
        max_worlds,
        query_budget: Duration::from_millis(query_budget_ms),
        journal_dir,
    };
    let store = qualprob_session::Store::open(config)
        .map_err(|e| Abort::usage(format!("opening journals: {e}")))?;
    let runtime = tokio::runtime::Runtime::new()
        .map_err(|e| Abort::usage(format!("starting runtime: {e}")))?;
    runtime
        .block_on(qualprob_session::http::serve(listen, store))
        .map_err(|e| Abort::usage(format!("{listen}: {e}")))?;
    Ok((true, String::new()))
}

/// Runs one command line, writing the report to `out` and diagnostics to
/// `err`; returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
                return EXIT_USAGE;
            }
            let _ = write!(out, "{text}");
            return EXIT_PASS;
        }
    };
    let f = cli.format;
    let outcome = match &cli.command {
        Command::Check { file } => check(f, file),
        Command::Realize { file } => realize(f, file),
        Command::Entail { file, lhs, rhs } => entail(f, file, lhs, rhs),
        Command::Bounds { file, event, given } => bounds(f, file, event, given.as_deref()),
        Command::Enumerate { worlds } => enumerate(f, *worlds),
        Command::Serve {
            listen,
            journal_dir,
            max_worlds,
            query_budget_ms,
        } => serve(*listen, journal_dir.clone(), *max_worlds, *query_budget_ms),
    };
    match outcome {
        Ok((pass, text)) => {
            let _ = out.write_all(text.as_bytes());
            if pass {
                EXIT_PASS
            } else {
                EXIT_FAIL
            }
        }
        Err(a) => {
            let _ = writeln!(err, "qualprob: {}", a.message);
            a.code
        }
    }
}
