//! `dyncade`: load a colored graph and a query, optionally replay updates,
//! and answer in one of the four modes, with an optional brute-force check.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 parse or validation error,
//! 3 oracle mismatch, 4 degree bound exceeded during replay.

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dyncade_core::bench::{run_size, BenchConfig, CSV_HEADER, DEFAULT_QUERY};
use dyncade_core::engine::{Engine, EngineError, EngineMode};
use dyncade_core::eval::{oracle_answers, oracle_answers_with, AllPairs};
use dyncade_core::graph::text::{parse_graph, parse_updates};
use dyncade_core::graph::{DegreePolicy, DynamicGraph, GraphError, UpdateOp, VertexId};
use dyncade_core::query::NormalizedQuery;

#[derive(Parser, Debug)]
#[command(name = "dyncade", version, about = "Dynamic first-order queries on colored graphs of bounded or low degree")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Args, Debug)]
struct Opts {
    /// Engine mode.
    #[arg(long, value_enum, global = true, default_value = "bounded")]
    mode: Mode,
    /// Degree bound d.
    #[arg(long, global = true)]
    degree: Option<u32>,
    /// Low-degree constant C in the cap C * n^eps.
    #[arg(long, global = true)]
    c: Option<f64>,
    /// Low-degree exponent eps in the cap C * n^eps.
    #[arg(long, global = true)]
    eps: Option<f64>,
    /// Graph file.
    #[arg(long, global = true)]
    graph: Option<PathBuf>,
    /// Query file.
    #[arg(long, global = true)]
    query: Option<PathBuf>,
    /// Update stream, applied before answering (or step by step in `replay`).
    #[arg(long, global = true)]
    updates: Option<PathBuf>,
    /// Also run the brute-force oracle and fail on any difference.
    #[arg(long, global = true)]
    oracle: bool,
    /// Write results here instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    Bounded,
    Low,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum AfterEach {
    Check,
    Count,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print whether the query has an answer.
    Check,
    /// Print the number of answers.
    Count,
    /// Print whether a tuple is an answer.
    Test {
        /// Comma-separated vertex ids.
        #[arg(long, value_delimiter = ',', required = true)]
        tuple: Vec<u32>,
    },
    /// Print the answers, one per line, in lexicographic order.
    Enumerate {
        #[arg(long)]
        limit: Option<usize>,
    },
    /// Apply the update stream, printing an answer after each update.
    Replay {
        #[arg(long, value_enum)]
        after_each: AfterEach,
    },
    /// Time preprocessing, updates and enumeration delay on random graphs.
    Bench {
        /// Comma-separated graph sizes.
        #[arg(long, value_delimiter = ',', default_value = "1000,10000,100000")]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Timed updates per size.
        #[arg(long, default_value_t = 1000)]
        steps: usize,
        /// Timed preprocessing runs per size.
        #[arg(long, default_value_t = 3)]
        repeats: usize,
    },
}

struct Failure {
    code: u8,
    msg: String,
}

impl Failure {
    fn usage(msg: impl Into<String>) -> Self {
        Failure { code: 2, msg: msg.into() }
    }

    fn io(path: &Path, e: io::Error) -> Self {
        Failure { code: 1, msg: format!("{}: {e}", path.display()) }
    }

    fn mismatch(msg: impl Into<String>) -> Self {
        Failure { code: 3, msg: format!("oracle mismatch: {}", msg.into()) }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure { code: 1, msg: e.to_string() }
    }
}

impl From<EngineError> for Failure {
    fn from(e: EngineError) -> Self {
        Failure::usage(e.to_string())
    }
}

/// Mode and flag combinations, checked before any file is read.
fn validate(cli: &Cli) -> Result<DegreePolicy, Failure> {
    let o = &cli.opts;
    let policy = match (o.degree, o.c, o.eps) {
        (Some(d), None, None) => DegreePolicy::Bounded(d),
        (None, Some(c), Some(eps)) => DegreePolicy::LowDegree { c, eps },
        (None, None, None) => return Err(Failure::usage("give --degree, or --c and --eps")),
        (Some(_), ..) => return Err(Failure::usage("--degree cannot be combined with --c or --eps")),
        _ => return Err(Failure::usage("--c and --eps go together")),
    };
    policy.validate().map_err(|e| Failure::usage(e.to_string()))?;
    if o.mode == Mode::Bounded && !matches!(policy, DegreePolicy::Bounded(_)) {
        return Err(Failure::usage("--mode bounded needs --degree"));
    }
    match cli.command {
        Command::Bench { .. } => {
            if o.graph.is_some() || o.updates.is_some() || o.oracle {
                return Err(Failure::usage("bench takes no --graph, --updates or --oracle"));
            }
        }
        _ => {
            if o.graph.is_none() || o.query.is_none() {
                return Err(Failure::usage("--graph and --query are required"));
            }
        }
    }
    if matches!(cli.command, Command::Replay { .. }) && o.updates.is_none() {
        return Err(Failure::usage("replay needs --updates"));
    }
    Ok(policy)
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::io(path, e))
}

fn load_query(path: &Path) -> Result<NormalizedQuery, Failure> {
    NormalizedQuery::parse(&read(path)?).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn load_graph(path: &Path, policy: DegreePolicy) -> Result<DynamicGraph, Failure> {
    parse_graph(&read(path)?, policy).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn load_updates(path: &Path) -> Result<Vec<(usize, UpdateOp)>, Failure> {
    parse_updates(&read(path)?).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

/// Checks the whole stream on a copy of the graph, so a rejected run prints
/// nothing.
fn validate_stream(g: &DynamicGraph, path: &Path, ops: &[(usize, UpdateOp)]) -> Result<(), Failure> {
    let mut shadow = g.clone();
    for (line, op) in ops {
        if let Err(e) = shadow.apply(op) {
            let code = if matches!(e, GraphError::DegreeExceeded { .. }) { 4 } else { 2 };
            return Err(Failure { code, msg: format!("{}: line {line}: {e}", path.display()) });
        }
    }
    Ok(())
}

fn engine_mode(m: Mode) -> EngineMode {
    match m {
        Mode::Bounded => EngineMode::BoundedDegree,
        Mode::Low => EngineMode::LowDegree,
    }
}

fn tuple_line(t: &[VertexId]) -> String {
    t.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
}

fn run(cli: Cli) -> Result<(), Failure> {
    let policy = validate(&cli)?;
    let o = &cli.opts;
    let mut out: Box<dyn Write> = match &o.output {
        Some(p) => Box::new(BufWriter::new(fs::File::create(p).map_err(|e| Failure::io(p, e))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    let mode = engine_mode(o.mode);

    if let Command::Bench { sizes, seed, steps, repeats } = &cli.command {
        let query = match &o.query {
            Some(p) => load_query(p)?,
            None => NormalizedQuery::parse(DEFAULT_QUERY).expect("built-in query"),
        };
        let cfg = BenchConfig { mode, policy, seed: *seed, repeats: *repeats, updates: *steps, ..BenchConfig::default() };
        writeln!(out, "{CSV_HEADER}")?;
        for &n in sizes {
            writeln!(out, "{}", run_size(&cfg, &query, n)?.csv())?;
        }
        out.flush()?;
        return Ok(());
    }

    let query = load_query(o.query.as_deref().expect("validated"))?;
    let graph = load_graph(o.graph.as_deref().expect("validated"), policy)?;
    let updates = match &o.updates {
        Some(p) => {
            let ops = load_updates(p)?;
            validate_stream(&graph, p, &ops)?;
            ops
        }
        None => Vec::new(),
    };
    let mut engine = Engine::preprocess(graph, query, mode)?;

    if let Command::Replay { after_each } = cli.command {
        for (_, op) in &updates {
            engine.update(op)?;
            let oracle = o.oracle.then(|| oracle_answers(engine.graph(), engine.query()));
            let line = match after_each {
                AfterEach::Check => {
                    let got = engine.check();
                    if let Some(want) = oracle.map(|a| !a.is_empty()) {
                        if got != want {
                            return Err(Failure::mismatch(format!("after {op}: check {got}, oracle {want}")));
                        }
                    }
                    got.to_string()
                }
                AfterEach::Count => {
                    let got = engine.count();
                    if let Some(want) = oracle.map(|a| a.len() as u64) {
                        if got != want {
                            return Err(Failure::mismatch(format!("after {op}: count {got}, oracle {want}")));
                        }
                    }
                    got.to_string()
                }
            };
            writeln!(out, "{line}")?;
        }
        out.flush()?;
        return Ok(());
    }

    for (_, op) in &updates {
        engine.update(op)?;
    }
    let oracle = || oracle_answers_with(&AllPairs::new(engine.graph()), engine.query());
    match &cli.command {
        Command::Check => {
            let got = engine.check();
            if o.oracle && got == oracle().is_empty() {
                return Err(Failure::mismatch(format!("check {got}, oracle {}", !got)));
            }
            writeln!(out, "{got}")?;
        }
        Command::Count => {
            let got = engine.count();
            if o.oracle {
                let want = oracle().len() as u64;
                if got != want {
                    return Err(Failure::mismatch(format!("count {got}, oracle {want}")));
                }
            }
            writeln!(out, "{got}")?;
        }
        Command::Test { tuple } => {
            let t: Vec<VertexId> = tuple.iter().map(|&v| VertexId(v)).collect();
            let got = engine.test(&t)?;
            if o.oracle && got != oracle().binary_search(&t).is_ok() {
                return Err(Failure::mismatch(format!("test {got}, oracle {}", !got)));
            }
            writeln!(out, "{got}")?;
        }
        Command::Enumerate { limit } => {
            let limit = limit.unwrap_or(usize::MAX);
            let want = o.oracle.then(oracle);
            let mut cursor = engine.open_cursor();
            let mut i = 0;
            while i < limit {
                let Some(t) = engine.next(&mut cursor)? else { break };
                if let Some(w) = &want {
                    if w.get(i).map(Vec::as_slice) != Some(t.as_slice()) {
                        return Err(Failure::mismatch(format!("answer {i} is {t:?}, oracle has {:?}", w.get(i))));
                    }
                }
                writeln!(out, "{}", tuple_line(&t))?;
                i += 1;
            }
            if let Some(w) = &want {
                if i < limit && i != w.len() {
                    return Err(Failure::mismatch(format!("{i} answers, oracle has {}", w.len())));
                }
            }
        }
        Command::Replay { .. } | Command::Bench { .. } => unreachable!("handled above"),
    }
    out.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("dyncade: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
