//! Command line front end: extraction, verification, oracle queries,
//! instance generation, and the experiment sweeps.
//!
//! Exit codes are disjoint across all subcommands: 0 success, 1 I/O or
//! parse failure, 2 precondition failure (including oracle budget
//! exhaustion), 3 internal defect or a sweep counterexample — the latter
//! two must never occur on valid input.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use berge::extract::{extract, extract_theorem2, Outcome};
use berge::gen::{generate, Family, GeneratorSpec};
use berge::hypergraph::{Hypergraph, VertexId};
use berge::io::{parse_hypergraph, serialize_hypergraph, write_atomic, CertificateFile};
use berge::oracle::{exists_cycle_through, exists_path_from, oracle_report, OracleError};
use berge::{experiment, verify_cycle, verify_path};

const EXIT_IO: u8 = 1;
const EXIT_PRECONDITION: u8 = 2;
const EXIT_DEFECT: u8 = 3;

/// Environment variable holding the default oracle node budget.
const BUDGET_ENV: &str = "BERGE_ORACLE_BUDGET";

#[derive(Parser)]
#[command(
    name = "berge",
    about = "Certified Berge paths and cycles in uniform hypergraphs",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Extract a verified Berge path or cycle certificate.
    Extract(ExtractArgs),
    /// Re-verify a certificate file against its hypergraph.
    Verify(VerifyArgs),
    /// Exact exponential-time queries: longest path, fixed-start paths,
    /// fixed-vertex cycles.
    Oracle(OracleArgs),
    /// Generate instance families in the hypergraph text format.
    Gen(GenArgs),
    /// Run a verification sweep and print its report.
    Experiment(ExperimentArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    /// Rooted mode: connected input with e >= n; emits a path of length r+1
    /// from the chosen vertex or a cycle of length r+1 through it.
    Theorem3,
    /// Path-only mode: input with e > n (connectivity not required); emits a
    /// path of length exactly r+1.
    Theorem2,
}

#[derive(Args)]
struct ExtractArgs {
    /// Hypergraph file.
    #[arg(short, long)]
    input: PathBuf,
    /// Start vertex (required in theorem3 mode; ignored in theorem2 mode).
    #[arg(short, long)]
    vertex: Option<u32>,
    #[arg(short, long, value_enum, default_value = "theorem3")]
    mode: Mode,
    /// Certificate output file (stdout when omitted).
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Hypergraph file.
    #[arg(short = 'i', long)]
    hypergraph: PathBuf,
    /// Certificate file.
    #[arg(short, long)]
    certificate: PathBuf,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(short, long)]
    input: PathBuf,
    /// Exact longest Berge path with witness and per-vertex maxima.
    #[arg(long, conflicts_with_all = ["from", "cycle_through"])]
    longest: bool,
    /// With --longest: also decide, per vertex, whether a cycle of this
    /// length passes through it.
    #[arg(long, requires = "longest")]
    cycle_k: Option<u32>,
    /// Decide whether a Berge path of length --k starts at this vertex.
    #[arg(long, conflicts_with = "cycle_through")]
    from: Option<u32>,
    /// Decide whether a Berge cycle of length --k contains this vertex.
    #[arg(long)]
    cycle_through: Option<u32>,
    /// Exact target length for --from / --cycle-through.
    #[arg(short, long)]
    k: Option<u32>,
    /// Search budget in nodes (default from BERGE_ORACLE_BUDGET or 10^7).
    #[arg(short, long)]
    budget: Option<u64>,
    /// Emit the report as JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    CompleteBlocks,
    GluedBlocks,
    RandomConnected,
    RandomSurplus,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    family: FamilyArg,
    #[arg(short, long)]
    r: u32,
    #[arg(long)]
    block_size: Option<u32>,
    #[arg(long)]
    blocks: Option<u32>,
    #[arg(short, long)]
    n: Option<u32>,
    #[arg(short, long)]
    m: Option<u32>,
    #[arg(long)]
    surplus: Option<u32>,
    #[arg(short, long, default_value = "0")]
    seed: u64,
    /// Output file (stdout when omitted).
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    ExhaustiveR2,
    #[value(name = "exhaustive-r3-n5")]
    ExhaustiveR3N5,
    Random,
    Bounds,
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long, value_enum)]
    suite: Suite,
    #[arg(short, long, default_value = "0")]
    seed: u64,
    /// Largest vertex count for the exhaustive graph sweep.
    #[arg(long, default_value = "6")]
    max_n: u32,
    /// Instances per (r, n, surplus) combination in the random sweep.
    #[arg(long, default_value = "3334")]
    per_combo: u32,
    /// Fan instances out across worker threads (reports stay byte-identical
    /// to sequential runs).
    #[arg(long)]
    parallel: bool,
    #[arg(short, long)]
    budget: Option<u64>,
}

fn default_budget(explicit: Option<u64>) -> u64 {
    explicit
        .or_else(|| {
            std::env::var(BUDGET_ENV)
                .ok()
                .and_then(|s| s.parse().ok())
        })
        .unwrap_or(berge::DEFAULT_BUDGET)
}

fn fail(code: u8, reason: &str, message: impl std::fmt::Display) -> ExitCode {
    eprintln!("{{\"error\": \"{reason}\", \"message\": \"{message}\"}}");
    ExitCode::from(code)
}

fn load_hypergraph(path: &PathBuf) -> Result<Hypergraph, ExitCode> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| fail(EXIT_IO, "io", format_args!("{}: {e}", path.display())))?;
    parse_hypergraph(&text).map_err(|e| fail(EXIT_IO, "parse", e))
}

fn emit(output: Option<&PathBuf>, contents: &str) -> Result<(), ExitCode> {
    match output {
        Some(path) => write_atomic(path, contents).map_err(|e| fail(EXIT_IO, "io", e)),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn cmd_extract(args: &ExtractArgs) -> Result<(), ExitCode> {
    let h = load_hypergraph(&args.input)?;
    let (outcome, trace) = match args.mode {
        Mode::Theorem3 => {
            let v = args.vertex.ok_or_else(|| {
                fail(EXIT_PRECONDITION, "precondition", "theorem3 mode needs --vertex")
            })?;
            let result = extract(&h, VertexId(v)).map_err(|e| {
                let code = if e.is_precondition() {
                    EXIT_PRECONDITION
                } else {
                    EXIT_DEFECT
                };
                fail(code, e.reason_token(), e)
            })?;
            (result.outcome, result.trace)
        }
        Mode::Theorem2 => {
            let result = extract_theorem2(&h).map_err(|e| {
                let code = if e.is_precondition() {
                    EXIT_PRECONDITION
                } else {
                    EXIT_DEFECT
                };
                fail(code, e.reason_token(), e)
            })?;
            (Outcome::Path(result.path), result.trace)
        }
    };
    let file = CertificateFile::from_outcome(&h, &outcome, &trace);
    emit(args.output.as_ref(), &file.to_json())?;
    if args.output.is_some() {
        let (kind, len) = match &outcome {
            Outcome::Path(p) => ("path", p.len()),
            Outcome::Cycle(c) => ("cycle", c.len()),
        };
        eprintln!("wrote a length-{len} {kind} certificate");
    }
    Ok(())
}

fn cmd_verify(args: &VerifyArgs) -> Result<(), ExitCode> {
    let h = load_hypergraph(&args.hypergraph)?;
    let text = std::fs::read_to_string(&args.certificate)
        .map_err(|e| fail(EXIT_IO, "io", format_args!("{}: {e}", args.certificate.display())))?;
    let file = CertificateFile::from_json(&text).map_err(|e| fail(EXIT_IO, "parse", e))?;
    let outcome = file
        .to_outcome(&h)
        .map_err(|e| fail(EXIT_PRECONDITION, "inconsistent_certificate", e))?;
    let checked = match &outcome {
        Outcome::Path(p) => verify_path(&h, p).map(|_| "path"),
        Outcome::Cycle(c) => verify_cycle(&h, c).map(|_| "cycle"),
    };
    match checked {
        Ok(kind) => {
            println!("valid length-{} {kind} certificate", outcome.len());
            Ok(())
        }
        Err(violation) => Err(fail(EXIT_PRECONDITION, "rejected", violation)),
    }
}

fn oracle_failure(e: OracleError) -> ExitCode {
    match e {
        OracleError::BudgetExceeded { .. } => fail(EXIT_PRECONDITION, "budget_exceeded", e),
        OracleError::Generation(_) => fail(EXIT_PRECONDITION, "generation", e),
    }
}

fn cmd_oracle(args: &OracleArgs) -> Result<(), ExitCode> {
    let h = load_hypergraph(&args.input)?;
    let budget = default_budget(args.budget);
    if let Some(v) = args.from {
        let k = args
            .k
            .ok_or_else(|| fail(EXIT_PRECONDITION, "precondition", "--from needs --k"))?;
        let witness = exists_path_from(&h, VertexId(v), k, budget).map_err(oracle_failure)?;
        print_existence(args.json, "path_from", v, k, witness.map(|w| {
            (w.vertices().iter().map(|x| x.0).collect(), w.edges().iter().map(|e| e.0).collect())
        }));
        return Ok(());
    }
    if let Some(v) = args.cycle_through {
        let k = args
            .k
            .ok_or_else(|| fail(EXIT_PRECONDITION, "precondition", "--cycle-through needs --k"))?;
        let witness = exists_cycle_through(&h, VertexId(v), k, budget).map_err(oracle_failure)?;
        print_existence(args.json, "cycle_through", v, k, witness.map(|w| {
            (w.vertices().iter().map(|x| x.0).collect(), w.edges().iter().map(|e| e.0).collect())
        }));
        return Ok(());
    }
    // Default: the longest-path report.
    let report = oracle_report(&h, args.cycle_k, budget).map_err(oracle_failure)?;
    if args.json {
        let per_vertex: serde_json::Map<String, serde_json::Value> = report
            .per_vertex
            .iter()
            .map(|(v, pv)| {
                (
                    v.to_string(),
                    serde_json::json!({
                        "max_path_from": pv.max_path_from,
                        "cycle_through": pv.cycle_through,
                    }),
                )
            })
            .collect();
        let json = serde_json::json!({
            "longest_path_length": report.longest_path_length,
            "witness_vertices": report.witness.as_ref().map(|w| w.vertices().iter().map(|x| x.0).collect::<Vec<_>>()),
            "witness_edge_ids": report.witness.as_ref().map(|w| w.edges().iter().map(|e| e.0).collect::<Vec<_>>()),
            "per_vertex": per_vertex,
        });
        println!("{}", serde_json::to_string_pretty(&json).unwrap());
    } else {
        println!("longest Berge path: {}", report.longest_path_length);
        if let Some(w) = &report.witness {
            println!(
                "witness vertices: {:?}",
                w.vertices().iter().map(|x| x.0).collect::<Vec<_>>()
            );
            println!(
                "witness edge ids: {:?}",
                w.edges().iter().map(|e| e.0).collect::<Vec<_>>()
            );
        }
        for (v, pv) in &report.per_vertex {
            match pv.cycle_through {
                Some(c) => println!(
                    "vertex {v}: max path {} cycle({}) {}",
                    pv.max_path_from,
                    args.cycle_k.unwrap_or(0),
                    c
                ),
                None => println!("vertex {v}: max path {}", pv.max_path_from),
            }
        }
    }
    Ok(())
}

fn print_existence(
    json: bool,
    what: &str,
    v: u32,
    k: u32,
    witness: Option<(Vec<u32>, Vec<u32>)>,
) {
    if json {
        let j = serde_json::json!({
            "query": what,
            "vertex": v,
            "k": k,
            "exists": witness.is_some(),
            "witness_vertices": witness.as_ref().map(|(vs, _)| vs),
            "witness_edge_ids": witness.as_ref().map(|(_, es)| es),
        });
        println!("{}", serde_json::to_string_pretty(&j).unwrap());
    } else {
        match witness {
            Some((vs, es)) => {
                println!("{what}(v={v}, k={k}): true");
                println!("witness vertices: {vs:?}");
                println!("witness edge ids: {es:?}");
            }
            None => println!("{what}(v={v}, k={k}): false"),
        }
    }
}

fn cmd_gen(args: &GenArgs) -> Result<(), ExitCode> {
    let missing =
        |what: &str| fail(EXIT_PRECONDITION, "precondition", format_args!("missing --{what}"));
    let family = match args.family {
        FamilyArg::CompleteBlocks => Family::CompleteBlocks {
            block_size: args.block_size.ok_or_else(|| missing("block-size"))?,
            blocks: args.blocks.ok_or_else(|| missing("blocks"))?,
        },
        FamilyArg::GluedBlocks => Family::GluedBlocks {
            block_size: args.block_size.ok_or_else(|| missing("block-size"))?,
            blocks: args.blocks.ok_or_else(|| missing("blocks"))?,
        },
        FamilyArg::RandomConnected => Family::RandomConnected {
            n: args.n.ok_or_else(|| missing("n"))?,
            m: args.m.ok_or_else(|| missing("m"))?,
            seed: args.seed,
        },
        FamilyArg::RandomSurplus => Family::RandomSurplus {
            n: args.n.ok_or_else(|| missing("n"))?,
            surplus: args.surplus.ok_or_else(|| missing("surplus"))?,
            seed: args.seed,
        },
    };
    let spec = GeneratorSpec { r: args.r, family };
    let h = generate(&spec).map_err(|e| fail(EXIT_PRECONDITION, "generation", e))?;
    emit(args.output.as_ref(), &serialize_hypergraph(&h))
}

fn cmd_experiment(args: &ExperimentArgs) -> Result<(), ExitCode> {
    let budget = default_budget(args.budget);
    let report = match args.suite {
        Suite::ExhaustiveR2 => experiment::suite_exhaustive_r2(args.max_n, args.parallel, budget),
        Suite::ExhaustiveR3N5 => experiment::suite_exhaustive_r3_n5(args.parallel, budget),
        Suite::Random => {
            let cfg = experiment::RandomSuiteConfig {
                seed: args.seed,
                per_combo: args.per_combo,
                ..Default::default()
            };
            experiment::suite_random(&cfg, args.parallel)
        }
        Suite::Bounds => experiment::suite_bounds(args.seed, budget),
    };
    print!("{report}");
    if report.ok() {
        Ok(())
    } else {
        Err(fail(
            EXIT_DEFECT,
            "counterexample",
            format_args!("{} counterexamples", report.counterexamples.len()),
        ))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Extract(args) => cmd_extract(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Oracle(args) => cmd_oracle(args),
        Command::Gen(args) => cmd_gen(args),
        Command::Experiment(args) => cmd_experiment(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(code) => code,
    }
}
