use std::io::Write;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};

use lexflow::corpus::{generate_corpus, generate_corpus_sized, ingest_dir, CorpusManifest, CorpusStore, StyleMix};
use lexflow::eval::{
    attach_references, build_dataset, evaluate_synthetic, render_csv, render_table, run_eval, EvalCase, EvalRun, SystemKind, TokenF1,
};
use lexflow::index::LexiconLabeler;
use lexflow::orchestrator::{build_store_index, load_knowledge_base, warm_cache, Engine, Entities, QuerySpec, Task};
use lexflow::{ClauseLabel, Config, Error};

/// Writes to stdout; a closed pipe (`lexflow ... | head`) ends the process quietly.
fn emit(s: &str) {
    let mut out = std::io::stdout().lock();
    if let Err(e) = out.write_all(s.as_bytes()).and_then(|_| out.flush()) {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        log::warn!("writing to stdout: {e}");
    }
}

macro_rules! out {
    ($($t:tt)*) => { emit(&format!($($t)*)) };
}

macro_rules! outln {
    ($($t:tt)*) => { emit(&format!("{}\n", format_args!($($t)*))) };
}

#[derive(Parser)]
#[command(name = "lexflow", version, about = "Agentic query engine for custody and fund-services contracts")]
struct Cli {
    /// TOML config file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Corpus store directory.
    #[arg(long, global = true, default_value = "lexflow-data")]
    store: PathBuf,
    /// Log verbosity (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Synthetic corpus generation.
    Corpus {
        #[command(subcommand)]
        command: CorpusCommand,
    },
    /// Normalise, sectionise and label a directory of contracts into the store.
    Ingest {
        #[arg(long = "in")]
        input: PathBuf,
        /// Store directory (overrides --store).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Section index.
    Index {
        #[command(subcommand)]
        command: IndexCommand,
    },
    /// Feature cache.
    Cache {
        #[command(subcommand)]
        command: CacheCommand,
    },
    /// Answer one templated query.
    Ask(AskArgs),
    /// Evaluation datasets and scorecards.
    Eval {
        #[command(subcommand)]
        command: EvalCommand,
    },
    /// Serve the HTTP API.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
    },
}

#[derive(Subcommand)]
enum CorpusCommand {
    Synth {
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 10, conflicts_with = "contracts")]
        families: usize,
        /// Generate exactly this many contracts instead of a family count.
        #[arg(long)]
        contracts: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum IndexCommand {
    Build,
}

#[derive(Subcommand)]
enum CacheCommand {
    Warm,
}

#[derive(Clone, Copy, ValueEnum)]
enum SystemArg {
    Law,
    Baseline,
}

impl From<SystemArg> for SystemKind {
    fn from(s: SystemArg) -> Self {
        match s {
            SystemArg::Law => SystemKind::Law,
            SystemArg::Baseline => SystemKind::Baseline,
        }
    }
}

#[derive(Subcommand)]
enum EvalCommand {
    /// Build the query dataset from the store's manifest.
    Build {
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        per_combo: usize,
        #[arg(long, default_value_t = 10)]
        analytical: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Score a system. Without --dataset, runs on a fresh synthetic corpus.
    Run {
        #[arg(long, value_enum)]
        system: SystemArg,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        dataset: Option<PathBuf>,
        /// Synthetic corpus size when no dataset is given.
        #[arg(long, default_value_t = 200)]
        contracts: usize,
        /// Write the scorecard and case results as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print the report as CSV.
        #[arg(long)]
        csv: bool,
    },
}

#[derive(Args)]
struct AskArgs {
    #[arg(long)]
    fund: Option<String>,
    #[arg(long)]
    trust: Option<String>,
    #[arg(long)]
    custodian: Option<String>,
    #[arg(long)]
    task: String,
    #[arg(long)]
    clause: Option<String>,
    /// Free text appended to the planner prompt.
    #[arg(long)]
    hint: Option<String>,
    /// Print the full answer envelope as JSON.
    #[arg(long)]
    json: bool,
}

fn load_config(path: Option<&Path>) -> anyhow::Result<Config> {
    Ok(match path {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    })
}

fn write_json(path: &Path, v: &impl serde::Serialize) -> anyhow::Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, serde_json::to_vec_pretty(v)?).with_context(|| format!("writing {}", path.display()))
}

fn ask(store: &CorpusStore, config: &Config, a: AskArgs) -> anyhow::Result<()> {
    let task: Task = a.task.parse().map_err(Error::InvalidQuery)?;
    let mut query = QuerySpec::new(Entities { fund: a.fund, trust: a.trust, custodian: a.custodian }, task);
    if let Some(c) = a.clause {
        query = query.with_clause(c.parse::<ClauseLabel>().map_err(Error::InvalidQuery)?);
    }
    query.hint = a.hint;
    query.validate()?;
    let engine = Engine::from_config(load_knowledge_base(store, config)?)?;
    let env = engine.answer(&query)?;
    if a.json {
        outln!("{}", serde_json::to_string_pretty(&env)?);
    } else {
        outln!("{}", env.rendered);
        let cites: Vec<String> = env.citations.iter().map(|c| format!("{}#{}", c.contract_id, c.ordinal)).collect();
        outln!("\n-- {} attempt(s); cites {}", env.attempts.len(), cites.join(", "));
    }
    Ok(())
}

fn print_report(run: &EvalRun, csv: bool) {
    let (law, baseline) = match run.card.system {
        SystemKind::Law => (Some(&run.card), None),
        SystemKind::Baseline => (None, Some(&run.card)),
    };
    if csv {
        out!("{}", render_csv(law, baseline));
    } else {
        out!("{}", render_table(law, baseline));
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let config = load_config(cli.config.as_deref())?;
    match cli.command {
        Command::Corpus { command: CorpusCommand::Synth { seed, families, contracts, out } } => {
            let g = match contracts {
                Some(n) => generate_corpus_sized(seed, n, &StyleMix::default()),
                None => generate_corpus(seed, families, &StyleMix::default()),
            };
            g.write_to_dir(&out)?;
            outln!("wrote {} contracts in {} families to {}", g.docs.len(), g.manifest.families.len(), out.display());
        }
        Command::Ingest { input, out } => {
            let store = CorpusStore::open(out.unwrap_or(cli.store))?;
            let ids = ingest_dir(&input, &store, &LexiconLabeler::builtin(config.index.label_threshold))?;
            let manifest = input.join("manifest.json");
            if manifest.exists() {
                std::fs::copy(&manifest, store.manifest_path())?;
            }
            outln!("ingested {} contracts into {}", ids.len(), store.root().display());
        }
        Command::Index { command: IndexCommand::Build } => {
            let store = CorpusStore::open(&cli.store)?;
            let index = build_store_index(&store, &config)?;
            outln!("indexed {} sections; wrote {}", index.len(), store.index_path().display());
        }
        Command::Cache { command: CacheCommand::Warm } => {
            let store = CorpusStore::open(&cli.store)?;
            let cache = warm_cache(&store, &config)?;
            outln!("cached {} contracts; wrote {}", cache.len(), store.cache_path().display());
        }
        Command::Ask(a) => ask(&CorpusStore::open(&cli.store)?, &config, a)?,
        Command::Eval { command: EvalCommand::Build { seed, per_combo, analytical, out } } => {
            let store = CorpusStore::open(&cli.store)?;
            let manifest = CorpusManifest::load(&store.manifest_path())?;
            let mut cases = build_dataset(&manifest, per_combo, analytical, seed)?;
            attach_references(&mut cases, &load_knowledge_base(&store, &config)?)?;
            write_json(&out, &cases)?;
            outln!("wrote {} cases to {}", cases.len(), out.display());
        }
        Command::Eval { command: EvalCommand::Run { system, seed, dataset, contracts, out, csv } } => {
            let run = match dataset {
                Some(path) => {
                    let cases: Vec<EvalCase> = serde_json::from_slice(&std::fs::read(&path).with_context(|| format!("reading {}", path.display()))?)
                        .map_err(Error::from)?;
                    let engine = Engine::from_config(load_knowledge_base(&CorpusStore::open(&cli.store)?, &config)?)?;
                    run_eval(&cases, system.into(), &engine, &TokenF1)?
                }
                None => {
                    let e = evaluate_synthetic(seed, contracts, &config)?;
                    match system {
                        SystemArg::Law => e.law,
                        SystemArg::Baseline => e.baseline,
                    }
                }
            };
            print_report(&run, csv);
            if let Some(out) = out {
                write_json(&out, &run)?;
            }
        }
        Command::Serve { port, host } => {
            let store = CorpusStore::open(&cli.store)?;
            let state = Arc::new(lexflow_server::AppState::from_store(store, &config)?);
            let addr: SocketAddr = format!("{host}:{port}").parse().context("bad --host/--port")?;
            tokio::runtime::Runtime::new()?.block_on(lexflow_server::serve(state, addr))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let problem = match e.downcast_ref::<Error>() {
                Some(err) => err.to_problem(),
                None => lexflow::ProblemDetail { code: "E_CLI".into(), message: format!("{e:#}"), locus: None },
            };
            eprintln!("{}", serde_json::to_string(&problem).unwrap_or_else(|_| e.to_string()));
            ExitCode::FAILURE
        }
    }
}
