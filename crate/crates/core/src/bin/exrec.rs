use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use exrec::config::{CliConfig, OutputFormat};
use exrec::corpus::remote::{ReqwestTransport, DEFAULT_LIMIT, DEFAULT_ORGS};
use exrec::corpus::{apply_filter, fetch_remote, load_local, CorpusFilter, RemoteConfig};
use exrec::eval::{evaluate, CaseFile, EvalOptions, Oracle};
use exrec::graph::extract_usage_graph;
use exrec::model::parse;
use exrec::quality::quality_score;
use exrec::query::{formulate_query, SearchQuery};
use exrec::ranking::{explain, rank, render_table};
use exrec::Error;

const EXIT_USAGE: u8 = 1;
const EXIT_PIPELINE: u8 = 2;
const EXIT_NETWORK: u8 = 3;

#[derive(Parser)]
#[command(name = "exrec", version, about = "Recommend exception-handling code examples for a context fragment")]
struct Cli {
    /// Config file (TOML); defaults to ./exrec.toml when present.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output format; overrides the config file.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Log more (repeat for debug output).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Emit {
    Graph,
    Tokens,
    Handlers,
    Quality,
}

#[derive(Subcommand)]
enum Command {
    /// Show the usage graph, tokens, handlers or quality metrics of a file.
    Analyze {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "graph")]
        emit: Emit,
    },
    /// Print the search query for a context file.
    Query {
        context: PathBuf,
        #[arg(long)]
        exception: Option<String>,
    },
    /// Run a code search and store the results in the cache.
    Fetch {
        /// Query such as "IOException URL".
        #[arg(long)]
        query: String,
        #[arg(long, value_delimiter = ',')]
        orgs: Option<Vec<String>>,
        #[arg(long, default_value_t = DEFAULT_LIMIT)]
        limit: usize,
        /// Cache directory; defaults to the configured one.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rank candidate examples for a context file.
    Recommend {
        context: PathBuf,
        #[arg(long, conflicts_with = "remote", required_unless_present = "remote")]
        corpus: Option<PathBuf>,
        /// Search remotely (cached) instead of reading a directory.
        #[arg(long)]
        remote: bool,
        #[arg(long, value_delimiter = ',')]
        orgs: Option<Vec<String>>,
        #[arg(long, default_value_t = DEFAULT_LIMIT)]
        limit: usize,
        #[arg(long)]
        exception: Option<String>,
        #[arg(long)]
        top: Option<usize>,
        /// Weight file (TOML); overrides the config file.
        #[arg(long)]
        weights: Option<PathBuf>,
        /// Rank every candidate, skipping the corpus filter.
        #[arg(long)]
        no_filter: bool,
        /// Print the full metric breakdown of each result.
        #[arg(long)]
        explain: bool,
    },
    /// Score rankings against an oracle.
    Evaluate {
        #[arg(long)]
        cases: PathBuf,
        #[arg(long)]
        oracle: PathBuf,
        #[arg(long, value_delimiter = ',', default_values_t = [5, 10, 15])]
        ks: Vec<usize>,
        #[arg(long)]
        weights: Option<PathBuf>,
        /// Write the report here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            e if e.is_network() => EXIT_NETWORK,
            Error::Config { .. } => EXIT_USAGE,
            _ => EXIT_PIPELINE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure {
        code: EXIT_PIPELINE,
        message: format!("cannot read {}: {e}", path.display()),
    })
}

fn json<T: serde::Serialize>(value: &T) -> Result<String, Failure> {
    serde_json::to_string_pretty(value)
        .map(|s| s + "\n")
        .map_err(|e| Failure::from(Error::from(e)))
}

fn orgs_or_default(orgs: Option<Vec<String>>) -> Vec<String> {
    orgs.unwrap_or_else(|| DEFAULT_ORGS.iter().map(|s| s.to_string()).collect())
}

fn remote_config(cache_dir: PathBuf) -> RemoteConfig {
    RemoteConfig {
        cache_dir: Some(cache_dir),
        ..RemoteConfig::from_env()
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let cfg = CliConfig::discover(cli.config.as_deref()).map_err(|e| usage(e.to_string()))?;
    let format = match cli.format {
        Some(f) => f,
        None => match cfg.output_format {
            OutputFormat::Text => Format::Text,
            OutputFormat::Json => Format::Json,
        },
    };
    let mut out = String::new();

    match cli.command {
        Command::Analyze { file, emit } => {
            let unit = parse(&read(&file)?);
            out = match (emit, format) {
                (Emit::Graph, Format::Json) => extract_usage_graph(&unit)?.to_canonical_json() + "\n",
                (Emit::Graph, _) => extract_usage_graph(&unit)?.to_dot(),
                (Emit::Tokens, Format::Json) => json(&unit.tokens)?,
                (Emit::Tokens, _) => unit
                    .tokens
                    .iter()
                    .map(|t| format!("{:?}\t{}\n", t.kind, t.text))
                    .collect(),
                (Emit::Handlers, Format::Json) => json(&unit.handler_summary())?,
                (Emit::Handlers, _) => {
                    let h = unit.handler_summary();
                    let mut s = format!(
                        "try blocks: {}\nfinally blocks: {}\nhandler sloc: {} of {}\n",
                        h.try_blocks, h.finally_blocks, h.handler_sloc, unit.sloc
                    );
                    for c in &h.catch_clauses {
                        s += &format!(
                            "catch {}: {} significant of {} statements\n",
                            c.exception_types.join(" | "),
                            c.significant_count(),
                            c.statements.len()
                        );
                    }
                    s
                }
                (Emit::Quality, fmt) => {
                    let q = quality_score(&unit, &cfg.weights()?.quality)?;
                    if matches!(fmt, Format::Json) {
                        json(&q)?
                    } else {
                        format!(
                            "RA  {:.4}\nAHA {:.4}\nHCR {:.4}\nq_ehc {:.4}\n",
                            q.ra, q.aha, q.hcr, q.q_ehc_raw
                        )
                    }
                }
            };
        }

        Command::Query { context, exception } => {
            let unit = parse(&read(&context)?);
            let q = formulate_query(&unit, &cfg.knowledge_base()?, exception.as_deref())?;
            out = match format {
                Format::Json => json(&q)?,
                _ => format!("{}\n", q.rendered),
            };
        }

        Command::Fetch {
            query,
            orgs,
            limit,
            out: dir,
        } => {
            let terms: Vec<&str> = query.split_whitespace().collect();
            let [exception, class] = terms[..] else {
                return Err(usage("--query takes two terms: \"<Exception> <Class>\""));
            };
            let q = SearchQuery::new(exception, class);
            let orgs = orgs_or_default(orgs);
            let rc = remote_config(dir.unwrap_or_else(|| cfg.cache_dir.clone()));
            let transport = ReqwestTransport::new()?;
            let fetched = fetch_remote(&q, &orgs, limit, &rc, &transport)?;
            for d in &fetched.diagnostics {
                eprintln!("warning: {d}");
            }
            out = match format {
                Format::Json => json(&fetched.candidates.iter().map(|c| (&c.id, c.origin.to_string())).collect::<Vec<_>>())?,
                _ => {
                    let mut s = format!(
                        "{} candidates for \"{}\"{}{}\n",
                        fetched.candidates.len(),
                        q.rendered,
                        if fetched.from_cache { " (cached)" } else { "" },
                        if fetched.complete { "" } else { " (incomplete, not cached)" }
                    );
                    for c in &fetched.candidates {
                        s += &format!("{}  {}\n", c.id, c.origin);
                    }
                    s
                }
            };
        }

        Command::Recommend {
            context,
            corpus,
            remote,
            orgs,
            limit,
            exception,
            top,
            weights,
            no_filter,
            explain: verbose,
        } => {
            let unit = parse(&read(&context)?);
            let weights = match weights {
                Some(p) => exrec::ranking::WeightConfig::load(&p)?,
                None => cfg.weights()?,
            };
            let k = top.unwrap_or(cfg.top_k);
            if k == 0 {
                return Err(usage("--top must be at least 1"));
            }
            let query = formulate_query(&unit, &cfg.knowledge_base()?, exception.as_deref());
            let candidates = if remote {
                let q = query.as_ref().map_err(|e| Failure::from(clone_err(e)))?;
                let rc = remote_config(cfg.cache_dir.clone());
                let transport = ReqwestTransport::new()?;
                let fetched = fetch_remote(q, &orgs_or_default(orgs), limit, &rc, &transport)?;
                for d in &fetched.diagnostics {
                    eprintln!("warning: {d}");
                }
                fetched.candidates
            } else {
                let dir = corpus.expect("clap requires --corpus without --remote");
                let local = load_local(&dir)?;
                for (p, why) in &local.unreadable {
                    eprintln!("warning: skipped {}: {why}", p.display());
                }
                local.candidates
            };
            let candidates = if no_filter {
                candidates
            } else {
                let exc = query.as_ref().ok().map(|q| q.exception_name.as_str());
                if exc.is_none() {
                    log::warn!("no query for the context; exception mentions are not checked");
                }
                apply_filter(candidates, &CorpusFilter::default(), exc).kept
            };
            let ranked = rank(&unit, &candidates, &weights, k)?;
            out = match format {
                Format::Json => json(&ranked)?,
                _ if verbose => ranked.iter().map(explain).collect::<Vec<_>>().join("\n"),
                _ => render_table(&ranked),
            };
        }

        Command::Evaluate {
            cases,
            oracle,
            ks,
            weights,
            out: dest,
        } => {
            if ks.is_empty() || ks.contains(&0) {
                return Err(usage("--ks takes cutoffs of at least 1"));
            }
            let cases = CaseFile::load(&cases)?;
            let oracle = Oracle::load(&oracle)?;
            let opts = EvalOptions {
                ks,
                weights: match weights {
                    Some(p) => exrec::ranking::WeightConfig::load(&p)?,
                    None => cfg.weights()?,
                },
                kb: cfg.knowledge_base()?,
                ..EvalOptions::default()
            };
            let report = evaluate(&cases, &oracle, &opts)?;
            let text = match format {
                Format::Json => report.to_json()?,
                Format::Csv => report.to_csv(),
                Format::Text => report.to_table(),
            };
            match dest {
                Some(p) => std::fs::write(&p, text).map_err(|e| Failure {
                    code: EXIT_PIPELINE,
                    message: format!("cannot write {}: {e}", p.display()),
                })?,
                None => out = text,
            }
        }
    }
    print!("{out}");
    Ok(())
}

fn clone_err(e: &Error) -> Error {
    match e {
        Error::NoApiObjects => Error::NoApiObjects,
        Error::UnknownException => Error::UnknownException,
        other => Error::InvalidInput(other.to_string()),
    }
}
