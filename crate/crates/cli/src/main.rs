use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::net::SocketAddr;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use narrative_core::evaluation::{run_benchmark, BenchmarkPaths, EvalOptions, TermConceptEdit};
use narrative_core::indexing::write_snapshot;
use narrative_core::{
    ConceptId, CorpusPaths, Engine, IndexOptions, NarrativeQuery, RankOrder, StrategyOptions, TokenizerOptions,
    TranslationOptions,
};
use narrative_service::api::{search_with, translate_with};
use narrative_service::ServiceConfig;

#[derive(Parser)]
#[command(name = "narrative", version, about = "Keyword to narrative query translation and retrieval")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Translate keywords and show the candidate queries.
    Translate {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[command(flatten)]
        query: QueryArgs,
        /// List every generated query, not only the candidate panel.
        #[arg(long)]
        all: bool,
        #[arg(long)]
        json: bool,
        #[arg(required = true)]
        keywords: Vec<String>,
    },
    /// Answer a narrative query given as JSON (`-` reads stdin).
    Search {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[arg(long)]
        json: bool,
        query: String,
    },
    /// Build the collection index and write a snapshot.
    Index {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Run the benchmark evaluation and print both tables.
    Eval {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[command(flatten)]
        query: QueryArgs,
        #[arg(long)]
        topics: PathBuf,
        #[arg(long)]
        qrels: PathBuf,
        #[arg(long, value_enum, default_value_t = EditMode::Strict)]
        edit_mode: EditMode,
        /// Name shown in the report header.
        #[arg(long, default_value = "benchmark")]
        name: String,
        #[arg(long)]
        json: bool,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Start the HTTP service.
    Serve {
        /// TOML configuration; `NARRATIVE_*` variables override it.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        listen: Option<SocketAddr>,
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long)]
        snapshot: Option<PathBuf>,
    },
}

#[derive(Args)]
struct CorpusArgs {
    /// Directory holding concepts.jsonl, predicates.jsonl and documents.jsonl.
    #[arg(long)]
    corpus: Option<PathBuf>,
    #[arg(long)]
    concepts: Option<PathBuf>,
    #[arg(long)]
    predicates: Option<PathBuf>,
    #[arg(long)]
    docs: Option<PathBuf>,
    /// Load the collection index from a snapshot instead of building it.
    #[arg(long)]
    snapshot: Option<PathBuf>,
    /// Replace punctuation with whitespace when tokenizing.
    #[arg(long)]
    punct: bool,
    #[arg(long)]
    keep_stopwords: bool,
    /// Concept never used as a statement endpoint during closure. Repeatable.
    #[arg(long, value_name = "CONCEPT")]
    closure_exclude: Vec<String>,
}

impl CorpusArgs {
    fn paths(&self) -> Result<CorpusPaths> {
        let base = self.corpus.as_ref().map(CorpusPaths::in_dir);
        let pick = |explicit: &Option<PathBuf>, from_dir: Option<&PathBuf>, flag: &str| {
            explicit
                .clone()
                .or_else(|| from_dir.cloned())
                .with_context(|| format!("missing --{flag} (or --corpus)"))
        };
        Ok(CorpusPaths {
            concepts: pick(&self.concepts, base.as_ref().map(|b| &b.concepts), "concepts")?,
            predicates: pick(&self.predicates, base.as_ref().map(|b| &b.predicates), "predicates")?,
            documents: pick(&self.docs, base.as_ref().map(|b| &b.documents), "docs")?,
        })
    }

    fn index_options(&self) -> Result<IndexOptions> {
        Ok(IndexOptions {
            tokenizer: TokenizerOptions::default()
                .with_punctuation_replacement(self.punct)
                .with_stopword_removal(!self.keep_stopwords),
            statement_closure_excludes: self
                .closure_exclude
                .iter()
                .map(ConceptId::new)
                .collect::<narrative_core::Result<_>>()?,
        })
    }

    fn engine(&self) -> Result<Engine> {
        let paths = self.paths()?;
        let options = self.index_options()?;
        let engine = match &self.snapshot {
            Some(snapshot) => Engine::load_with_snapshot(&paths, snapshot, options)?,
            None => Engine::load(&paths, options)?,
        };
        Ok(engine)
    }
}

#[derive(Args)]
struct QueryArgs {
    /// Components need support strictly greater than this.
    #[arg(long, default_value_t = 0)]
    tau: usize,
    #[arg(long)]
    permutations: bool,
    #[arg(long, default_value_t = TranslationOptions::default().max_tokens)]
    max_tokens: usize,
    #[arg(long, default_value_t = TranslationOptions::default().max_queries)]
    max_queries: usize,
    /// Ranking used by the mixed and specific strategies.
    #[arg(long, value_enum, default_value_t = Rank::Descending)]
    rank: Rank,
}

impl QueryArgs {
    fn translation(&self) -> TranslationOptions {
        TranslationOptions {
            tau: self.tau,
            consider_permutations: self.permutations,
            max_tokens: self.max_tokens,
            max_queries: self.max_queries,
            ..Default::default()
        }
    }

    fn strategy(&self) -> StrategyOptions {
        StrategyOptions {
            statement_rank: match self.rank {
                Rank::Descending => RankOrder::Descending,
                Rank::Ascending => RankOrder::Ascending,
            },
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Rank {
    Descending,
    Ascending,
}

#[derive(Clone, Copy, ValueEnum)]
enum EditMode {
    Strict,
    Loose,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Translate { corpus, query, all, json, keywords } => {
            translate(&corpus.engine()?, &keywords.join(" "), &query, all, json)
        }
        Command::Search { corpus, json, query } => search(&corpus.engine()?, &query, json),
        Command::Index { corpus, out } => {
            let engine = corpus.engine()?;
            let file = File::create(&out).with_context(|| format!("create {}", out.display()))?;
            write_snapshot(engine.collection(), BufWriter::new(file))?;
            eprintln!("indexed {} documents into {}", engine.document_count(), out.display());
            Ok(())
        }
        Command::Eval { corpus, query, topics, qrels, edit_mode, name, json, out } => {
            let paths = BenchmarkPaths { corpus: corpus.paths()?, topics, qrels };
            let opts = EvalOptions {
                benchmark: name,
                index: corpus.index_options()?,
                translation: query.translation(),
                strategy: query.strategy(),
                edit_mode: match edit_mode {
                    EditMode::Strict => TermConceptEdit::Strict,
                    EditMode::Loose => TermConceptEdit::Loose,
                },
            };
            let report = run_benchmark(&paths, &opts)?;
            let text = if json { report.to_json() } else { report.render_text() };
            match out {
                Some(path) => std::fs::write(&path, text).with_context(|| format!("write {}", path.display()))?,
                None => io::stdout().write_all(text.as_bytes())?,
            }
            Ok(())
        }
        Command::Serve { config, listen, corpus, snapshot } => {
            let mut cfg = match &config {
                Some(path) => ServiceConfig::load(path)?,
                None => ServiceConfig::default(),
            };
            cfg.apply_env(std::env::vars())?;
            if let Some(listen) = listen {
                cfg.listen = listen;
            }
            if corpus.is_some() {
                cfg.corpus.dir = corpus;
            }
            if snapshot.is_some() {
                cfg.corpus.snapshot = snapshot;
            }
            tracing_subscriber::fmt().with_writer(io::stderr).init();
            let runtime = tokio::runtime::Runtime::new()?;
            runtime.block_on(narrative_service::serve(cfg))?;
            Ok(())
        }
    }
}

fn translate(engine: &Engine, keywords: &str, query: &QueryArgs, all: bool, json: bool) -> Result<()> {
    let opts = query.translation();
    let response = translate_with(engine, keywords, &opts, &query.strategy())?;
    let mut out = io::stdout().lock();
    if json {
        let mut value = serde_json::to_value(&response)?;
        if all {
            let queries: Vec<_> = engine
                .translate(keywords, &opts)?
                .queries
                .iter()
                .map(|g| serde_json::json!({ "key": g.query.canonical_key(), "result_count": engine.result_count(&g.query) }))
                .collect();
            value["queries"] = queries.into();
        }
        writeln!(out, "{}", serde_json::to_string_pretty(&value)?)?;
        return Ok(());
    }

    writeln!(out, "tokens: {}", response.tokens.join(" "))?;
    if !response.excluded_tokens.is_empty() {
        writeln!(out, "excluded: {}", response.excluded_tokens.join(" "))?;
    }
    let truncated = if response.truncated { " (truncated)" } else { "" };
    writeln!(out, "{} queries{truncated}", response.query_count)?;
    for c in &response.candidates {
        writeln!(out, "{:<15}{:>7}  {}", c.strategy.as_str(), c.result_count, c.key)?;
    }
    if all {
        writeln!(out)?;
        for g in &engine.translate(keywords, &opts)?.queries {
            writeln!(out, "{:>7}  {}", engine.result_count(&g.query), g.query.canonical_key())?;
        }
    }
    Ok(())
}

fn search(engine: &Engine, query: &str, json: bool) -> Result<()> {
    let text = if query == "-" {
        let mut buf = String::new();
        io::stdin().read_to_string(&mut buf)?;
        buf
    } else {
        query.to_string()
    };
    let query: NarrativeQuery = serde_json::from_str(&text).context("query is not a valid narrative query")?;
    let response = search_with(engine, &query)?;
    let mut out = io::stdout().lock();
    if json {
        writeln!(out, "{}", serde_json::to_string_pretty(&response)?)?;
        return Ok(());
    }
    for d in &response.documents {
        writeln!(out, "{}\t{}", d.doc_id, d.title)?;
    }
    eprintln!("{} documents", response.total);
    Ok(())
}
