mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::Context;
use config::PipelineConfig;
use error::CliError;

/// Bootstrap a silver-standard NER corpus from a gazetteer and a document
/// collection, then train, apply and evaluate a token tagger.
#[derive(Debug, Parser)]
#[command(name = "silverner", version)]
struct Cli {
    /// Pipeline configuration (TOML). Relative paths inside it resolve
    /// against its directory.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for every random choice; overrides `seed` in the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; output does not depend on this.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Output directory; overrides `paths.output_dir`.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Read the manifest and cache the segmented collection.
    Ingest,
    /// Build and persist the positional and phrase indexes.
    Index {
        /// Rebuild even if a readable index file exists.
        #[arg(long)]
        rebuild: bool,
    },
    /// Write per-entity candidates of one method as TSV.
    Retrieve {
        /// jaccard, bm25, boolean_phrase, fuzzy_regex, edit_rerank,
        /// embedding_rerank:<store>, rrf or concat.
        #[arg(long)]
        method: Option<String>,
        /// Only this gazetteer entity.
        #[arg(long)]
        entity: Option<String>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run every method and score it against the relevance judgments.
    CompareMethods {
        /// Results per entity to score.
        #[arg(long)]
        top_k: Option<usize>,
    },
    /// Build the gazetteer-annotated corpus and its review file.
    Bootstrap {
        #[arg(long)]
        method: Option<String>,
    },
    /// Train a tagger on a corpus's train and validation splits.
    Train {
        #[arg(long)]
        corpus: Option<PathBuf>,
        /// WCE or CE.
        #[arg(long)]
        loss: Option<String>,
        #[arg(long)]
        model: Option<PathBuf>,
    },
    /// Tag a corpus, or every sentence of the collection.
    Infer {
        #[arg(long)]
        model: Option<PathBuf>,
        /// Corpus to tag; without it the whole collection is tagged.
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Add model-predicted mentions to a corpus.
    Augment {
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Compare predictions with gold annotations.
    Eval {
        #[arg(long)]
        gold: PathBuf,
        /// Nested gold entities for the gold corpus.
        #[arg(long)]
        gold_entities: Option<PathBuf>,
        #[arg(long)]
        pred: Option<PathBuf>,
        /// Prefix of the report files.
        #[arg(long, default_value = "eval")]
        prefix: String,
    },
    /// Train on each corpus size with both losses and tabulate the scores.
    Ablate {
        #[arg(long)]
        method: Option<String>,
    },
    /// Sentence and entity counts per split.
    Stats {
        #[arg(long)]
        corpus: Option<PathBuf>,
    },
}

fn context(cli: &Cli) -> Result<Context, CliError> {
    let config = match &cli.config {
        Some(path) => PipelineConfig::load(path)?,
        None => PipelineConfig::default(),
    };
    let out_dir =
        cli.out_dir.clone().or_else(|| config.paths.output_dir.clone()).unwrap_or_else(|| PathBuf::from("out"));
    Ok(Context { seed: cli.seed.or(config.seed).unwrap_or(0), config, out_dir })
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(CliError::usage("--jobs must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global().map_err(|e| CliError::usage(e.to_string()))?;
    }
    let ctx = context(&cli)?;
    match &cli.command {
        Command::Ingest => commands::ingest(&ctx),
        Command::Index { rebuild } => commands::index(&ctx, *rebuild),
        Command::Retrieve { method, entity, output } => {
            commands::retrieve(&ctx, method.as_deref(), entity.as_deref(), output.as_deref())
        }
        Command::CompareMethods { top_k } => commands::compare_methods(&ctx, *top_k),
        Command::Bootstrap { method } => commands::bootstrap(&ctx, method.as_deref()),
        Command::Train { corpus, loss, model } => {
            commands::train_cmd(&ctx, corpus.as_deref(), loss.as_deref(), model.as_deref())
        }
        Command::Infer { model, corpus, output } => {
            commands::infer(&ctx, model.as_deref(), corpus.as_deref(), output.as_deref())
        }
        Command::Augment { model, corpus, output } => {
            commands::augment(&ctx, model.as_deref(), corpus.as_deref(), output.as_deref())
        }
        Command::Eval { gold, gold_entities, pred, prefix } => {
            commands::eval(&ctx, gold, gold_entities.as_deref(), pred.as_deref(), prefix)
        }
        Command::Ablate { method } => commands::ablate(&ctx, method.as_deref()),
        Command::Stats { corpus } => commands::stats(&ctx, corpus.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
