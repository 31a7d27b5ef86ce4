//! `congen`: runs the augmentation pipeline one stage at a time.

mod config;
mod plan;
mod stages;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::config::Config;

#[derive(Parser, Debug)]
#[command(name = "congen", version, about = "Concept-to-text knowledge augmentation pipeline")]
pub struct Cli {
    /// Pipeline configuration (TOML).
    #[arg(long, global = true, default_value = "congen.toml")]
    pub config: PathBuf,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Overrides every seed in the config.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Minimum distinct concepts a matched sentence must contain.
    #[arg(long, global = true)]
    pub min_match: Option<usize>,
    /// Use the built-in template generator.
    #[arg(long, global = true, conflicts_with = "endpoint")]
    pub stub: bool,
    /// Generator service base URL.
    #[arg(long, global = true)]
    pub endpoint: Option<String>,
    /// Print what would run and exit.
    #[arg(long, global = true)]
    pub dry_run: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Parse the dump into cleaned, tokenized sentences.
    Ingest,
    /// Build the BM25 index over the sentences.
    Index,
    /// Ranked search, or concept-matched extraction with --concepts-file.
    Search {
        /// Free-text query.
        #[arg(long, conflicts_with_all = ["concepts", "concepts_file"])]
        query: Option<String>,
        /// Comma-separated concepts.
        #[arg(long, conflicts_with = "concepts_file")]
        concepts: Option<String>,
        /// CommonGen-style JSON-lines file; writes matched sentences to `paths.matched`.
        #[arg(long)]
        concepts_file: Option<PathBuf>,
        /// Results per query.
        #[arg(short, long)]
        k: Option<usize>,
    },
    /// Train the POS tagger.
    TrainTagger,
    /// Tag sentences and write their concept sets.
    ExtractConcepts {
        /// Print the concepts of one sentence instead.
        #[arg(long)]
        text: Option<String>,
    },
    /// Build concept-to-sentence reconstruction records.
    BuildRecon,
    /// Enumerate concept pairs and/or sets from the CommonGen-style file.
    Enumerate {
        #[arg(long)]
        pairs: bool,
        #[arg(long)]
        sets: bool,
    },
    /// Generate semi-golden sentences for enumerated pairs and/or sets.
    Generate {
        #[arg(long)]
        pairs: bool,
        #[arg(long)]
        sets: bool,
        /// Overwrite existing output instead of resuming.
        #[arg(long)]
        fresh: bool,
    },
    /// Score hypotheses against references.
    Evaluate,
    /// Count enumerated and generated records by concept-set size.
    Stats,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("CONGEN_LOG", "info")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let mut config = Config::load(&cli.config)?;
    if let Some(seed) = cli.seed {
        config.seeds.tagger = seed;
        config.seeds.stub = seed;
    }
    if let Some(m) = cli.min_match {
        config.extract.min_match = m;
    }
    if cli.stub {
        config.generate.stub = true;
        config.generate.endpoint = None;
    }
    if let Some(url) = &cli.endpoint {
        config.generate.endpoint = Some(url.clone());
        config.generate.stub = false;
    }
    if let Some(n) = cli.threads {
        anyhow::ensure!(n > 0, "--threads must be at least 1");
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
        config.generate.in_flight = config.generate.in_flight.min(n);
    }
    stages::dispatch(&cli.command, &config, cli.dry_run)
}
