//! `hypenet`: corpus indexing, dataset construction, training, evaluation and
//! path analysis for hypernymy detection.

mod commands;
mod config;
mod files;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hypenet::dataset::SplitMode;

use config::{Method, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "hypenet", version, about = "Hypernymy detection from dependency paths")]
struct Cli {
    /// TOML run configuration. Flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for sampling, splitting and training.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Index the dependency paths between vocabulary terms in CoNLL-U files.
    ExtractPaths {
        #[arg(long, num_args = 1..)]
        corpus: Vec<PathBuf>,
        /// One term per line.
        #[arg(long)]
        vocab: Option<PathBuf>,
        /// Index TSV to write.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Label relation pairs, keep those with corpus paths and split them.
    BuildDataset {
        /// `x<TAB>y<TAB>relation<TAB>resource` rows.
        #[arg(long)]
        relations: Option<PathBuf>,
        #[arg(long)]
        index: Option<PathBuf>,
        #[arg(long, value_parser = parse_split)]
        split: Option<SplitMode>,
        /// Output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Train a model on a dataset directory.
    Train {
        #[arg(long)]
        dataset_dir: Option<PathBuf>,
        #[arg(long, value_enum)]
        method: Option<Method>,
        /// Defaults to the index recorded in the dataset manifest.
        #[arg(long)]
        index: Option<PathBuf>,
        /// Word vectors, text format.
        #[arg(long)]
        embeddings: Option<PathBuf>,
        /// CoNLL-U files for SLQS.
        #[arg(long, num_args = 1..)]
        corpus: Vec<PathBuf>,
        #[arg(long)]
        lr: Option<f64>,
        #[arg(long)]
        dropout: Option<f64>,
        #[arg(long)]
        epochs: Option<usize>,
        /// Feature cap for the path-feature baselines.
        #[arg(long)]
        top_k: Option<usize>,
        /// Model file to write.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Score a pair file with a trained model.
    Evaluate {
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        dataset_dir: Option<PathBuf>,
        /// Pair file; defaults to the dataset's test set.
        #[arg(long)]
        test: Option<PathBuf>,
        #[arg(long)]
        index: Option<PathBuf>,
        #[arg(long)]
        embeddings: Option<PathBuf>,
        /// Relation file, for grouping false positives by relation.
        #[arg(long)]
        relations: Option<PathBuf>,
        /// Metrics JSON to write.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rank the index's paths by how strongly a HypeNET model ties them to
    /// hypernymy.
    AnalyzePaths {
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        index: Option<PathBuf>,
        #[arg(long)]
        top_k: Option<usize>,
        /// Ranking TSV to write; printed when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_split(s: &str) -> Result<SplitMode, String> {
    s.parse().map_err(|e: hypenet::Error| e.to_string())
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

fn set_opt<T>(slot: &mut Option<T>, value: Option<T>) {
    if value.is_some() {
        *slot = value;
    }
}

fn set_list<T>(slot: &mut Vec<T>, value: Vec<T>) {
    if !value.is_empty() {
        *slot = value;
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    set_opt(&mut cfg.seed, cli.seed);
    match cli.command {
        Command::ExtractPaths { corpus, vocab, out } => {
            let c = &mut cfg.extract;
            set_list(&mut c.corpus, corpus);
            set_opt(&mut c.vocab, vocab);
            set_opt(&mut c.out, out);
            commands::extract_paths(&cfg)
        }
        Command::BuildDataset { relations, index, split, out } => {
            let c = &mut cfg.dataset;
            set_opt(&mut c.relations, relations);
            set_opt(&mut c.index, index);
            set(&mut c.split, split);
            set_opt(&mut c.out, out);
            commands::build_dataset(&cfg)
        }
        Command::Train { dataset_dir, method, index, embeddings, corpus, lr, dropout, epochs, top_k, out } => {
            let seed = cfg.seed;
            let c = &mut cfg.train;
            set_opt(&mut c.dataset_dir, dataset_dir);
            set_opt(&mut c.method, method);
            set_opt(&mut c.index, index);
            set_opt(&mut c.embeddings, embeddings);
            set_list(&mut c.corpus, corpus);
            set_opt(&mut c.out, out);
            for t in [&mut c.path_only, &mut c.integrated] {
                set(&mut t.lr, lr);
                set(&mut t.dropout, dropout);
                set(&mut t.epochs, epochs);
                set(&mut t.seed, seed);
            }
            set(&mut c.logreg.seed, seed);
            set(&mut c.snow_top_k, top_k);
            set(&mut c.snow_gen_top_k, top_k);
            commands::train(&cfg)
        }
        Command::Evaluate { model, dataset_dir, test, index, embeddings, relations, out } => {
            let c = &mut cfg.evaluate;
            set_opt(&mut c.model, model);
            set_opt(&mut c.dataset_dir, dataset_dir);
            set_opt(&mut c.test, test);
            set_opt(&mut c.index, index);
            set_opt(&mut c.embeddings, embeddings);
            set_opt(&mut c.relations, relations);
            set_opt(&mut c.out, out);
            commands::evaluate(&cfg)
        }
        Command::AnalyzePaths { model, index, top_k, out } => {
            let c = &mut cfg.analyze;
            set_opt(&mut c.model, model);
            set_opt(&mut c.index, index);
            set(&mut c.top_k, top_k);
            set_opt(&mut c.out, out);
            commands::analyze_paths(&cfg)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let rendered = e.to_string();
            let first = rendered.lines().next().unwrap_or("invalid arguments");
            eprintln!("{}", first.trim());
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", config::one_line(&format!("{e:#}")));
            ExitCode::FAILURE
        }
    }
}
