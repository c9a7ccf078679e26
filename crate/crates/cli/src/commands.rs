use std::collections::BTreeSet;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use hypenet::analysis::{error_breakdown, evaluate as score_metrics, rank_paths, Metrics};
use hypenet::baselines::{slqs_fit_with, tune_threshold, DistClassifier, DistMethod, PathClassifier, SlqsModel};
use hypenet::corpus::{index_corpus_with, PairPathIndex, TermMatcher};
use hypenet::dataset::{
    attach_paths, filter_and_balance, load_relations, read_pairs, split_lexical, split_random, write_pairs,
    DatasetSplit, LabeledInstance, Manifest, PositiveWhitelist, RelationRecord, SplitMode,
};
use hypenet::embeddings::Embeddings;
use hypenet::exec::Exec;
use hypenet::network::{is_positive, predict_all, train_with, Checkpoint, NetworkParams, TrainConfig};
use hypenet::FORMAT_VERSION;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::config::{Method, RunConfig};
use crate::files::{
    open, read_embeddings, read_sentences, read_versioned_json, read_vocab, sidecar, write_atomic, write_json,
    write_text,
};

/// A trained model of any method, as written by `train`.
#[derive(Debug, Serialize, Deserialize)]
pub struct ModelFile {
    pub format_version: u32,
    pub method: Method,
    pub model: Model,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    Hypenet(Box<Checkpoint>),
    Paths(PathClassifier),
    Dist { classifier: DistClassifier, embedding_dim: usize },
    Slqs(SlqsModel),
}

fn require<'a, T>(value: &'a Option<T>, what: &str) -> Result<&'a T> {
    value.as_ref().ok_or_else(|| anyhow!("missing {what}"))
}

fn write_config(cfg: &RunConfig, path: &Path) -> Result<()> {
    write_text(path, &cfg.to_toml()?)
}

fn read_index(path: &Path) -> Result<PairPathIndex> {
    PairPathIndex::read_tsv(open(path)?).with_context(|| format!("reading index {}", path.display()))
}

fn read_manifest(dir: &Path) -> Result<Manifest> {
    read_versioned_json(&dir.join("manifest.json"))
}

/// The explicit index, or the one recorded when the dataset was built.
fn resolve_index(explicit: &Option<PathBuf>, dataset_dir: Option<&PathBuf>) -> Result<PathBuf> {
    if let Some(p) = explicit {
        return Ok(p.clone());
    }
    let dir = dataset_dir.ok_or_else(|| anyhow!("missing --index (or --dataset-dir with a recorded index)"))?;
    read_manifest(dir)?
        .index
        .map(PathBuf::from)
        .ok_or_else(|| anyhow!("missing --index: {}/manifest.json records no index", dir.display()))
}

fn read_pair_file(path: &Path, index: &PairPathIndex) -> Result<Vec<LabeledInstance>> {
    let pairs = read_pairs(open(path)?).with_context(|| format!("reading pairs {}", path.display()))?;
    Ok(attach_paths(&pairs, index))
}

pub fn extract_paths(cfg: &RunConfig) -> Result<()> {
    let c = &cfg.extract;
    if c.corpus.is_empty() {
        bail!("missing --corpus");
    }
    let vocab_path = require(&c.vocab, "--vocab")?;
    let out = require(&c.out, "--out")?;
    let vocab = read_vocab(vocab_path)?;
    if vocab.is_empty() {
        bail!("vocabulary {} is empty", vocab_path.display());
    }
    let (sentences, rejected) = read_sentences(&c.corpus)?;
    let matcher = TermMatcher::new(vocab.iter())?;
    let index = index_corpus_with(Exec::default(), &sentences, &matcher)?;
    write_atomic(out, |w| Ok(index.write_tsv(w)?))?;
    write_config(cfg, &sidecar(out, "config.toml"))?;
    println!(
        "{} pairs, {} distinct paths from {} sentences ({} rejected)",
        index.num_pairs(),
        index.distinct_paths().len(),
        sentences.len(),
        rejected
    );
    Ok(())
}

pub fn build_dataset(cfg: &RunConfig) -> Result<()> {
    let c = &cfg.dataset;
    let relations_path = require(&c.relations, "--relations")?;
    let index_path = require(&c.index, "--index")?;
    let out = require(&c.out, "--out")?;
    let records = load_relations(open(relations_path)?, &c.positive_relations)
        .with_context(|| format!("reading relations {}", relations_path.display()))?;
    let index = read_index(index_path)?;
    let seed = cfg.seed();
    let instances = filter_and_balance(&records, &index, c.negatives_per_positive, seed)?;
    let split = match c.split {
        SplitMode::Random => split_random(&instances, c.fractions, seed)?,
        SplitMode::Lexical => split_lexical(&instances, c.fractions, seed)?,
    };
    std::fs::create_dir_all(out).with_context(|| format!("cannot create {}", out.display()))?;
    for (name, set) in [("train", &split.train), ("test", &split.test), ("val", &split.validation)] {
        write_atomic(&out.join(format!("{name}.tsv")), |w| Ok(write_pairs(w, set)?))?;
    }
    let mut manifest = Manifest::new(&split, seed);
    let index_abs = std::fs::canonicalize(index_path).unwrap_or_else(|_| index_path.clone());
    manifest.index = Some(index_abs.to_string_lossy().into_owned());
    write_json(&out.join("manifest.json"), &manifest)?;
    write_config(cfg, &out.join("config.toml"))?;
    println!(
        "{} split: train {}, test {}, val {} ({} positives, {} negatives, {} discarded)",
        manifest.mode,
        manifest.train,
        manifest.test,
        manifest.validation,
        manifest.positives,
        manifest.negatives,
        manifest.discarded
    );
    Ok(())
}

fn load_split(dir: &Path, index: &PairPathIndex, mode: SplitMode) -> Result<DatasetSplit> {
    Ok(DatasetSplit {
        train: read_pair_file(&dir.join("train.tsv"), index)?,
        test: read_pair_file(&dir.join("test.tsv"), index)?,
        validation: read_pair_file(&dir.join("val.tsv"), index)?,
        mode,
        discarded: 0,
    })
}

fn dataset_terms(split: &DatasetSplit) -> Vec<String> {
    let all = split.train.iter().chain(&split.test).chain(&split.validation);
    all.flat_map(|i| [i.x.clone(), i.y.clone()]).collect::<BTreeSet<_>>().into_iter().collect()
}

fn gold(set: &[LabeledInstance]) -> Vec<bool> {
    set.iter().map(|i| i.label).collect()
}

pub fn train(cfg: &RunConfig) -> Result<()> {
    let c = &cfg.train;
    let method = *require(&c.method, "--method")?;
    let dir = require(&c.dataset_dir, "--dataset-dir")?;
    let out = require(&c.out, "--out")?;
    let manifest = read_manifest(dir)?;
    let index = read_index(&resolve_index(&c.index, Some(dir))?)?;
    let split = load_split(dir, &index, manifest.mode)?;
    if split.train.is_empty() {
        bail!("{}/train.tsv has no pairs", dir.display());
    }
    let exec = Exec::default();
    let embeddings = |why: &str| -> Result<Embeddings> {
        read_embeddings(require(&c.embeddings, &format!("--embeddings (required by {why})"))?)
    };

    let (model, metrics) = match method {
        Method::HypenetPath | Method::HypenetIntegrated => {
            let (config, emb): (&TrainConfig, _) = if method == Method::HypenetIntegrated {
                (&c.integrated, Some(embeddings(method.name())?))
            } else {
                (&c.path_only, c.embeddings.as_deref().map(read_embeddings).transpose()?)
            };
            let outcome = train_with(exec, &split, config, emb.as_ref())?;
            let metrics = json!({
                "best_epoch": outcome.best_epoch,
                "config": outcome.config,
                "history": outcome.history,
            });
            (Model::Hypenet(Box::new(Checkpoint::new(outcome.config, outcome.params))), metrics)
        }
        Method::Snow | Method::SnowGen => {
            let (generalize, k) =
                if method == Method::SnowGen { (true, c.snow_gen_top_k) } else { (false, c.snow_top_k) };
            let (clf, tuning) = PathClassifier::fit(exec, &split.train, &split.validation, generalize, k, &c.logreg)?;
            let pred: Vec<bool> = split.validation.iter().map(|i| clf.predict(i)).collect();
            let metrics = json!({
                "features": clf.space.len(),
                "tuning": tuning,
                "validation": score_metrics(&pred, &gold(&split.validation))?,
            });
            (Model::Paths(clf), metrics)
        }
        Method::DistLogreg => {
            let emb = embeddings(method.name())?;
            let (clf, tuning) =
                DistClassifier::fit(exec, &split.train, &split.validation, &emb, c.dist_method, &c.logreg)?;
            let pred: Vec<bool> = split.validation.iter().map(|i| clf.predict(&i.x, &i.y, &emb)).collect();
            let metrics = json!({
                "tuning": tuning,
                "validation": score_metrics(&pred, &gold(&split.validation))?,
            });
            (Model::Dist { classifier: clf, embedding_dim: emb.dim() }, metrics)
        }
        Method::Slqs => {
            if c.corpus.is_empty() {
                bail!("missing --corpus (required by slqs)");
            }
            let (sentences, _) = read_sentences(&c.corpus)?;
            let mut model = slqs_fit_with(exec, &sentences, &dataset_terms(&split), c.slqs.clone())?;
            let scored: Vec<(Option<f64>, bool)> =
                split.validation.iter().map(|i| (model.classify(&i.x, &i.y).0, i.label)).collect();
            model.config.threshold = tune_threshold(&scored);
            let pred: Vec<bool> = split.validation.iter().map(|i| model.classify(&i.x, &i.y).1).collect();
            let metrics = json!({
                "threshold": model.config.threshold,
                "validation": score_metrics(&pred, &gold(&split.validation))?,
            });
            (Model::Slqs(model), metrics)
        }
    };

    write_json(out, &ModelFile { format_version: FORMAT_VERSION, method, model })?;
    let mut metrics = metrics;
    metrics["format_version"] = json!(FORMAT_VERSION);
    metrics["method"] = json!(method);
    write_json(&sidecar(out, "metrics.json"), &metrics)?;
    write_config(cfg, &sidecar(out, "config.toml"))?;
    println!("trained {} on {} pairs; model written to {}", method.name(), split.train.len(), out.display());
    Ok(())
}

fn read_model(path: &Path) -> Result<ModelFile> {
    let file: ModelFile = read_versioned_json(path)?;
    if let Model::Hypenet(ck) = &file.model {
        if ck.format_version != FORMAT_VERSION {
            bail!("{}: unsupported checkpoint version {}", path.display(), ck.format_version);
        }
        ck.params.validate().with_context(|| format!("{} holds an inconsistent network", path.display()))?;
    }
    Ok(file)
}

/// `(score, prediction)` per instance; SLQS scores can be undefined.
fn score_instances(
    model: &Model,
    set: &[LabeledInstance],
    embeddings: Option<&Embeddings>,
) -> Result<Vec<(Option<f64>, bool)>> {
    Ok(match model {
        Model::Hypenet(ck) => {
            let params: &NetworkParams = &ck.params;
            let pairs: Vec<_> = set.iter().map(|i| params.encode(&i.x, &i.y, &i.paths)).collect();
            predict_all(params, &pairs, Exec::default()).into_iter().map(|p| (Some(p[1]), is_positive(p))).collect()
        }
        Model::Paths(clf) => set
            .iter()
            .map(|i| {
                let p = clf.probability(i);
                (Some(p), p > 0.5)
            })
            .collect(),
        Model::Dist { classifier, embedding_dim } => {
            let emb = embeddings.ok_or_else(|| anyhow!("missing --embeddings (required by dist-logreg)"))?;
            if emb.dim() != *embedding_dim {
                bail!("embedding dimension {} does not match the model's {}", emb.dim(), embedding_dim);
            }
            let expected = match classifier.method {
                DistMethod::Concat => 2 * emb.dim(),
                DistMethod::Diff => emb.dim(),
                DistMethod::Dot => 1,
            };
            if classifier.model.dim() != expected {
                bail!("model has {} weights, expected {expected}", classifier.model.dim());
            }
            set.iter()
                .map(|i| {
                    let p = classifier.probability(&i.x, &i.y, emb);
                    (Some(p), p > 0.5)
                })
                .collect()
        }
        Model::Slqs(m) => set.iter().map(|i| m.classify(&i.x, &i.y)).collect(),
    })
}

pub fn evaluate(cfg: &RunConfig) -> Result<()> {
    let c = &cfg.evaluate;
    let file = read_model(require(&c.model, "--model")?)?;
    let test_path = match (&c.test, &c.dataset_dir) {
        (Some(t), _) => t.clone(),
        (None, Some(d)) => d.join("test.tsv"),
        (None, None) => bail!("missing --dataset-dir (or a test pair file)"),
    };
    let index = read_index(&resolve_index(&c.index, c.dataset_dir.as_ref())?)?;
    let set = read_pair_file(&test_path, &index)?;
    if set.is_empty() {
        bail!("{} has no pairs", test_path.display());
    }
    let embeddings = c.embeddings.as_deref().map(read_embeddings).transpose()?;
    let relations: Vec<RelationRecord> = match &c.relations {
        Some(p) => load_relations(open(p)?, &PositiveWhitelist::default())
            .with_context(|| format!("reading relations {}", p.display()))?
            .into_iter()
            .map(|(r, _)| r)
            .collect(),
        None => Vec::new(),
    };

    let scored = score_instances(&file.model, &set, embeddings.as_ref())?;
    let pred: Vec<bool> = scored.iter().map(|s| s.1).collect();
    let gold = gold(&set);
    let metrics: Metrics = score_metrics(&pred, &gold)?;
    let pairs: Vec<(String, String)> = set.iter().map(|i| (i.x.clone(), i.y.clone())).collect();
    let report = error_breakdown(&pairs, &pred, &gold, &index, &relations, &c.breakdown)?;

    println!(
        "{}: precision {:.4} recall {:.4} f1 {:.4} on {} pairs ({} missing from index)",
        file.method.name(),
        metrics.precision,
        metrics.recall,
        metrics.f1,
        set.len(),
        report.missing_from_index.len()
    );
    if let Some(out) = &c.out {
        write_json(
            out,
            &json!({
                "format_version": FORMAT_VERSION,
                "method": file.method,
                "pairs": set.len(),
                "metrics": metrics,
                "errors": report,
            }),
        )?;
        write_atomic(&sidecar(out, "report.tsv"), |w| {
            writeln!(w, "# format-version: {FORMAT_VERSION} evaluation")?;
            writeln!(w, "# x\ty\tgold\tpredicted\tscore\tpaths")?;
            for (i, (score, p)) in set.iter().zip(&scored) {
                let score = score.map_or("NA".to_string(), |s| format!("{s:.6}"));
                let paths = if i.paths.is_empty() { "missing".to_string() } else { i.paths.len().to_string() };
                writeln!(w, "{}\t{}\t{}\t{}\t{score}\t{paths}", i.x, i.y, u8::from(i.label), u8::from(*p))?;
            }
            Ok(())
        })?;
        write_config(cfg, &sidecar(out, "config.toml"))?;
    }
    Ok(())
}

pub fn analyze_paths(cfg: &RunConfig) -> Result<()> {
    let c = &cfg.analyze;
    if c.top_k == 0 {
        bail!("--top-k must be >= 1");
    }
    let model_path = require(&c.model, "--model")?;
    let file = read_model(model_path)?;
    let Model::Hypenet(ck) = &file.model else {
        bail!("{} is a {} model; path analysis needs a HypeNET model", model_path.display(), file.method.name());
    };
    let index = read_index(require(&c.index, "--index")?)?;
    let ranked = rank_paths(&ck.params, index.distinct_paths(), c.top_k, Exec::default())?;
    let render = |w: &mut dyn Write| -> Result<()> {
        writeln!(w, "# format-version: {FORMAT_VERSION} path-scores")?;
        for (rank, s) in ranked.iter().enumerate() {
            writeln!(w, "{}\t{:.6}\t{}", rank + 1, s.score, s.path)?;
        }
        Ok(())
    };
    match &c.out {
        Some(out) => {
            write_atomic(out, render)?;
            write_config(cfg, &sidecar(out, "config.toml"))?;
            println!("{} paths ranked; written to {}", ranked.len(), out.display());
        }
        None => render(&mut std::io::stdout().lock())?,
    }
    Ok(())
}
