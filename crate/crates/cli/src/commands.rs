use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use silverner::bootstrap::{
    bootstrap_corpus, split_corpus, write_review, BootstrapConfig, Gazetteer, RetrievalParams, Retriever, RrfWiring,
    Selector, SplitRatios,
};
use silverner::corpus::{corpus_stats, read_corpus, read_gold_sidecar, write_corpus, Corpus, Split};
use silverner::eval::{
    diff_report, evaluate, evaluate_retrieval, render_ablation_table, token_metrics, AblationRow, EvalConfig,
    Judgments, DEFAULT_BETA,
};
use silverner::index::{read_index_set, write_index_set, Bm25Params, IndexSet};
use silverner::ingest::{
    load_collection, parse_lemma_dictionary, parse_suffix_rules, read_collection, write_collection, DocumentCollection,
    Normalizer, SentenceSplitter,
};
use silverner::rerank::{EmbeddingStore, FusionConfig};
use silverner::retrieval::{write_candidates, Candidate, Query};
use silverner::tagger::{
    annotate_collection, augment_corpus, read_model, train, write_model, FeatureConfig, LossKind, TaggerModel,
    TrainConfig,
};

use crate::config::PipelineConfig;
use crate::error::CliError;

pub const COLLECTION_FILE: &str = "collection.bin";
pub const INDEX_FILE: &str = "index.bin";
pub const SMALL_FILE: &str = "small.conll";
pub const MEDIUM_FILE: &str = "medium.conll";
pub const MODEL_FILE: &str = "model.bin";

/// Resolved settings shared by every subcommand.
pub struct Context {
    pub config: PipelineConfig,
    pub seed: u64,
    pub out_dir: PathBuf,
}

fn required<'a>(value: &'a Option<PathBuf>, key: &str) -> Result<&'a Path, CliError> {
    value.as_deref().ok_or_else(|| CliError::usage(format!("{key} is not set in the config")))
}

fn config_error(key: &str, e: impl std::fmt::Display) -> CliError {
    CliError::usage(format!("{key}: {e}"))
}

fn io_error(path: &Path, e: std::io::Error) -> CliError {
    let name = match e.kind() {
        std::io::ErrorKind::NotFound => "MissingFile",
        _ => "IoError",
    };
    CliError::data(name, format!("{}: {e}", path.display()))
}

fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| io_error(path, e))
}

fn open(path: &Path) -> Result<BufReader<File>, CliError> {
    File::open(path).map(BufReader::new).map_err(|e| io_error(path, e))
}

fn write_file(path: &Path, write: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let mut w = BufWriter::new(File::create(path)?);
    write(&mut w)?;
    w.flush()?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn write_string(path: &Path, text: &str) -> Result<(), CliError> {
    write_file(path, |w| w.write_all(text.as_bytes()))
}

impl Context {
    pub fn out(&self, file: &str) -> PathBuf {
        self.out_dir.join(file)
    }

    fn splitter(&self) -> Result<SentenceSplitter, CliError> {
        Ok(match &self.config.paths.abbreviations {
            Some(p) => SentenceSplitter::from_config(&read_text(p)?),
            None => SentenceSplitter::with_default_abbreviations(),
        })
    }

    pub fn normalizer(&self) -> Result<Normalizer, CliError> {
        let mut n = Normalizer::with_default_rules();
        if let Some(p) = &self.config.paths.suffix_rules {
            let rules = parse_suffix_rules(&read_text(p)?).map_err(|e| config_error("paths.suffix_rules", e))?;
            n = n.with_suffix_rules(rules);
        }
        if let Some(p) = &self.config.paths.lemmas {
            let entries = parse_lemma_dictionary(&read_text(p)?).map_err(|e| config_error("paths.lemmas", e))?;
            n = n.with_dictionary(entries);
        }
        Ok(n)
    }

    fn ingest_fresh(&self) -> Result<DocumentCollection, CliError> {
        let manifest = required(&self.config.paths.manifest, "paths.manifest")?;
        Ok(load_collection(manifest, &self.splitter()?)?)
    }

    /// The cached collection when `ingest` has run, otherwise a fresh load.
    pub fn collection(&self) -> Result<DocumentCollection, CliError> {
        let cache = self.out(COLLECTION_FILE);
        if cache.exists() {
            Ok(read_collection(open(&cache)?)?)
        } else {
            self.ingest_fresh()
        }
    }

    pub fn gazetteer(&self) -> Result<Gazetteer, CliError> {
        let path = required(&self.config.paths.gazetteer, "paths.gazetteer")?;
        Ok(Gazetteer::read(open(path)?)?)
    }

    pub fn retrieval_params(&self) -> Result<RetrievalParams, CliError> {
        let r = &self.config.retrieval;
        let d = RetrievalParams::default();
        let bm25 = Bm25Params::new(r.bm25_k1.unwrap_or(d.bm25.k1), r.bm25_b.unwrap_or(d.bm25.b))
            .map_err(|e| config_error("retrieval.bm25_k1/bm25_b", e))?;
        let fusion = match r.rrf_k {
            Some(k) => FusionConfig::new(k).map_err(|e| config_error("retrieval.rrf_k", e))?,
            None => d.fusion,
        };
        let rrf_wiring = match &r.rrf_wiring {
            Some(w) => w.parse::<RrfWiring>().map_err(|e| config_error("retrieval.rrf_wiring", e))?,
            None => d.rrf_wiring,
        };
        let params = RetrievalParams {
            limit: r.limit.unwrap_or(d.limit),
            jaccard_tolerance: r.jaccard_tolerance.unwrap_or(d.jaccard_tolerance),
            jaccard_stride: r.jaccard_stride.unwrap_or(d.jaccard_stride),
            phrase_slack: r.phrase_slack.unwrap_or(d.phrase_slack),
            max_edits: r.max_edits.or(d.max_edits),
            bm25,
            fusion,
            rrf_wiring,
        };
        params.validate().map_err(|e| config_error("retrieval", e))?;
        Ok(params)
    }

    pub fn embeddings(&self) -> Result<Vec<(String, EmbeddingStore)>, CliError> {
        self.config
            .paths
            .embeddings
            .iter()
            .map(|(name, path)| Ok((name.clone(), EmbeddingStore::read(open(path)?)?)))
            .collect()
    }

    fn build_indexes(
        &self,
        collection: &DocumentCollection,
        normalizer: &Normalizer,
        gazetteer: &Gazetteer,
        params: &RetrievalParams,
    ) -> IndexSet {
        IndexSet::build(collection, normalizer, gazetteer.phrase_ranges(params.phrase_slack), params.bm25)
    }

    /// The persisted indexes when `index` has run, otherwise built in memory.
    fn indexes(
        &self,
        collection: &DocumentCollection,
        normalizer: &Normalizer,
        gazetteer: &Gazetteer,
        params: &RetrievalParams,
    ) -> Result<IndexSet, CliError> {
        let path = self.out(INDEX_FILE);
        if path.exists() {
            Ok(read_index_set(open(&path)?)?)
        } else {
            Ok(self.build_indexes(collection, normalizer, gazetteer, params))
        }
    }

    pub fn selector(&self, flag: Option<&str>) -> Result<Selector, CliError> {
        match flag.or(self.config.bootstrap.method.as_deref()) {
            Some(m) => m.parse().map_err(|e| config_error("bootstrap.method", e)),
            None => Ok(BootstrapConfig::default().selector),
        }
    }

    pub fn split_ratios(&self) -> Result<SplitRatios, CliError> {
        match self.config.bootstrap.split_ratios {
            Some([t, v, s]) => SplitRatios::new(t, v, s).map_err(|e| config_error("bootstrap.split_ratios", e)),
            None => Ok(SplitRatios::default()),
        }
    }

    pub fn features(&self) -> Result<FeatureConfig, CliError> {
        let f = &self.config.features;
        let d = FeatureConfig::default();
        let config = FeatureConfig {
            hash_dim: f.hash_dim.unwrap_or(d.hash_dim),
            ngram_sizes: f.ngram_sizes.clone().unwrap_or(d.ngram_sizes),
            window: f.window.unwrap_or(d.window),
            shape_features: f.shape_features.unwrap_or(d.shape_features),
        };
        config.validate().map_err(|e| config_error("features", e))?;
        Ok(config)
    }

    pub fn train_config(&self, loss: Option<&str>) -> Result<TrainConfig, CliError> {
        let t = &self.config.train;
        let d = TrainConfig::default();
        let loss = match loss.or(t.loss.as_deref()) {
            Some(l) => l.parse::<LossKind>().map_err(|e| config_error("train.loss", e))?,
            None => d.loss,
        };
        let config = TrainConfig {
            learning_rate: t.learning_rate.unwrap_or(d.learning_rate),
            epochs: t.epochs.unwrap_or(d.epochs),
            seed: self.seed,
            loss,
            patience: t.patience.unwrap_or(d.patience),
            beta: self.beta()?,
            class_weights: None,
        };
        if !(config.learning_rate > 0.0 && config.learning_rate.is_finite()) {
            return Err(config_error("train.learning_rate", "must be positive"));
        }
        if config.epochs == 0 {
            return Err(config_error("train.epochs", "must be at least 1"));
        }
        config.validate().map_err(|e| config_error("train", e))?;
        Ok(config)
    }

    pub fn beta(&self) -> Result<f64, CliError> {
        let beta = self.config.eval.beta.unwrap_or(DEFAULT_BETA);
        EvalConfig::new(beta, true).map_err(|e| config_error("eval.beta", e))?;
        Ok(beta)
    }

    fn eval_config(&self) -> Result<EvalConfig, CliError> {
        EvalConfig::new(self.beta()?, self.config.eval.per_language.unwrap_or(true))
            .map_err(|e| config_error("eval", e))
    }

    fn corpus_name(&self) -> String {
        self.config.bootstrap.corpus_name.clone().unwrap_or_else(|| "small".into())
    }
}

pub fn load_corpus(path: &Path) -> Result<Corpus, CliError> {
    let (corpus, _) = read_corpus(open(path)?)?;
    Ok(corpus)
}

fn load_model(path: &Path) -> Result<TaggerModel, CliError> {
    Ok(read_model(open(path)?)?)
}

fn save_corpus(path: &Path, corpus: &Corpus, seed: u64) -> Result<(), CliError> {
    write_file(path, |w| write_corpus(w, corpus, Some(seed)))
}

pub fn ingest(ctx: &Context) -> Result<(), CliError> {
    let collection = ctx.ingest_fresh()?;
    write_file(&ctx.out(COLLECTION_FILE), |w| write_collection(w, &collection))?;
    println!("{} documents, {} sentences", collection.len(), collection.sentence_count());
    Ok(())
}

pub fn index(ctx: &Context, rebuild: bool) -> Result<(), CliError> {
    let path = ctx.out(INDEX_FILE);
    if !rebuild && path.exists() && read_index_set(open(&path)?).is_ok() {
        println!("{} is up to date (use --rebuild to force)", path.display());
        return Ok(());
    }
    let collection = ctx.collection()?;
    let normalizer = ctx.normalizer()?;
    let gazetteer = ctx.gazetteer()?;
    let params = ctx.retrieval_params()?;
    let set = ctx.build_indexes(&collection, &normalizer, &gazetteer, &params);
    write_file(&path, |w| write_index_set(w, &set))?;
    println!("{} lemmas, {} phrase indexes", set.positional.lemmas().count(), set.phrase.len());
    Ok(())
}

/// Everything retrieval needs, loaded once per command.
struct RetrievalInputs {
    collection: DocumentCollection,
    normalizer: Normalizer,
    gazetteer: Gazetteer,
    indexes: IndexSet,
    embeddings: Vec<(String, EmbeddingStore)>,
    params: RetrievalParams,
}

impl RetrievalInputs {
    fn load(ctx: &Context) -> Result<Self, CliError> {
        let collection = ctx.collection()?;
        let normalizer = ctx.normalizer()?;
        let gazetteer = ctx.gazetteer()?;
        let params = ctx.retrieval_params()?;
        let indexes = ctx.indexes(&collection, &normalizer, &gazetteer, &params)?;
        Ok(Self { embeddings: ctx.embeddings()?, collection, normalizer, gazetteer, indexes, params })
    }

    fn retriever(&self) -> Result<Retriever<'_>, CliError> {
        Ok(Retriever::new(&self.collection, &self.indexes, &self.normalizer, &self.embeddings, self.params)?)
    }

    fn queries(&self, entity: Option<&str>) -> Result<Vec<Query>, CliError> {
        let mut queries = self.gazetteer.queries(&self.normalizer);
        if let Some(id) = entity {
            queries.retain(|q| q.entity_id == id);
            if queries.is_empty() {
                return Err(CliError::usage(format!("unknown entity id `{id}`")));
            }
        }
        Ok(queries)
    }
}

pub fn retrieve(
    ctx: &Context,
    method: Option<&str>,
    entity: Option<&str>,
    output: Option<&Path>,
) -> Result<(), CliError> {
    let selector = ctx.selector(method)?;
    let inputs = RetrievalInputs::load(ctx)?;
    let retriever = inputs.retriever()?;
    let queries = inputs.queries(entity)?;
    let results = queries
        .par_iter()
        .map(|q| Ok((q.entity_id.clone(), retriever.run(q, &selector)?)))
        .collect::<Result<Vec<(String, Vec<Candidate>)>, CliError>>()?;
    let path = output
        .map(Path::to_path_buf)
        .unwrap_or_else(|| ctx.out(&format!("candidates-{}.tsv", selector.to_string().replace(':', "-"))));
    write_file(&path, |w| {
        for (id, list) in &results {
            write_candidates(&mut *w, id, list)?;
        }
        Ok(())
    })?;
    let total: usize = results.iter().map(|(_, l)| l.len()).sum();
    println!("{selector}: {total} candidates for {} entities", results.len());
    Ok(())
}

pub fn compare_methods(ctx: &Context, top_k: Option<usize>) -> Result<(), CliError> {
    let judgments_path = required(&ctx.config.paths.judgments, "paths.judgments")?;
    let judgments = Judgments::read(open(judgments_path)?)?;
    let inputs = RetrievalInputs::load(ctx)?;
    let retriever = inputs.retriever()?;
    let queries = inputs.queries(None)?;
    let per_query = queries
        .par_iter()
        .map(|q| Ok((q.entity_id.clone(), retriever.run_all(q)?)))
        .collect::<Result<Vec<_>, CliError>>()?;
    let mut by_method: Vec<(String, BTreeMap<String, Vec<Candidate>>)> =
        retriever.roster().iter().map(|s| (s.to_string(), BTreeMap::new())).collect();
    for (entity, lists) in per_query {
        for ((_, slot), (_, list)) in by_method.iter_mut().zip(lists) {
            slot.insert(entity.clone(), list);
        }
    }
    let top_k = top_k.or(ctx.config.eval.top_k).unwrap_or(inputs.params.limit);
    let report = evaluate_retrieval(&by_method, &judgments, top_k, ctx.beta()?);
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    let mut kv = String::new();
    writeln!(kv, "beta={}", report.beta).unwrap();
    writeln!(kv, "top_k={top_k}").unwrap();
    for r in &report.rows {
        let m = &r.method;
        writeln!(kv, "{m}.retrieved={}", r.retrieved).unwrap();
        writeln!(kv, "{m}.relevant_retrieved={}", r.relevant_retrieved).unwrap();
        writeln!(kv, "{m}.total_relevant={}", r.total_relevant).unwrap();
        writeln!(kv, "{m}.precision={:.6}", r.precision).unwrap();
        writeln!(kv, "{m}.recall={:.6}", r.recall).unwrap();
        writeln!(kv, "{m}.fbeta={:.6}", r.fbeta).unwrap();
    }
    let text = report.to_string();
    write_string(&ctx.out("retrieval_report.txt"), &text)?;
    write_string(&ctx.out("retrieval_report.kv"), &kv)?;
    print!("{text}");
    Ok(())
}

fn bootstrap_small(ctx: &Context, method: Option<&str>) -> Result<Corpus, CliError> {
    let inputs = RetrievalInputs::load(ctx)?;
    let retriever = inputs.retriever()?;
    let config = BootstrapConfig {
        selector: ctx.selector(method)?,
        candidate_limit: ctx.config.bootstrap.candidate_limit.unwrap_or(BootstrapConfig::default().candidate_limit),
        split_ratios: ctx.split_ratios()?,
        seed: ctx.seed,
    };
    config.validate().map_err(|e| config_error("bootstrap", e))?;
    Ok(bootstrap_corpus(&ctx.corpus_name(), &inputs.gazetteer, &retriever, &config)?)
}

pub fn bootstrap(ctx: &Context, method: Option<&str>) -> Result<(), CliError> {
    let corpus = bootstrap_small(ctx, method)?;
    save_corpus(&ctx.out(SMALL_FILE), &corpus, ctx.seed)?;
    write_file(&ctx.out("review.txt"), |w| write_review(w, &corpus))?;
    print!("{}", corpus_stats(&corpus));
    Ok(())
}

/// Human-readable training summary; deterministic given the model.
pub fn model_report(model: &TaggerModel) -> String {
    let mut out = String::new();
    writeln!(out, "corpus={}", model.corpus_name).unwrap();
    writeln!(out, "seed={}", model.seed).unwrap();
    writeln!(out, "loss={}", model.loss.as_str()).unwrap();
    writeln!(out, "hash_dim={}", model.features.hash_dim).unwrap();
    writeln!(out, "ngram_sizes={:?}", model.features.ngram_sizes).unwrap();
    writeln!(out, "window={}", model.features.window).unwrap();
    writeln!(out, "shape_features={}", model.features.shape_features).unwrap();
    for (label, w) in silverner::corpus::Label::ALL.iter().zip(model.class_weights.0) {
        writeln!(out, "class_weight.{label}={w:.6}").unwrap();
    }
    writeln!(out, "nonzero_parameters={}", model.nonzero_parameters()).unwrap();
    writeln!(out, "best_epoch={}", model.history.best_epoch).unwrap();
    for (i, (l, f)) in model.history.epoch_loss.iter().zip(&model.history.validation_fbeta).enumerate() {
        writeln!(out, "epoch.{}: loss={l:.6} validation_fbeta={f:.6}", i + 1).unwrap();
    }
    out
}

pub fn train_cmd(
    ctx: &Context,
    corpus: Option<&Path>,
    loss: Option<&str>,
    model_out: Option<&Path>,
) -> Result<(), CliError> {
    let corpus_path = corpus.map(Path::to_path_buf).unwrap_or_else(|| ctx.out(SMALL_FILE));
    let corpus = load_corpus(&corpus_path)?;
    let model = train(&corpus, &ctx.features()?, &ctx.train_config(loss)?)?;
    let model_path = model_out.map(Path::to_path_buf).unwrap_or_else(|| ctx.out(MODEL_FILE));
    write_file(&model_path, |w| write_model(w, &model))?;
    let report = model_report(&model);
    write_string(&model_path.with_extension("report.txt"), &report)?;
    print!("{report}");
    Ok(())
}

pub fn infer(
    ctx: &Context,
    model: Option<&Path>,
    corpus: Option<&Path>,
    output: Option<&Path>,
) -> Result<(), CliError> {
    let model = load_model(&model.map(Path::to_path_buf).unwrap_or_else(|| ctx.out(MODEL_FILE)))?;
    let predicted = match corpus {
        Some(path) => {
            let input = load_corpus(path)?;
            let sentences = input
                .sentences
                .par_iter()
                .map(|s| silverner::corpus::AnnotatedSentence {
                    tags: model.predict(s),
                    gold_entities: None,
                    ..s.clone()
                })
                .collect();
            Corpus {
                name: format!("{}-predicted", input.name),
                sentences,
                split_assignment: input.split_assignment.clone(),
            }
        }
        None => annotate_collection(&model, &ctx.collection()?, "large"),
    };
    let path = output.map(Path::to_path_buf).unwrap_or_else(|| ctx.out("predicted.conll"));
    save_corpus(&path, &predicted, ctx.seed)?;
    print!("{}", corpus_stats(&predicted));
    Ok(())
}

pub fn augment(
    ctx: &Context,
    model: Option<&Path>,
    corpus: Option<&Path>,
    output: Option<&Path>,
) -> Result<(), CliError> {
    let model = load_model(&model.map(Path::to_path_buf).unwrap_or_else(|| ctx.out(MODEL_FILE)))?;
    let small = load_corpus(&corpus.map(Path::to_path_buf).unwrap_or_else(|| ctx.out(SMALL_FILE)))?;
    let mut medium = augment_corpus(&small, &model);
    medium.name = "medium".into();
    save_corpus(&output.map(Path::to_path_buf).unwrap_or_else(|| ctx.out(MEDIUM_FILE)), &medium, ctx.seed)?;
    print!("{}", corpus_stats(&medium));
    Ok(())
}

fn load_gold(path: &Path, sidecar: Option<&Path>) -> Result<Corpus, CliError> {
    let mut gold = load_corpus(path)?;
    if let Some(s) = sidecar {
        read_gold_sidecar(open(s)?, &mut gold)?;
    }
    Ok(gold)
}

pub fn eval(
    ctx: &Context,
    gold: &Path,
    gold_entities: Option<&Path>,
    pred: Option<&Path>,
    prefix: &str,
) -> Result<(), CliError> {
    let gold = load_gold(gold, gold_entities)?;
    let pred = load_corpus(&pred.map(Path::to_path_buf).unwrap_or_else(|| ctx.out("predicted.conll")))?;
    let report = evaluate(&gold, &pred, ctx.eval_config()?)?;
    let diff = diff_report(&gold, &pred)?;
    let text = report.to_string();
    write_string(&ctx.out(&format!("{prefix}_report.txt")), &text)?;
    write_string(&ctx.out(&format!("{prefix}_report.kv")), &report.to_key_values())?;
    write_string(&ctx.out(&format!("{prefix}_confusion.tsv")), &report.confusion.to_tsv())?;
    write_string(&ctx.out(&format!("{prefix}_diff.txt")), &diff.text)?;
    print!("{text}");
    Ok(())
}

pub fn ablate(ctx: &Context, method: Option<&str>) -> Result<(), CliError> {
    if ctx.config.paths.benchmarks.is_empty() {
        return Err(CliError::usage("paths.benchmarks is empty; ablate needs at least one gold benchmark"));
    }
    let mut benchmarks = Vec::new();
    for (name, path) in &ctx.config.paths.benchmarks {
        let sidecar = ctx.config.paths.benchmark_entities.get(name);
        benchmarks.push((name.clone(), load_gold(path, sidecar.map(PathBuf::as_path))?));
    }
    let features = ctx.features()?;
    let beta = ctx.beta()?;
    let weighted = ctx.train_config(Some("WCE"))?;
    let unweighted = ctx.train_config(Some("CE"))?;

    let small = bootstrap_small(ctx, method)?;
    let small_model = train(&small, &features, &weighted)?;
    let mut medium = augment_corpus(&small, &small_model);
    medium.name = "medium".into();
    let medium_model = train(&medium, &features, &weighted)?;
    let large =
        split_corpus(annotate_collection(&medium_model, &ctx.collection()?, "large"), ctx.split_ratios()?, ctx.seed);

    let mut rows = Vec::new();
    for (tier, corpus) in [("S", &small), ("M", &medium), ("L", &large)] {
        for config in [&weighted, &unweighted] {
            let model = train(corpus, &features, config)?;
            let mut scores = Vec::new();
            for (_, gold) in &benchmarks {
                let pred = Corpus {
                    sentences: gold
                        .sentences
                        .iter()
                        .map(|s| silverner::corpus::AnnotatedSentence {
                            tags: model.predict(s),
                            gold_entities: None,
                            ..s.clone()
                        })
                        .collect(),
                    ..gold.clone()
                };
                scores.push(token_metrics(gold, &pred, beta)?.fbeta);
            }
            rows.push(AblationRow {
                model_id: format!("{tier}-{}", config.loss.as_str()),
                training_data: format!("{} ({} sentences)", corpus.name, corpus.split(Split::Train).count()),
                model_size: model.nonzero_parameters(),
                loss: config.loss.as_str().to_string(),
                scores,
            });
        }
    }
    let names: Vec<String> = benchmarks.iter().map(|(n, _)| n.clone()).collect();
    let table = render_ablation_table(&names, &rows, beta);
    write_string(&ctx.out("ablation.txt"), &table)?;
    print!("{table}");
    Ok(())
}

pub fn stats(ctx: &Context, corpus: Option<&Path>) -> Result<(), CliError> {
    let path = corpus.map(Path::to_path_buf).unwrap_or_else(|| ctx.out(SMALL_FILE));
    print!("{}", corpus_stats(&load_corpus(&path)?));
    Ok(())
}
