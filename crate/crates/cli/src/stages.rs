use std::collections::BTreeSet;
use std::fs::{self, File, OpenOptions};
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use congen::dataset::{self, ConceptQuery, ReconSummary};
use congen::generator::{self, AssembleOptions, Generator, HttpGenerator, SemiGoldenRecord, StubGenerator};
use congen::index::{build_index, Bm25Index};
use congen::ingest::{self, CleanSentence, LengthFilter, RawDocument};
use congen::tagger::{self, ConceptSet, PerceptronModel};
use congen::{jsonl, metrics};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::Config;
use crate::plan::Plan;
use crate::Command;

const INGEST_BATCH: usize = 256;
const RECON_CHUNK: usize = 512;

pub fn dispatch(command: &Command, config: &Config, dry_run: bool) -> Result<()> {
    match command {
        Command::Ingest => ingest(config, dry_run),
        Command::Index => index(config, dry_run),
        Command::Search { query, concepts, concepts_file, k } => {
            search(config, dry_run, query.as_deref(), concepts.as_deref(), concepts_file.as_deref(), *k)
        }
        Command::TrainTagger => train_tagger(config, dry_run),
        Command::ExtractConcepts { text } => extract_concepts(config, dry_run, text.as_deref()),
        Command::BuildRecon => build_recon(config, dry_run),
        Command::Enumerate { pairs, sets } => enumerate(config, dry_run, *pairs, *sets),
        Command::Generate { pairs, sets, fresh } => generate(config, dry_run, *pairs, *sets, *fresh),
        Command::Evaluate => evaluate(config, dry_run),
        Command::Stats => stats(config, dry_run),
    }
}

/// Prints the plan when dry-running; otherwise checks that inputs exist.
/// Returns whether the stage should execute.
fn begin(plan: &Plan, config: &Config, dry_run: bool) -> Result<bool> {
    if dry_run {
        plan.print();
        return Ok(false);
    }
    plan.check_inputs(&config.paths)?;
    Ok(true)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    Ok(BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?))
}

fn write_jsonl<'a, T: Serialize + 'a>(path: &Path, values: impl IntoIterator<Item = &'a T>) -> Result<()> {
    let mut out = create(path)?;
    jsonl::write(&mut out, values)?;
    out.flush()?;
    Ok(())
}

fn load_model(path: &Path) -> Result<PerceptronModel> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(PerceptronModel::from_bytes(&bytes)?)
}

fn load_index(path: &Path) -> Result<Bm25Index> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(Bm25Index::from_bytes(&bytes)?)
}

fn load_sentences(path: &Path) -> Result<Vec<CleanSentence>> {
    Ok(jsonl::read_path(path)?)
}

fn load_queries(path: &Path) -> Result<Vec<ConceptQuery>> {
    Ok(jsonl::read_path(path)?)
}

fn ingest(config: &Config, dry_run: bool) -> Result<()> {
    let mut plan = Plan::new("ingest");
    let dump = plan.input(&config.paths, "dump")?;
    let out = plan.output(&config.paths, "sentences")?;
    let filter = LengthFilter { min_tokens: config.ingest.min_tokens, max_tokens: config.ingest.max_tokens };
    plan.setting("min_tokens", filter.min_tokens);
    plan.setting("max_tokens", filter.max_tokens);
    if !begin(&plan, config, dry_run)? {
        return Ok(());
    }
    anyhow::ensure!(filter.min_tokens <= filter.max_tokens, "ingest.min_tokens exceeds ingest.max_tokens");

    let mut writer = create(&out)?;
    let mut docs = ingest::parse_dump(ingest::open_dump(&dump)?);
    let (mut n_docs, mut n_sentences) = (0usize, 0usize);
    loop {
        let batch: Vec<RawDocument> = docs.by_ref().take(INGEST_BATCH).collect::<congen::Result<_>>()?;
        if batch.is_empty() {
            break;
        }
        n_docs += batch.len();
        let cleaned: Vec<Vec<CleanSentence>> = batch.par_iter().map(|d| ingest::clean_document(d, &filter)).collect();
        for sentence in cleaned.iter().flatten() {
            jsonl::write_line(&mut writer, sentence)?;
            n_sentences += 1;
        }
    }
    writer.flush()?;
    println!("ingested {n_docs} documents, {n_sentences} sentences -> {}", out.display());
    Ok(())
}

fn index(config: &Config, dry_run: bool) -> Result<()> {
    let mut plan = Plan::new("index");
    let input = plan.input(&config.paths, "sentences")?;
    let out = plan.output(&config.paths, "index")?;
    let params = config.bm25_params()?;
    plan.setting("k1", params.k1);
    plan.setting("b", params.b);
    if !begin(&plan, config, dry_run)? {
        return Ok(());
    }
    let sentences = load_sentences(&input)?;
    let index = build_index(&sentences, params)?;
    let mut w = create(&out)?;
    w.write_all(&index.to_bytes())?;
    w.flush()?;
    println!(
        "indexed {} sentences, {} terms, avgdl {:.3} -> {}",
        index.len(),
        index.terms().len(),
        index.avgdl(),
        out.display()
    );
    Ok(())
}

#[derive(Serialize)]
struct Hit<'a> {
    rank: usize,
    score: f64,
    doc_id: u64,
    sent_idx: u32,
    text: &'a str,
}

fn search(
    config: &Config,
    dry_run: bool,
    query: Option<&str>,
    concepts: Option<&str>,
    concepts_file: Option<&Path>,
    k: Option<usize>,
) -> Result<()> {
    let mut plan = Plan::new("search");
    let index_path = plan.input(&config.paths, "index")?;
    let sentences_path = plan.input(&config.paths, "sentences")?;
    let matched = match concepts_file {
        Some(file) => {
            plan.input_path("concepts_file", file);
            Some(plan.output(&config.paths, "matched")?)
        }
        None => None,
    };
    if query.is_none() && concepts.is_none() && concepts_file.is_none() {
        bail!("search needs --query, --concepts or --concepts-file");
    }
    plan.setting("min_match", config.extract.min_match);
    plan.setting("top_k", k.unwrap_or(config.extract.top_k));
    if !begin(&plan, config, dry_run)? {
        return Ok(());
    }

    let index = load_index(&index_path)?;
    let sentences = load_sentences(&sentences_path)?;
    if sentences.len() != index.len() {
        bail!(
            "index holds {} sentences but {} has {}; rerun `congen index`",
            index.len(),
            sentences_path.display(),
            sentences.len()
        );
    }

    if let Some(text) = query {
        let tokens = ingest::tokenize(text);
        let mut out = std::io::stdout().lock();
        for (rank, (ordinal, score)) in index.search(&tokens, k.unwrap_or(10)).into_iter().enumerate() {
            let s = &sentences[ordinal as usize];
            let hit = Hit { rank: rank + 1, score, doc_id: s.doc_id, sent_idx: s.sent_idx, text: &s.text };
            jsonl::write_line(&mut out, &hit)?;
        }
        return Ok(());
    }

    let top_k = k.unwrap_or(config.extract.top_k);
    if let Some(list) = concepts {
        let set = ConceptSet::new(list.split(',').map(str::trim).filter(|c| !c.is_empty()));
        let mut out = std::io::stdout().lock();
        for (rank, ordinal) in index.concept_match(&set, config.extract.min_match)?.into_iter().take(top_k).enumerate() {
            let s = &sentences[ordinal as usize];
            let score = index.score(set.concepts(), ordinal);
            let hit = Hit { rank: rank + 1, score, doc_id: s.doc_id, sent_idx: s.sent_idx, text: &s.text };
            jsonl::write_line(&mut out, &hit)?;
        }
        return Ok(());
    }

    let (file, out) = (concepts_file.expect("checked above"), matched.expect("set with concepts_file"));
    let sets = dataset::load_commongen(BufReader::new(File::open(file).with_context(|| format!("opening {}", file.display()))?))?;
    let unique: BTreeSet<&ConceptSet> = sets.iter().filter(|s| !s.is_empty()).collect();
    let unique: Vec<&ConceptSet> = unique.into_iter().collect();
    let hits: Vec<Vec<u32>> = unique
        .par_iter()
        .map(|set| index.concept_match(set, config.extract.min_match).map(|v| v.into_iter().take(top_k).collect()))
        .collect::<congen::Result<_>>()?;
    let ordinals: BTreeSet<u32> = hits.into_iter().flatten().collect();
    write_jsonl(&out, ordinals.iter().map(|&o| &sentences[o as usize]))?;
    println!(
        "{} concept sets matched {} distinct sentences (min_match {}) -> {}",
        unique.len(),
        ordinals.len(),
        config.extract.min_match,
        out.display()
    );
    Ok(())
}

fn train_tagger(config: &Config, dry_run: bool) -> Result<()> {
    let mut plan = Plan::new("train-tagger");
    let treebank = match &config.paths.treebank {
        Some(_) => Some(plan.input(&config.paths, "treebank")?),
        None => None,
    };
    let out = plan.output(&config.paths, "model")?;
    plan.setting("treebank", if treebank.is_some() { "configured" } else { "bundled" });
    plan.setting("epochs", config.tagger.epochs);
    plan.setting("seed", config.seeds.tagger);
    if !begin(&plan, config, dry_run)? {
        return Ok(());
    }
    let (train, dev) = match treebank {
        Some(path) => {
            let text = fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
            (tagger::parse_tagged_corpus(&text)?, Vec::new())
        }
        None => {
            let tb = tagger::bundled_treebank();
            (tb.train, tb.dev)
        }
    };
    let model = tagger::train(&train, config.tagger.epochs, config.seeds.tagger)?;
    let mut w = create(&out)?;
    w.write_all(&model.to_bytes())?;
    w.flush()?;
    print!("trained on {} sentences, {} features", train.len(), model.feature_count());
    if !dev.is_empty() {
        print!(", held-out accuracy {:.4}", model.accuracy(&dev));
    }
    println!(" -> {}", out.display());
    Ok(())
}

#[derive(Serialize)]
struct ConceptLine<'a> {
    doc_id: u64,
    sent_idx: u32,
    concepts: &'a ConceptSet,
}

fn extract_concepts(config: &Config, dry_run: bool, text: Option<&str>) -> Result<()> {
    let mut plan = Plan::new("extract-concepts");
    let model_path = plan.input(&config.paths, "model")?;
    let io = match text {
        Some(_) => None,
        None => Some((plan.input(&config.paths, "sentences")?, plan.output(&config.paths, "concepts")?)),
    };
    if !begin(&plan, config, dry_run)? {
        return Ok(());
    }
    let model = load_model(&model_path)?;
    let Some((input, out)) = io else {
        let tokens = ingest::tokenize(text.unwrap_or_default());
        println!("{}", tagger::extract_concepts(&model, &tokens));
        return Ok(());
    };
    let sentences = load_sentences(&input)?;
    let sets: Vec<ConceptSet> = sentences.par_iter().map(|s| tagger::extract_concepts(&model, &s.tokens)).collect();
    let lines: Vec<ConceptLine> = sentences
        .iter()
        .zip(&sets)
        .map(|(s, c)| ConceptLine { doc_id: s.doc_id, sent_idx: s.sent_idx, concepts: c })
        .collect();
    write_jsonl(&out, &lines)?;
    println!("extracted concepts for {} sentences -> {}", lines.len(), out.display());
    Ok(())
}

fn build_recon(config: &Config, dry_run: bool) -> Result<()> {
    let mut plan = Plan::new("build-recon");
    let source_key = if config.paths.matched.is_some() { "matched" } else { "sentences" };
    let input = plan.input(&config.paths, source_key)?;
    let model_path = plan.input(&config.paths, "model")?;
    let out = plan.output(&config.paths, "recon")?;
    plan.setting("max_concepts", config.extract.max_concepts);
    if !begin(&plan, config, dry_run)? {
        return Ok(());
    }
    let model = load_model(&model_path)?;
    let sentences = load_sentences(&input)?;
    let max = config.extract.max_concepts;
    let parts: Vec<(Vec<dataset::ReconRecord>, ReconSummary)> = sentences
        .par_chunks(RECON_CHUNK)
        .map(|chunk| dataset::build_recon(chunk, &model, max))
        .collect::<congen::Result<_>>()?;
    let mut summary = ReconSummary::default();
    let mut records = Vec::new();
    for (chunk_records, s) in parts {
        records.extend(chunk_records);
        summary.sentences += s.sentences;
        summary.emitted += s.emitted;
        summary.skipped += s.skipped;
        summary.subsampled += s.subsampled;
    }
    write_jsonl(&out, &records)?;
    println!(
        "{} sentences: {} records ({} subsampled), {} skipped -> {}",
        summary.sentences,
        summary.emitted,
        summary.subsampled,
        summary.skipped,
        out.display()
    );
    Ok(())
}

fn enumerate(config: &Config, dry_run: bool, pairs: bool, sets: bool) -> Result<()> {
    let (pairs, sets) = if pairs || sets { (pairs, sets) } else { (true, true) };
    let mut plan = Plan::new("enumerate");
    let input = plan.input(&config.paths, "commongen")?;
    let pairs_out = if pairs { Some(plan.output(&config.paths, "pairs")?) } else { None };
    let sets_out = if sets { Some(plan.output(&config.paths, "sets")?) } else { None };
    if !begin(&plan, config, dry_run)? {
        return Ok(());
    }
    let concept_sets = dataset::load_commongen(BufReader::new(File::open(&input)?))?;
    if let Some(out) = pairs_out {
        let queries = dataset::enumerate_pairs(&concept_sets);
        write_jsonl(&out, &queries)?;
        println!("{} concept pairs -> {}", queries.len(), out.display());
    }
    if let Some(out) = sets_out {
        let queries = dataset::enumerate_sets(&concept_sets);
        let s = dataset::stats(queries.iter().map(|q| &q.concepts));
        write_jsonl(&out, &queries)?;
        println!("{} concept sets [{}] -> {}", queries.len(), s.size_summary(), out.display());
    }
    Ok(())
}

fn generate(config: &Config, dry_run: bool, pairs: bool, sets: bool, fresh: bool) -> Result<()> {
    let (pairs, sets) = if pairs || sets { (pairs, sets) } else { (true, true) };
    let mut plan = Plan::new("generate");
    let mut inputs = Vec::new();
    if pairs {
        inputs.push(plan.input(&config.paths, "pairs")?);
    }
    if sets {
        inputs.push(plan.input(&config.paths, "sets")?);
    }
    let model_path = match &config.paths.model {
        Some(_) => Some(plan.input(&config.paths, "model")?),
        None => None,
    };
    let out = plan.output(&config.paths, "semi_golden")?;
    let g = &config.generate;
    let generator: Box<dyn Generator> = match (&g.endpoint, g.stub) {
        (Some(_), true) => bail!("both `generate.endpoint` and `generate.stub` are set; pick one"),
        (Some(url), false) => Box::new(HttpGenerator::new(url.clone())),
        (None, true) => Box::new(StubGenerator { seed: config.seeds.stub }),
        (None, false) => bail!("no generator: pass --stub or --endpoint URL, or set `generate.endpoint`"),
    };
    plan.setting("generator", generator.id());
    plan.setting("threshold", g.threshold);
    plan.setting("candidates", g.num_candidates);
    plan.setting("in_flight", g.in_flight);
    plan.setting("mode", if fresh || !out.exists() { "fresh" } else { "resume" });
    if !begin(&plan, config, dry_run)? {
        return Ok(());
    }

    let mut queries = Vec::new();
    for path in &inputs {
        queries.extend(load_queries(path)?);
    }
    let model = model_path.as_deref().map(load_model).transpose()?;
    if let Some(url) = &g.endpoint {
        HttpGenerator::new(url.clone()).health().context("generator health check failed")?;
    }

    let offset = if !fresh && out.exists() {
        let existing: Vec<SemiGoldenRecord> = jsonl::read_path(&out)?;
        let offset = generator::resume_offset(&queries, &existing)?;
        log::info!("resuming after {} existing records at query {offset}", existing.len());
        offset
    } else {
        0
    };
    let file = if offset > 0 {
        OpenOptions::new().append(true).open(&out)?
    } else {
        create(&out)?.into_inner().map_err(|e| e.into_error())?
    };
    let mut writer = BufWriter::new(file);
    let opts = AssembleOptions {
        threshold: g.threshold,
        max_tokens: g.max_tokens,
        num_candidates: g.num_candidates,
        in_flight: g.in_flight,
    };
    let summary = generator::assemble(&queries[offset..], generator.as_ref(), model.as_ref(), &opts, |record| {
        jsonl::write_line(&mut writer, record)
    })?;
    writer.flush()?;
    println!("{}", serde_json::to_string(&summary)?);
    Ok(())
}

fn evaluate(config: &Config, dry_run: bool) -> Result<()> {
    let mut plan = Plan::new("evaluate");
    let hyps = plan.input(&config.paths, "hypotheses")?;
    let refs = plan.input(&config.paths, "references")?;
    let report_path = match &config.paths.report {
        Some(_) => Some(plan.output(&config.paths, "report")?),
        None => None,
    };
    if !begin(&plan, config, dry_run)? {
        return Ok(());
    }
    let report = metrics::evaluate(&hyps, &refs)?;
    if let Some(path) = report_path {
        let mut w = create(&path)?;
        serde_json::to_writer(&mut w, &report)?;
        w.write_all(b"\n")?;
        w.flush()?;
    }
    println!("{report}");
    Ok(())
}

fn stats(config: &Config, dry_run: bool) -> Result<()> {
    let mut plan = Plan::new("stats");
    let pairs = plan.input(&config.paths, "pairs")?;
    let sets = plan.input(&config.paths, "sets")?;
    let semi = match &config.paths.semi_golden {
        Some(p) if p.exists() => Some(plan.input(&config.paths, "semi_golden")?),
        _ => None,
    };
    if !begin(&plan, config, dry_run)? {
        return Ok(());
    }
    let pair_q = load_queries(&pairs)?;
    let set_q = load_queries(&sets)?;
    let pair_stats = dataset::stats(pair_q.iter().map(|q| &q.concepts));
    let set_stats = dataset::stats(set_q.iter().map(|q| &q.concepts));
    let mut union = pair_stats.clone();
    union.merge(&set_stats);

    println!("{:<14}{:>12}  by size", "file", "records");
    println!("{:<14}{:>12}  {}", "pairs", dataset::group_thousands(pair_stats.n_sentences), pair_stats.size_summary());
    println!("{:<14}{:>12}  {}", "sets", dataset::group_thousands(set_stats.n_sentences), set_stats.size_summary());
    println!("{:<14}{:>12}  {}", "pairs+sets", dataset::group_thousands(union.n_sentences), union.size_summary());
    if let Some(path) = semi {
        let records: Vec<SemiGoldenRecord> = jsonl::read_path(&path)?;
        let s = dataset::stats(records.iter().map(|r| &r.concepts));
        println!("{:<14}{:>12}  {}", "semi-golden", dataset::group_thousands(s.n_sentences), s.size_summary());
    }

    println!();
    println!("{:<16}{:>10}{:>12}{:>11}  (informational)", "reference check", "observed", "reference", "deviation");
    for check in dataset::compare_with_reference(&pair_stats, &set_stats) {
        println!(
            "{:<16}{:>10}{:>12}{:>10.2}%",
            check.label,
            dataset::group_thousands(check.observed),
            dataset::group_thousands(check.reference),
            100.0 * check.relative_deviation
        );
        if !check.within(0.01) {
            log::warn!(
                "{}: {} vs reference {} ({:.2}% off); counts depend on the training file and on whether concepts were deduplicated before or after lemmatization",
                check.label,
                check.observed,
                check.reference,
                100.0 * check.relative_deviation
            );
        }
    }
    Ok(())
}
