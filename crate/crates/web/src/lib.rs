//! WebAssembly bindings for the demo page in `www/`.
//!
//! Each export takes plain strings and numbers and returns a JSON string.
//! The `*_report` functions hold the logic and are callable from Rust.

use congen::index::{build_index, Bm25Params};
use congen::ingest::{segment_sentences, strip_markup, tokenize, CleanSentence};
use congen::metrics::{self, EvalInstance};
use serde::Serialize;
use wasm_bindgen::prelude::*;

#[derive(Debug, Serialize)]
pub struct Segmented {
    pub plain: String,
    pub sentences: Vec<SegmentedSentence>,
}

#[derive(Debug, Serialize)]
pub struct SegmentedSentence {
    pub text: String,
    pub tokens: Vec<String>,
}

pub fn segment_report(wikitext: &str) -> Segmented {
    let plain = strip_markup(wikitext);
    let sentences = segment_sentences(&plain)
        .into_iter()
        .map(|text| SegmentedSentence { tokens: tokenize(&text), text })
        .collect();
    Segmented { plain, sentences }
}

#[derive(Debug, Serialize)]
pub struct Bm25Report {
    pub n: usize,
    pub avgdl: f64,
    pub terms: Vec<TermInfo>,
    pub hits: Vec<Bm25Hit>,
}

#[derive(Debug, Serialize)]
pub struct TermInfo {
    pub term: String,
    pub df: usize,
    pub idf: f64,
}

#[derive(Debug, Serialize)]
pub struct Bm25Hit {
    pub line: u32,
    pub text: String,
    pub length: u32,
    pub score: f64,
    /// Per query term, in `terms` order.
    pub contributions: Vec<f64>,
}

/// Ranks every non-blank line of `corpus` against `query`.
pub fn bm25_report(corpus: &str, query: &str, k1: f64, b: f64) -> Result<Bm25Report, String> {
    let params = Bm25Params { k1, b };
    params.validate().map_err(|e| e.to_string())?;
    let sentences: Vec<CleanSentence> = corpus
        .lines()
        .filter(|l| !l.trim().is_empty())
        .enumerate()
        .map(|(i, l)| CleanSentence { doc_id: 0, sent_idx: i as u32, text: l.trim().to_string(), tokens: tokenize(l) })
        .collect();
    let index = build_index(&sentences, params).map_err(|e| e.to_string())?;
    let mut query_terms = tokenize(query);
    query_terms.sort();
    query_terms.dedup();
    let terms = query_terms
        .iter()
        .map(|t| TermInfo { term: t.clone(), df: index.df(t), idf: index.idf(index.df(t)) })
        .collect();
    let hits = index
        .search(&query_terms, sentences.len())
        .into_iter()
        .map(|(ordinal, score)| Bm25Hit {
            line: ordinal + 1,
            text: sentences[ordinal as usize].text.clone(),
            length: index.doc_length(ordinal),
            score,
            contributions: query_terms.iter().map(|t| index.term_score(t, ordinal)).collect(),
        })
        .collect();
    Ok(Bm25Report { n: index.len(), avgdl: index.avgdl(), terms, hits })
}

#[derive(Debug, Serialize)]
pub struct MetricsView {
    pub bleu4: f64,
    pub rouge_l: f64,
    pub meteor: f64,
    pub cider: f64,
    pub per_instance: Vec<InstanceScores>,
}

#[derive(Debug, Serialize)]
pub struct InstanceScores {
    pub rouge_l: f64,
    pub meteor: f64,
    pub cider: f64,
}

/// One hypothesis per line in `hypotheses`; the matching line of
/// `references` holds that hypothesis's references separated by `|`.
pub fn metrics_report(hypotheses: &str, references: &str) -> Result<MetricsView, String> {
    let hyps: Vec<&str> = hypotheses.lines().filter(|l| !l.trim().is_empty()).collect();
    let refs: Vec<&str> = references.lines().filter(|l| !l.trim().is_empty()).collect();
    if hyps.len() != refs.len() {
        return Err(format!("{} hypotheses but {} reference lines", hyps.len(), refs.len()));
    }
    let instances: Vec<EvalInstance> = hyps
        .iter()
        .zip(&refs)
        .enumerate()
        .map(|(i, (h, r))| {
            let alternatives: Vec<&str> = r.split('|').filter(|s| !s.trim().is_empty()).collect();
            EvalInstance::from_text(i.to_string(), h, &alternatives)
        })
        .collect();
    if let Some(bad) = instances.iter().find(|i| i.references.is_empty()) {
        return Err(format!("line {} has no references", bad.id.parse::<usize>().unwrap_or(0) + 1));
    }
    let err = |e: congen::Error| e.to_string();
    let cider = metrics::cider_scores(&instances);
    Ok(MetricsView {
        bleu4: metrics::bleu4(&instances).map_err(err)?,
        rouge_l: metrics::rouge_l(&instances).map_err(err)?,
        meteor: metrics::meteor(&instances).map_err(err)?,
        cider: metrics::cider(&instances).map_err(err)?,
        per_instance: instances
            .iter()
            .zip(cider)
            .map(|(i, c)| InstanceScores { rouge_l: metrics::rouge_l_instance(i), meteor: metrics::meteor_instance(i), cider: c })
            .collect(),
    })
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).unwrap_or_else(|e| format!("{{\"error\":{:?}}}", e.to_string()))
}

fn error_json(message: String) -> String {
    to_json(&serde_json::json!({ "error": message }))
}

#[wasm_bindgen]
pub fn strip_and_segment(wikitext: &str) -> String {
    to_json(&segment_report(wikitext))
}

#[wasm_bindgen]
pub fn bm25_explore(corpus: &str, query: &str, k1: f64, b: f64) -> String {
    bm25_report(corpus, query, k1, b).map_or_else(error_json, |r| to_json(&r))
}

#[wasm_bindgen]
pub fn score_metrics(hypotheses: &str, references: &str) -> String {
    metrics_report(hypotheses, references).map_or_else(error_json, |r| to_json(&r))
}
