//! Brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet};
use std::path::PathBuf;

use congen::ingest::CleanSentence;
use congen::tagger::lemma_forms;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A core fixture; also resolves when this module is included from the CLI crate.
pub fn fixture(path: &str) -> PathBuf {
    let here = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let core = if here.ends_with("core") { here } else { here.join("../core") };
    core.join("tests/fixtures").join(path)
}

pub fn bm25_corpus() -> Vec<CleanSentence> {
    congen::jsonl::read_path(&fixture("bm25/sentences.jsonl")).unwrap()
}

/// Okapi BM25 of every sentence, straight from the token lists.
pub fn brute_scores(corpus: &[CleanSentence], query: &[String], k1: f64, b: f64) -> Vec<f64> {
    let terms: BTreeSet<&str> = query.iter().map(String::as_str).collect();
    let n = corpus.len() as f64;
    let avgdl = corpus.iter().map(|s| s.tokens.len()).sum::<usize>() as f64 / n;
    let df = |t: &str| corpus.iter().filter(|s| s.tokens.iter().any(|x| x == t)).count() as f64;
    let idfs: Vec<(&str, f64)> = terms
        .iter()
        .map(|&t| (t, ((n - df(t) + 0.5) / (df(t) + 0.5) + 1.0).ln()))
        .collect();
    corpus
        .iter()
        .map(|s| {
            let dl = s.tokens.len() as f64;
            let mut total = 0.0;
            for &(t, idf) in &idfs {
                let tf = s.tokens.iter().filter(|x| *x == t).count() as f64;
                if tf > 0.0 {
                    total += idf * tf * (k1 + 1.0) / (tf + k1 * (1.0 - b + b * dl / avgdl));
                }
            }
            total
        })
        .collect()
}

/// Full scan: all positive scores, best first, ties to the lower ordinal.
pub fn brute_search(corpus: &[CleanSentence], query: &[String], k: usize, k1: f64, b: f64) -> Vec<(u32, f64)> {
    let mut ranked: Vec<(u32, f64)> = brute_scores(corpus, query, k1, b)
        .into_iter()
        .enumerate()
        .filter(|&(_, s)| s > 0.0)
        .map(|(i, s)| (i as u32, s))
        .collect();
    ranked.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    ranked.truncate(k);
    ranked
}

/// Ordinals whose tokens' lemma forms include at least `min_match` concepts.
pub fn brute_concept_members(corpus: &[CleanSentence], concepts: &[&str], min_match: usize) -> BTreeSet<u32> {
    corpus
        .iter()
        .enumerate()
        .filter(|(_, s)| {
            let forms: HashSet<String> = s.tokens.iter().flat_map(|t| lemma_forms(t)).collect();
            concepts.iter().filter(|c| forms.contains(**c)).count() >= min_match
        })
        .map(|(i, _)| i as u32)
        .collect()
}

/// `count` seeded queries of 1 to 4 terms drawn from the corpus vocabulary,
/// with an occasional out-of-vocabulary term.
pub fn random_queries(corpus: &[CleanSentence], count: usize, seed: u64) -> Vec<Vec<String>> {
    let vocab: Vec<&String> = corpus.iter().flat_map(|s| &s.tokens).collect::<BTreeSet<_>>().into_iter().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let len = rng.random_range(1..=4);
            let mut q: Vec<String> = (0..len).map(|_| (*vocab.choose(&mut rng).unwrap()).clone()).collect();
            if rng.random_bool(0.1) {
                q.push("zzzabsent".into());
            }
            q
        })
        .collect()
}

/// Concept lists from a `{"concepts": [...]}` JSON-lines file, in file order.
pub fn concept_lines(path: &str) -> Vec<Vec<String>> {
    #[derive(serde::Deserialize)]
    struct Line {
        concepts: Vec<String>,
    }
    congen::jsonl::read_path::<Line>(&fixture(path))
        .unwrap()
        .into_iter()
        .map(|l| l.concepts)
        .collect()
}

pub fn query_lists(queries: &[congen::dataset::ConceptQuery]) -> Vec<Vec<String>> {
    queries.iter().map(|q| q.concepts.clone().into_vec()).collect()
}

pub fn bundled_model() -> &'static congen::tagger::PerceptronModel {
    static MODEL: std::sync::OnceLock<congen::tagger::PerceptronModel> = std::sync::OnceLock::new();
    MODEL.get_or_init(|| congen::tagger::train(&congen::tagger::bundled_treebank().train, 5, 13).unwrap())
}
