//! Okapi BM25 inverted index over extracted sentences.

mod codec;
mod varint;

use std::collections::{BTreeMap, HashMap};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::CleanSentence;
use crate::tagger::{lemma_forms, ConceptSet};

/// Okapi BM25 parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bm25Params {
    /// Term-frequency saturation.
    pub k1: f64,
    /// Length normalization strength, in `[0, 1]`.
    pub b: f64,
}

impl Default for Bm25Params {
    fn default() -> Self {
        Bm25Params { k1: 1.2, b: 0.75 }
    }
}

impl Bm25Params {
    pub fn validate(&self) -> Result<()> {
        if !(self.k1.is_finite() && self.k1 >= 0.0) {
            return Err(Error::InvalidArgument(format!("k1 must be finite and >= 0, got {}", self.k1)));
        }
        if !(0.0..=1.0).contains(&self.b) {
            return Err(Error::InvalidArgument(format!("b must lie in [0, 1], got {}", self.b)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Posting {
    pub ordinal: u32,
    pub tf: u32,
}

/// Where a sentence came from in the dump.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentenceId {
    pub doc_id: u64,
    pub sent_idx: u32,
}

/// Immutable inverted index. Sentence ordinals are assigned in input order.
#[derive(Debug, Clone)]
pub struct Bm25Index {
    params: Bm25Params,
    terms: Vec<String>,
    postings: Vec<Vec<Posting>>,
    doc_lengths: Vec<u32>,
    total_length: u64,
    id_map: Vec<SentenceId>,
    lemma_terms: OnceLock<HashMap<String, Vec<usize>>>,
}

/// Builds an index from sentence tokens.
pub fn build_index<I>(sentences: I, params: Bm25Params) -> Result<Bm25Index>
where
    I: IntoIterator,
    I::Item: std::borrow::Borrow<CleanSentence>,
{
    use std::borrow::Borrow;

    params.validate()?;
    let mut dictionary: BTreeMap<String, Vec<Posting>> = BTreeMap::new();
    let mut doc_lengths = Vec::new();
    let mut id_map = Vec::new();
    let mut total_length = 0u64;
    for sentence in sentences {
        let sentence = sentence.borrow();
        let ordinal = u32::try_from(doc_lengths.len())
            .map_err(|_| Error::InvalidArgument("more than u32::MAX sentences".into()))?;
        let mut counts: BTreeMap<&str, u32> = BTreeMap::new();
        for token in &sentence.tokens {
            *counts.entry(token.as_str()).or_default() += 1;
        }
        for (term, tf) in counts {
            match dictionary.get_mut(term) {
                Some(list) => list.push(Posting { ordinal, tf }),
                None => {
                    dictionary.insert(term.to_string(), vec![Posting { ordinal, tf }]);
                }
            }
        }
        doc_lengths.push(sentence.tokens.len() as u32);
        total_length += sentence.tokens.len() as u64;
        id_map.push(SentenceId {
            doc_id: sentence.doc_id,
            sent_idx: sentence.sent_idx,
        });
    }
    if doc_lengths.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let (terms, postings) = dictionary.into_iter().unzip();
    Ok(Bm25Index {
        params,
        terms,
        postings,
        doc_lengths,
        total_length,
        id_map,
        lemma_terms: OnceLock::new(),
    })
}

impl Bm25Index {
    pub fn params(&self) -> Bm25Params {
        self.params
    }

    /// Number of indexed sentences.
    pub fn len(&self) -> usize {
        self.doc_lengths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.doc_lengths.is_empty()
    }

    pub fn avgdl(&self) -> f64 {
        self.total_length as f64 / self.len() as f64
    }

    pub fn doc_length(&self, ordinal: u32) -> u32 {
        self.doc_lengths[ordinal as usize]
    }

    pub fn sentence_id(&self, ordinal: u32) -> SentenceId {
        self.id_map[ordinal as usize]
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    fn term_id(&self, term: &str) -> Option<usize> {
        self.terms.binary_search_by(|t| t.as_str().cmp(term)).ok()
    }

    pub fn postings(&self, term: &str) -> &[Posting] {
        self.term_id(term).map_or(&[], |id| &self.postings[id])
    }

    pub fn df(&self, term: &str) -> usize {
        self.postings(term).len()
    }

    pub fn tf(&self, term: &str, ordinal: u32) -> u32 {
        let list = self.postings(term);
        list.binary_search_by_key(&ordinal, |p| p.ordinal)
            .map_or(0, |i| list[i].tf)
    }

    /// Lucene-style IDF, `ln((N - df + 0.5) / (df + 0.5) + 1)`; positive for
    /// every `df` in `[0, N]`.
    pub fn idf(&self, df: usize) -> f64 {
        let n = self.len() as f64;
        let df = df as f64;
        ((n - df + 0.5) / (df + 0.5) + 1.0).ln()
    }

    /// One term's contribution to [`Bm25Index::score`]; 0 when absent.
    pub fn term_score(&self, term: &str, ordinal: u32) -> f64 {
        match self.tf(term, ordinal) {
            0 => 0.0,
            tf => self.term_weight(self.idf(self.df(term)), tf, ordinal),
        }
    }

    fn term_weight(&self, idf: f64, tf: u32, ordinal: u32) -> f64 {
        let Bm25Params { k1, b } = self.params;
        let tf = f64::from(tf);
        let dl = f64::from(self.doc_lengths[ordinal as usize]);
        idf * tf * (k1 + 1.0) / (tf + k1 * (1.0 - b + b * dl / self.avgdl()))
    }

    /// BM25 score of one sentence. The query is treated as a set.
    ///
    /// # Panics
    /// If `ordinal` is out of range.
    pub fn score<S: AsRef<str>>(&self, query: &[S], ordinal: u32) -> f64 {
        assert!((ordinal as usize) < self.len(), "ordinal {ordinal} out of range");
        let mut total = 0.0;
        for term in query_set(query) {
            let tf = self.tf(term, ordinal);
            if tf > 0 {
                total += self.term_weight(self.idf(self.df(term)), tf, ordinal);
            }
        }
        total
    }

    /// The `k` best-scoring sentences, best first, ties broken by lower
    /// ordinal. Sentences sharing no term with the query are never returned.
    pub fn search<S: AsRef<str>>(&self, query: &[S], k: usize) -> Vec<(u32, f64)> {
        if k == 0 {
            return Vec::new();
        }
        let mut scores: HashMap<u32, f64> = HashMap::new();
        for term in query_set(query) {
            let list = self.postings(term);
            if list.is_empty() {
                continue;
            }
            let idf = self.idf(list.len());
            for p in list {
                *scores.entry(p.ordinal).or_insert(0.0) += self.term_weight(idf, p.tf, p.ordinal);
            }
        }
        let mut ranked: Vec<(u32, f64)> = scores.into_iter().collect();
        sort_ranked(&mut ranked);
        ranked.truncate(k);
        ranked
    }

    fn lemma_terms(&self) -> &HashMap<String, Vec<usize>> {
        self.lemma_terms.get_or_init(|| {
            let mut map: HashMap<String, Vec<usize>> = HashMap::new();
            for (id, term) in self.terms.iter().enumerate() {
                let mut forms = lemma_forms(term).to_vec();
                forms.sort();
                forms.dedup();
                for form in forms {
                    map.entry(form).or_default().push(id);
                }
            }
            map
        })
    }

    /// Sentences whose lemmatized tokens cover at least `min_match` distinct
    /// concepts, ordered by BM25 score against the concepts (ties by ordinal).
    ///
    /// A token covers a concept when the concept equals its surface form or
    /// its noun or verb lemma.
    pub fn concept_match(&self, concepts: &ConceptSet, min_match: usize) -> Result<Vec<u32>> {
        if concepts.is_empty() {
            return Err(Error::EmptyConcepts);
        }
        if min_match == 0 {
            return Err(Error::InvalidArgument("min_match must be at least 1".into()));
        }
        let lemma_terms = self.lemma_terms();
        let mut hits: HashMap<u32, usize> = HashMap::new();
        for concept in concepts.iter() {
            let Some(term_ids) = lemma_terms.get(concept) else {
                continue;
            };
            let mut ordinals: Vec<u32> = term_ids
                .iter()
                .flat_map(|&id| self.postings[id].iter().map(|p| p.ordinal))
                .collect();
            ordinals.sort_unstable();
            ordinals.dedup();
            for ordinal in ordinals {
                *hits.entry(ordinal).or_default() += 1;
            }
        }
        let query = concepts.concepts();
        let mut ranked: Vec<(u32, f64)> = hits
            .into_iter()
            .filter(|&(_, n)| n >= min_match)
            .map(|(ordinal, _)| (ordinal, self.score(query, ordinal)))
            .collect();
        sort_ranked(&mut ranked);
        Ok(ranked.into_iter().map(|(ordinal, _)| ordinal).collect())
    }
}

fn query_set<S: AsRef<str>>(query: &[S]) -> Vec<&str> {
    let mut terms: Vec<&str> = query.iter().map(AsRef::as_ref).collect();
    terms.sort_unstable();
    terms.dedup();
    terms
}

fn sort_ranked(ranked: &mut [(u32, f64)]) {
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
}
