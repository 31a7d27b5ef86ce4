//! Reconstruction records and concept-query enumeration.

use std::collections::{BTreeMap, BTreeSet};
use std::io::BufRead;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::index::SentenceId;
use crate::ingest::CleanSentence;
use crate::tagger::{extract_concepts, ConceptSet, PerceptronModel};

/// A "concepts -> sentence" training pair for the generator.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReconRecord {
    pub concepts: ConceptSet,
    pub text: String,
    #[serde(skip)]
    pub source: Option<SentenceId>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ReconSummary {
    pub sentences: usize,
    pub emitted: usize,
    pub skipped: usize,
    pub subsampled: usize,
}

/// Seed for the per-sentence concept subsample.
fn subsample_seed(id: SentenceId) -> u64 {
    id.doc_id.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ u64::from(id.sent_idx)
}

fn check_max_concepts(max_concepts: usize) -> Result<()> {
    if (2..=5).contains(&max_concepts) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("max_concepts must be in [2, 5], got {max_concepts}")))
    }
}

/// Builds the record for one sentence, or `None` when it has fewer than two
/// concepts. Sets larger than `max_concepts` are subsampled with a generator
/// seeded from the sentence's `(doc_id, sent_idx)`.
pub fn recon_record(model: &PerceptronModel, sentence: &CleanSentence, max_concepts: usize) -> Result<Option<ReconRecord>> {
    check_max_concepts(max_concepts)?;
    Ok(recon_with_size(model, sentence, max_concepts).map(|(record, _)| record))
}

/// The record plus the concept count before subsampling.
fn recon_with_size(model: &PerceptronModel, sentence: &CleanSentence, max_concepts: usize) -> Option<(ReconRecord, usize)> {
    let concepts = extract_concepts(model, &sentence.tokens);
    let extracted = concepts.len();
    if extracted < 2 {
        return None;
    }
    let source = SentenceId {
        doc_id: sentence.doc_id,
        sent_idx: sentence.sent_idx,
    };
    let concepts = if concepts.len() > max_concepts {
        let mut rng = ChaCha8Rng::seed_from_u64(subsample_seed(source));
        let picked = rand::seq::index::sample(&mut rng, concepts.len(), max_concepts);
        ConceptSet::new(picked.into_iter().map(|i| concepts.concepts()[i].as_str()))
    } else {
        concepts
    };
    Some((
        ReconRecord {
            concepts,
            text: sentence.text.clone(),
            source: Some(source),
        },
        extracted,
    ))
}

/// Runs [`recon_record`] over a sentence stream.
pub fn build_recon<'a, I>(sentences: I, model: &PerceptronModel, max_concepts: usize) -> Result<(Vec<ReconRecord>, ReconSummary)>
where
    I: IntoIterator<Item = &'a CleanSentence>,
{
    check_max_concepts(max_concepts)?;
    let mut summary = ReconSummary::default();
    let mut records = Vec::new();
    for sentence in sentences {
        summary.sentences += 1;
        match recon_with_size(model, sentence, max_concepts) {
            Some((record, extracted)) => {
                if extracted > max_concepts {
                    summary.subsampled += 1;
                }
                summary.emitted += 1;
                records.push(record);
            }
            None => summary.skipped += 1,
        }
    }
    Ok((records, summary))
}

#[derive(Deserialize)]
struct CommonGenLine {
    concepts: Vec<String>,
}

/// Reads a CommonGen-style JSON-lines file (`{"concepts": [...], ...}`).
/// Other fields are ignored.
pub fn load_commongen<R: BufRead>(reader: R) -> Result<Vec<ConceptSet>> {
    let lines: Vec<CommonGenLine> = crate::jsonl::read(reader)?;
    Ok(lines.into_iter().map(|l| ConceptSet::new(l.concepts)).collect())
}

/// A generation input: a concept pair (size 2) or set (size 3 to 5).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ConceptQuery {
    pub concepts: ConceptSet,
}

impl ConceptQuery {
    pub fn len(&self) -> usize {
        self.concepts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.concepts.is_empty()
    }
}

/// Every unordered 2-subset of every input set, deduplicated and sorted.
pub fn enumerate_pairs(sets: &[ConceptSet]) -> Vec<ConceptQuery> {
    let mut pairs = BTreeSet::new();
    for set in sets {
        let c = set.concepts();
        for i in 0..c.len() {
            for j in i + 1..c.len() {
                pairs.insert(ConceptSet::new([&c[i], &c[j]]));
            }
        }
    }
    pairs.into_iter().map(|concepts| ConceptQuery { concepts }).collect()
}

/// The distinct input sets of size 3 to 5, sorted. Other sizes are dropped.
pub fn enumerate_sets(sets: &[ConceptSet]) -> Vec<ConceptQuery> {
    let dropped = sets.iter().filter(|s| !(3..=5).contains(&s.len())).count();
    if dropped > 0 {
        log::warn!("dropped {dropped} concept sets with size outside [3, 5]");
    }
    let unique: BTreeSet<&ConceptSet> = sets.iter().filter(|s| (3..=5).contains(&s.len())).collect();
    unique
        .into_iter()
        .map(|concepts| ConceptQuery {
            concepts: concepts.clone(),
        })
        .collect()
}

/// Record counts, total and by concept-set size.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AugmentationStats {
    pub n_sentences: usize,
    pub per_size: BTreeMap<usize, usize>,
}

impl AugmentationStats {
    pub fn add(&mut self, size: usize) {
        self.n_sentences += 1;
        *self.per_size.entry(size).or_default() += 1;
    }

    pub fn merge(&mut self, other: &AugmentationStats) {
        self.n_sentences += other.n_sentences;
        for (&size, &count) in &other.per_size {
            *self.per_size.entry(size).or_default() += count;
        }
    }

    /// `"2(59,125), 3(24,891)"`-style summary.
    pub fn size_summary(&self) -> String {
        self.per_size
            .iter()
            .map(|(size, count)| format!("{size}({})", group_thousands(*count)))
            .collect::<Vec<_>>()
            .join(", ")
    }
}

/// Counts records by concept-set size.
pub fn stats<'a, I>(concept_sets: I) -> AugmentationStats
where
    I: IntoIterator<Item = &'a ConceptSet>,
{
    let mut stats = AugmentationStats::default();
    for set in concept_sets {
        stats.add(set.len());
    }
    stats
}

pub fn group_thousands(n: usize) -> String {
    let digits = n.to_string();
    let mut out = String::new();
    for (i, c) in digits.chars().enumerate() {
        if i > 0 && (digits.len() - i).is_multiple_of(3) {
            out.push(',');
        }
        out.push(c);
    }
    out
}

/// Counts obtained from the full CommonGen training split in the original
/// augmentation run: pairs, and sets of size 3, 4 and 5.
pub mod reference_counts {
    pub const PAIRS: usize = 59_125;
    pub const SETS_3: usize = 24_891;
    pub const SETS_4: usize = 4_206;
    pub const SETS_5: usize = 3_374;
    pub const SETS: usize = 32_471;
    pub const PAIRS_AND_SETS: usize = 91_596;
}

/// One observed-vs-reference count line.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountCheck {
    pub label: String,
    pub observed: usize,
    pub reference: usize,
    pub relative_deviation: f64,
}

impl CountCheck {
    fn new(label: &str, observed: usize, reference: usize) -> Self {
        CountCheck {
            label: label.to_string(),
            observed,
            reference,
            relative_deviation: (observed as f64 - reference as f64).abs() / reference as f64,
        }
    }

    pub fn within(&self, tolerance: f64) -> bool {
        self.relative_deviation <= tolerance
    }
}

/// Compares enumeration output with [`reference_counts`].
pub fn compare_with_reference(pairs: &AugmentationStats, sets: &AugmentationStats) -> Vec<CountCheck> {
    use reference_counts::*;
    let size = |n| sets.per_size.get(&n).copied().unwrap_or(0);
    vec![
        CountCheck::new("pairs", pairs.n_sentences, PAIRS),
        CountCheck::new("sets of size 3", size(3), SETS_3),
        CountCheck::new("sets of size 4", size(4), SETS_4),
        CountCheck::new("sets of size 5", size(5), SETS_5),
        CountCheck::new("sets total", sets.n_sentences, SETS),
        CountCheck::new("pairs + sets", pairs.n_sentences + sets.n_sentences, PAIRS_AND_SETS),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(items: &[&str]) -> ConceptSet {
        ConceptSet::new(items)
    }

    fn as_vecs(queries: &[ConceptQuery]) -> Vec<Vec<String>> {
        queries.iter().map(|q| q.concepts.clone().into_vec()).collect()
    }

    #[test]
    fn pairs_from_two_sets() {
        let pairs = enumerate_pairs(&[set(&["a", "b", "c"]), set(&["a", "b", "d"])]);
        assert_eq!(
            as_vecs(&pairs),
            [["a", "b"], ["a", "c"], ["a", "d"], ["b", "c"], ["b", "d"]]
        );
        assert_eq!(as_vecs(&enumerate_pairs(&[set(&["a", "b"])])), [["a", "b"]]);
    }

    #[test]
    fn sets_deduplicate_and_filter_size() {
        let sets = enumerate_sets(&[set(&["a", "b", "c"]), set(&["c", "b", "a"]), set(&["a", "b", "d"]), set(&["x", "y"])]);
        assert_eq!(as_vecs(&sets), [["a", "b", "c"], ["a", "b", "d"]]);
    }

    #[test]
    fn commongen_lines() {
        let text = "{\"concepts\":[\"dog\",\"run\",\"field\"]}\n\n{\"concepts\":[\"Dog\",\"dog\",\"frisbee\"],\"target\":\"x\"}\n";
        let sets = load_commongen(text.as_bytes()).unwrap();
        assert_eq!(sets[0].concepts(), ["dog", "field", "run"]);
        assert_eq!(sets[1].len(), 2);
    }

    #[test]
    fn commongen_errors_carry_line_numbers() {
        let text = "{\"concepts\":[\"a\",\"b\"]}\n{\"target\":\"x\"}\n";
        assert!(matches!(load_commongen(text.as_bytes()), Err(Error::Line { line: 2, .. })));
        assert!(matches!(load_commongen("not json".as_bytes()), Err(Error::Line { line: 1, .. })));
    }

    #[test]
    fn stats_by_size() {
        let mut records: Vec<ConceptSet> = (0..5).map(|i| set(&["a", &format!("b{i}")])).collect();
        records.push(set(&["a", "b", "c"]));
        records.push(set(&["a", "b", "d"]));
        let s = stats(&records);
        assert_eq!(s.n_sentences, 7);
        assert_eq!(s.per_size, BTreeMap::from([(2, 5), (3, 2)]));
        assert_eq!(stats(&[]), AugmentationStats::default());
    }

    #[test]
    fn reference_totals_are_consistent() {
        use reference_counts::*;
        assert_eq!(SETS_3 + SETS_4 + SETS_5, SETS);
        assert_eq!(PAIRS + SETS, PAIRS_AND_SETS);
    }

    #[test]
    fn thousands_grouping() {
        assert_eq!(group_thousands(59125), "59,125");
        assert_eq!(group_thousands(999), "999");
        assert_eq!(group_thousands(1_000_000), "1,000,000");
    }

    #[test]
    fn max_concepts_is_validated() {
        let model = crate::tagger::train(&crate::tagger::bundled_treebank().train[..5], 1, 0).unwrap();
        let s = CleanSentence {
            doc_id: 1,
            sent_idx: 0,
            text: "x".into(),
            tokens: vec!["x".into()],
        };
        assert!(recon_record(&model, &s, 1).is_err());
        assert!(recon_record(&model, &s, 6).is_err());
    }
}
