use std::collections::{HashMap, HashSet};

use super::ngram::ngram_counts;
use super::EvalInstance;
use crate::error::{Error, Result};

const MAX_N: usize = 4;

type Vector<'a> = HashMap<&'a [String], f64>;

/// Reference-set document frequencies: for each n-gram, the number of
/// instances whose references contain it.
fn document_frequency(instances: &[EvalInstance]) -> HashMap<&[String], usize> {
    let mut df = HashMap::new();
    for inst in instances {
        let mut seen: HashSet<&[String]> = HashSet::new();
        for reference in &inst.references {
            for n in 1..=MAX_N {
                seen.extend(ngram_counts(reference, n).into_keys());
            }
        }
        for gram in seen {
            *df.entry(gram).or_insert(0) += 1;
        }
    }
    df
}

fn tfidf<'a>(tokens: &'a [String], n: usize, df: &HashMap<&[String], usize>, log_n: f64) -> (Vector<'a>, f64) {
    let mut vector = Vector::new();
    let mut norm = 0.0;
    for (gram, tf) in ngram_counts(tokens, n) {
        let doc_freq = df.get(gram).copied().unwrap_or(0).max(1) as f64;
        let weight = tf as f64 * (log_n - doc_freq.ln());
        norm += weight * weight;
        vector.insert(gram, weight);
    }
    (vector, norm.sqrt())
}

fn cosine(a: &(Vector, f64), b: &(Vector, f64)) -> f64 {
    if a.1 == 0.0 || b.1 == 0.0 {
        return 0.0;
    }
    let dot: f64 = a.0.iter().map(|(g, w)| w * b.0.get(g).copied().unwrap_or(0.0)).sum();
    dot / (a.1 * b.1)
}

/// Per-instance CIDEr scores, each in `[0, 10]`.
///
/// IDF comes from the references of the evaluated corpus, so a corpus of
/// one instance scores 0 everywhere.
pub fn cider_scores(instances: &[EvalInstance]) -> Vec<f64> {
    let df = document_frequency(instances);
    let log_n = (instances.len() as f64).ln();
    instances
        .iter()
        .map(|inst| {
            if inst.references.is_empty() {
                return 0.0;
            }
            let mut total = 0.0;
            for n in 1..=MAX_N {
                let hyp = tfidf(&inst.hypothesis, n, &df, log_n);
                let sum: f64 = inst
                    .references
                    .iter()
                    .map(|r| cosine(&hyp, &tfidf(r, n, &df, log_n)))
                    .sum();
                total += sum / inst.references.len() as f64;
            }
            10.0 * total / MAX_N as f64
        })
        .collect()
}

/// Corpus mean of [`cider_scores`].
pub fn cider(instances: &[EvalInstance]) -> Result<f64> {
    if instances.is_empty() {
        return Err(Error::InvalidArgument("CIDEr needs at least one instance".into()));
    }
    Ok(cider_scores(instances).iter().sum::<f64>() / instances.len() as f64)
}
