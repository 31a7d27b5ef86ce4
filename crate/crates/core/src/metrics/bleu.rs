use super::ngram::{ngram_counts, Counts};
use super::EvalInstance;
use crate::error::{Error, Result};

const MAX_N: usize = 4;

/// Corpus BLEU-4 with uniform weights, clipped counts pooled over the
/// corpus and a brevity penalty against the closest reference length
/// (shorter wins ties). Unsmoothed: any order with no match gives 0.
pub fn bleu4(instances: &[EvalInstance]) -> Result<f64> {
    if instances.is_empty() {
        return Err(Error::InvalidArgument("BLEU needs at least one instance".into()));
    }
    let mut matches = [0usize; MAX_N];
    let mut totals = [0usize; MAX_N];
    let mut hyp_len = 0usize;
    let mut ref_len = 0usize;
    for inst in instances {
        let hyp = &inst.hypothesis;
        hyp_len += hyp.len();
        ref_len += inst
            .references
            .iter()
            .map(Vec::len)
            .min_by_key(|&len| (len.abs_diff(hyp.len()), len))
            .unwrap_or(0);
        for n in 1..=MAX_N {
            let hyp_counts = ngram_counts(hyp, n);
            let mut max_ref: Counts = Counts::new();
            for reference in &inst.references {
                for (gram, count) in ngram_counts(reference, n) {
                    let slot = max_ref.entry(gram).or_insert(0);
                    *slot = (*slot).max(count);
                }
            }
            for (gram, count) in &hyp_counts {
                matches[n - 1] += (*count).min(max_ref.get(gram).copied().unwrap_or(0));
            }
            totals[n - 1] += hyp.len().saturating_sub(n - 1);
        }
    }
    if matches.contains(&0) {
        return Ok(0.0);
    }
    let log_precision: f64 = matches
        .iter()
        .zip(&totals)
        .map(|(&m, &t)| (m as f64 / t as f64).ln())
        .sum::<f64>()
        / MAX_N as f64;
    let brevity = if hyp_len > ref_len {
        1.0
    } else {
        (1.0 - ref_len as f64 / hyp_len as f64).exp()
    };
    Ok(brevity * log_precision.exp())
}
