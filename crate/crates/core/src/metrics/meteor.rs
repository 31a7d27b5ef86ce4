use super::EvalInstance;
use crate::error::{Error, Result};
use crate::tagger::{lemmatize, PosTag};

const ALPHA_WEIGHT: f64 = 9.0;
const PENALTY_GAMMA: f64 = 0.5;
const PENALTY_BETA: i32 = 3;

/// Stem used by the second matching stage: the noun lemma when it differs
/// from the token, otherwise the verb lemma.
pub fn stem(token: &str) -> String {
    let noun = lemmatize(token, PosTag::Noun);
    if noun != token {
        noun
    } else {
        lemmatize(token, PosTag::Verb)
    }
}

/// Alignment as `(hyp index, ref index)` pairs, sorted by hyp index.
///
/// Each stage walks the hypothesis left to right and links every unmatched
/// token to an unmatched reference token with the same key, preferring the
/// position right after the previous token's link (extending a chunk) and
/// otherwise the leftmost candidate.
pub fn align(hyp: &[String], reference: &[String]) -> Vec<(usize, usize)> {
    let exact: Vec<&str> = hyp.iter().map(String::as_str).collect();
    let exact_ref: Vec<&str> = reference.iter().map(String::as_str).collect();
    let stems: Vec<String> = hyp.iter().map(|t| stem(t)).collect();
    let stems_ref: Vec<String> = reference.iter().map(|t| stem(t)).collect();
    let stem_keys: Vec<&str> = stems.iter().map(String::as_str).collect();
    let stem_ref_keys: Vec<&str> = stems_ref.iter().map(String::as_str).collect();

    let mut link: Vec<Option<usize>> = vec![None; hyp.len()];
    let mut used = vec![false; reference.len()];
    for (h_keys, r_keys) in [(&exact, &exact_ref), (&stem_keys, &stem_ref_keys)] {
        for hi in 0..hyp.len() {
            if link[hi].is_some() {
                continue;
            }
            let candidate = |ri: usize| !used[ri] && r_keys[ri] == h_keys[hi];
            let follow = hi
                .checked_sub(1)
                .and_then(|p| link[p])
                .map(|ri| ri + 1)
                .filter(|&ri| ri < reference.len() && candidate(ri));
            if let Some(ri) = follow.or_else(|| (0..reference.len()).find(|&ri| candidate(ri))) {
                link[hi] = Some(ri);
                used[ri] = true;
            }
        }
    }
    link.iter()
        .enumerate()
        .filter_map(|(hi, ri)| ri.map(|ri| (hi, ri)))
        .collect()
}

/// Runs of links adjacent in both sentences.
pub fn count_chunks(alignment: &[(usize, usize)]) -> usize {
    let mut chunks = 0;
    for (i, &(h, r)) in alignment.iter().enumerate() {
        let continues = i > 0 && {
            let (ph, pr) = alignment[i - 1];
            h == ph + 1 && r == pr + 1
        };
        if !continues {
            chunks += 1;
        }
    }
    chunks
}

pub fn meteor_pair(hyp: &[String], reference: &[String]) -> f64 {
    let alignment = align(hyp, reference);
    let m = alignment.len() as f64;
    if m == 0.0 {
        return 0.0;
    }
    let p = m / hyp.len() as f64;
    let r = m / reference.len() as f64;
    let f_mean = (1.0 + ALPHA_WEIGHT) * p * r / (r + ALPHA_WEIGHT * p);
    let penalty = PENALTY_GAMMA * (count_chunks(&alignment) as f64 / m).powi(PENALTY_BETA);
    f_mean * (1.0 - penalty)
}

pub fn meteor_instance(inst: &EvalInstance) -> f64 {
    inst.references
        .iter()
        .map(|r| meteor_pair(&inst.hypothesis, r))
        .fold(0.0, f64::max)
}

/// Corpus mean of per-instance METEOR (exact and stem stages only).
pub fn meteor(instances: &[EvalInstance]) -> Result<f64> {
    if instances.is_empty() {
        return Err(Error::InvalidArgument("METEOR needs at least one instance".into()));
    }
    Ok(instances.iter().map(meteor_instance).sum::<f64>() / instances.len() as f64)
}
