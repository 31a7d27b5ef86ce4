use super::EvalInstance;
use crate::error::{Error, Result};

/// Length of the longest common subsequence.
pub fn lcs_len(a: &[String], b: &[String]) -> usize {
    if a.is_empty() || b.is_empty() {
        return 0;
    }
    let mut prev = vec![0usize; b.len() + 1];
    let mut row = vec![0usize; b.len() + 1];
    for x in a {
        for (j, y) in b.iter().enumerate() {
            row[j + 1] = if x == y { prev[j] + 1 } else { row[j].max(prev[j + 1]) };
        }
        std::mem::swap(&mut prev, &mut row);
    }
    prev[b.len()]
}

/// LCS F-measure (beta = 1) of a hypothesis against one reference.
pub fn rouge_l_pair(hyp: &[String], reference: &[String]) -> f64 {
    let lcs = lcs_len(hyp, reference) as f64;
    if lcs == 0.0 {
        return 0.0;
    }
    let p = lcs / hyp.len() as f64;
    let r = lcs / reference.len() as f64;
    2.0 * p * r / (p + r)
}

pub fn rouge_l_instance(inst: &EvalInstance) -> f64 {
    inst.references
        .iter()
        .map(|r| rouge_l_pair(&inst.hypothesis, r))
        .fold(0.0, f64::max)
}

/// Corpus mean of the per-instance best ROUGE-L F score.
pub fn rouge_l(instances: &[EvalInstance]) -> Result<f64> {
    if instances.is_empty() {
        return Err(Error::InvalidArgument("ROUGE-L needs at least one instance".into()));
    }
    Ok(instances.iter().map(rouge_l_instance).sum::<f64>() / instances.len() as f64)
}
