//! Corpus-level generation metrics: BLEU-4, ROUGE-L, METEOR (exact and
//! stem stages only), CIDEr, and concept coverage in place of SPICE.

mod bleu;
mod cider;
mod meteor;
mod ngram;
mod rouge;

use std::collections::HashMap;
use std::fmt;
use std::io::BufRead;
use std::path::Path;

use serde::{Deserialize, Serialize};

pub use bleu::bleu4;
pub use cider::{cider, cider_scores};
pub use meteor::{align, count_chunks, meteor, meteor_instance, meteor_pair, stem};
pub use rouge::{lcs_len, rouge_l, rouge_l_instance, rouge_l_pair};

use crate::error::{Error, Result};
use crate::generator::coverage;
use crate::ingest::tokenize;
use crate::tagger::ConceptSet;

/// One hypothesis with its references, already tokenized.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalInstance {
    pub id: String,
    pub hypothesis: Vec<String>,
    pub references: Vec<Vec<String>>,
}

impl EvalInstance {
    /// Tokenizes raw strings with the pipeline tokenizer.
    pub fn from_text<S: AsRef<str>>(id: impl Into<String>, hypothesis: &str, references: &[S]) -> Self {
        EvalInstance {
            id: id.into(),
            hypothesis: tokenize(hypothesis),
            references: references.iter().map(|r| tokenize(r.as_ref())).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub bleu4: f64,
    pub rouge_l: f64,
    pub meteor: f64,
    pub cider: f64,
    pub coverage: f64,
    pub n: usize,
}

impl fmt::Display for MetricReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows = [
            ("BLEU-4", self.bleu4),
            ("ROUGE-L", self.rouge_l),
            ("METEOR (exact+stem)", self.meteor),
            ("CIDEr", self.cider),
            ("Coverage (SPICE n/a)", self.coverage),
        ];
        writeln!(f, "{:<22}{:>10}", "metric", "score")?;
        for (name, value) in rows {
            writeln!(f, "{name:<22}{value:>10.4}")?;
        }
        writeln!(f, "{:<22}{:>10}", "instances", self.n)?;
        write!(
            f,
            "note: METEOR omits the synonym stage; coverage stands in for SPICE, which needs scene-graph parsing."
        )
    }
}

/// A line of the hypothesis file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HypothesisLine {
    pub id: String,
    pub concepts: ConceptSet,
    pub hypothesis: String,
}

/// A line of the reference file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReferenceLine {
    pub id: String,
    pub references: Vec<String>,
}

/// Scores already-tokenized instances. Coverage needs the raw hypothesis
/// and concepts, so it is passed in precomputed.
pub fn score(instances: &[EvalInstance], coverage: f64) -> Result<MetricReport> {
    Ok(MetricReport {
        bleu4: bleu4(instances)?,
        rouge_l: rouge_l(instances)?,
        meteor: meteor(instances)?,
        cider: cider(instances)?,
        coverage,
        n: instances.len(),
    })
}

/// Joins hypothesis and reference lines by id, in hypothesis order.
pub fn evaluate_lines(hyps: &[HypothesisLine], refs: &[ReferenceLine]) -> Result<MetricReport> {
    if hyps.is_empty() || refs.is_empty() {
        return Err(Error::InvalidArgument("hypothesis and reference files must be non-empty".into()));
    }
    let by_id: HashMap<&str, &ReferenceLine> = refs.iter().map(|r| (r.id.as_str(), r)).collect();
    let hyp_ids: HashMap<&str, ()> = hyps.iter().map(|h| (h.id.as_str(), ())).collect();
    let mut missing: Vec<String> = hyps
        .iter()
        .filter(|h| !by_id.contains_key(h.id.as_str()))
        .map(|h| h.id.clone())
        .chain(refs.iter().filter(|r| !hyp_ids.contains_key(r.id.as_str())).map(|r| r.id.clone()))
        .collect();
    if !missing.is_empty() {
        missing.sort();
        missing.dedup();
        return Err(Error::IdMismatch(missing));
    }

    let mut instances = Vec::with_capacity(hyps.len());
    let mut coverage_sum = 0.0;
    for h in hyps {
        let r = by_id[h.id.as_str()];
        if r.references.is_empty() {
            return Err(Error::InvalidArgument(format!("instance {} has no references", h.id)));
        }
        instances.push(EvalInstance::from_text(h.id.clone(), &h.hypothesis, &r.references));
        coverage_sum += coverage(&h.concepts, &h.hypothesis, None)?;
    }
    score(&instances, coverage_sum / hyps.len() as f64)
}

pub fn evaluate_readers<H: BufRead, R: BufRead>(hyps: H, refs: R) -> Result<MetricReport> {
    let hyps: Vec<HypothesisLine> = crate::jsonl::read(hyps)?;
    let refs: Vec<ReferenceLine> = crate::jsonl::read(refs)?;
    evaluate_lines(&hyps, &refs)
}

pub fn evaluate(hyp_file: &Path, ref_file: &Path) -> Result<MetricReport> {
    let hyps: Vec<HypothesisLine> = crate::jsonl::read_path(hyp_file)?;
    let refs: Vec<ReferenceLine> = crate::jsonl::read_path(ref_file)?;
    evaluate_lines(&hyps, &refs)
}
