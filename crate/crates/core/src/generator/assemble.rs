use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;

use serde::Serialize;

use super::{coverage, GenRequest, Generator, SemiGoldenRecord, DEFAULT_MAX_TOKENS};
use crate::dataset::ConceptQuery;
use crate::error::{Error, Result};
use crate::tagger::PerceptronModel;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssembleOptions {
    /// Minimum coverage for a record to be written.
    pub threshold: f64,
    pub max_tokens: u32,
    pub num_candidates: u32,
    /// Requests in flight at once.
    pub in_flight: usize,
}

impl Default for AssembleOptions {
    fn default() -> Self {
        AssembleOptions {
            threshold: 0.99,
            max_tokens: DEFAULT_MAX_TOKENS,
            num_candidates: 1,
            in_flight: 4,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct AssembleSummary {
    pub queries: usize,
    pub records: usize,
    pub rejections: usize,
    pub failures: usize,
    /// Mean coverage of the best candidate over every query that produced
    /// output, rejected or not.
    pub mean_coverage: f64,
}

struct Outcome {
    best: SemiGoldenRecord,
}

fn run_query<G: Generator + ?Sized>(
    generator: &G,
    generator_id: &str,
    query: &ConceptQuery,
    model: Option<&PerceptronModel>,
    opts: &AssembleOptions,
) -> Result<Outcome> {
    let request = GenRequest::new(query.concepts.clone())
        .with_max_tokens(opts.max_tokens)
        .with_candidates(opts.num_candidates);
    let candidates = generator.generate(&request)?;
    let mut best: Option<(f64, String)> = None;
    for text in candidates {
        let cov = coverage(&query.concepts, &text, model)?;
        let better = match &best {
            None => true,
            Some((best_cov, best_text)) => cov > *best_cov || (cov == *best_cov && text.chars().count() < best_text.chars().count()),
        };
        if better {
            best = Some((cov, text));
        }
    }
    let (coverage, text) = best.ok_or_else(|| Error::Protocol {
        message: "generator returned no candidates".into(),
        excerpt: String::new(),
    })?;
    Ok(Outcome {
        best: SemiGoldenRecord {
            concepts: query.concepts.clone(),
            text,
            coverage,
            generator_id: generator_id.to_string(),
        },
    })
}

/// Generates a semi-golden sentence for each query.
///
/// Up to `opts.in_flight` requests run concurrently; records reach `sink`
/// in query order. Each query keeps its highest-coverage candidate (ties go
/// to the shorter sentence) when that coverage reaches the threshold, and
/// is counted as a rejection otherwise. A query whose request fails is
/// logged and skipped.
pub fn assemble<G, F>(
    queries: &[ConceptQuery],
    generator: &G,
    model: Option<&PerceptronModel>,
    opts: &AssembleOptions,
    mut sink: F,
) -> Result<AssembleSummary>
where
    G: Generator + ?Sized,
    F: FnMut(&SemiGoldenRecord) -> Result<()>,
{
    if !(0.0..=1.0).contains(&opts.threshold) {
        return Err(Error::InvalidArgument(format!("threshold must be in [0, 1], got {}", opts.threshold)));
    }
    let workers = opts.in_flight.max(1);
    let generator_id = generator.id();
    let mut summary = AssembleSummary {
        queries: queries.len(),
        ..Default::default()
    };
    let mut coverage_sum = 0.0;
    let mut scored = 0usize;
    for chunk in queries.chunks(workers * 8) {
        let results: Vec<Mutex<Option<Result<Outcome>>>> = chunk.iter().map(|_| Mutex::new(None)).collect();
        let next = AtomicUsize::new(0);
        thread::scope(|scope| {
            for _ in 0..workers.min(chunk.len()) {
                scope.spawn(|| loop {
                    let i = next.fetch_add(1, Ordering::Relaxed);
                    let Some(query) = chunk.get(i) else { break };
                    let outcome = run_query(generator, &generator_id, query, model, opts);
                    *results[i].lock().unwrap() = Some(outcome);
                });
            }
        });
        for (query, slot) in chunk.iter().zip(results) {
            match slot.into_inner().unwrap().expect("every query in the chunk was processed") {
                Ok(Outcome { best }) => {
                    coverage_sum += best.coverage;
                    scored += 1;
                    if best.coverage >= opts.threshold {
                        sink(&best)?;
                        summary.records += 1;
                    } else {
                        log::info!("rejected {} (coverage {:.3}): {:?}", query.concepts, best.coverage, best.text);
                        summary.rejections += 1;
                    }
                }
                Err(e) => {
                    log::error!("generation failed for {}: {e}", query.concepts);
                    summary.failures += 1;
                }
            }
        }
    }
    summary.mean_coverage = if scored == 0 { 0.0 } else { coverage_sum / scored as f64 };
    Ok(summary)
}

/// Index of the first query not yet covered by `existing` output.
///
/// Output is in query order, so generation resumes right after the query
/// that produced the last written record.
pub fn resume_offset(queries: &[ConceptQuery], existing: &[SemiGoldenRecord]) -> Result<usize> {
    let Some(last) = existing.last() else {
        return Ok(0);
    };
    queries
        .iter()
        .position(|q| q.concepts == last.concepts)
        .map(|p| p + 1)
        .ok_or_else(|| {
            Error::InvalidArgument(format!(
                "existing output ends with {} which is not among the queries",
                last.concepts
            ))
        })
}
