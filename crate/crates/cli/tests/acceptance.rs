//! Acceptance criteria. Prints one PASS/FAIL line per criterion and fails
//! if any criterion fails.

#[path = "../../core/tests/common/mod.rs"]
mod common;
mod support;

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::{Duration, Instant};

use congen::dataset::{compare_with_reference, enumerate_pairs, enumerate_sets, load_commongen, stats, ReconRecord};
use congen::generator::{coverage, SemiGoldenRecord};
use congen::index::{build_index, Bm25Params};
use congen::ingest::{tokenize, CleanSentence};
use congen::metrics::{self, EvalInstance, MetricReport};
use congen::tagger::{bundled_treebank, lemmatize, train, ConceptSet, PerceptronModel};

type Outcome = Result<String, String>;

enum Status {
    Pass,
    Fail,
    Skip,
}

struct Line {
    status: Status,
    name: &'static str,
    detail: String,
    elapsed: Duration,
}

fn run(name: &'static str, limit: Option<Duration>, check: impl FnOnce() -> Outcome) -> Line {
    let start = Instant::now();
    let result = catch_unwind(AssertUnwindSafe(check));
    let elapsed = start.elapsed();
    let (status, mut detail) = match result {
        Ok(Ok(detail)) if detail.starts_with("skipped") => (Status::Skip, detail),
        Ok(Ok(detail)) => (Status::Pass, detail),
        Ok(Err(detail)) => (Status::Fail, detail),
        Err(panic) => {
            let msg = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            (Status::Fail, format!("panicked: {msg}"))
        }
    };
    if let (Some(limit), Status::Pass) = (limit, &status) {
        if elapsed > limit {
            detail = format!("{detail}; took {elapsed:.2?}, limit {limit:.0?}");
            return Line { status: Status::Fail, name, detail, elapsed };
        }
    }
    Line { status, name, detail, elapsed }
}

fn close(label: &str, got: f64, want: f64, tol: f64) -> Result<(), String> {
    if (got - want).abs() <= tol {
        Ok(())
    } else {
        Err(format!("{label}: got {got}, expected {want} (tolerance {tol})"))
    }
}

fn toks(s: &str) -> Vec<String> {
    s.split_whitespace().map(str::to_string).collect()
}

fn inst(hyp: &str, refs: &[&str]) -> EvalInstance {
    EvalInstance { id: String::new(), hypothesis: toks(hyp), references: refs.iter().map(|r| toks(r)).collect() }
}

fn metric_oracles() -> Outcome {
    let bleu = metrics::bleu4(&[inst("a b c d e f g", &["a b c d x y z"])]).map_err(|e| e.to_string())?;
    close("BLEU-4", bleu, (4.0 / 7.0 * 0.5 * 0.4 * 0.25f64).powf(0.25), 1e-6)?;
    close("BLEU-4 rounded", bleu, 0.4111, 5e-5)?;
    let rouge = metrics::rouge_l(&[inst("a b c d", &["a c b d"])]).unwrap();
    close("ROUGE-L", rouge, 0.75, 1e-6)?;
    let meteor = metrics::meteor(&[inst("the dog runs", &["the dog runs"])]).unwrap();
    close("METEOR", meteor, 1.0 - 0.5 / 27.0, 1e-6)?;
    let corpus = [inst("a b c d e", &["a b c d e"]), inst("v w x y z", &["v w x y z"])];
    for s in metrics::cider_scores(&corpus) {
        close("CIDEr", s, 10.0, 1e-6)?;
    }

    let want: MetricReport =
        serde_json::from_str(&std::fs::read_to_string(common::fixture("eval/golden_report.json")).unwrap()).unwrap();
    let got = metrics::evaluate(&common::fixture("eval/hyps.jsonl"), &common::fixture("eval/refs.jsonl"))
        .map_err(|e| e.to_string())?;
    close("golden BLEU-4", got.bleu4, want.bleu4, 1e-6)?;
    close("golden ROUGE-L", got.rouge_l, want.rouge_l, 1e-6)?;
    close("golden METEOR", got.meteor, want.meteor, 1e-6)?;
    close("golden CIDEr", got.cider, want.cider, 1e-6)?;
    close("golden coverage", got.coverage, want.coverage, 1e-6)?;
    Ok(format!(
        "micro-examples BLEU {bleu:.4}, ROUGE-L {rouge:.2}, METEOR {meteor:.5}, CIDEr 10.0; 20-instance golden within 1e-6"
    ))
}

fn bm25_exactness() -> Outcome {
    let corpus = common::bm25_corpus();
    let index = build_index(&corpus, Bm25Params::default()).map_err(|e| e.to_string())?;
    let queries = common::random_queries(&corpus, 50, 99);
    let mut max_diff = 0.0f64;
    for q in &queries {
        let got = index.search(q, 10);
        let want = common::brute_search(&corpus, q, 10, 1.2, 0.75);
        let order = |v: &[(u32, f64)]| v.iter().map(|r| r.0).collect::<Vec<_>>();
        if order(&got) != order(&want) {
            return Err(format!("order differs for {q:?}: {:?} vs {:?}", order(&got), order(&want)));
        }
        for (g, w) in got.iter().zip(&want) {
            max_diff = max_diff.max((g.1 - w.1).abs());
        }
    }
    if max_diff > 1e-9 {
        return Err(format!("max score difference {max_diff:e}"));
    }
    Ok(format!("{} sentences, {} queries, k=10, max |score diff| {max_diff:.1e}", corpus.len(), queries.len()))
}

fn enumeration_oracle() -> Outcome {
    let file = std::fs::File::open(common::fixture("commongen/train200.jsonl")).unwrap();
    let sets = load_commongen(std::io::BufReader::new(file)).map_err(|e| e.to_string())?;
    let pairs = common::query_lists(&enumerate_pairs(&sets));
    let uniq = common::query_lists(&enumerate_sets(&sets));
    let want_pairs = common::concept_lines("commongen/pairs.expected.jsonl");
    let want_sets = common::concept_lines("commongen/sets.expected.jsonl");
    if pairs != want_pairs {
        return Err(format!("pairs: {} vs oracle {}", pairs.len(), want_pairs.len()));
    }
    if uniq != want_sets {
        return Err(format!("sets: {} vs oracle {}", uniq.len(), want_sets.len()));
    }
    Ok(format!("{} lines: {} pairs, {} sets equal the subset oracle", sets.len(), pairs.len(), uniq.len()))
}

fn commongen_counts() -> Outcome {
    let Some(path) = std::env::var_os("CONGEN_COMMONGEN_TRAIN") else {
        return Ok("skipped: set CONGEN_COMMONGEN_TRAIN to the CommonGen training file (JSON lines) to run".into());
    };
    let file = std::fs::File::open(&path).map_err(|e| format!("{}: {e}", Path::new(&path).display()))?;
    let sets = load_commongen(std::io::BufReader::new(file)).map_err(|e| e.to_string())?;
    let pairs = enumerate_pairs(&sets);
    let uniq = enumerate_sets(&sets);
    let checks = compare_with_reference(&stats(pairs.iter().map(|q| &q.concepts)), &stats(uniq.iter().map(|q| &q.concepts)));
    let mut parts = Vec::new();
    for c in &checks {
        let flag = if c.within(0.01) { "" } else { " DISCREPANCY" };
        parts.push(format!("{} {} vs {} ({:.2}%{flag})", c.label, c.observed, c.reference, 100.0 * c.relative_deviation));
    }
    if checks.iter().any(|c| !c.within(0.01)) {
        parts.push("deviations >1% are informational: dedup before/after lemmatization and file version change counts".into());
    }
    Ok(format!("informational: {}", parts.join("; ")))
}

fn tagger_regression() -> Outcome {
    let tb = bundled_treebank();
    let a = train(&tb.train, 5, 13).map_err(|e| e.to_string())?;
    let b = train(&tb.train, 5, 13).map_err(|e| e.to_string())?;
    if a.to_bytes() != b.to_bytes() {
        return Err("two training runs produced different models".into());
    }
    let acc = a.accuracy(&tb.dev);
    if acc < 0.90 {
        return Err(format!("held-out accuracy {acc:.4} < 0.90"));
    }
    Ok(format!("held-out accuracy {acc:.4} on {} sentences; deterministic", tb.dev.len()))
}

fn read_jsonl<T: serde::de::DeserializeOwned>(path: &Path) -> Vec<T> {
    congen::jsonl::read_path(path).unwrap()
}

/// Re-checks every written file of a finished toy run.
fn recheck(ws: &support::Workspace) -> Result<(usize, f64), String> {
    let mut violations = Vec::new();

    let sentences: Vec<CleanSentence> = read_jsonl(&ws.path("out/sentences.jsonl"));
    for s in &sentences {
        let markup = ["[[", "]]", "{{", "}}", "<ref"].iter().any(|m| s.text.contains(m));
        if markup || tokenize(&s.text) != s.tokens || !(3..=64).contains(&s.tokens.len()) {
            violations.push(format!("sentence {}:{}", s.doc_id, s.sent_idx));
        }
    }

    let model = PerceptronModel::from_bytes(&std::fs::read(ws.path("out/tagger.cgpt")).unwrap()).unwrap();
    let recon: Vec<ReconRecord> = read_jsonl(&ws.path("out/recon.jsonl"));
    for r in &recon {
        let tokens = tokenize(&r.text);
        let lemmas: Vec<String> = tokens.iter().zip(model.tag(&tokens)).map(|(t, g)| lemmatize(t, g)).collect();
        if !(2..=5).contains(&r.concepts.len()) || !r.concepts.iter().all(|c| lemmas.contains(&c.to_string())) {
            violations.push(format!("recon {:?}", r.text));
        }
    }

    let pairs: Vec<ConceptSet> = common::concept_lines("commongen/pairs.expected.jsonl").into_iter().map(ConceptSet::new).collect();
    let sets: Vec<ConceptSet> = common::concept_lines("commongen/sets.expected.jsonl").into_iter().map(ConceptSet::new).collect();
    let queries: Vec<ConceptSet> = pairs.into_iter().chain(sets).collect();
    let records: Vec<SemiGoldenRecord> = read_jsonl(&ws.path("out/semi_golden.jsonl"));
    if records.len() != queries.len() {
        violations.push(format!("{} semi-golden records for {} queries", records.len(), queries.len()));
    }
    let mut total = 0.0;
    for (r, q) in records.iter().zip(&queries) {
        let c = coverage(&r.concepts, &r.text, Some(&model)).unwrap();
        total += c;
        if &r.concepts != q || (c - r.coverage).abs() > 1e-12 || c < 0.99 || r.generator_id != "stub-0" {
            violations.push(format!("semi-golden {:?}", r.text));
        }
    }
    if violations.is_empty() {
        Ok((records.len(), total / records.len().max(1) as f64))
    } else {
        Err(format!("{} invariant violations, first: {}", violations.len(), violations[0]))
    }
}

fn end_to_end() -> Outcome {
    let ws = support::Workspace::new();
    let start = Instant::now();
    let mut summary = String::new();
    for stage in support::pipeline_stages() {
        let args: Vec<&str> = stage.iter().map(String::as_str).collect();
        let out = ws.ok(&args);
        if stage[0] == "generate" {
            summary = out;
        }
    }
    let elapsed = start.elapsed();
    let parsed: BTreeMap<String, serde_json::Value> = serde_json::from_str(summary.trim()).map_err(|e| e.to_string())?;
    let mean = parsed["mean_coverage"].as_f64().unwrap_or(0.0);
    if mean != 1.0 {
        return Err(format!("generate reported mean coverage {mean}"));
    }
    let (n, rechecked) = recheck(&ws)?;
    if rechecked != 1.0 {
        return Err(format!("re-checked mean coverage {rechecked}"));
    }
    Ok(format!("pipeline {elapsed:.2?}; {n} semi-golden records, mean coverage 1.0, 0 invariant violations"))
}

fn determinism() -> Outcome {
    let snapshot = |ws: &support::Workspace| {
        let mut files: Vec<_> = std::fs::read_dir(ws.path("out")).unwrap().map(|e| e.unwrap().path()).collect();
        files.sort();
        files
            .into_iter()
            .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
            .collect::<Vec<_>>()
    };
    let a = support::Workspace::new();
    let b = support::Workspace::new();
    support::run_pipeline(&a);
    support::run_pipeline(&b);
    let (sa, sb) = (snapshot(&a), snapshot(&b));
    if sa.len() != sb.len() {
        return Err("runs wrote different file sets".into());
    }
    for ((name, x), (_, y)) in sa.iter().zip(&sb) {
        if x != y {
            return Err(format!("{name} differs between runs"));
        }
    }
    Ok(format!("{} output files byte-identical across two runs", sa.len()))
}

#[test]
fn acceptance() {
    let secs = Duration::from_secs;
    let lines = [
        run("metric oracle suite", Some(secs(1)), metric_oracles),
        run("BM25 exactness", Some(secs(5)), bm25_exactness),
        run("enumeration oracle", Some(secs(1)), enumeration_oracle),
        run("CommonGen count check", None, commongen_counts),
        run("tagger regression", Some(secs(30)), tagger_regression),
        run("end-to-end toy pipeline", Some(secs(60)), end_to_end),
        run("determinism", None, determinism),
    ];
    let mut failed = 0;
    for line in &lines {
        let tag = match line.status {
            Status::Pass => "PASS",
            Status::Fail => {
                failed += 1;
                "FAIL"
            }
            Status::Skip => "SKIP",
        };
        println!("[{tag}] {:<24} {} ({:.2?})", line.name, line.detail, line.elapsed);
    }
    assert_eq!(failed, 0, "{failed} acceptance criteria failed");
}
