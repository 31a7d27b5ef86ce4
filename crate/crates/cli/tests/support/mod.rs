//! Runs the `congen` binary against the core crate's fixtures.
#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub fn core_fixture(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures").join(rel)
}

/// A temp directory holding a config that points at the toy fixtures.
pub struct Workspace {
    pub dir: tempfile::TempDir,
}

impl Workspace {
    pub fn new() -> Self {
        Self::with_config(&toy_config(""))
    }

    pub fn with_config(config: &str) -> Self {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("congen.toml"), config).unwrap();
        Workspace { dir }
    }

    pub fn path(&self, rel: &str) -> PathBuf {
        self.dir.path().join(rel)
    }

    pub fn run(&self, args: &[&str]) -> Output {
        Command::new(env!("CARGO_BIN_EXE_congen"))
            .arg("--config")
            .arg(self.path("congen.toml"))
            .args(args)
            .env("CONGEN_LOG", "error")
            .output()
            .unwrap()
    }

    /// Runs and panics with stderr on failure; returns stdout.
    pub fn ok(&self, args: &[&str]) -> String {
        let out = self.run(args);
        assert!(out.status.success(), "congen {args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
        String::from_utf8(out.stdout).unwrap()
    }

    pub fn read(&self, rel: &str) -> String {
        std::fs::read_to_string(self.path(rel)).unwrap()
    }
}

/// The toy pipeline config; `extra` is appended verbatim.
pub fn toy_config(extra: &str) -> String {
    let f = |rel: &str| core_fixture(rel).display().to_string().replace('\\', "/");
    format!(
        r#"[paths]
dump = "{dump}"
sentences = "out/sentences.jsonl"
index = "out/index.cgfi"
matched = "out/matched.jsonl"
model = "out/tagger.cgpt"
concepts = "out/concepts.jsonl"
recon = "out/recon.jsonl"
commongen = "{commongen}"
pairs = "out/pairs.jsonl"
sets = "out/sets.jsonl"
semi_golden = "out/semi_golden.jsonl"
hypotheses = "{hyps}"
references = "{refs}"
report = "out/report.json"

[generate]
stub = true
{extra}
"#,
        dump = f("ingest/dump100.xml"),
        commongen = f("commongen/train200.jsonl"),
        hyps = f("eval/hyps.jsonl"),
        refs = f("eval/refs.jsonl"),
    )
}

/// Stages of the toy pipeline, in order.
pub fn pipeline_stages() -> Vec<Vec<String>> {
    let concepts = core_fixture("commongen/train200.jsonl").display().to_string();
    [
        vec!["ingest".to_string()],
        vec!["index".into()],
        vec!["search".into(), "--concepts-file".into(), concepts],
        vec!["train-tagger".into()],
        vec!["build-recon".into()],
        vec!["enumerate".into(), "--pairs".into(), "--sets".into()],
        vec!["generate".into(), "--stub".into()],
        vec!["evaluate".into()],
    ]
    .into()
}

pub fn run_pipeline(ws: &Workspace) {
    for stage in pipeline_stages() {
        let args: Vec<&str> = stage.iter().map(String::as_str).collect();
        ws.ok(&args);
    }
}
