use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use congen::index::Bm25Params;
use serde::Deserialize;

/// Pipeline configuration, read from TOML. Every section is optional; path
/// keys are checked when a stage needs them.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default)]
    pub paths: Paths,
    #[serde(default)]
    pub bm25: Bm25Section,
    #[serde(default)]
    pub extract: ExtractSection,
    #[serde(default)]
    pub generate: GenerateSection,
    #[serde(default)]
    pub seeds: Seeds,
    #[serde(default)]
    pub tagger: TaggerSection,
    #[serde(default)]
    pub ingest: IngestSection,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Paths {
    pub dump: Option<PathBuf>,
    pub sentences: Option<PathBuf>,
    pub index: Option<PathBuf>,
    pub matched: Option<PathBuf>,
    pub treebank: Option<PathBuf>,
    pub model: Option<PathBuf>,
    pub concepts: Option<PathBuf>,
    pub recon: Option<PathBuf>,
    pub commongen: Option<PathBuf>,
    pub pairs: Option<PathBuf>,
    pub sets: Option<PathBuf>,
    pub semi_golden: Option<PathBuf>,
    pub hypotheses: Option<PathBuf>,
    pub references: Option<PathBuf>,
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Bm25Section {
    pub k1: f64,
    pub b: f64,
}

impl Default for Bm25Section {
    fn default() -> Self {
        let p = Bm25Params::default();
        Bm25Section { k1: p.k1, b: p.b }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExtractSection {
    pub min_match: usize,
    pub max_concepts: usize,
    pub top_k: usize,
}

impl Default for ExtractSection {
    fn default() -> Self {
        ExtractSection { min_match: 2, max_concepts: 5, top_k: 100 }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GenerateSection {
    pub endpoint: Option<String>,
    pub stub: bool,
    pub threshold: f64,
    pub max_tokens: u32,
    pub num_candidates: u32,
    pub in_flight: usize,
}

impl Default for GenerateSection {
    fn default() -> Self {
        let o = congen::generator::AssembleOptions::default();
        GenerateSection {
            endpoint: None,
            stub: false,
            threshold: o.threshold,
            max_tokens: o.max_tokens,
            num_candidates: o.num_candidates,
            in_flight: o.in_flight,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Seeds {
    pub tagger: u64,
    pub stub: u64,
}

impl Default for Seeds {
    fn default() -> Self {
        Seeds { tagger: 13, stub: 0 }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TaggerSection {
    pub epochs: u32,
}

impl Default for TaggerSection {
    fn default() -> Self {
        TaggerSection { epochs: 5 }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IngestSection {
    pub min_tokens: usize,
    pub max_tokens: usize,
}

impl Default for IngestSection {
    fn default() -> Self {
        let f = congen::ingest::LengthFilter::default();
        IngestSection { min_tokens: f.min_tokens, max_tokens: f.max_tokens }
    }
}

impl Config {
    /// Reads a config file; relative paths resolve against its directory.
    pub fn load(path: &Path) -> Result<Config> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        let mut config: Config = toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        config.paths.resolve(base);
        Ok(config)
    }

    pub fn bm25_params(&self) -> Result<Bm25Params> {
        let params = Bm25Params { k1: self.bm25.k1, b: self.bm25.b };
        params.validate()?;
        Ok(params)
    }
}

/// Which stage writes each path, for "run X first" diagnostics.
fn producer(key: &str) -> Option<&'static str> {
    Some(match key {
        "sentences" => "ingest",
        "index" => "index",
        "matched" => "search --concepts-file",
        "model" => "train-tagger",
        "concepts" => "extract-concepts",
        "recon" => "build-recon",
        "pairs" | "sets" => "enumerate",
        "semi_golden" => "generate",
        "report" => "evaluate",
        _ => return None,
    })
}

impl Paths {
    fn resolve(&mut self, base: &Path) {
        for p in self.slots_mut().into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
    }

    fn slots_mut(&mut self) -> [&mut Option<PathBuf>; 15] {
        [
            &mut self.dump,
            &mut self.sentences,
            &mut self.index,
            &mut self.matched,
            &mut self.treebank,
            &mut self.model,
            &mut self.concepts,
            &mut self.recon,
            &mut self.commongen,
            &mut self.pairs,
            &mut self.sets,
            &mut self.semi_golden,
            &mut self.hypotheses,
            &mut self.references,
            &mut self.report,
        ]
    }

    pub fn get(&self, key: &str) -> Option<&PathBuf> {
        match key {
            "dump" => self.dump.as_ref(),
            "sentences" => self.sentences.as_ref(),
            "index" => self.index.as_ref(),
            "matched" => self.matched.as_ref(),
            "treebank" => self.treebank.as_ref(),
            "model" => self.model.as_ref(),
            "concepts" => self.concepts.as_ref(),
            "recon" => self.recon.as_ref(),
            "commongen" => self.commongen.as_ref(),
            "pairs" => self.pairs.as_ref(),
            "sets" => self.sets.as_ref(),
            "semi_golden" => self.semi_golden.as_ref(),
            "hypotheses" => self.hypotheses.as_ref(),
            "references" => self.references.as_ref(),
            "report" => self.report.as_ref(),
            _ => None,
        }
    }

    /// A configured path, or a named-key error.
    pub fn require(&self, key: &str) -> Result<&Path> {
        match self.get(key) {
            Some(p) => Ok(p),
            None => bail!("missing config key `paths.{key}`"),
        }
    }

    /// A configured path that must already exist.
    pub fn input(&self, key: &str) -> Result<&Path> {
        let path = self.require(key)?;
        if !path.exists() {
            match producer(key) {
                Some(stage) => bail!(
                    "input `paths.{key}` ({}) does not exist; run `congen {stage}` first",
                    path.display()
                ),
                None => bail!("input `paths.{key}` ({}) does not exist", path.display()),
            }
        }
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_overrides() {
        let c: Config = toml::from_str("[bm25]\nk1 = 2.0\n[extract]\nmin_match = 3\n").unwrap();
        assert_eq!(c.bm25.k1, 2.0);
        assert_eq!(c.bm25.b, 0.75);
        assert_eq!(c.extract.min_match, 3);
        assert_eq!(c.seeds.tagger, 13);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(toml::from_str::<Config>("[bm25]\nk2 = 1.0\n").is_err());
    }

    #[test]
    fn missing_and_absent_inputs_are_named() {
        let mut c = Config::default();
        let err = c.paths.require("index").unwrap_err().to_string();
        assert!(err.contains("paths.index"), "{err}");
        c.paths.sentences = Some("/nonexistent/sentences.jsonl".into());
        let err = c.paths.input("sentences").unwrap_err().to_string();
        assert!(err.contains("congen ingest"), "{err}");
    }
}
