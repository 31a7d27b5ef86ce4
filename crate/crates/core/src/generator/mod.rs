//! Semi-golden sentence generation: the generator abstraction, the wire
//! protocol client, the offline stub, coverage scoring and assembly.

mod assemble;
mod coverage;
#[cfg(feature = "native")]
mod http;
mod stub;

pub use assemble::{assemble, resume_offset, AssembleOptions, AssembleSummary};
pub use coverage::{coverage, sentence_forms};
#[cfg(feature = "native")]
pub use http::{HttpGenerator, RetryPolicy};
pub use stub::{stub_generate, stub_nouns, stub_verbs, third_person, StubGenerator};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tagger::ConceptSet;

pub const DEFAULT_MAX_TOKENS: u32 = 32;

/// Body of `POST /v1/generate`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenRequest {
    pub concepts: ConceptSet,
    pub max_tokens: u32,
    pub num_candidates: u32,
}

impl GenRequest {
    pub fn new(concepts: ConceptSet) -> Self {
        GenRequest {
            concepts,
            max_tokens: DEFAULT_MAX_TOKENS,
            num_candidates: 1,
        }
    }

    pub fn with_candidates(mut self, n: u32) -> Self {
        self.num_candidates = n;
        self
    }

    pub fn with_max_tokens(mut self, n: u32) -> Self {
        self.max_tokens = n;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.concepts.len();
        if !(2..=5).contains(&n) {
            return Err(Error::InvalidArgument(format!("generation needs 2 to 5 concepts, got {n}")));
        }
        if (self.max_tokens as usize) < n {
            return Err(Error::InvalidArgument(format!(
                "max_tokens {} is smaller than the concept count {n}",
                self.max_tokens
            )));
        }
        if self.num_candidates == 0 {
            return Err(Error::InvalidArgument("num_candidates must be at least 1".into()));
        }
        Ok(())
    }
}

/// Body of a successful `POST /v1/generate` response.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenResponse {
    pub sentences: Vec<String>,
}

/// Body of `GET /v1/health`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HealthResponse {
    pub status: String,
}

/// Anything that turns a concept set into candidate sentences.
pub trait Generator: Sync {
    /// Recorded in every output record.
    fn id(&self) -> String;

    /// Returns exactly `request.num_candidates` sentences.
    fn generate(&self, request: &GenRequest) -> Result<Vec<String>>;
}

/// A generated sentence kept for pre-training (`C' = y'`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SemiGoldenRecord {
    pub concepts: ConceptSet,
    pub text: String,
    pub coverage: f64,
    pub generator_id: String,
}
