//! Dump parsing and sentence extraction.

mod dump;
mod markup;
mod segment;
mod tokenize;

pub use dump::{parse_dump, DumpReader, RawDocument};
#[cfg(feature = "native")]
pub use dump::open_dump;
pub use markup::strip_markup;
pub use segment::segment_sentences;
pub use tokenize::tokenize;

use serde::{Deserialize, Serialize};

/// A segmented, tokenized sentence with its position in the dump.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CleanSentence {
    pub doc_id: u64,
    pub sent_idx: u32,
    pub text: String,
    pub tokens: Vec<String>,
}

/// Token-count bounds applied to extracted sentences (inclusive).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LengthFilter {
    pub min_tokens: usize,
    pub max_tokens: usize,
}

impl Default for LengthFilter {
    fn default() -> Self {
        LengthFilter {
            min_tokens: 3,
            max_tokens: 64,
        }
    }
}

impl LengthFilter {
    pub fn accepts(&self, tokens: usize) -> bool {
        (self.min_tokens..=self.max_tokens).contains(&tokens)
    }
}

/// Strips, segments and tokenizes one document.
///
/// `sent_idx` is the sentence's position in the segmented document, counted
/// before the length filter, so it keeps pointing at the same sentence when
/// the bounds change.
pub fn clean_document(doc: &RawDocument, filter: &LengthFilter) -> Vec<CleanSentence> {
    let plain = strip_markup(&doc.body);
    segment_sentences(&plain)
        .into_iter()
        .enumerate()
        .filter_map(|(idx, text)| {
            let tokens = tokenize(&text);
            filter.accepts(tokens.len()).then_some(CleanSentence {
                doc_id: doc.doc_id,
                sent_idx: idx as u32,
                text,
                tokens,
            })
        })
        .collect()
}
