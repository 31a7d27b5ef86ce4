//! Concept-to-text knowledge augmentation.
//!
//! The pipeline turns an encyclopedia dump into concept-matched sentences,
//! builds concept-to-sentence reconstruction data with a POS tagger,
//! enumerates concept pairs and sets from a CommonGen-style file, collects
//! generated ("semi-golden") sentences for them, and scores generated text.

pub mod dataset;
pub mod error;
pub mod generator;
pub mod index;
pub mod ingest;
pub mod jsonl;
pub mod metrics;
pub mod tagger;

pub use error::{Error, Result};
