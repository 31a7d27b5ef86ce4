use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::ingest::tokenize;
use crate::tagger::{lemma_forms, lemmatize, ConceptSet, PerceptronModel};

/// Fraction of concepts present in a sentence.
///
/// A concept is present when it equals some token's surface form, its noun
/// or verb lemma, or (with a model) its lemma under the predicted tag.
pub fn coverage(concepts: &ConceptSet, sentence: &str, model: Option<&PerceptronModel>) -> Result<f64> {
    if concepts.is_empty() {
        return Err(Error::EmptyConcepts);
    }
    let forms = sentence_forms(sentence, model);
    let present = concepts.iter().filter(|c| forms.contains(*c)).count();
    Ok(present as f64 / concepts.len() as f64)
}

/// Every concept form a sentence's tokens can match.
pub fn sentence_forms(sentence: &str, model: Option<&PerceptronModel>) -> HashSet<String> {
    let tokens = tokenize(sentence);
    let mut forms = HashSet::new();
    if let Some(model) = model {
        for (token, tag) in tokens.iter().zip(model.tag(&tokens)) {
            forms.insert(lemmatize(token, tag));
        }
    }
    for token in &tokens {
        forms.extend(lemma_forms(token));
    }
    forms
}
