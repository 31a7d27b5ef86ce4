use std::collections::HashSet;
use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Deserializer, Serialize};

use super::{lemmatize, PerceptronModel};

const AUXILIARIES: &str = include_str!("../../assets/auxiliaries.txt");

fn auxiliaries() -> &'static HashSet<&'static str> {
    static SET: OnceLock<HashSet<&'static str>> = OnceLock::new();
    SET.get_or_init(|| {
        AUXILIARIES
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .collect()
    })
}

pub fn is_auxiliary(lemma: &str) -> bool {
    auxiliaries().contains(lemma)
}

/// A sorted, deduplicated set of lowercase concept lemmas.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Default)]
#[serde(transparent)]
pub struct ConceptSet(Vec<String>);

impl ConceptSet {
    pub fn new<I, S>(concepts: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut v: Vec<String> = concepts
            .into_iter()
            .map(|c| c.as_ref().trim().to_lowercase())
            .filter(|c| !c.is_empty())
            .collect();
        v.sort();
        v.dedup();
        ConceptSet(v)
    }

    pub fn concepts(&self) -> &[String] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, concept: &str) -> bool {
        self.0.binary_search_by(|c| c.as_str().cmp(concept)).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(String::as_str)
    }

    pub fn into_vec(self) -> Vec<String> {
        self.0
    }
}

impl<'de> Deserialize<'de> for ConceptSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        Vec::<String>::deserialize(deserializer).map(ConceptSet::new)
    }
}

impl fmt::Display for ConceptSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.0.join(", "))
    }
}

/// Noun and verb lemmas of a token sequence, minus auxiliaries and
/// single-character lemmas.
pub fn extract_concepts<S: AsRef<str>>(model: &PerceptronModel, tokens: &[S]) -> ConceptSet {
    let tags = model.tag(tokens);
    ConceptSet::new(
        tokens
            .iter()
            .zip(tags)
            .filter(|(_, tag)| tag.is_content())
            .map(|(tok, tag)| lemmatize(tok.as_ref(), tag))
            .filter(|lemma| lemma.chars().count() > 1 && !is_auxiliary(lemma)),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn concept_set_normalizes() {
        let set = ConceptSet::new(["Run", "dog", "dog", " field "]);
        assert_eq!(set.concepts(), ["dog", "field", "run"]);
        assert!(set.contains("field"));
        assert!(!set.contains("cat"));
        assert_eq!(set.to_string(), "{dog, field, run}");
    }

    #[test]
    fn concept_set_deserializes_normalized() {
        let set: ConceptSet = serde_json::from_str(r#"["run","Dog","dog"]"#).unwrap();
        assert_eq!(set.concepts(), ["dog", "run"]);
        assert_eq!(serde_json::to_string(&set).unwrap(), r#"["dog","run"]"#);
    }

    #[test]
    fn auxiliaries_are_listed() {
        for aux in ["be", "is", "are", "was", "were", "have", "has", "had", "do", "does", "did"] {
            assert!(is_auxiliary(aux), "{aux}");
        }
        assert!(!is_auxiliary("run"));
    }
}
