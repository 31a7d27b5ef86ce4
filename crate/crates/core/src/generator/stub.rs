use std::collections::HashSet;
use std::sync::OnceLock;

use super::{GenRequest, Generator};
use crate::error::Result;
use crate::tagger::ConceptSet;

const VERBS: &str = include_str!("../../assets/stub_verbs.txt");
const NOUNS: &str = include_str!("../../assets/stub_nouns.txt");

fn word_list(text: &'static str) -> Vec<&'static str> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .collect()
}

/// Verb lemmas the stub treats as verbs.
pub fn stub_verbs() -> &'static HashSet<&'static str> {
    static SET: OnceLock<HashSet<&'static str>> = OnceLock::new();
    SET.get_or_init(|| word_list(VERBS).into_iter().collect())
}

/// Noun lemmas bundled alongside the verb list.
pub fn stub_nouns() -> &'static [&'static str] {
    static LIST: OnceLock<Vec<&'static str>> = OnceLock::new();
    LIST.get_or_init(|| word_list(NOUNS))
}

/// Third-person singular present form.
pub fn third_person(verb: &str) -> String {
    let b = verb.as_bytes();
    let ends_consonant_y = b.len() >= 2 && b[b.len() - 1] == b'y' && !b"aeiou".contains(&b[b.len() - 2]);
    if ends_consonant_y {
        format!("{}ies", &verb[..verb.len() - 1])
    } else if ["s", "sh", "ch", "x", "z", "o"].iter().any(|s| verb.ends_with(s)) {
        format!("{verb}es")
    } else {
        format!("{verb}s")
    }
}

fn article(word: &str) -> &'static str {
    if word.starts_with(['a', 'e', 'i', 'o', 'u']) {
        "an"
    } else {
        "a"
    }
}

fn join_list(items: &[String]) -> String {
    match items {
        [] => String::new(),
        [one] => one.clone(),
        [init @ .., last] => format!("{} and {last}", init.join(", ")),
    }
}

/// Deterministic template sentence containing every concept.
///
/// Verbs (per the bundled list) are conjugated into the verb slot, every
/// other concept is a noun. `seed` picks which noun is the subject; with two
/// concepts `{dog, run}` and seed 0 the output is `A dog runs in the scene.`
pub fn stub_generate(concepts: &ConceptSet, seed: u64) -> String {
    let verbs = stub_verbs();
    let (verb_slots, nouns): (Vec<&str>, Vec<&str>) = concepts.iter().partition(|c| verbs.contains(c));
    let (subject, objects): (&str, Vec<&str>) = if nouns.is_empty() {
        ("person", Vec::new())
    } else {
        let pick = (seed % nouns.len() as u64) as usize;
        let rest = nouns.iter().enumerate().filter(|&(i, _)| i != pick).map(|(_, n)| *n).collect();
        (nouns[pick], rest)
    };
    let verb_phrase = if verb_slots.is_empty() {
        "is".to_string()
    } else {
        join_list(&verb_slots.iter().map(|v| third_person(v)).collect::<Vec<_>>())
    };
    let mut sentence = format!("{} {subject} {verb_phrase}", article(subject));
    if !objects.is_empty() {
        let objects: Vec<String> = objects.iter().map(|o| format!("{} {o}", article(o))).collect();
        sentence.push_str(" with ");
        sentence.push_str(&join_list(&objects));
    }
    sentence.push_str(" in the scene.");
    let mut chars = sentence.chars();
    match chars.next() {
        Some(first) => first.to_uppercase().chain(chars).collect(),
        None => sentence,
    }
}

/// Offline generator backed by [`stub_generate`]. Candidate `i` uses seed
/// `seed + i`.
#[derive(Debug, Clone, Default)]
pub struct StubGenerator {
    pub seed: u64,
}

impl Generator for StubGenerator {
    fn id(&self) -> String {
        format!("stub-{}", self.seed)
    }

    fn generate(&self, request: &GenRequest) -> Result<Vec<String>> {
        request.validate()?;
        Ok((0..request.num_candidates as u64)
            .map(|i| stub_generate(&request.concepts, self.seed.wrapping_add(i)))
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tagger::{lemmatize, PosTag};

    #[test]
    fn pair_template() {
        assert_eq!(stub_generate(&ConceptSet::new(["run", "dog"]), 0), "A dog runs in the scene.");
    }

    #[test]
    fn three_concepts_any_seed() {
        let set = ConceptSet::new(["ball", "dog", "throw"]);
        assert_eq!(stub_generate(&set, 0), "A ball throws with a dog in the scene.");
        assert_eq!(stub_generate(&set, 1), "A dog throws with a ball in the scene.");
    }

    #[test]
    fn deterministic() {
        let set = ConceptSet::new(["apple", "eat", "girl", "tree"]);
        assert_eq!(stub_generate(&set, 5), stub_generate(&set, 5));
    }

    #[test]
    fn no_nouns_or_no_verbs() {
        assert_eq!(stub_generate(&ConceptSet::new(["run", "jump"]), 0), "A person jumps and runs in the scene.");
        assert_eq!(stub_generate(&ConceptSet::new(["apple", "tree"]), 0), "An apple is with a tree in the scene.");
    }

    #[test]
    fn conjugation_lemmatizes_back() {
        for verb in stub_verbs() {
            let form = third_person(verb);
            assert_eq!(lemmatize(&form, PosTag::Verb), *verb, "{verb} -> {form}");
        }
        assert_eq!(third_person("fly"), "flies");
        assert_eq!(third_person("watch"), "watches");
        assert_eq!(third_person("play"), "plays");
    }

    #[test]
    fn candidate_count() {
        let req = GenRequest::new(ConceptSet::new(["dog", "run"])).with_candidates(3);
        assert_eq!(StubGenerator::default().generate(&req).unwrap().len(), 3);
    }
}
