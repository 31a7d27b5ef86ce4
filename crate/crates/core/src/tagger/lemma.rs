use std::collections::{HashMap, HashSet};
use std::sync::OnceLock;

use super::PosTag;

const EXCEPTIONS: &str = include_str!("../../assets/lemma_exceptions.tsv");

struct Lexicon {
    forms: HashMap<(PosTag, &'static str), &'static str>,
    lemmas: HashSet<(PosTag, &'static str)>,
}

fn lexicon() -> &'static Lexicon {
    static LEXICON: OnceLock<Lexicon> = OnceLock::new();
    LEXICON.get_or_init(|| {
        let mut forms = HashMap::new();
        let mut lemmas = HashSet::new();
        for line in EXCEPTIONS.lines().filter(|l| !l.trim().is_empty() && !l.starts_with('#')) {
            let mut cols = line.split('\t');
            let (Some(form), Some(tag), Some(lemma)) = (cols.next(), cols.next(), cols.next()) else {
                panic!("bad lemma exception row {line:?}");
            };
            let tag: PosTag = tag.parse().expect("bad tag in lemma exception table");
            forms.insert((tag, form), lemma);
            lemmas.insert((tag, lemma));
        }
        Lexicon { forms, lemmas }
    })
}

/// Reduces an inflected noun or verb to its lemma.
///
/// Exceptions come from the bundled table; everything else goes through a
/// suffix cascade (`-s/-es/-ies` for nouns, plus `-ing/-ed` with doubled
/// consonant and silent-e handling for verbs). Other tags pass through.
/// The cascade is iterated to a fixed point, so lemmatizing a lemma returns
/// it unchanged.
pub fn lemmatize(token: &str, tag: PosTag) -> String {
    if !matches!(tag, PosTag::Noun | PosTag::Verb) {
        return token.to_string();
    }
    let mut current = token.to_string();
    // Every rewrite either shortens the word or lands on a protected lemma,
    // so this terminates.
    while let Some(next) = step(&current, tag) {
        if next == current {
            break;
        }
        current = next;
    }
    current
}

/// Every form a token could take as a concept: the surface form plus its
/// noun and verb lemmas.
pub fn lemma_forms(token: &str) -> [String; 3] {
    [
        token.to_string(),
        lemmatize(token, PosTag::Noun),
        lemmatize(token, PosTag::Verb),
    ]
}

fn step(word: &str, tag: PosTag) -> Option<String> {
    let lex = lexicon();
    if let Some(lemma) = lex.forms.get(&(tag, word)) {
        return Some((*lemma).to_string());
    }
    if lex.lemmas.contains(&(tag, word)) {
        return None;
    }
    if let Some(stem) = word.strip_suffix("'s") {
        return Some(stem.to_string());
    }
    if let Some(stem) = word.strip_suffix('\'') {
        return Some(stem.to_string());
    }
    if word.chars().count() <= 3 || !word.is_ascii() {
        return None;
    }
    match tag {
        PosTag::Noun => noun_step(word),
        PosTag::Verb => verb_step(word),
        _ => None,
    }
}

fn noun_step(word: &str) -> Option<String> {
    if let Some(stem) = word.strip_suffix("ies") {
        if word.len() > 4 {
            return Some(format!("{stem}y"));
        }
    }
    if let Some(stem) = strip_es(word) {
        return Some(stem);
    }
    strip_plain_s(word)
}

fn verb_step(word: &str) -> Option<String> {
    if let Some(stem) = word.strip_suffix("ies") {
        if word.len() > 4 {
            return Some(format!("{stem}y"));
        }
    }
    if let Some(stem) = word.strip_suffix("ied") {
        return Some(if word.len() > 4 { format!("{stem}y") } else { format!("{stem}ie") });
    }
    if let Some(stem) = strip_es(word).or_else(|| word.strip_suffix("oes").map(|s| format!("{s}o"))) {
        return Some(stem);
    }
    if let Some(stem) = word.strip_suffix("ing") {
        return restore_stem(stem);
    }
    if word.ends_with("eed") {
        return (word.len() > 4).then(|| word[..word.len() - 1].to_string());
    }
    if let Some(stem) = word.strip_suffix("ed") {
        return restore_stem(stem);
    }
    strip_plain_s(word)
}

fn strip_es(word: &str) -> Option<String> {
    if let Some(stem) = word.strip_suffix("sses") {
        return Some(format!("{stem}ss"));
    }
    ["xes", "zzes", "ches", "shes"]
        .iter()
        .find(|suffix| word.ends_with(*suffix))
        .map(|_| word[..word.len() - 2].to_string())
}

fn strip_plain_s(word: &str) -> Option<String> {
    if ["ss", "us", "is"].iter().any(|s| word.ends_with(s)) {
        return None;
    }
    word.strip_suffix('s').map(str::to_string)
}

fn is_vowel(c: u8) -> bool {
    matches!(c, b'a' | b'e' | b'i' | b'o' | b'u')
}

fn restore_stem(stem: &str) -> Option<String> {
    let bytes = stem.as_bytes();
    if bytes.len() < 2 || !bytes.iter().any(|&c| is_vowel(c) || c == b'y') {
        return None;
    }
    let n = bytes.len();
    let last = bytes[n - 1];
    if last == bytes[n - 2] && !is_vowel(last) && !matches!(last, b'l' | b's' | b'z' | b'f') {
        return Some(stem[..n - 1].to_string());
    }
    if matches!(last, b'v' | b'c') || (last == b'u' && bytes[n - 2] != b'u') {
        return Some(format!("{stem}e"));
    }
    let vowel_groups = bytes
        .iter()
        .enumerate()
        .filter(|&(i, &c)| is_vowel(c) && (i == 0 || !is_vowel(bytes[i - 1])))
        .count();
    let cvc = n >= 3
        && !is_vowel(bytes[n - 3])
        && is_vowel(bytes[n - 2])
        && !is_vowel(last)
        && !matches!(last, b'w' | b'x' | b'y');
    if cvc && vowel_groups == 1 {
        return Some(format!("{stem}e"));
    }
    Some(stem.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn verb(w: &str) -> String {
        lemmatize(w, PosTag::Verb)
    }

    fn noun(w: &str) -> String {
        lemmatize(w, PosTag::Noun)
    }

    #[test]
    fn named_examples() {
        assert_eq!(verb("running"), "run");
        assert_eq!(noun("cities"), "city");
        assert_eq!(noun("men"), "man");
    }

    #[test]
    fn noun_rules() {
        for (form, lemma) in [
            ("dogs", "dog"),
            ("boxes", "box"),
            ("churches", "church"),
            ("dishes", "dish"),
            ("classes", "class"),
            ("grass", "grass"),
            ("bonus", "bonus"),
            ("tennis", "tennis"),
            ("dog's", "dog"),
            ("toys", "toy"),
            ("ties", "tie"),
            ("children", "child"),
            ("buses", "bus"),
        ] {
            assert_eq!(noun(form), lemma, "{form}");
        }
    }

    #[test]
    fn verb_rules() {
        for (form, lemma) in [
            ("runs", "run"),
            ("ran", "run"),
            ("stopped", "stop"),
            ("making", "make"),
            ("riding", "ride"),
            ("eating", "eat"),
            ("visiting", "visit"),
            ("jumped", "jump"),
            ("carried", "carry"),
            ("flies", "fly"),
            ("died", "die"),
            ("watches", "watch"),
            ("kisses", "kiss"),
            ("goes", "go"),
            ("agreed", "agree"),
            ("needed", "need"),
            ("pulled", "pull"),
            ("dancing", "dance"),
            ("giving", "give"),
            ("arguing", "argue"),
            ("playing", "play"),
            ("fixing", "fix"),
            ("snowing", "snow"),
            ("singing", "sing"),
            ("bring", "bring"),
            ("smiled", "smile"),
            ("hopped", "hop"),
            ("hoped", "hope"),
            ("beginning", "begin"),
        ] {
            assert_eq!(verb(form), lemma, "{form}");
        }
    }

    #[test]
    fn other_tags_are_identity() {
        assert_eq!(lemmatize("running", PosTag::Adj), "running");
        assert_eq!(lemmatize("dogs", PosTag::X), "dogs");
    }

    #[test]
    fn exception_table_is_consistent() {
        let lex = lexicon();
        for ((tag, _), lemma) in &lex.forms {
            if let Some(other) = lex.forms.get(&(*tag, *lemma)) {
                assert_eq!(other, lemma, "{lemma} maps onward to {other}");
            }
        }
    }

    proptest! {
        #[test]
        fn idempotent(word in "[a-z']{1,14}", verb_tag in any::<bool>()) {
            let tag = if verb_tag { PosTag::Verb } else { PosTag::Noun };
            let once = lemmatize(&word, tag);
            prop_assert_eq!(lemmatize(&once, tag), once);
        }
    }
}
