use std::collections::HashSet;
use std::sync::OnceLock;

const ABBREVIATIONS: &str = include_str!("../../assets/abbreviations.txt");

fn abbreviations() -> &'static HashSet<&'static str> {
    static SET: OnceLock<HashSet<&'static str>> = OnceLock::new();
    SET.get_or_init(|| {
        ABBREVIATIONS
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .collect()
    })
}

/// Splits plain text into sentences.
///
/// A boundary is a `.`, `!` or `?` (optionally followed by closing quotes or
/// brackets) that is followed by whitespace and then an uppercase letter or a
/// digit, possibly behind opening quotes or brackets. Periods ending a bundled abbreviation or a single-letter initial do
/// not split. Returned sentences are trimmed and have internal whitespace
/// collapsed.
pub fn segment_sentences(text: &str) -> Vec<String> {
    let collapsed = collapse_whitespace(text);
    let chars: Vec<char> = collapsed.chars().collect();
    let mut sentences = Vec::new();
    let mut start = 0;
    let mut i = 0;
    while i < chars.len() {
        if matches!(chars[i], '.' | '!' | '?') {
            let mut end = i + 1;
            while end < chars.len() && matches!(chars[end], '"' | '\'' | ')' | ']' | '\u{201d}' | '\u{2019}') {
                end += 1;
            }
            let mut next = end + 1;
            while next < chars.len() && matches!(chars[next], '"' | '\'' | '(' | '[' | '\u{201c}' | '\u{2018}') {
                next += 1;
            }
            let boundary = next < chars.len()
                && chars[end] == ' '
                && (chars[next].is_uppercase() || chars[next].is_ascii_digit())
                && !(chars[i] == '.' && ends_with_abbreviation(&chars[start..=i]));
            if boundary {
                sentences.push(chars[start..end].iter().collect::<String>());
                start = end + 1;
                i = start;
                continue;
            }
        }
        i += 1;
    }
    if start < chars.len() {
        sentences.push(chars[start..].iter().collect::<String>());
    }
    sentences
}

/// `span` ends with the period under consideration.
fn ends_with_abbreviation(span: &[char]) -> bool {
    let word_start = span
        .iter()
        .rposition(|c| c.is_whitespace() || matches!(c, '(' | '"' | '['))
        .map_or(0, |p| p + 1);
    let word: String = span[word_start..].iter().collect::<String>().to_lowercase();
    if abbreviations().contains(word.as_str()) {
        return true;
    }
    // Initials such as "J." in "J. R. R. Tolkien".
    let mut letters = word.chars();
    matches!((letters.next(), letters.next(), letters.next()), (Some(c), Some('.'), None) if c.is_alphabetic())
}

pub(crate) fn collapse_whitespace(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simple_split() {
        assert_eq!(segment_sentences("He ran. She ran."), ["He ran.", "She ran."]);
    }

    #[test]
    fn abbreviation_does_not_split() {
        assert_eq!(segment_sentences("Dr. Smith ran."), ["Dr. Smith ran."]);
        assert_eq!(
            segment_sentences("It moved to the U.S. In 1990 it closed."),
            ["It moved to the U.S. In 1990 it closed."]
        );
    }

    #[test]
    fn initials_do_not_split() {
        assert_eq!(
            segment_sentences("J. R. R. Tolkien wrote it. It sold well."),
            ["J. R. R. Tolkien wrote it.", "It sold well."]
        );
    }

    #[test]
    fn requires_uppercase_or_digit() {
        assert_eq!(segment_sentences("a.b. then more. and more"), ["a.b. then more. and more"]);
        assert_eq!(segment_sentences("Up! 3 dogs ran? Yes."), ["Up!", "3 dogs ran?", "Yes."]);
    }

    #[test]
    fn closing_quote_kept_with_sentence() {
        assert_eq!(
            segment_sentences("He said \"stop.\" Then he left."),
            ["He said \"stop.\"", "Then he left."]
        );
    }

    #[test]
    fn empty_input() {
        assert!(segment_sentences("   ").is_empty());
    }
}
