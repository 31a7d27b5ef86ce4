/// Splits text into lowercase tokens.
///
/// A token is a maximal run of Unicode letters or digits. A single apostrophe
/// between two alphanumeric characters stays inside the token, so `don't` and
/// `dog's` are one token each. Everything else is a separator.
pub fn tokenize(text: &str) -> Vec<String> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut current = String::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_alphanumeric() {
            current.extend(c.to_lowercase());
        } else if is_apostrophe(c)
            && !current.is_empty()
            && !current.ends_with('\'')
            && chars.get(i + 1).is_some_and(|n| n.is_alphanumeric())
            && !current.contains('\'')
        {
            current.push('\'');
        } else if !current.is_empty() {
            tokens.push(std::mem::take(&mut current));
        }
        i += 1;
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    tokens
}

fn is_apostrophe(c: char) -> bool {
    c == '\'' || c == '\u{2019}'
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<String> {
        tokenize(s)
    }

    #[test]
    fn possessive_stays_whole() {
        assert_eq!(toks("The dog's bone!"), ["the", "dog's", "bone"]);
    }

    #[test]
    fn empty() {
        assert!(toks("").is_empty());
        assert!(toks("  ... !").is_empty());
    }

    #[test]
    fn hyphen_separates() {
        assert_eq!(toks("A 2-ton truck"), ["a", "2", "ton", "truck"]);
    }

    #[test]
    fn only_one_internal_apostrophe() {
        assert_eq!(toks("rock'n'roll"), ["rock'n", "roll"]);
        assert_eq!(toks("'quoted'"), ["quoted"]);
        assert_eq!(toks("dogs' toys"), ["dogs", "toys"]);
    }

    #[test]
    fn unicode_letters() {
        assert_eq!(toks("Über café, naïve"), ["über", "café", "naïve"]);
        assert_eq!(toks("don’t"), ["don't"]);
    }
}
