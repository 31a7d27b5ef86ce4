use crate::error::{Error, Result};

use super::PosTag;

/// One training sentence: parallel token and gold-tag lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaggedSentence {
    pub tokens: Vec<String>,
    pub tags: Vec<PosTag>,
}

/// Parses the two-column `token<TAB>tag` format, sentences separated by
/// blank lines.
pub fn parse_tagged_corpus(text: &str) -> Result<Vec<TaggedSentence>> {
    let mut sentences = Vec::new();
    let mut current = TaggedSentence {
        tokens: Vec::new(),
        tags: Vec::new(),
    };
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            if !current.tokens.is_empty() {
                sentences.push(std::mem::replace(
                    &mut current,
                    TaggedSentence {
                        tokens: Vec::new(),
                        tags: Vec::new(),
                    },
                ));
            }
            continue;
        }
        let (token, tag) = line
            .split_once('\t')
            .ok_or_else(|| Error::line(line_no, "expected `token<TAB>tag`"))?;
        let tag: PosTag = tag.trim().parse().map_err(|e| Error::line(line_no, format!("{e}")))?;
        current.tokens.push(token.to_string());
        current.tags.push(tag);
    }
    if !current.tokens.is_empty() {
        sentences.push(current);
    }
    Ok(sentences)
}

/// The bundled mini-treebank with its train/dev split.
#[derive(Debug, Clone)]
pub struct Treebank {
    pub train: Vec<TaggedSentence>,
    pub dev: Vec<TaggedSentence>,
}

pub fn bundled_treebank() -> Treebank {
    const TRAIN: &str = include_str!("../../assets/treebank_train.tsv");
    const DEV: &str = include_str!("../../assets/treebank_dev.tsv");
    Treebank {
        train: parse_tagged_corpus(TRAIN).expect("bundled train split parses"),
        dev: parse_tagged_corpus(DEV).expect("bundled dev split parses"),
    }
}
