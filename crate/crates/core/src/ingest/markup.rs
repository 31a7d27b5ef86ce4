use std::sync::OnceLock;

use regex::Regex;

use super::segment::collapse_whitespace;

struct Rules {
    ref_self_closing: Regex,
    ref_block: Regex,
    ref_unclosed: Regex,
    comment: Regex,
    tag: Regex,
    external_link: Regex,
    emphasis: Regex,
    heading: Regex,
    table_line: Regex,
    list_marker: Regex,
    space_before_punct: Regex,
}

fn rules() -> &'static Rules {
    static RULES: OnceLock<Rules> = OnceLock::new();
    RULES.get_or_init(|| Rules {
        ref_self_closing: Regex::new(r"(?i)<ref\b[^>]*/>").unwrap(),
        ref_block: Regex::new(r"(?is)<ref\b[^>]*>.*?</ref\s*>").unwrap(),
        ref_unclosed: Regex::new(r"(?i)<ref\b[^\n]*").unwrap(),
        comment: Regex::new(r"(?s)<!--.*?(?:-->|$)").unwrap(),
        tag: Regex::new(r"</?[A-Za-z][^<>]*>").unwrap(),
        external_link: Regex::new(r"\[(?:(?:https?|ftp):)?//[^\s\]]*(?:[ \t]+([^\]\n]*))?\]").unwrap(),
        emphasis: Regex::new(r"''+").unwrap(),
        heading: Regex::new(r"(?m)^[ \t]*=+.*=+[ \t]*$").unwrap(),
        table_line: Regex::new(r"(?m)^[ \t]*(?:\{\||\|\}|\||!).*$").unwrap(),
        list_marker: Regex::new(r"(?m)^(?:[ \t]*[*#:;])+").unwrap(),
        space_before_punct: Regex::new(r" +([.,;:!?)])").unwrap(),
    })
}

const MAX_PASSES: usize = 8;

/// Converts wikitext into a single line of plain text.
///
/// Rules, in order: drop `{{...}}` templates (nesting-aware); drop `<ref>`
/// elements, comments and remaining tags; replace `[[target|anchor]]` with
/// the anchor and `[[target]]` with the target (file and category links are
/// dropped); keep only the label of `[url label]` links; strip bold/italic
/// quotes; drop headings, table rows and list markers; collapse whitespace
/// and remove spaces left before closing punctuation.
/// An unbalanced construct is dropped through the end of its line.
///
/// The rule set is reapplied until the output stops changing, so the result
/// is a fixed point: `strip_markup(strip_markup(x)) == strip_markup(x)`.
pub fn strip_markup(body: &str) -> String {
    let mut current = strip_once(body);
    for _ in 1..MAX_PASSES {
        let next = strip_once(&current);
        if next == current {
            break;
        }
        current = next;
    }
    current
}

fn strip_once(body: &str) -> String {
    let r = rules();
    let text = drop_templates(body);

    let text = r.ref_self_closing.replace_all(&text, "");
    let text = r.ref_block.replace_all(&text, "");
    let text = r.ref_unclosed.replace_all(&text, "");
    let text = r.comment.replace_all(&text, "");
    let text = r.tag.replace_all(&text, "");

    let text = replace_links(&text);
    let text = r.external_link.replace_all(&text, "$1");
    let text = r.emphasis.replace_all(&text, "");

    let text = r.heading.replace_all(&text, "");
    let text = r.table_line.replace_all(&text, "");
    let text = r.list_marker.replace_all(&text, "");

    let text = text
        .replace("&nbsp;", " ")
        .replace("&ndash;", "\u{2013}")
        .replace("&mdash;", "\u{2014}")
        .replace("[[", "")
        .replace("]]", "")
        .replace("{{", "")
        .replace("}}", "");
    let text = collapse_whitespace(&text);
    r.space_before_punct.replace_all(&text, "$1").into_owned()
}

/// Byte offset just past the `close` that balances the `open` at `start`.
fn find_balanced(text: &str, start: usize, open: &str, close: &str) -> Option<usize> {
    let mut depth = 0usize;
    let mut i = start;
    while i < text.len() {
        let rest = &text[i..];
        if rest.starts_with(open) {
            depth += 1;
            i += open.len();
        } else if rest.starts_with(close) {
            depth -= 1;
            i += close.len();
            if depth == 0 {
                return Some(i);
            }
        } else {
            i += rest.chars().next().map_or(1, char::len_utf8);
        }
    }
    None
}

fn end_of_line(text: &str, from: usize) -> usize {
    text[from..].find('\n').map_or(text.len(), |p| from + p)
}

fn drop_templates(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut rest = text;
    while let Some(start) = rest.find("{{") {
        out.push_str(&rest[..start]);
        let end = find_balanced(rest, start, "{{", "}}").unwrap_or_else(|| end_of_line(rest, start));
        rest = &rest[end..];
    }
    out.push_str(rest);
    out
}

fn replace_links(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut rest = text;
    while let Some(start) = rest.find("[[") {
        out.push_str(&rest[..start]);
        match find_balanced(rest, start, "[[", "]]") {
            Some(end) => {
                let inner = replace_links(&rest[start + 2..end - 2]);
                out.push_str(&link_text(&inner));
                rest = &rest[end..];
            }
            None => rest = &rest[end_of_line(rest, start)..],
        }
    }
    out.push_str(rest);
    out
}

fn link_text(inner: &str) -> String {
    let target = inner.split('|').next().unwrap_or("").trim_start_matches(':');
    let namespace = target.split(':').next().unwrap_or("").trim().to_ascii_lowercase();
    if target.contains(':') && matches!(namespace.as_str(), "file" | "image" | "category" | "media") {
        return String::new();
    }
    match inner.split_once('|') {
        Some((_, anchor)) => anchor.to_string(),
        None => target.to_string(),
    }
}
