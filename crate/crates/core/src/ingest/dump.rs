use std::io::BufRead;

use quick_xml::events::{BytesRef, Event};
use quick_xml::Reader;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One article page from a pages-articles dump.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawDocument {
    pub doc_id: u64,
    pub title: String,
    pub body: String,
}

#[derive(Default)]
struct PageState {
    title: String,
    ns: Option<i64>,
    id: Option<u64>,
    redirect: bool,
    text: String,
}

/// Streaming reader over a MediaWiki XML dump.
///
/// Yields namespace-0, non-redirect pages in stream order. Pages are
/// buffered one at a time, so memory use does not grow with the dump.
pub struct DumpReader<R: BufRead> {
    reader: Reader<R>,
    buf: Vec<u8>,
    stack: Vec<String>,
    page: Option<PageState>,
    done: bool,
}

impl<R: BufRead> DumpReader<R> {
    pub fn new(input: R) -> Self {
        let mut reader = Reader::from_reader(input);
        reader.config_mut().check_end_names = true;
        DumpReader {
            reader,
            buf: Vec::new(),
            stack: Vec::new(),
            page: None,
            done: false,
        }
    }

    fn error(&self, message: impl Into<String>) -> Error {
        Error::Xml {
            offset: self.reader.buffer_position(),
            message: message.into(),
        }
    }

    fn in_page_child(&self, name: &str) -> bool {
        let n = self.stack.len();
        n >= 2 && self.stack[n - 1] == name && self.stack[n - 2] == "page"
    }

    fn in_revision_text(&self) -> bool {
        let n = self.stack.len();
        n >= 2 && self.stack[n - 1] == "text" && self.stack[n - 2] == "revision"
    }

    fn append_text(&mut self, text: &str) {
        let in_title = self.in_page_child("title");
        let in_text = self.in_revision_text();
        if let Some(page) = self.page.as_mut() {
            if in_title {
                page.title.push_str(text);
            } else if in_text {
                page.text.push_str(text);
            }
        }
    }

    fn next_document(&mut self) -> Result<Option<RawDocument>> {
        let mut scalar = String::new();
        loop {
            self.buf.clear();
            let event = self
                .reader
                .read_event_into(&mut self.buf)
                .map_err(|e| Error::Xml {
                    offset: self.reader.error_position(),
                    message: e.to_string(),
                })?
                .into_owned();
            match event {
                Event::Start(start) => {
                    let name = String::from_utf8_lossy(start.local_name().as_ref()).into_owned();
                    if name == "page" {
                        self.page = Some(PageState::default());
                    }
                    scalar.clear();
                    self.stack.push(name);
                }
                Event::Empty(empty) => {
                    if empty.local_name().as_ref() == b"redirect" && self.stack.last().is_some_and(|n| n == "page") {
                        if let Some(page) = self.page.as_mut() {
                            page.redirect = true;
                        }
                    }
                }
                Event::End(_) => {
                    let name = self.stack.pop().unwrap_or_default();
                    match name.as_str() {
                        "ns" | "id" if self.stack.last().is_some_and(|n| n == "page") => {
                            let value = scalar.trim();
                            if self.page.is_none() {
                                return Err(self.error(format!("<{name}> outside <page>")));
                            }
                            if name == "ns" {
                                let ns = value.parse().map_err(|_| self.error(format!("bad <ns> value {value:?}")))?;
                                self.page.as_mut().unwrap().ns = Some(ns);
                            } else {
                                let id = value.parse().map_err(|_| self.error(format!("bad <id> value {value:?}")))?;
                                self.page.as_mut().unwrap().id = Some(id);
                            }
                        }
                        "page" => {
                            let page = self.page.take().unwrap_or_default();
                            let doc_id = page.id.ok_or_else(|| self.error("page without <id>"))?;
                            if page.ns.unwrap_or(0) == 0 && !page.redirect {
                                return Ok(Some(RawDocument {
                                    doc_id,
                                    title: page.title,
                                    body: page.text,
                                }));
                            }
                        }
                        _ => {}
                    }
                    scalar.clear();
                }
                Event::Text(text) => {
                    let text = text.xml_content().map_err(|e| self.error(e.to_string()))?;
                    scalar.push_str(&text);
                    self.append_text(&text);
                }
                Event::CData(data) => {
                    let text = data.decode().map_err(|e| self.error(e.to_string()))?;
                    scalar.push_str(&text);
                    self.append_text(&text);
                }
                Event::GeneralRef(reference) => {
                    let resolved = resolve_reference(&reference).ok_or_else(|| {
                        self.error(format!("unknown entity &{};", String::from_utf8_lossy(&reference)))
                    })?;
                    let mut tmp = [0u8; 4];
                    let text = resolved.encode_utf8(&mut tmp);
                    scalar.push_str(text);
                    self.append_text(text);
                }
                Event::Eof => {
                    if let Some(open) = self.stack.last() {
                        return Err(self.error(format!("unexpected end of input inside <{open}>")));
                    }
                    return Ok(None);
                }
                _ => {}
            }
        }
    }
}

fn resolve_reference(reference: &BytesRef<'_>) -> Option<char> {
    if reference.is_char_ref() {
        return reference.resolve_char_ref().ok().flatten();
    }
    match reference.as_ref() {
        b"amp" => Some('&'),
        b"lt" => Some('<'),
        b"gt" => Some('>'),
        b"quot" => Some('"'),
        b"apos" => Some('\''),
        _ => None,
    }
}

impl<R: BufRead> Iterator for DumpReader<R> {
    type Item = Result<RawDocument>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        match self.next_document() {
            Ok(Some(doc)) => Some(Ok(doc)),
            Ok(None) => {
                self.done = true;
                None
            }
            Err(e) => {
                self.done = true;
                Some(Err(e))
            }
        }
    }
}

/// Parses a dump stream; see [`DumpReader`].
pub fn parse_dump<R: BufRead>(input: R) -> DumpReader<R> {
    DumpReader::new(input)
}

/// Opens a dump file, decompressing `.bz2` and `.gz` by extension.
#[cfg(feature = "native")]
pub fn open_dump(path: &std::path::Path) -> Result<Box<dyn BufRead + Send>> {
    use std::fs::File;
    use std::io::BufReader;

    let file = File::open(path).map_err(|e| Error::file(path, e))?;
    let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
    Ok(match ext {
        "bz2" => Box::new(BufReader::new(bzip2::read::MultiBzDecoder::new(file))),
        "gz" => Box::new(BufReader::new(flate2::read::MultiGzDecoder::new(file))),
        _ => Box::new(BufReader::new(file)),
    })
}
