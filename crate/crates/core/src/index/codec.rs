//! On-disk index format.
//!
//! ```text
//! magic "CGFI" | version u16
//! params:   k1 f64 | b f64
//! stats:    N u64 | total token count u64 | term count u64
//! dict:     byte length u64 | per term: shared-prefix varint, suffix-length varint, suffix bytes
//! postings: byte length u64 | per term: df varint, then df x (ordinal gap varint, tf varint)
//! id_map:   byte length u64 | per sentence: doc_id varint, sent_idx varint
//! ```
//!
//! Fixed-width fields are little-endian. Document lengths are not stored;
//! they are the per-sentence sums of term frequencies.

use std::sync::OnceLock;

use super::{varint, Bm25Index, Bm25Params, Posting, SentenceId};
use crate::error::{Error, Result};

const MAGIC: &[u8; 4] = b"CGFI";
pub const FORMAT_VERSION: u16 = 1;

fn bad(msg: impl Into<String>) -> Error {
    Error::IndexFormat(msg.into())
}

impl Bm25Index {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
        out.extend_from_slice(&self.params.k1.to_le_bytes());
        out.extend_from_slice(&self.params.b.to_le_bytes());
        out.extend_from_slice(&(self.len() as u64).to_le_bytes());
        out.extend_from_slice(&self.total_length.to_le_bytes());
        out.extend_from_slice(&(self.terms.len() as u64).to_le_bytes());

        let mut dict = Vec::new();
        let mut previous: &[u8] = &[];
        for term in &self.terms {
            let bytes = term.as_bytes();
            let shared = previous.iter().zip(bytes).take_while(|(a, b)| a == b).count();
            varint::write(&mut dict, shared as u64);
            varint::write(&mut dict, (bytes.len() - shared) as u64);
            dict.extend_from_slice(&bytes[shared..]);
            previous = bytes;
        }
        write_section(&mut out, &dict);

        let mut postings = Vec::new();
        for list in &self.postings {
            varint::write(&mut postings, list.len() as u64);
            let mut last = 0u32;
            for (i, p) in list.iter().enumerate() {
                let gap = if i == 0 { p.ordinal } else { p.ordinal - last };
                varint::write(&mut postings, u64::from(gap));
                varint::write(&mut postings, u64::from(p.tf));
                last = p.ordinal;
            }
        }
        write_section(&mut out, &postings);

        let mut ids = Vec::new();
        for id in &self.id_map {
            varint::write(&mut ids, id.doc_id);
            varint::write(&mut ids, u64::from(id.sent_idx));
        }
        write_section(&mut out, &ids);
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader { bytes, pos: 0 };
        if r.take(4)? != MAGIC {
            return Err(bad("bad magic"));
        }
        let version = u16::from_le_bytes(r.array()?);
        if version != FORMAT_VERSION {
            return Err(bad(format!("unsupported format version {version}")));
        }
        let params = Bm25Params {
            k1: f64::from_le_bytes(r.array()?),
            b: f64::from_le_bytes(r.array()?),
        };
        params.validate().map_err(|e| bad(e.to_string()))?;
        let n = u64::from_le_bytes(r.array()?);
        let total_length = u64::from_le_bytes(r.array()?);
        let n_terms = u64::from_le_bytes(r.array()?);
        if n == 0 || n > u64::from(u32::MAX) {
            return Err(bad(format!("invalid sentence count {n}")));
        }
        let n = n as usize;

        let dict = r.section()?;
        let mut terms: Vec<String> = Vec::new();
        let mut pos = 0;
        let mut previous: Vec<u8> = Vec::new();
        for _ in 0..n_terms {
            let shared = varint::read(dict, &mut pos).ok_or_else(|| bad("truncated dictionary"))? as usize;
            let suffix = varint::read(dict, &mut pos).ok_or_else(|| bad("truncated dictionary"))? as usize;
            if shared > previous.len() || pos + suffix > dict.len() {
                return Err(bad("corrupt dictionary entry"));
            }
            let mut term = previous[..shared].to_vec();
            term.extend_from_slice(&dict[pos..pos + suffix]);
            pos += suffix;
            if !terms.is_empty() && term.as_slice() <= previous.as_slice() {
                return Err(bad("dictionary is not strictly sorted"));
            }
            let text = String::from_utf8(term.clone()).map_err(|_| bad("term is not UTF-8"))?;
            terms.push(text);
            previous = term;
        }
        expect_consumed(dict, pos, "dictionary")?;

        let section = r.section()?;
        let mut pos = 0;
        let mut postings = Vec::with_capacity(terms.len());
        let mut doc_lengths = vec![0u32; n];
        for _ in 0..terms.len() {
            let df = varint::read(section, &mut pos).ok_or_else(|| bad("truncated postings"))? as usize;
            if df == 0 || df > n {
                return Err(bad("invalid document frequency"));
            }
            let mut list = Vec::with_capacity(df);
            let mut ordinal = 0u64;
            for i in 0..df {
                let gap = varint::read(section, &mut pos).ok_or_else(|| bad("truncated postings"))?;
                let tf = varint::read(section, &mut pos).ok_or_else(|| bad("truncated postings"))?;
                if i > 0 && gap == 0 {
                    return Err(bad("posting list is not strictly increasing"));
                }
                ordinal += gap;
                if ordinal >= n as u64 || tf == 0 || tf > u64::from(u32::MAX) {
                    return Err(bad("posting out of range"));
                }
                let ordinal = ordinal as u32;
                doc_lengths[ordinal as usize] += tf as u32;
                list.push(Posting { ordinal, tf: tf as u32 });
            }
            postings.push(list);
        }
        expect_consumed(section, pos, "postings")?;
        if doc_lengths.iter().map(|&l| u64::from(l)).sum::<u64>() != total_length {
            return Err(bad("token count does not match postings"));
        }

        let section = r.section()?;
        let mut pos = 0;
        let mut id_map = Vec::with_capacity(n);
        for _ in 0..n {
            let doc_id = varint::read(section, &mut pos).ok_or_else(|| bad("truncated id map"))?;
            let sent_idx = varint::read(section, &mut pos).ok_or_else(|| bad("truncated id map"))?;
            let sent_idx = u32::try_from(sent_idx).map_err(|_| bad("sentence index out of range"))?;
            id_map.push(SentenceId { doc_id, sent_idx });
        }
        expect_consumed(section, pos, "id map")?;
        if r.pos != bytes.len() {
            return Err(bad("trailing bytes"));
        }
        Ok(Bm25Index {
            params,
            terms,
            postings,
            doc_lengths,
            total_length,
            id_map,
            lemma_terms: OnceLock::new(),
        })
    }
}

fn write_section(out: &mut Vec<u8>, section: &[u8]) {
    out.extend_from_slice(&(section.len() as u64).to_le_bytes());
    out.extend_from_slice(section);
}

fn expect_consumed(section: &[u8], pos: usize, name: &str) -> Result<()> {
    if pos == section.len() {
        Ok(())
    } else {
        Err(bad(format!("{name} section has trailing bytes")))
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.bytes.len())
            .ok_or_else(|| bad("truncated file"))?;
        let out = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn array<const N: usize>(&mut self) -> Result<[u8; N]> {
        Ok(self.take(N)?.try_into().unwrap())
    }

    fn section(&mut self) -> Result<&'a [u8]> {
        let len = u64::from_le_bytes(self.array()?);
        let len = usize::try_from(len).map_err(|_| bad("section too large"))?;
        self.take(len)
    }
}

#[cfg(test)]
mod tests {
    use super::super::tests::sentences;
    use super::super::build_index;
    use super::*;

    fn toy() -> Bm25Index {
        build_index(sentences(&["a b", "b c", "c c c", "über alles"]), Bm25Params { k1: 0.9, b: 0.4 }).unwrap()
    }

    #[test]
    fn header_layout() {
        let bytes = toy().to_bytes();
        assert_eq!(&bytes[..4], b"CGFI");
        assert_eq!(u16::from_le_bytes([bytes[4], bytes[5]]), FORMAT_VERSION);
        assert_eq!(f64::from_le_bytes(bytes[6..14].try_into().unwrap()), 0.9);
        assert_eq!(u64::from_le_bytes(bytes[22..30].try_into().unwrap()), 4);
    }

    #[test]
    fn round_trip_preserves_everything() {
        let idx = toy();
        let back = Bm25Index::from_bytes(&idx.to_bytes()).unwrap();
        assert_eq!(back.terms, idx.terms);
        assert_eq!(back.postings, idx.postings);
        assert_eq!(back.doc_lengths, idx.doc_lengths);
        assert_eq!(back.id_map, idx.id_map);
        assert_eq!(back.params, idx.params);
        assert_eq!(back.to_bytes(), idx.to_bytes());
    }

    #[test]
    fn rebuild_is_byte_identical() {
        assert_eq!(toy().to_bytes(), toy().to_bytes());
    }

    #[test]
    fn corruption_is_detected() {
        let bytes = toy().to_bytes();
        assert!(Bm25Index::from_bytes(&bytes[..bytes.len() - 1]).is_err());
        let mut extra = bytes.clone();
        extra.push(0);
        assert!(Bm25Index::from_bytes(&extra).is_err());
        let mut magic = bytes.clone();
        magic[1] = b'X';
        assert!(Bm25Index::from_bytes(&magic).is_err());
        let mut version = bytes;
        version[4] = 9;
        assert!(Bm25Index::from_bytes(&version).is_err());
    }
}
