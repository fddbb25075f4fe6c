//! Byte-level BPE with exact byte offsets for every produced token.
//!
//! The encoder never merges across pre-token boundaries: a document is split
//! into runs of identifier bytes (`[A-Za-z0-9_]`), single punctuation bytes,
//! and whitespace runs, with each whitespace run attached to the pre-token
//! that follows it. Merges apply only inside one pre-token, so no produced
//! token's visible text can straddle a whitespace or punctuation boundary.
//! That property is what makes span-overlap alignment against syntax-tree
//! leaves well defined; [`Vocabulary::check_boundary_property`] audits an
//! arbitrary vocabulary for tokens that would break it.

mod train;

pub use train::{train_bpe, TrainConfig};

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use thiserror::Error;

use crate::bytemap::{bytes_to_display, display_to_bytes};
use crate::span::Span;

pub type TokenId = u32;

#[derive(Debug, Error)]
pub enum BpeError {
    #[error("duplicate token id {id}")]
    DuplicateId { id: TokenId },
    #[error("token ids are not dense: vocabulary has {len} entries but id {missing} is unused")]
    NonDenseIds { len: usize, missing: TokenId },
    #[error("merge rule {index} references unknown symbol {symbol:?}")]
    UnknownMergeSymbol { index: usize, symbol: String },
    #[error("merge rule {index} produces {token:?} which is not in the vocabulary")]
    MergeResultMissing { index: usize, token: String },
    #[error("special token {name:?} participates in merge rule {index}")]
    SpecialInMergeRule { name: String, index: usize },
    #[error("special token {name:?} is not in the vocabulary")]
    UnknownSpecialToken { name: String },
    #[error("token id {id} is out of range for vocabulary of size {vocab_size}")]
    UnknownTokenId { id: TokenId, vocab_size: usize },
    #[error("byte 0x{byte:02x} at offset {offset} has no vocabulary entry")]
    ByteNotInVocabulary { byte: u8, offset: usize },
    #[error("training corpus is empty")]
    EmptyCorpus,
    #[error("target vocabulary size {target} is below the base alphabet size {base}")]
    TargetBelowAlphabet { target: usize, base: usize },
    #[error("vocab file: {0}")]
    VocabFormat(String),
    #[error("merges file line {line}: {detail}")]
    MergesFormat { line: usize, detail: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// One subword unit produced by [`Vocabulary::encode`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub id: TokenId,
    pub text: Vec<u8>,
    /// Exact extent in the source; raw spans of a document's tokens
    /// partition `[0, len)`.
    pub raw_span: Span,
    /// `raw_span` with leading and trailing whitespace removed; empty for
    /// whitespace-only tokens. Alignment overlap uses this span only.
    pub core_span: Span,
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", bytes_to_display(&self.text), self.raw_span)
    }
}

pub fn is_whitespace_byte(b: u8) -> bool {
    matches!(b, b' ' | b'\t' | b'\n' | b'\r' | 0x0b | 0x0c)
}

pub fn is_identifier_byte(b: u8) -> bool {
    b.is_ascii_alphanumeric() || b == b'_'
}

/// Multi-byte operator texts that the syntax layer treats as single leaves.
/// A vocabulary token whose core equals one of these still aligns cleanly.
const MULTI_BYTE_OPERATORS: &[&[u8]] = &[
    b"**=", b"//=", b"<<=", b">>=", b"==", b"!=", b"<=", b">=", b"->", b"+=", b"-=", b"*=",
    b"/=", b"%=", b"&=", b"|=", b"^=", b"**", b"//", b"<<", b">>",
];

/// Split a document into pre-token spans: each is an optional whitespace run
/// followed by an identifier run or a single non-whitespace byte. A trailing
/// whitespace run with nothing after it forms its own pre-token. The returned
/// spans are sorted, disjoint, and cover the document exactly.
pub fn pretokenize(doc: &[u8]) -> Vec<Span> {
    let mut spans = Vec::new();
    let mut pos = 0usize;
    while pos < doc.len() {
        let start = pos;
        while pos < doc.len() && is_whitespace_byte(doc[pos]) {
            pos += 1;
        }
        if pos == doc.len() {
            spans.push(Span::new(start, pos));
            break;
        }
        if is_identifier_byte(doc[pos]) {
            while pos < doc.len() && is_identifier_byte(doc[pos]) {
                pos += 1;
            }
        } else {
            pos += 1;
        }
        spans.push(Span::new(start, pos));
    }
    spans
}

fn trim_whitespace(doc: &[u8], raw: Span) -> Span {
    let mut start = raw.start;
    let mut end = raw.end;
    while start < end && is_whitespace_byte(doc[start]) {
        start += 1;
    }
    while end > start && is_whitespace_byte(doc[end - 1]) {
        end -= 1;
    }
    if start >= end {
        Span::empty(raw.end)
    } else {
        Span::new(start, end)
    }
}

/// A vocabulary token flagged by [`Vocabulary::check_boundary_property`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryViolation {
    pub id: TokenId,
    pub text: Vec<u8>,
    pub detail: String,
}

/// Result of the vocabulary boundary audit; empty means alignment-safe.
#[derive(Debug, Clone, Default)]
pub struct BoundaryReport {
    pub violations: Vec<BoundaryViolation>,
}

impl BoundaryReport {
    pub fn is_alignment_safe(&self) -> bool {
        self.violations.is_empty()
    }
}

/// An immutable byte-level BPE vocabulary: dense token ids, an ordered merge
/// list, and an optional set of named special tokens.
#[derive(Debug, Clone)]
pub struct Vocabulary {
    id_to_token: Vec<Vec<u8>>,
    token_to_id: HashMap<Vec<u8>, TokenId>,
    merges: Vec<(Vec<u8>, Vec<u8>)>,
    /// (left id, right id) -> (rank, merged id)
    merge_table: HashMap<(TokenId, TokenId), (u32, TokenId)>,
    specials: BTreeMap<String, TokenId>,
}

impl Vocabulary {
    /// Build and validate a vocabulary from explicit parts.
    ///
    /// `entries` maps token bytes to ids, which must be dense in
    /// `[0, entries.len())`. Every merge rule's sides and concatenation must
    /// be vocabulary tokens, and no special token may appear in a merge.
    pub fn new(
        entries: Vec<(Vec<u8>, TokenId)>,
        merges: Vec<(Vec<u8>, Vec<u8>)>,
        special_names: Vec<String>,
    ) -> Result<Self, BpeError> {
        let len = entries.len();
        let mut id_to_token: Vec<Option<Vec<u8>>> = vec![None; len];
        let mut token_to_id = HashMap::with_capacity(len);
        for (bytes, id) in entries {
            if (id as usize) >= len || id_to_token[id as usize].is_some() {
                if (id as usize) < len && id_to_token[id as usize].is_some() {
                    return Err(BpeError::DuplicateId { id });
                }
                // An id beyond len implies some id below len is unused.
                let missing = (0..len as TokenId)
                    .find(|&i| i != id && id_to_token.get(i as usize).is_none_or(|s| s.is_none()))
                    .unwrap_or(0);
                return Err(BpeError::NonDenseIds { len, missing });
            }
            if token_to_id.insert(bytes.clone(), id).is_some() {
                return Err(BpeError::VocabFormat(format!(
                    "token {:?} appears twice",
                    bytes_to_display(&bytes)
                )));
            }
            id_to_token[id as usize] = Some(bytes);
        }
        let id_to_token: Vec<Vec<u8>> = id_to_token
            .into_iter()
            .enumerate()
            .map(|(i, slot)| {
                slot.ok_or(BpeError::NonDenseIds {
                    len,
                    missing: i as TokenId,
                })
            })
            .collect::<Result<_, _>>()?;

        let mut specials = BTreeMap::new();
        for name in special_names {
            let id = *token_to_id
                .get(name.as_bytes())
                .ok_or_else(|| BpeError::UnknownSpecialToken { name: name.clone() })?;
            specials.insert(name, id);
        }

        let mut merge_table = HashMap::with_capacity(merges.len());
        for (index, (left, right)) in merges.iter().enumerate() {
            let left_id = *token_to_id.get(left).ok_or_else(|| {
                BpeError::UnknownMergeSymbol {
                    index,
                    symbol: bytes_to_display(left),
                }
            })?;
            let right_id = *token_to_id.get(right).ok_or_else(|| {
                BpeError::UnknownMergeSymbol {
                    index,
                    symbol: bytes_to_display(right),
                }
            })?;
            let mut merged = left.clone();
            merged.extend_from_slice(right);
            let merged_id = *token_to_id.get(&merged).ok_or_else(|| {
                BpeError::MergeResultMissing {
                    index,
                    token: bytes_to_display(&merged),
                }
            })?;
            for (name, id) in &specials {
                if *id == left_id || *id == right_id || *id == merged_id {
                    return Err(BpeError::SpecialInMergeRule {
                        name: name.clone(),
                        index,
                    });
                }
            }
            // Earlier rules win; ignore an exact duplicate pair later in the list.
            merge_table
                .entry((left_id, right_id))
                .or_insert((index as u32, merged_id));
        }

        Ok(Vocabulary {
            id_to_token,
            token_to_id,
            merges,
            merge_table,
            specials,
        })
    }

    pub fn vocab_size(&self) -> usize {
        self.id_to_token.len()
    }

    pub fn merge_count(&self) -> usize {
        self.merges.len()
    }

    pub fn merges(&self) -> &[(Vec<u8>, Vec<u8>)] {
        &self.merges
    }

    pub fn special_tokens(&self) -> &BTreeMap<String, TokenId> {
        &self.specials
    }

    pub fn id_of(&self, bytes: &[u8]) -> Option<TokenId> {
        self.token_to_id.get(bytes).copied()
    }

    pub fn token_bytes(&self, id: TokenId) -> Result<&[u8], BpeError> {
        self.id_to_token
            .get(id as usize)
            .map(|v| v.as_slice())
            .ok_or(BpeError::UnknownTokenId {
                id,
                vocab_size: self.vocab_size(),
            })
    }

    /// Load a vocabulary from a JSON `{token: id}` file and a merges file
    /// with one `left right` pair per line (display form; a first line
    /// starting with `#` is a version comment).
    pub fn load(vocab_path: &Path, merges_path: &Path) -> Result<Self, BpeError> {
        let vocab_text = std::fs::read_to_string(vocab_path)?;
        let raw: BTreeMap<String, TokenId> = serde_json::from_str(&vocab_text)
            .map_err(|e| BpeError::VocabFormat(e.to_string()))?;
        let mut entries = Vec::with_capacity(raw.len());
        for (display, id) in raw {
            let bytes = display_to_bytes(&display).map_err(|c| {
                BpeError::VocabFormat(format!("token {display:?} contains unmapped character {c:?}"))
            })?;
            entries.push((bytes, id));
        }

        let merges_file = std::fs::File::open(merges_path)?;
        let mut merges = Vec::new();
        for (lineno, line) in BufReader::new(merges_file).lines().enumerate() {
            let line = line?;
            if lineno == 0 && line.starts_with('#') {
                continue;
            }
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split(' ');
            let (left, right) = match (parts.next(), parts.next(), parts.next()) {
                (Some(l), Some(r), None) => (l, r),
                _ => {
                    return Err(BpeError::MergesFormat {
                        line: lineno + 1,
                        detail: format!("expected exactly two space-separated symbols, got {line:?}"),
                    })
                }
            };
            let decode = |s: &str| {
                display_to_bytes(s).map_err(|c| BpeError::MergesFormat {
                    line: lineno + 1,
                    detail: format!("symbol {s:?} contains unmapped character {c:?}"),
                })
            };
            merges.push((decode(left)?, decode(right)?));
        }
        Vocabulary::new(entries, merges, Vec::new())
    }

    /// Mark existing vocabulary entries as special tokens by their display name.
    pub fn with_special_tokens(self, names: Vec<String>) -> Result<Self, BpeError> {
        let entries = self
            .id_to_token
            .iter()
            .enumerate()
            .map(|(id, bytes)| (bytes.clone(), id as TokenId))
            .collect();
        Vocabulary::new(entries, self.merges, names)
    }

    pub fn save(&self, vocab_path: &Path, merges_path: &Path) -> Result<(), BpeError> {
        let map: BTreeMap<String, TokenId> = self
            .id_to_token
            .iter()
            .enumerate()
            .map(|(id, bytes)| (bytes_to_display(bytes), id as TokenId))
            .collect();
        let mut out = serde_json::to_string_pretty(&map).expect("vocab serializes");
        out.push('\n');
        std::fs::write(vocab_path, out)?;

        let mut merges_out = std::fs::File::create(merges_path)?;
        writeln!(merges_out, "#version: toklens-1")?;
        for (left, right) in &self.merges {
            writeln!(
                merges_out,
                "{} {}",
                bytes_to_display(left),
                bytes_to_display(right)
            )?;
        }
        Ok(())
    }

    /// Encode a document. Token raw spans partition the document; merges are
    /// applied greedily in rule order inside each pre-token.
    pub fn encode(&self, doc: &[u8]) -> Result<Vec<Token>, BpeError> {
        let mut tokens = Vec::new();
        for pre in pretokenize(doc) {
            self.encode_pretoken(doc, pre, &mut tokens)?;
        }
        Ok(tokens)
    }

    fn encode_pretoken(
        &self,
        doc: &[u8],
        pre: Span,
        out: &mut Vec<Token>,
    ) -> Result<(), BpeError> {
        // Start from single-byte symbols and repeatedly apply the
        // lowest-ranked applicable merge rule.
        let mut symbols: Vec<(Span, TokenId)> = Vec::with_capacity(pre.len());
        for offset in pre.start..pre.end {
            let byte = doc[offset];
            let id = self
                .token_to_id
                .get(std::slice::from_ref(&byte))
                .copied()
                .ok_or(BpeError::ByteNotInVocabulary { byte, offset })?;
            symbols.push((Span::new(offset, offset + 1), id));
        }
        loop {
            let mut best: Option<(u32, usize, TokenId)> = None;
            for i in 0..symbols.len().saturating_sub(1) {
                let pair = (symbols[i].1, symbols[i + 1].1);
                if let Some(&(rank, merged)) = self.merge_table.get(&pair) {
                    if best.map_or(true, |(r, _, _)| rank < r) {
                        best = Some((rank, i, merged));
                    }
                }
            }
            let Some((rank, _, merged_id)) = best else { break };
            // Merge every occurrence of this exact pair, left to right.
            let pair_rank = rank;
            let mut merged: Vec<(Span, TokenId)> = Vec::with_capacity(symbols.len());
            let mut i = 0;
            while i < symbols.len() {
                if i + 1 < symbols.len() {
                    let pair = (symbols[i].1, symbols[i + 1].1);
                    if self.merge_table.get(&pair) == Some(&(pair_rank, merged_id)) {
                        merged.push((symbols[i].0.hull(&symbols[i + 1].0), merged_id));
                        i += 2;
                        continue;
                    }
                }
                merged.push(symbols[i]);
                i += 1;
            }
            symbols = merged;
        }
        for (raw_span, id) in symbols {
            out.push(Token {
                id,
                text: self.id_to_token[id as usize].clone(),
                raw_span,
                core_span: trim_whitespace(doc, raw_span),
            });
        }
        Ok(())
    }

    /// Inverse of [`encode`](Self::encode): concatenate token texts.
    pub fn decode(&self, ids: &[TokenId]) -> Result<Vec<u8>, BpeError> {
        let mut out = Vec::new();
        for &id in ids {
            out.extend_from_slice(self.token_bytes(id)?);
        }
        Ok(out)
    }

    /// List every non-special token whose visible text crosses a
    /// whitespace or punctuation boundary and therefore could straddle two
    /// syntax leaves. A token is safe when its whitespace-trimmed core is
    /// empty, all identifier bytes, a single byte, or one of the multi-byte
    /// operator texts the grammar keeps as single leaves.
    pub fn check_boundary_property(&self) -> BoundaryReport {
        let special_ids: Vec<TokenId> = self.specials.values().copied().collect();
        let mut violations = Vec::new();
        for (id, bytes) in self.id_to_token.iter().enumerate() {
            let id = id as TokenId;
            if special_ids.contains(&id) {
                continue;
            }
            let mut start = 0usize;
            let mut end = bytes.len();
            while start < end && is_whitespace_byte(bytes[start]) {
                start += 1;
            }
            while end > start && is_whitespace_byte(bytes[end - 1]) {
                end -= 1;
            }
            let core = &bytes[start..end];
            if core.len() <= 1 {
                continue;
            }
            if core.iter().all(|&b| is_identifier_byte(b)) {
                continue;
            }
            if MULTI_BYTE_OPERATORS.contains(&core) {
                continue;
            }
            let detail = if core.iter().any(|&b| is_whitespace_byte(b)) {
                "interior whitespace".to_string()
            } else {
                "crosses a punctuation boundary".to_string()
            };
            violations.push(BoundaryViolation {
                id,
                text: bytes.clone(),
                detail,
            });
        }
        BoundaryReport { violations }
    }
}
