//! Join BPE tokens to syntax leaves by span overlap.
//!
//! A leaf owns the run of tokens whose whitespace-trimmed core spans fall
//! inside its span; the relation is many-tokens-to-one-leaf, never the other
//! way around. A token whose core span touches two leaves means the
//! tokenizer merges across boundaries the grammar separates, which is
//! reported as [`AlignError::TokenCrossesNodeBoundary`] rather than guessed
//! around.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bpe::{BpeError, Token, Vocabulary};
use crate::bytemap::bytes_to_display;
use crate::span::Span;
use crate::syntax::{self, NodeTag, SyntaxNode};

/// Sentinel tag names used anywhere tags are serialized.
pub const WHITESPACE_TAG: &str = "WHITESPACE";
pub const UNALIGNED_TAG: &str = "UNALIGNED";

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TokenTag {
    Node(NodeTag),
    /// Token with an empty core span (whitespace only).
    Whitespace,
    /// Token whose core span overlaps no leaf.
    Unaligned,
}

impl TokenTag {
    pub fn as_node(&self) -> Option<&NodeTag> {
        match self {
            TokenTag::Node(tag) => Some(tag),
            _ => None,
        }
    }

    /// `(parent_type, node_type)` strings for serialization.
    pub fn field_pair(&self) -> (&str, &str) {
        match self {
            TokenTag::Node(tag) => (tag.parent_type.as_str(), tag.node_type.as_str()),
            TokenTag::Whitespace => (WHITESPACE_TAG, WHITESPACE_TAG),
            TokenTag::Unaligned => (UNALIGNED_TAG, UNALIGNED_TAG),
        }
    }

    pub fn from_field_pair(parent_type: &str, node_type: &str) -> TokenTag {
        match (parent_type, node_type) {
            (WHITESPACE_TAG, _) => TokenTag::Whitespace,
            (UNALIGNED_TAG, _) => TokenTag::Unaligned,
            _ => TokenTag::Node(NodeTag::new(parent_type, node_type)),
        }
    }
}

/// A token joined to its owning leaf, or marked whitespace/unaligned.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlignedToken {
    pub token: Token,
    pub tag: TokenTag,
    /// Span of the owning leaf; absent for whitespace/unaligned tokens.
    pub leaf_span: Option<Span>,
}

#[derive(Debug, Error)]
pub enum AlignError {
    #[error(
        "token {token_text:?} {token_span} straddles leaves {leaf_a} ({tag_a}) and {leaf_b} ({tag_b}); \
         the tokenizer merges across a node boundary"
    )]
    TokenCrossesNodeBoundary {
        token_text: String,
        token_span: Span,
        leaf_a: Span,
        tag_a: NodeTag,
        leaf_b: Span,
        tag_b: NodeTag,
    },
    #[error(transparent)]
    Bpe(#[from] BpeError),
}

/// Assign each token to the leaf containing its core span. Both inputs must
/// come from the same document and be sorted by span.
pub fn align(
    tokens: Vec<Token>,
    leaves: &[(NodeTag, Span)],
) -> Result<Vec<AlignedToken>, AlignError> {
    let mut out = Vec::with_capacity(tokens.len());
    let mut leaf_idx = 0usize;
    for token in tokens {
        let core = token.core_span;
        if core.is_empty() {
            out.push(AlignedToken {
                token,
                tag: TokenTag::Whitespace,
                leaf_span: None,
            });
            continue;
        }
        while leaf_idx < leaves.len() && leaves[leaf_idx].1.end <= core.start {
            leaf_idx += 1;
        }
        let Some((tag, leaf_span)) = leaves.get(leaf_idx) else {
            out.push(AlignedToken {
                token,
                tag: TokenTag::Unaligned,
                leaf_span: None,
            });
            continue;
        };
        if !leaf_span.intersects(&core) {
            out.push(AlignedToken {
                token,
                tag: TokenTag::Unaligned,
                leaf_span: None,
            });
            continue;
        }
        if !leaf_span.contains(&core) {
            // The core pokes out of this leaf; find the other leaf it touches.
            let other = leaves[leaf_idx + 1..]
                .iter()
                .find(|(_, span)| span.intersects(&core))
                .or_else(|| leaves[..leaf_idx].iter().rev().find(|(_, span)| span.intersects(&core)))
                .cloned()
                .unwrap_or_else(|| (tag.clone(), *leaf_span));
            return Err(AlignError::TokenCrossesNodeBoundary {
                token_text: bytes_to_display(&token.text),
                token_span: core,
                leaf_a: *leaf_span,
                tag_a: tag.clone(),
                leaf_b: other.1,
                tag_b: other.0,
            });
        }
        out.push(AlignedToken {
            token,
            tag: TokenTag::Node(tag.clone()),
            leaf_span: Some(*leaf_span),
        });
    }
    Ok(out)
}

/// Encode, parse, and align one document.
pub fn align_document(doc: &[u8], vocab: &Vocabulary) -> Result<Vec<AlignedToken>, AlignError> {
    let tokens = vocab.encode(doc)?;
    let root = syntax::parse(doc);
    let leaves = syntax::leaves(&root);
    align(tokens, &leaves)
}

/// Align against a tree from an arbitrary provider.
pub fn align_with_tree(
    doc: &[u8],
    vocab: &Vocabulary,
    root: &SyntaxNode,
) -> Result<Vec<AlignedToken>, AlignError> {
    let tokens = vocab.encode(doc)?;
    align(tokens, &syntax::leaves(root))
}

/// One line of the alignment dump (JSON Lines).
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct AlignmentRecord {
    pub token_id: crate::bpe::TokenId,
    pub text: String,
    pub raw_span: Span,
    pub core_span: Span,
    pub node_type: String,
    pub parent_type: String,
}

impl AlignmentRecord {
    pub fn from_aligned(aligned: &AlignedToken) -> Self {
        let (parent_type, node_type) = aligned.tag.field_pair();
        AlignmentRecord {
            token_id: aligned.token.id,
            text: bytes_to_display(&aligned.token.text),
            raw_span: aligned.token.raw_span,
            core_span: aligned.token.core_span,
            node_type: node_type.to_string(),
            parent_type: parent_type.to_string(),
        }
    }
}
