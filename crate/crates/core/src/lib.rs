//! Per-token cross-entropy analysis for source code.
//!
//! The pipeline: encode a document with a byte-level BPE whose tokens carry
//! exact byte offsets, parse it into a recovering syntax tree, align each
//! token to the leaf whose span contains it, score every position with a
//! causal model (the built-in n-gram baseline or an external log-prob
//! stream), then aggregate, rank, and correlate the per-token losses.

pub mod align;
pub mod bpe;
pub mod bytemap;
pub mod corpus;
pub mod fixtures;
pub mod loss;
pub mod ngram;
pub mod report;
pub mod span;
pub mod stats;
pub mod syntax;
pub mod synth;

/// Loss aggregation runs in `f64`; the kernels in [`stats`] are generic over
/// the float type.
pub type AggregateStats = stats::RunningStats<f64>;

pub use align::{align, align_document, AlignError, AlignedToken, TokenTag};
pub use bpe::{train_bpe, BpeError, Token, TokenId, TrainConfig, Vocabulary};
pub use loss::{aggregate, perplexity, score_document, InvocationClass, Keying, LossRecord};
pub use span::Span;
pub use syntax::{leaves, parse, NodeTag, SyntaxNode};
