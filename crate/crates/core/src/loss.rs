//! Per-token cross-entropy records and their aggregation.
//!
//! The point of the whole pipeline: keep the loss for every prediction event
//! instead of averaging it away. Position 0 of a document has no context and
//! produces no record; every later position yields `-log p(token | prefix)`
//! in nats. Records carry the token's node tag and invocation class so they
//! can be aggregated per token id, per node tag, or per (node tag, class).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::align::{AlignedToken, TokenTag};
use crate::bpe::{Token, TokenId};
use crate::bytemap::bytes_to_display;
use crate::ngram::{NgramError, NgramModel};
use crate::stats::RunningStats;
use crate::syntax::NodeTag;

pub type AggregateStats = RunningStats<f64>;

#[derive(Debug, Error)]
pub enum LossError {
    #[error("document {doc_id}: external stream misaligned: {detail}")]
    StreamMisaligned { doc_id: String, detail: String },
    #[error("document {doc_id}: position {position} has log-probability {value} (must be finite and <= 0)")]
    InvalidLogProb {
        doc_id: String,
        position: usize,
        value: f64,
    },
    #[error("record/token length mismatch: {records} records vs {tokens} tokens")]
    LengthMismatch { records: usize, tokens: usize },
    #[error("no records to summarize")]
    EmptyStats,
    #[error(transparent)]
    Ngram(#[from] NgramError),
}

/// Whether a token belongs to an internal method invocation, an external
/// one, or neither (including builtin calls, which are dropped entirely).
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Default,
)]
#[serde(rename_all = "lowercase")]
pub enum InvocationClass {
    Internal,
    External,
    #[default]
    None,
}

impl std::fmt::Display for InvocationClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            InvocationClass::Internal => "internal",
            InvocationClass::External => "external",
            InvocationClass::None => "none",
        };
        f.write_str(s)
    }
}

/// One prediction event.
#[derive(Debug, Clone, PartialEq)]
pub struct LossRecord {
    pub doc_id: String,
    /// Token index within the document; at least 1.
    pub position: usize,
    pub token_id: TokenId,
    pub text: Vec<u8>,
    /// Natural-log cross-entropy, finite and non-negative.
    pub cross_entropy: f64,
    pub tag: TokenTag,
    pub invocation_class: InvocationClass,
}

/// Anything that can assign a log-probability to the next token.
pub trait Scorer {
    fn logprob(&self, context: &[TokenId], next: TokenId) -> Result<f64, LossError>;
}

impl Scorer for NgramModel {
    fn logprob(&self, context: &[TokenId], next: TokenId) -> Result<f64, LossError> {
        Ok(NgramModel::logprob(self, context, next)?)
    }
}

/// Assigns `1 / vocab_size` to everything; cross-entropy is `ln(vocab_size)`
/// at every position.
#[derive(Debug, Clone, Copy)]
pub struct UniformScorer {
    pub vocab_size: u32,
}

impl Scorer for UniformScorer {
    fn logprob(&self, _context: &[TokenId], _next: TokenId) -> Result<f64, LossError> {
        Ok(-(self.vocab_size as f64).ln())
    }
}

/// Score one document: a record per position `1..len`, each the negative
/// log-probability of the true token given its prefix. `max_context`
/// truncates the prefix passed to the scorer.
pub fn score_document(
    doc_id: &str,
    tokens: &[Token],
    scorer: &dyn Scorer,
    max_context: Option<usize>,
) -> Result<Vec<LossRecord>, LossError> {
    let ids: Vec<TokenId> = tokens.iter().map(|t| t.id).collect();
    let mut records = Vec::with_capacity(tokens.len().saturating_sub(1));
    for position in 1..tokens.len() {
        let mut start = 0;
        if let Some(max) = max_context {
            start = position.saturating_sub(max);
        }
        let lp = scorer.logprob(&ids[start..position], ids[position])?;
        records.push(LossRecord {
            doc_id: doc_id.to_string(),
            position,
            token_id: ids[position],
            text: tokens[position].text.clone(),
            cross_entropy: -lp,
            tag: TokenTag::Unaligned,
            invocation_class: InvocationClass::None,
        });
    }
    Ok(records)
}

/// One document of an external log-probability stream (JSON Lines):
/// `logprobs[i] = log p(token_ids[i] | token_ids[..i])` in nats, with
/// `logprobs[0]` null and null at any position the provider did not score.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExternalDocScores {
    pub doc_id: String,
    pub token_ids: Vec<TokenId>,
    pub logprobs: Vec<Option<f64>>,
}

/// Turn an external stream entry into records, verifying it matches the
/// document's actual tokens.
pub fn score_from_stream(
    tokens: &[Token],
    scores: &ExternalDocScores,
) -> Result<Vec<LossRecord>, LossError> {
    let doc_id = &scores.doc_id;
    if scores.token_ids.len() != tokens.len() {
        return Err(LossError::StreamMisaligned {
            doc_id: doc_id.clone(),
            detail: format!(
                "stream has {} token ids, document has {}",
                scores.token_ids.len(),
                tokens.len()
            ),
        });
    }
    if scores.logprobs.len() != tokens.len() {
        return Err(LossError::StreamMisaligned {
            doc_id: doc_id.clone(),
            detail: format!(
                "stream has {} logprobs for {} tokens",
                scores.logprobs.len(),
                tokens.len()
            ),
        });
    }
    for (i, (stream_id, token)) in scores.token_ids.iter().zip(tokens).enumerate() {
        if *stream_id != token.id {
            return Err(LossError::StreamMisaligned {
                doc_id: doc_id.clone(),
                detail: format!(
                    "token id mismatch at position {i}: stream {stream_id}, document {}",
                    token.id
                ),
            });
        }
    }
    let mut records = Vec::new();
    for (position, lp) in scores.logprobs.iter().enumerate() {
        // Position 0 has no prediction event regardless of what was supplied.
        if position == 0 {
            continue;
        }
        let Some(lp) = *lp else { continue };
        if !lp.is_finite() || lp > 0.0 {
            return Err(LossError::InvalidLogProb {
                doc_id: doc_id.clone(),
                position,
                value: lp,
            });
        }
        records.push(LossRecord {
            doc_id: doc_id.clone(),
            position,
            token_id: tokens[position].id,
            text: tokens[position].text.clone(),
            cross_entropy: -lp,
            tag: TokenTag::Unaligned,
            invocation_class: InvocationClass::None,
        });
    }
    Ok(records)
}

/// Copy each record's tag from the aligned token at the same position.
pub fn attach_tags(
    records: &mut [LossRecord],
    aligned: &[AlignedToken],
) -> Result<(), LossError> {
    for record in records.iter_mut() {
        let Some(token) = aligned.get(record.position) else {
            return Err(LossError::LengthMismatch {
                records: records.len(),
                tokens: aligned.len(),
            });
        };
        if token.token.id != record.token_id {
            return Err(LossError::LengthMismatch {
                records: records.len(),
                tokens: aligned.len(),
            });
        }
        record.tag = token.tag.clone();
    }
    Ok(())
}

/// Copy invocation classes (parallel to the aligned tokens) onto records.
pub fn attach_classes(
    records: &mut [LossRecord],
    classes: &[InvocationClass],
) -> Result<(), LossError> {
    for record in records.iter_mut() {
        let Some(class) = classes.get(record.position) else {
            return Err(LossError::LengthMismatch {
                records: records.len(),
                tokens: classes.len(),
            });
        };
        record.invocation_class = *class;
    }
    Ok(())
}

/// Aggregation key space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Keying {
    /// Every record, keyed by token id (whitespace/unaligned included).
    TokenId,
    /// Node-tagged records only.
    NodeTag,
    /// Node-tagged records with a non-`None` invocation class.
    NodeTagClass,
}

/// Aggregation key; ordered so report iteration is deterministic.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AggKey {
    Token(TokenId),
    Node(NodeTag),
    NodeClass(NodeTag, InvocationClass),
}

/// Welford-fold records into per-key statistics.
pub fn aggregate(records: &[LossRecord], keying: Keying) -> BTreeMap<AggKey, AggregateStats> {
    let mut out: BTreeMap<AggKey, AggregateStats> = BTreeMap::new();
    for record in records {
        let key = match keying {
            Keying::TokenId => AggKey::Token(record.token_id),
            Keying::NodeTag => match record.tag.as_node() {
                Some(tag) => AggKey::Node(tag.clone()),
                None => continue,
            },
            Keying::NodeTagClass => match (record.tag.as_node(), record.invocation_class) {
                (_, InvocationClass::None) | (None, _) => continue,
                (Some(tag), class) => AggKey::NodeClass(tag.clone(), class),
            },
        };
        out.entry(key).or_default().push(record.cross_entropy);
    }
    out
}

/// Merge two keyed aggregate maps; used by the parallel reduction.
pub fn merge_aggregates(
    mut left: BTreeMap<AggKey, AggregateStats>,
    right: BTreeMap<AggKey, AggregateStats>,
) -> BTreeMap<AggKey, AggregateStats> {
    for (key, stats) in right {
        let entry = left.entry(key).or_default();
        *entry = entry.merge(&stats);
    }
    left
}

/// Statistics over every record (the corpus-level cross-entropy).
pub fn global_stats(records: &[LossRecord]) -> AggregateStats {
    AggregateStats::from_values(records.iter().map(|r| r.cross_entropy))
}

/// `exp(mean cross-entropy)`. Reports default to raw cross-entropies; this
/// is provided for completeness.
pub fn perplexity(stats: &AggregateStats) -> Result<f64, LossError> {
    stats.mean().map(f64::exp).ok_or(LossError::EmptyStats)
}

/// Serialized form of a loss record (JSON Lines).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LossRecordLine {
    pub doc_id: String,
    pub position: usize,
    pub token_id: TokenId,
    pub text: String,
    pub cross_entropy: f64,
    pub parent_type: String,
    pub node_type: String,
    pub class: InvocationClass,
}

impl LossRecordLine {
    pub fn from_record(record: &LossRecord) -> Self {
        let (parent_type, node_type) = record.tag.field_pair();
        LossRecordLine {
            doc_id: record.doc_id.clone(),
            position: record.position,
            token_id: record.token_id,
            text: bytes_to_display(&record.text),
            cross_entropy: record.cross_entropy,
            parent_type: parent_type.to_string(),
            node_type: node_type.to_string(),
            class: record.invocation_class,
        }
    }

    pub fn into_record(self) -> Result<LossRecord, String> {
        let text = crate::bytemap::display_to_bytes(&self.text)
            .map_err(|c| format!("token text contains unmapped character {c:?}"))?;
        Ok(LossRecord {
            doc_id: self.doc_id,
            position: self.position,
            token_id: self.token_id,
            text,
            cross_entropy: self.cross_entropy,
            tag: TokenTag::from_field_pair(&self.parent_type, &self.node_type),
            invocation_class: self.class,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::span::Span;

    fn toy_tokens(ids: &[TokenId]) -> Vec<Token> {
        ids.iter()
            .enumerate()
            .map(|(i, &id)| Token {
                id,
                text: vec![b'a' + (id as u8)],
                raw_span: Span::new(i, i + 1),
                core_span: Span::new(i, i + 1),
            })
            .collect()
    }

    #[test]
    fn uniform_scorer_yields_ln_v_everywhere() {
        let tokens = toy_tokens(&[0, 1, 2, 3]);
        let scorer = UniformScorer { vocab_size: 50 };
        let records = score_document("d", &tokens, &scorer, None).unwrap();
        assert_eq!(records.len(), 3);
        for r in &records {
            assert_eq!(r.cross_entropy, (50f64).ln());
        }
        assert_eq!(records[0].position, 1);
    }

    #[test]
    fn single_token_document_has_no_records() {
        let tokens = toy_tokens(&[0]);
        let scorer = UniformScorer { vocab_size: 4 };
        assert!(score_document("d", &tokens, &scorer, None)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn memorized_document_scores_below_unrelated_one() {
        let seen: Vec<TokenId> = vec![1, 2, 3, 4, 1, 2, 3, 4];
        let sequences: Vec<Vec<TokenId>> = (0..1000).map(|_| seen.clone()).collect();
        let model = crate::ngram::fit(&sequences, 3, &crate::ngram::DEFAULT_LAMBDAS, 8).unwrap();
        let mean = |ids: &[TokenId]| {
            let records = score_document("d", &toy_tokens(ids), &model, None).unwrap();
            global_stats(&records).mean().unwrap()
        };
        assert!(mean(&seen) < mean(&[5, 6, 7, 5, 6, 7, 5, 6]));
    }

    #[test]
    fn max_context_truncates_the_prefix() {
        struct ContextLen;
        impl Scorer for ContextLen {
            fn logprob(&self, context: &[TokenId], _next: TokenId) -> Result<f64, LossError> {
                Ok(-(context.len() as f64))
            }
        }
        let tokens = toy_tokens(&[0, 1, 2, 3, 4]);
        let records = score_document("d", &tokens, &ContextLen, Some(2)).unwrap();
        let ces: Vec<f64> = records.iter().map(|r| r.cross_entropy).collect();
        assert_eq!(ces, vec![1.0, 2.0, 2.0, 2.0]);
    }

    #[test]
    fn attach_tags_copies_by_position() {
        let tokens = toy_tokens(&[0, 1]);
        let aligned: Vec<AlignedToken> = tokens
            .iter()
            .map(|t| AlignedToken {
                token: t.clone(),
                tag: TokenTag::Node(NodeTag::new("call", "identifier")),
                leaf_span: Some(t.raw_span),
            })
            .collect();
        let scorer = UniformScorer { vocab_size: 4 };
        let mut records = score_document("d", &tokens, &scorer, None).unwrap();
        attach_tags(&mut records, &aligned).unwrap();
        assert_eq!(
            records[0].tag,
            TokenTag::Node(NodeTag::new("call", "identifier"))
        );

        let mut records = score_document("d", &tokens, &scorer, None).unwrap();
        let err = attach_tags(&mut records, &aligned[..1]).unwrap_err();
        assert!(matches!(err, LossError::LengthMismatch { .. }));
    }

    #[test]
    fn aggregate_matches_hand_arithmetic() {
        let mk = |ce: f64| LossRecord {
            doc_id: "d".to_string(),
            position: 1,
            token_id: 5,
            text: b"x".to_vec(),
            cross_entropy: ce,
            tag: TokenTag::Unaligned,
            invocation_class: InvocationClass::None,
        };
        let agg = aggregate(&[mk(1.0), mk(3.0)], Keying::TokenId);
        let stats = &agg[&AggKey::Token(5)];
        assert_eq!(stats.count(), 2);
        assert_eq!(stats.mean(), Some(2.0));
        assert_eq!(stats.std(), Some(1.0));
        assert!(aggregate(&[], Keying::TokenId).is_empty());
    }

    #[test]
    fn node_keying_skips_whitespace_and_unaligned() {
        let mut records = Vec::new();
        for (i, tag) in [
            TokenTag::Node(NodeTag::new("call", "identifier")),
            TokenTag::Whitespace,
            TokenTag::Unaligned,
        ]
        .into_iter()
        .enumerate()
        {
            records.push(LossRecord {
                doc_id: "d".into(),
                position: i + 1,
                token_id: i as TokenId,
                text: b"t".to_vec(),
                cross_entropy: 1.0,
                tag,
                invocation_class: InvocationClass::Internal,
            });
        }
        assert_eq!(aggregate(&records, Keying::TokenId).len(), 3);
        assert_eq!(aggregate(&records, Keying::NodeTag).len(), 1);
        let by_class = aggregate(&records, Keying::NodeTagClass);
        assert_eq!(by_class.len(), 1);
        let total: u64 = by_class.values().map(|s| s.count()).sum();
        assert_eq!(total, 1);
    }

    #[test]
    fn perplexity_is_exp_mean() {
        let stats = AggregateStats::from_values([2.0, 2.0]);
        assert!((perplexity(&stats).unwrap() - 2.0f64.exp()).abs() < 1e-12);
        let stats = AggregateStats::from_values([0.0]);
        assert_eq!(perplexity(&stats).unwrap(), 1.0);
        assert!(matches!(
            perplexity(&AggregateStats::new()),
            Err(LossError::EmptyStats)
        ));
    }

    #[test]
    fn stream_mismatches_are_rejected() {
        let tokens = toy_tokens(&[0, 1, 2]);
        let ok = ExternalDocScores {
            doc_id: "d".into(),
            token_ids: vec![0, 1, 2],
            logprobs: vec![None, Some(-0.5), None],
        };
        let records = score_from_stream(&tokens, &ok).unwrap();
        assert_eq!(records.len(), 1);
        assert_eq!(records[0].position, 1);
        assert_eq!(records[0].cross_entropy, 0.5);

        let wrong_ids = ExternalDocScores {
            token_ids: vec![0, 2, 2],
            ..ok.clone()
        };
        assert!(matches!(
            score_from_stream(&tokens, &wrong_ids),
            Err(LossError::StreamMisaligned { .. })
        ));

        let short = ExternalDocScores {
            token_ids: vec![0, 1],
            logprobs: vec![None, Some(-0.5)],
            doc_id: "d".into(),
        };
        assert!(matches!(
            score_from_stream(&tokens, &short),
            Err(LossError::StreamMisaligned { .. })
        ));

        let positive = ExternalDocScores {
            logprobs: vec![None, Some(0.5), None],
            ..ok.clone()
        };
        assert!(matches!(
            score_from_stream(&tokens, &positive),
            Err(LossError::InvalidLogProb { .. })
        ));
    }

    #[test]
    fn record_lines_round_trip() {
        let record = LossRecord {
            doc_id: "repo::file.py".into(),
            position: 3,
            token_id: 270,
            text: b" def".to_vec(),
            cross_entropy: 1.25,
            tag: TokenTag::Node(NodeTag::new("function_definition", "def")),
            invocation_class: InvocationClass::External,
        };
        let line = LossRecordLine::from_record(&record);
        let json = serde_json::to_string(&line).unwrap();
        let back: LossRecordLine = serde_json::from_str(&json).unwrap();
        assert_eq!(back.into_record().unwrap(), record);
    }
}
