//! Interpolated backoff n-gram model over token ids.
//!
//! The built-in baseline scorer so the full pipeline runs without any neural
//! model. Probabilities interpolate maximum-likelihood estimates for every
//! available context length with one weight per order; the empty-context
//! component is itself mixed with the uniform distribution at its own
//! weight, which floors every probability at `lambda[0] / vocab_size` and
//! keeps each conditional distribution summing to one. Orders whose context
//! was never seen in training contribute nothing and their weight is
//! renormalized over the remaining orders.

use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bpe::TokenId;

#[derive(Debug, Error)]
pub enum NgramError {
    #[error("order must be at least 1")]
    InvalidOrder,
    #[error("training set is empty")]
    EmptyTrainingSet,
    #[error("lambda schedule has {got} weights but order {order} needs exactly {order}")]
    LambdaMismatch { got: usize, order: usize },
    #[error("lambda weights must be positive and finite, with the first at most 1")]
    InvalidLambdas,
    #[error("token id {id} is out of range for vocabulary of size {vocab_size}")]
    UnknownTokenId { id: TokenId, vocab_size: u32 },
    #[error("model file: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

const FORMAT_NAME: &str = "toklens-ngram";
const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
struct ContextCounts {
    total: u64,
    next: HashMap<TokenId, u64>,
}

/// Immutable after [`fit`]; safe to share across scoring threads.
#[derive(Debug, Clone)]
pub struct NgramModel {
    order: usize,
    vocab_size: u32,
    /// `lambdas[k]` weights the component conditioned on `k` context tokens.
    lambdas: Vec<f64>,
    /// `tables[k]` maps a length-`k` context to its next-token counts.
    tables: Vec<HashMap<Vec<TokenId>, ContextCounts>>,
}

/// Sentinel prepended to each training sequence; one past the real ids and
/// never predicted, so position 0 of a document has no prediction event.
pub fn bos_id(vocab_size: u32) -> TokenId {
    vocab_size
}

pub const DEFAULT_ORDER: usize = 3;
pub const DEFAULT_LAMBDAS: [f64; 3] = [0.1, 0.3, 0.6];

/// Default schedule for an arbitrary order: 0.1 on the empty context, the
/// remaining 0.9 split over longer contexts in proportion to their length.
/// Reproduces `(0.1, 0.3, 0.6)` at order 3.
pub fn default_lambdas(order: usize) -> Vec<f64> {
    if order <= 1 {
        return vec![0.1];
    }
    let total: usize = (1..order).sum();
    let mut out = vec![0.1];
    out.extend((1..order).map(|k| 0.9 * k as f64 / total as f64));
    out
}

/// Count all k-grams, `k <= order`, over the training sequences.
pub fn fit(
    sequences: &[Vec<TokenId>],
    order: usize,
    lambdas: &[f64],
    vocab_size: u32,
) -> Result<NgramModel, NgramError> {
    if order == 0 {
        return Err(NgramError::InvalidOrder);
    }
    if lambdas.len() != order {
        return Err(NgramError::LambdaMismatch {
            got: lambdas.len(),
            order,
        });
    }
    if lambdas.iter().any(|&l| l <= 0.0 || !l.is_finite()) || lambdas[0] > 1.0 {
        return Err(NgramError::InvalidLambdas);
    }
    let lambdas = lambdas.to_vec();

    let bos = bos_id(vocab_size);
    let mut tables: Vec<HashMap<Vec<TokenId>, ContextCounts>> =
        (0..order).map(|_| HashMap::new()).collect();
    let mut total_tokens = 0u64;
    for seq in sequences {
        let mut ext = Vec::with_capacity(seq.len() + 1);
        ext.push(bos);
        ext.extend_from_slice(seq);
        for i in 1..ext.len() {
            let next = ext[i];
            if next >= vocab_size {
                return Err(NgramError::UnknownTokenId {
                    id: next,
                    vocab_size,
                });
            }
            total_tokens += 1;
            for k in 0..order.min(i + 1) {
                let ctx = ext[i - k..i].to_vec();
                let entry = tables[k].entry(ctx).or_default();
                entry.total += 1;
                *entry.next.entry(next).or_insert(0) += 1;
            }
        }
    }
    if total_tokens == 0 {
        return Err(NgramError::EmptyTrainingSet);
    }
    Ok(NgramModel {
        order,
        vocab_size,
        lambdas,
        tables,
    })
}

impl NgramModel {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn vocab_size(&self) -> u32 {
        self.vocab_size
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    /// Natural log of the interpolated probability of `next` after `context`
    /// (only the final `order - 1` context ids matter).
    pub fn logprob(&self, context: &[TokenId], next: TokenId) -> Result<f64, NgramError> {
        Ok(self.prob(context, next)?.ln())
    }

    pub fn prob(&self, context: &[TokenId], next: TokenId) -> Result<f64, NgramError> {
        if next >= self.vocab_size {
            return Err(NgramError::UnknownTokenId {
                id: next,
                vocab_size: self.vocab_size,
            });
        }
        let bos = bos_id(self.vocab_size);
        if let Some(&bad) = context.iter().find(|&&id| id > bos) {
            return Err(NgramError::UnknownTokenId {
                id: bad,
                vocab_size: self.vocab_size,
            });
        }
        let usable = self.order.min(context.len() + 1);
        // Collect the maximum-likelihood component of every active order.
        let mut active: Vec<(f64, f64)> = Vec::with_capacity(usable);
        active.push((self.lambdas[0], self.base_component(next)));
        for k in 1..usable {
            let ctx = &context[context.len() - k..];
            if let Some(counts) = self.tables[k].get(ctx) {
                if counts.total > 0 {
                    let ml =
                        counts.next.get(&next).copied().unwrap_or(0) as f64 / counts.total as f64;
                    active.push((self.lambdas[k], ml));
                }
            }
        }
        let weight_sum: f64 = active.iter().map(|(w, _)| w).sum();
        Ok(active.iter().map(|(w, p)| w / weight_sum * p).sum())
    }

    /// Empty-context component: unigram maximum likelihood floored by the
    /// uniform distribution at weight `lambdas[0]`.
    fn base_component(&self, next: TokenId) -> f64 {
        let uniform = 1.0 / self.vocab_size as f64;
        let empty = self.tables[0]
            .get(&Vec::new())
            .expect("fitted model has unigram counts");
        let ml = empty.next.get(&next).copied().unwrap_or(0) as f64 / empty.total as f64;
        self.lambdas[0] * uniform + (1.0 - self.lambdas[0]) * ml
    }

    pub fn save(&self, path: &Path) -> Result<(), NgramError> {
        let mut tables = Vec::with_capacity(self.tables.len());
        for table in &self.tables {
            let mut contexts: Vec<SavedContext> = table
                .iter()
                .map(|(ctx, counts)| {
                    let mut next: Vec<(TokenId, u64)> =
                        counts.next.iter().map(|(&id, &c)| (id, c)).collect();
                    next.sort_unstable();
                    SavedContext {
                        context: ctx.clone(),
                        total: counts.total,
                        next,
                    }
                })
                .collect();
            contexts.sort_by(|a, b| a.context.cmp(&b.context));
            tables.push(contexts);
        }
        let saved = SavedModel {
            format: FORMAT_NAME.to_string(),
            version: FORMAT_VERSION,
            order: self.order,
            vocab_size: self.vocab_size,
            lambdas: self.lambdas.clone(),
            tables,
        };
        let mut text = serde_json::to_string(&saved).expect("model serializes");
        text.push('\n');
        std::fs::write(path, text)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, NgramError> {
        let text = std::fs::read_to_string(path)?;
        let saved: SavedModel =
            serde_json::from_str(&text).map_err(|e| NgramError::Format(e.to_string()))?;
        if saved.format != FORMAT_NAME {
            return Err(NgramError::Format(format!(
                "expected format {FORMAT_NAME:?}, found {:?}",
                saved.format
            )));
        }
        if saved.version != FORMAT_VERSION {
            return Err(NgramError::Format(format!(
                "unsupported version {}",
                saved.version
            )));
        }
        if saved.order == 0 || saved.tables.len() != saved.order {
            return Err(NgramError::Format("order/table mismatch".to_string()));
        }
        let mut tables = Vec::with_capacity(saved.order);
        for contexts in saved.tables {
            let mut table = HashMap::with_capacity(contexts.len());
            for ctx in contexts {
                table.insert(
                    ctx.context,
                    ContextCounts {
                        total: ctx.total,
                        next: ctx.next.into_iter().collect(),
                    },
                );
            }
            tables.push(table);
        }
        Ok(NgramModel {
            order: saved.order,
            vocab_size: saved.vocab_size,
            lambdas: saved.lambdas,
            tables,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct SavedModel {
    format: String,
    version: u32,
    order: usize,
    vocab_size: u32,
    lambdas: Vec<f64>,
    tables: Vec<Vec<SavedContext>>,
}

#[derive(Serialize, Deserialize)]
struct SavedContext {
    context: Vec<TokenId>,
    total: u64,
    next: Vec<(TokenId, u64)>,
}

#[cfg(test)]
mod tests {
    use super::*;

    const V: u32 = 8;

    #[test]
    fn unigram_frequency_orders_probabilities() {
        let model = fit(&[vec![1, 1, 1]], 1, &default_lambdas(1), V).unwrap();
        let p1 = model.prob(&[], 1).unwrap();
        for other in (0..V).filter(|&j| j != 1) {
            assert!(p1 > model.prob(&[], other).unwrap());
        }
    }

    #[test]
    fn default_schedule_reproduces_the_order_three_weights() {
        assert_eq!(default_lambdas(3), vec![0.1, 0.3, 0.6]);
        assert_eq!(default_lambdas(1), vec![0.1]);
        assert_eq!(default_lambdas(2), vec![0.1, 0.9]);
        let four = default_lambdas(4);
        assert!((four.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bigram_counts_dominate() {
        let model = fit(&[vec![1, 2, 1, 2]], 2, &[0.4, 0.6], V).unwrap();
        assert!(model.prob(&[1], 2).unwrap() > model.prob(&[1], 1).unwrap());
    }

    #[test]
    fn order_zero_is_rejected() {
        let err = fit(&[vec![1]], 0, &[], V).unwrap_err();
        assert!(matches!(err, NgramError::InvalidOrder));
    }

    #[test]
    fn empty_training_set_is_rejected() {
        let err = fit(&[], 3, &DEFAULT_LAMBDAS, V).unwrap_err();
        assert!(matches!(err, NgramError::EmptyTrainingSet));
        let err = fit(&[vec![]], 3, &DEFAULT_LAMBDAS, V).unwrap_err();
        assert!(matches!(err, NgramError::EmptyTrainingSet));
    }

    #[test]
    fn untrained_context_keeps_the_uniform_floor() {
        let model = fit(&[vec![1, 2, 3]], 3, &DEFAULT_LAMBDAS, V).unwrap();
        let floor = (DEFAULT_LAMBDAS[0] / V as f64).ln();
        // Context never seen in training and a token never seen either.
        let lp = model.logprob(&[7, 7], 6).unwrap();
        assert!(lp >= floor, "{lp} < {floor}");
    }

    #[test]
    fn distributions_normalize_per_context() {
        let model = fit(
            &[vec![1, 2, 3, 1, 2, 4], vec![2, 2, 5]],
            3,
            &DEFAULT_LAMBDAS,
            V,
        )
        .unwrap();
        let contexts: Vec<Vec<TokenId>> = vec![
            vec![],
            vec![1],
            vec![2, 2],
            vec![7, 6],
            vec![0, 0],
            vec![3, 1],
        ];
        for ctx in contexts {
            let total: f64 = (0..V).map(|id| model.prob(&ctx, id).unwrap()).sum();
            assert!((total - 1.0).abs() < 1e-9, "context {ctx:?} sums to {total}");
        }
    }

    #[test]
    fn heavier_bigram_raises_logprob() {
        let seqs = vec![vec![1, 2], vec![1, 3]];
        let light = fit(&seqs, 3, &DEFAULT_LAMBDAS, V).unwrap();
        let seqs = vec![vec![1, 2], vec![1, 2]];
        let heavy = fit(&seqs, 3, &DEFAULT_LAMBDAS, V).unwrap();
        assert!(
            heavy.logprob(&[1], 2).unwrap() > light.logprob(&[1], 2).unwrap(),
            "more occurrences of (context, next) must not lower its logprob"
        );
        let model = fit(&[vec![1, 2, 1, 2, 1, 2]], 3, &DEFAULT_LAMBDAS, V).unwrap();
        assert!(model.logprob(&[1], 2).unwrap() > model.logprob(&[1], 3).unwrap());
    }

    #[test]
    fn unknown_ids_error() {
        let model = fit(&[vec![1, 2]], 2, &[0.5, 0.5], V).unwrap();
        assert!(matches!(
            model.logprob(&[1], V),
            Err(NgramError::UnknownTokenId { .. })
        ));
        let err = fit(&[vec![V]], 1, &[1.0], V).unwrap_err();
        assert!(matches!(err, NgramError::UnknownTokenId { .. }));
    }

    #[test]
    fn save_load_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.json");
        let model = fit(&[vec![1, 2, 3, 2, 1]], 3, &DEFAULT_LAMBDAS, V).unwrap();
        model.save(&path).unwrap();
        let back = NgramModel::load(&path).unwrap();
        for ctx in [vec![], vec![1], vec![2, 3]] {
            for id in 0..V {
                assert_eq!(model.prob(&ctx, id).unwrap(), back.prob(&ctx, id).unwrap());
            }
        }
    }

    #[test]
    fn lambda_schedule_must_match_order() {
        let err = fit(&[vec![1]], 3, &[0.5, 0.5], V).unwrap_err();
        assert!(matches!(err, NgramError::LambdaMismatch { .. }));
    }
}
