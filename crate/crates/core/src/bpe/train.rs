//! Greedy pair-frequency BPE training over pre-tokenized byte corpora.

use std::collections::HashMap;

use super::{pretokenize, BpeError, TokenId, Vocabulary};

#[derive(Debug, Clone)]
pub struct TrainConfig {
    /// Final vocabulary size including the 256 base bytes and any specials.
    pub target_vocab_size: usize,
    /// Names appended to the vocabulary after training; they never take part
    /// in merges and never appear when encoding plain text.
    pub special_tokens: Vec<String>,
    /// Stop merging once the best pair occurs fewer times than this.
    pub min_pair_frequency: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            target_vocab_size: 512,
            special_tokens: Vec::new(),
            min_pair_frequency: 2,
        }
    }
}

impl TrainConfig {
    pub fn with_target(target_vocab_size: usize) -> Self {
        TrainConfig {
            target_vocab_size,
            ..TrainConfig::default()
        }
    }
}

/// Learn merges by repeatedly fusing the most frequent adjacent symbol pair.
///
/// Pairs are counted inside pre-tokens only, so a merge can never span a
/// whitespace or punctuation boundary. Ties on frequency are broken toward
/// the lexicographically smaller `(left, right)` byte pair, which makes
/// training deterministic for a given corpus order.
pub fn train_bpe<'a, I>(corpus: I, config: TrainConfig) -> Result<Vocabulary, BpeError>
where
    I: IntoIterator<Item = &'a [u8]>,
{
    let base = 256 + config.special_tokens.len();
    if config.target_vocab_size < base {
        return Err(BpeError::TargetBelowAlphabet {
            target: config.target_vocab_size,
            base,
        });
    }

    // Distinct pre-token byte strings with multiplicities.
    let mut word_freq: HashMap<Vec<u8>, u64> = HashMap::new();
    let mut seen_any_doc = false;
    for doc in corpus {
        seen_any_doc = true;
        for span in pretokenize(doc) {
            *word_freq.entry(span.slice(doc).to_vec()).or_insert(0) += 1;
        }
    }
    if !seen_any_doc {
        return Err(BpeError::EmptyCorpus);
    }

    // Each distinct pre-token as a list of symbol byte strings.
    let mut words: Vec<(Vec<Vec<u8>>, u64)> = word_freq
        .into_iter()
        .map(|(bytes, freq)| (bytes.iter().map(|&b| vec![b]).collect(), freq))
        .collect();
    // Deterministic iteration independent of hash order.
    words.sort();

    let max_merges = config.target_vocab_size - base;
    let mut merges: Vec<(Vec<u8>, Vec<u8>)> = Vec::new();
    while merges.len() < max_merges {
        let mut pair_counts: HashMap<(&[u8], &[u8]), u64> = HashMap::new();
        for (symbols, freq) in &words {
            for window in symbols.windows(2) {
                *pair_counts
                    .entry((window[0].as_slice(), window[1].as_slice()))
                    .or_insert(0) += freq;
            }
        }
        let best = pair_counts
            .iter()
            .max_by(|a, b| a.1.cmp(b.1).then_with(|| b.0.cmp(a.0)))
            .map(|(&pair, &count)| ((pair.0.to_vec(), pair.1.to_vec()), count));
        let Some(((left, right), count)) = best else { break };
        if count < config.min_pair_frequency {
            break;
        }
        for (symbols, _) in &mut words {
            let mut i = 0;
            while i + 1 < symbols.len() {
                if symbols[i] == left && symbols[i + 1] == right {
                    let mut fused = symbols[i].clone();
                    fused.extend_from_slice(&symbols[i + 1]);
                    symbols[i] = fused;
                    symbols.remove(i + 1);
                }
                i += 1;
            }
        }
        merges.push((left, right));
    }

    let mut entries: Vec<(Vec<u8>, TokenId)> =
        (0u32..256).map(|b| (vec![b as u8], b)).collect();
    let mut next_id = 256 as TokenId;
    for (left, right) in &merges {
        let mut merged = left.clone();
        merged.extend_from_slice(right);
        entries.push((merged, next_id));
        next_id += 1;
    }
    for name in &config.special_tokens {
        entries.push((name.as_bytes().to_vec(), next_id));
        next_id += 1;
    }
    Vocabulary::new(entries, merges, config.special_tokens)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_merge_is_the_most_frequent_pair() {
        // "aaab aaab" pairs: (a,a) x4, (a,b) x2, (" ",a) x1.
        let v = train_bpe([b"aaab aaab".as_slice()], TrainConfig::with_target(258)).unwrap();
        assert_eq!(v.merges()[0], (b"a".to_vec(), b"a".to_vec()));
    }

    #[test]
    fn target_below_alphabet_is_an_error() {
        let err = train_bpe([b"x".as_slice()], TrainConfig::with_target(255)).unwrap_err();
        assert!(matches!(err, BpeError::TargetBelowAlphabet { .. }), "{err}");
    }

    #[test]
    fn single_byte_corpus_learns_no_merges() {
        let v = train_bpe([b"x".as_slice()], TrainConfig::with_target(257)).unwrap();
        assert_eq!(v.merge_count(), 0);
        assert_eq!(v.vocab_size(), 256);
    }

    #[test]
    fn empty_corpus_is_an_error() {
        let err = train_bpe(std::iter::empty(), TrainConfig::default()).unwrap_err();
        assert!(matches!(err, BpeError::EmptyCorpus));
    }

    #[test]
    fn frequency_ties_break_lexicographically() {
        // ("a","b") and ("c","d") both occur twice; ("a","b") is smaller.
        let v = train_bpe([b"ab?cd?ab?cd".as_slice()], TrainConfig::with_target(257)).unwrap();
        assert_eq!(v.merges()[0], (b"a".to_vec(), b"b".to_vec()));
    }

    #[test]
    fn training_is_deterministic() {
        let docs = [b"for i in range(10): total += i".as_slice(), b"total = 0".as_slice()];
        let a = train_bpe(docs, TrainConfig::with_target(300)).unwrap();
        let b = train_bpe(docs, TrainConfig::with_target(300)).unwrap();
        assert_eq!(a.merges(), b.merges());
    }

    #[test]
    fn special_tokens_take_the_last_ids() {
        let cfg = TrainConfig {
            target_vocab_size: 260,
            special_tokens: vec!["<pad>".to_string(), "<eos>".to_string()],
            min_pair_frequency: 2,
        };
        let v = train_bpe([b"aaaa aaaa".as_slice()], cfg).unwrap();
        assert_eq!(v.vocab_size(), 256 + v.merge_count() + 2);
        let pad = v.special_tokens()["<pad>"];
        assert_eq!(pad as usize, v.vocab_size() - 2);
        // Specials never appear when encoding plain text.
        let tokens = v.encode(b"<pad>").unwrap();
        assert!(tokens.iter().all(|t| t.id != pad));
    }
}
