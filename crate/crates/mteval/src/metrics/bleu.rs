//! BLEU: clipped n-gram precision with a brevity penalty, pooled over the
//! corpus.

use std::collections::HashMap;

use crate::error::{Error, Result};

use super::tokenizer::tokenize;
use super::{Level, MetricScore, NativeMetric, Scale};

/// Smoothing applied to zero n-gram match counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BleuSmoothing {
    /// No smoothing: any zero precision gives a zero score.
    #[default]
    None,
    /// Exponentially decaying floor: the k-th n-gram order with zero matches
    /// (but a positive denominator) scores `1 / (2^k * denominator)`.
    ExpFloor,
}

pub const DEFAULT_MAX_N: usize = 4;

fn ngram_counts(tokens: &[String], n: usize) -> HashMap<&[String], u64> {
    let mut counts: HashMap<&[String], u64> = HashMap::new();
    if tokens.len() >= n {
        for gram in tokens.windows(n) {
            *counts.entry(gram).or_insert(0) += 1;
        }
    }
    counts
}

struct PooledCounts {
    matched: Vec<u64>,
    total: Vec<u64>,
    hyp_len: u64,
    ref_len: u64,
}

fn pool_counts<S: AsRef<str>>(
    hypotheses: &[S],
    references: &[S],
    max_n: usize,
) -> PooledCounts {
    let mut pooled = PooledCounts {
        matched: vec![0; max_n],
        total: vec![0; max_n],
        hyp_len: 0,
        ref_len: 0,
    };
    for (hyp, reference) in hypotheses.iter().zip(references.iter()) {
        let hyp_tokens = tokenize(hyp.as_ref()).tokens().to_vec();
        let ref_tokens = tokenize(reference.as_ref()).tokens().to_vec();
        pooled.hyp_len += hyp_tokens.len() as u64;
        pooled.ref_len += ref_tokens.len() as u64;
        for n in 1..=max_n {
            let hyp_grams = ngram_counts(&hyp_tokens, n);
            let ref_grams = ngram_counts(&ref_tokens, n);
            for (gram, count) in &hyp_grams {
                let clip = ref_grams.get(gram).copied().unwrap_or(0);
                pooled.matched[n - 1] += (*count).min(clip);
            }
            pooled.total[n - 1] += hyp_tokens.len().saturating_sub(n - 1) as u64;
        }
    }
    pooled
}

fn bleu_from_counts(counts: &PooledCounts, max_n: usize, smoothing: BleuSmoothing) -> f64 {
    if counts.hyp_len == 0 {
        return 0.0;
    }
    let mut log_sum = 0.0;
    let mut floor_scale = 1.0;
    for n in 0..max_n {
        let total = counts.total[n];
        if total == 0 {
            // Hypothesis shorter than this order; nothing to smooth.
            return 0.0;
        }
        let precision = if counts.matched[n] > 0 {
            counts.matched[n] as f64 / total as f64
        } else {
            match smoothing {
                BleuSmoothing::None => return 0.0,
                BleuSmoothing::ExpFloor => {
                    floor_scale *= 2.0;
                    1.0 / (floor_scale * total as f64)
                }
            }
        };
        log_sum += precision.ln();
    }
    let brevity = if counts.hyp_len >= counts.ref_len {
        1.0
    } else {
        (1.0 - counts.ref_len as f64 / counts.hyp_len as f64).exp()
    };
    100.0 * brevity * (log_sum / max_n as f64).exp()
}

/// Corpus BLEU over aligned hypothesis/reference segments, in [0, 100].
///
/// Precisions are pooled over the whole corpus (clipped counts); the brevity
/// penalty is `min(1, exp(1 - ref_len / hyp_len))`, and an all-empty
/// hypothesis side scores 0.
pub fn corpus_bleu<S: AsRef<str>>(
    hypotheses: &[S],
    references: &[S],
    max_n: usize,
    smoothing: BleuSmoothing,
) -> Result<MetricScore> {
    if max_n < 1 {
        return Err(Error::InvalidParameter("BLEU max_n must be >= 1".into()));
    }
    if hypotheses.len() != references.len() {
        return Err(Error::LengthMismatch {
            left: hypotheses.len(),
            right: references.len(),
        });
    }
    if hypotheses.is_empty() {
        return Err(Error::InvalidInput("empty corpus".into()));
    }
    let counts = pool_counts(hypotheses, references, max_n);
    Ok(MetricScore {
        metric: NativeMetric::Bleu.id(),
        value: bleu_from_counts(&counts, max_n, smoothing),
        scale: Scale::Percent,
        level: Level::Corpus,
    })
}

/// BLEU of a single segment; smoothing is always applied so that any
/// unigram match yields a positive score.
pub fn sentence_bleu(hypothesis: &str, reference: &str) -> Result<MetricScore> {
    let score = corpus_bleu(
        &[hypothesis],
        &[reference],
        DEFAULT_MAX_N,
        BleuSmoothing::ExpFloor,
    )?;
    Ok(MetricScore {
        level: Level::Segment,
        ..score
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_corpus_is_100() {
        let segments = ["the cat sat", "on the mat today ."];
        let score = corpus_bleu(&segments, &segments, 4, BleuSmoothing::None).unwrap();
        assert!((score.value - 100.0).abs() < 1e-9);
    }

    #[test]
    fn hand_computed_example() {
        // p = (5/5, 3/4, 2/3, 1/2), BP = exp(-0.2)
        let score = corpus_bleu(
            &["the cat sat on mat"],
            &["the cat sat on the mat"],
            4,
            BleuSmoothing::None,
        )
        .unwrap();
        let expected = 100.0 * (-0.2f64).exp() * (1.0f64 * 0.75 * (2.0 / 3.0) * 0.5).powf(0.25);
        assert!((score.value - expected).abs() < 1e-9);
        assert!((score.value - 57.89).abs() < 0.01);
    }

    #[test]
    fn empty_hypotheses_score_zero() {
        let score = corpus_bleu(&["", ""], &["a b", "c d"], 4, BleuSmoothing::None).unwrap();
        assert_eq!(score.value, 0.0);
    }

    #[test]
    fn zero_ngram_order_without_smoothing_is_zero() {
        // No bigram matches.
        let score = corpus_bleu(&["a c b d"], &["a x b y"], 4, BleuSmoothing::None).unwrap();
        assert_eq!(score.value, 0.0);
    }

    #[test]
    fn smoothing_keeps_score_positive() {
        // One unigram match, no 4-gram match.
        let score = sentence_bleu("a x y z", "a p q r").unwrap();
        assert!(score.value > 0.0);
    }

    #[test]
    fn sentence_bleu_identical_is_100() {
        assert!((sentence_bleu("a b c d e", "a b c d e").unwrap().value - 100.0).abs() < 1e-9);
    }

    #[test]
    fn sentence_bleu_hand_smoothed() {
        // hyp "a b x y", ref "a b c d": p1 = 2/4, p2 = 1/3, p3 = 0 -> 1/(2*2),
        // p4 = 0 -> 1/(4*1); lengths equal so BP = 1.
        let score = sentence_bleu("a b x y", "a b c d").unwrap();
        let expected = 100.0 * (0.5f64 * (1.0 / 3.0) * 0.25 * 0.25).powf(0.25);
        assert!((score.value - expected).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(corpus_bleu(&["a"], &["a", "b"], 4, BleuSmoothing::None).is_err());
        assert!(corpus_bleu(&["a"], &["a"], 0, BleuSmoothing::None).is_err());
        let empty: [&str; 0] = [];
        assert!(corpus_bleu(&empty, &empty, 4, BleuSmoothing::None).is_err());
    }
}
