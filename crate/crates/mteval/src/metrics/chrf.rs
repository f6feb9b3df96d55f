//! chrF: character n-gram F-score. Whitespace is removed before n-gram
//! extraction; precision and recall are arithmetic means over n = 1..n_max,
//! combined with beta weighting recall.

use std::collections::HashMap;

use crate::error::{Error, Result};

use super::{Level, MetricScore, NativeMetric, Scale};

pub const DEFAULT_N_MAX: usize = 6;
pub const DEFAULT_BETA: f64 = 2.0;

/// How a corpus-level chrF value is assembled from segments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChrfMode {
    /// Mean of per-segment chrF values (the treatment used for segment-level
    /// significance testing).
    Micro,
    /// n-gram counts pooled over the whole test set before computing F (the
    /// standard system score).
    Macro,
}

fn stripped_chars(text: &str) -> Vec<char> {
    text.chars().filter(|c| !c.is_whitespace()).collect()
}

#[derive(Debug, Clone, Default)]
struct NgramTally {
    matched: u64,
    hyp_total: u64,
    ref_total: u64,
}

fn tally_order(hyp: &[char], reference: &[char], n: usize) -> NgramTally {
    let mut ref_counts: HashMap<&[char], u64> = HashMap::new();
    if reference.len() >= n {
        for gram in reference.windows(n) {
            *ref_counts.entry(gram).or_insert(0) += 1;
        }
    }
    let mut hyp_counts: HashMap<&[char], u64> = HashMap::new();
    if hyp.len() >= n {
        for gram in hyp.windows(n) {
            *hyp_counts.entry(gram).or_insert(0) += 1;
        }
    }
    let mut tally = NgramTally {
        matched: 0,
        hyp_total: hyp.len().saturating_sub(n - 1) as u64,
        ref_total: reference.len().saturating_sub(n - 1) as u64,
    };
    for (gram, count) in &hyp_counts {
        if let Some(ref_count) = ref_counts.get(gram) {
            tally.matched += (*count).min(*ref_count);
        }
    }
    tally
}

/// F-score from per-order tallies. Orders where both sides have no n-grams
/// are excluded from the precision/recall means; P = R = 0 gives 0.
fn f_score(tallies: &[NgramTally], beta: f64) -> f64 {
    let mut precision_sum = 0.0;
    let mut recall_sum = 0.0;
    let mut orders = 0u32;
    for tally in tallies {
        if tally.hyp_total == 0 && tally.ref_total == 0 {
            continue;
        }
        orders += 1;
        if tally.hyp_total > 0 {
            precision_sum += tally.matched as f64 / tally.hyp_total as f64;
        }
        if tally.ref_total > 0 {
            recall_sum += tally.matched as f64 / tally.ref_total as f64;
        }
    }
    if orders == 0 {
        return 0.0;
    }
    let precision = precision_sum / f64::from(orders);
    let recall = recall_sum / f64::from(orders);
    if precision == 0.0 && recall == 0.0 {
        return 0.0;
    }
    let beta_sq = beta * beta;
    100.0 * (1.0 + beta_sq) * precision * recall / (beta_sq * precision + recall)
}

/// chrF of one segment with explicit parameters.
pub fn sentence_chrf_with(
    hypothesis: &str,
    reference: &str,
    n_max: usize,
    beta: f64,
) -> Result<MetricScore> {
    if n_max < 1 {
        return Err(Error::InvalidParameter("chrF n_max must be >= 1".into()));
    }
    let ref_chars = stripped_chars(reference);
    if ref_chars.is_empty() {
        return Err(Error::EmptyReference(0));
    }
    let hyp_chars = stripped_chars(hypothesis);
    let tallies: Vec<NgramTally> = (1..=n_max)
        .map(|n| tally_order(&hyp_chars, &ref_chars, n))
        .collect();
    Ok(MetricScore {
        metric: NativeMetric::ChrF.id(),
        value: f_score(&tallies, beta),
        scale: Scale::Percent,
        level: Level::Segment,
    })
}

/// chrF of one segment with the default n_max = 6, beta = 2.
pub fn sentence_chrf(hypothesis: &str, reference: &str) -> Result<MetricScore> {
    sentence_chrf_with(hypothesis, reference, DEFAULT_N_MAX, DEFAULT_BETA)
}

/// Corpus chrF with explicit parameters; see [`ChrfMode`].
pub fn corpus_chrf_with<S: AsRef<str>>(
    hypotheses: &[S],
    references: &[S],
    mode: ChrfMode,
    n_max: usize,
    beta: f64,
) -> Result<MetricScore> {
    if hypotheses.len() != references.len() {
        return Err(Error::LengthMismatch {
            left: hypotheses.len(),
            right: references.len(),
        });
    }
    if hypotheses.is_empty() {
        return Err(Error::InvalidInput("empty corpus".into()));
    }
    let value = match mode {
        ChrfMode::Micro => {
            let mut sum = 0.0;
            for (index, (hyp, reference)) in
                hypotheses.iter().zip(references.iter()).enumerate()
            {
                sum += sentence_chrf_with(hyp.as_ref(), reference.as_ref(), n_max, beta)
                    .map_err(|err| match err {
                        Error::EmptyReference(_) => Error::EmptyReference(index),
                        other => other,
                    })?
                    .value;
            }
            sum / hypotheses.len() as f64
        }
        ChrfMode::Macro => {
            let mut pooled = vec![NgramTally::default(); n_max];
            for (index, (hyp, reference)) in
                hypotheses.iter().zip(references.iter()).enumerate()
            {
                let ref_chars = stripped_chars(reference.as_ref());
                if ref_chars.is_empty() {
                    return Err(Error::EmptyReference(index));
                }
                let hyp_chars = stripped_chars(hyp.as_ref());
                for (n, slot) in pooled.iter_mut().enumerate() {
                    let tally = tally_order(&hyp_chars, &ref_chars, n + 1);
                    slot.matched += tally.matched;
                    slot.hyp_total += tally.hyp_total;
                    slot.ref_total += tally.ref_total;
                }
            }
            f_score(&pooled, beta)
        }
    };
    Ok(MetricScore {
        metric: NativeMetric::ChrF.id(),
        value,
        scale: Scale::Percent,
        level: Level::Corpus,
    })
}

/// Corpus chrF with the default n_max = 6, beta = 2.
pub fn corpus_chrf<S: AsRef<str>>(
    hypotheses: &[S],
    references: &[S],
    mode: ChrfMode,
) -> Result<MetricScore> {
    corpus_chrf_with(hypotheses, references, mode, DEFAULT_N_MAX, DEFAULT_BETA)
}
