//! Native reference-based metrics (BLEU, TER, chrF) over a shared
//! mteval-v13a-compatible tokenizer, at corpus and segment level.
//!
//! All scoring is pure and deterministic: BLEU and chrF land in [0, 100],
//! TER is a ratio >= 0 and is the one lower-is-better metric.

mod bleu;
mod chrf;
mod ter;
mod tokenizer;

use serde::{Deserialize, Serialize};

use crate::data_model::{EvalCorpus, MetricId, Orientation, ScoreMatrix};
use crate::error::Result;

pub use bleu::{corpus_bleu, sentence_bleu, BleuSmoothing, DEFAULT_MAX_N};
pub use chrf::{
    corpus_chrf, corpus_chrf_with, sentence_chrf, sentence_chrf_with, ChrfMode, DEFAULT_BETA,
    DEFAULT_N_MAX,
};
pub use ter::{corpus_ter, ter, ter_segment_counts, MAX_SHIFT_DISTANCE, MAX_SHIFT_SIZE};
pub use tokenizer::{tokenize, TokenizedSegment};

/// The metrics this crate can compute natively.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum NativeMetric {
    Bleu,
    Ter,
    ChrF,
}

impl NativeMetric {
    pub const ALL: [NativeMetric; 3] = [NativeMetric::Bleu, NativeMetric::Ter, NativeMetric::ChrF];

    pub fn id(&self) -> MetricId {
        MetricId::new(match self {
            NativeMetric::Bleu => "BLEU",
            NativeMetric::Ter => "TER",
            NativeMetric::ChrF => "chrF",
        })
    }

    pub fn orientation(&self) -> Orientation {
        match self {
            NativeMetric::Ter => Orientation::LowerIsBetter,
            _ => Orientation::HigherIsBetter,
        }
    }

    /// Parse a metric name as used on the command line (case-insensitive).
    pub fn parse(name: &str) -> Option<NativeMetric> {
        match name.to_ascii_lowercase().as_str() {
            "bleu" => Some(NativeMetric::Bleu),
            "ter" => Some(NativeMetric::Ter),
            "chrf" => Some(NativeMetric::ChrF),
            _ => None,
        }
    }
}

/// Whether a score is on the 0-100 scale or an unbounded ratio.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scale {
    /// BLEU and chrF: values in [0, 100].
    Percent,
    /// TER: a ratio >= 0, not multiplied by 100.
    Ratio,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Level {
    Corpus,
    Segment,
}

/// One computed metric value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricScore {
    pub metric: MetricId,
    pub value: f64,
    pub scale: Scale,
    pub level: Level,
}

/// Score every system of `corpus` with the selected native metrics.
///
/// System-level scores use corpus BLEU (unsmoothed), corpus TER, and pooled
/// corpus chrF. `segment_metrics` selects which metrics additionally get
/// per-segment vectors (sentence BLEU is smoothed; segment TER is the
/// per-segment edit ratio). Orientation flags are set on the result.
pub fn score_all_systems(
    corpus: &EvalCorpus,
    metrics: &[NativeMetric],
    segment_metrics: &[NativeMetric],
) -> Result<ScoreMatrix> {
    let mut matrix = ScoreMatrix::new();
    let references = corpus.references();
    let system_ids: Vec<_> = corpus.system_ids().cloned().collect();
    for system in &system_ids {
        let outputs = corpus.output(system)?;
        for metric in metrics {
            let score = match metric {
                NativeMetric::Bleu => {
                    corpus_bleu(outputs, references, DEFAULT_MAX_N, BleuSmoothing::None)?
                }
                NativeMetric::Ter => corpus_ter(outputs, references)?,
                NativeMetric::ChrF => corpus_chrf(outputs, references, ChrfMode::Macro)?,
            };
            matrix.insert_system_score(metric.id(), system.clone(), score.value)?;
        }
        for metric in segment_metrics {
            let mut values = Vec::with_capacity(corpus.len());
            for (hyp, reference) in outputs.iter().zip(references.iter()) {
                let score = match metric {
                    NativeMetric::Bleu => sentence_bleu(hyp, reference)?,
                    NativeMetric::Ter => ter(hyp, reference)?,
                    NativeMetric::ChrF => sentence_chrf(hyp, reference)?,
                };
                values.push(score.value);
            }
            matrix.insert_segment_scores(metric.id(), system.clone(), values)?;
        }
    }
    for metric in metrics.iter().chain(segment_metrics) {
        matrix.set_orientation(metric.id(), metric.orientation());
    }
    Ok(matrix)
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::data_model::SystemId;

    fn corpus() -> EvalCorpus {
        let sources = vec!["s1".into(), "s2".into(), "s3".into()];
        let references = vec![
            "the cat sat on the mat".into(),
            "a quick brown fox".into(),
            "hello world".into(),
        ];
        let systems: BTreeMap<SystemId, Vec<String>> = [
            (
                SystemId::new("perfect"),
                references.clone(),
            ),
            (
                SystemId::new("noisy"),
                vec![
                    "the cat sat on mat".into(),
                    "a quick brown dog".into(),
                    "hi world".into(),
                ],
            ),
        ]
        .into();
        EvalCorpus::new("xx-en", sources, references, systems).unwrap()
    }

    #[test]
    fn scores_every_selected_metric_per_system() {
        let matrix = score_all_systems(
            &corpus(),
            &NativeMetric::ALL,
            &[NativeMetric::ChrF],
        )
        .unwrap();
        assert_eq!(matrix.metrics().count(), 3);
        for metric in NativeMetric::ALL {
            assert_eq!(matrix.system_scores(&metric.id()).unwrap().len(), 2);
        }
        let chrf_segments = matrix
            .segment_scores(&MetricId::new("chrF"), &SystemId::new("noisy"))
            .unwrap();
        assert_eq!(chrf_segments.len(), 3);
        assert_eq!(
            matrix.orientation(&MetricId::new("TER")),
            Orientation::LowerIsBetter
        );
    }

    #[test]
    fn perfect_system_gets_perfect_scores() {
        let matrix = score_all_systems(&corpus(), &NativeMetric::ALL, &[]).unwrap();
        let perfect = SystemId::new("perfect");
        let bleu = matrix.system_score(&MetricId::new("BLEU"), &perfect).unwrap();
        let ter = matrix.system_score(&MetricId::new("TER"), &perfect).unwrap();
        let chrf = matrix.system_score(&MetricId::new("chrF"), &perfect).unwrap();
        assert!((bleu - 100.0).abs() < 1e-9);
        assert_eq!(ter, 0.0);
        assert!((chrf - 100.0).abs() < 1e-9);
    }

    #[test]
    fn self_comparison_is_perfect_for_every_metric() {
        let text = "some tokens , with punctuation !";
        assert!((corpus_bleu(&[text], &[text], 4, BleuSmoothing::None).unwrap().value - 100.0)
            .abs()
            < 1e-9);
        assert_eq!(ter(text, text).unwrap().value, 0.0);
        assert!((sentence_chrf(text, text).unwrap().value - 100.0).abs() < 1e-9);
    }
}
