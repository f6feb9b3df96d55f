//! Canonical data types for corpora, human assessments, and metric score
//! tables, plus per-annotator score standardization.
//!
//! All loaded data is immutable after construction and safely shareable
//! across threads. Text is treated as opaque UTF-8; no Unicode normalization
//! happens at load time.

mod io;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use io::{
    load_assessments, load_corpus, load_score_matrix, load_segments, write_assessments_tsv,
    write_score_matrix_tsv, ScoreMatrixLoad,
};

/// Identifier of one MT system.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SystemId(String);

impl SystemId {
    pub fn new(id: impl Into<String>) -> Self {
        SystemId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for SystemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for SystemId {
    fn from(s: &str) -> Self {
        SystemId::new(s)
    }
}

/// Identifier of one metric (native or ingested).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MetricId(String);

impl MetricId {
    pub fn new(id: impl Into<String>) -> Self {
        MetricId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for MetricId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for MetricId {
    fn from(s: &str) -> Self {
        MetricId::new(s)
    }
}

/// Whether larger metric values mean better translations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Orientation {
    HigherIsBetter,
    LowerIsBetter,
}

impl Orientation {
    /// Conventional orientation for a metric id: error-rate metrics (TER,
    /// WER, PER, CDER, EED, HTER, CharacTER) are lower-is-better, everything
    /// else higher-is-better. Case-insensitive; overridable on the matrix.
    pub fn for_metric(id: &MetricId) -> Orientation {
        const LOWER: [&str; 7] = ["ter", "wer", "per", "cder", "eed", "hter", "character"];
        if LOWER.contains(&id.as_str().to_ascii_lowercase().as_str()) {
            Orientation::LowerIsBetter
        } else {
            Orientation::HigherIsBetter
        }
    }

    /// Score transformed so that higher is always better.
    pub fn adjust(&self, score: f64) -> f64 {
        match self {
            Orientation::HigherIsBetter => score,
            Orientation::LowerIsBetter => -score,
        }
    }
}

/// Source and reference segments plus per-system translations for one
/// language pair. All segment sequences are aligned by index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalCorpus {
    language_pair: String,
    sources: Vec<String>,
    references: Vec<String>,
    systems: BTreeMap<SystemId, Vec<String>>,
}

impl EvalCorpus {
    pub fn new(
        language_pair: impl Into<String>,
        sources: Vec<String>,
        references: Vec<String>,
        systems: BTreeMap<SystemId, Vec<String>>,
    ) -> Result<Self> {
        if sources.is_empty() {
            return Err(Error::InvalidInput("corpus has no segments".into()));
        }
        if references.len() != sources.len() {
            return Err(Error::LengthMismatch {
                left: sources.len(),
                right: references.len(),
            });
        }
        if systems.is_empty() {
            return Err(Error::InvalidInput("corpus has no systems".into()));
        }
        for outputs in systems.values() {
            if outputs.len() != sources.len() {
                return Err(Error::LengthMismatch {
                    left: sources.len(),
                    right: outputs.len(),
                });
            }
        }
        Ok(EvalCorpus {
            language_pair: language_pair.into(),
            sources,
            references,
            systems,
        })
    }

    pub fn language_pair(&self) -> &str {
        &self.language_pair
    }

    /// Number of aligned segments.
    pub fn len(&self) -> usize {
        self.sources.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sources.is_empty()
    }

    pub fn sources(&self) -> &[String] {
        &self.sources
    }

    pub fn references(&self) -> &[String] {
        &self.references
    }

    pub fn system_ids(&self) -> impl Iterator<Item = &SystemId> {
        self.systems.keys()
    }

    pub fn n_systems(&self) -> usize {
        self.systems.len()
    }

    pub fn output(&self, system: &SystemId) -> Result<&[String]> {
        self.systems
            .get(system)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::MissingSystem(system.to_string()))
    }
}

/// One human assessment record: a raw adequacy score for one translated
/// segment, with its standardized z-score.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssessmentRecord {
    pub system: SystemId,
    pub segment: usize,
    pub annotator: Option<String>,
    pub raw: f64,
    pub z: f64,
}

/// Per-annotator-standardized human scores with derived per-system DA means.
#[derive(Debug, Clone, PartialEq)]
pub struct HumanAssessment {
    records: Vec<AssessmentRecord>,
    z_by_system: BTreeMap<SystemId, Vec<f64>>,
    da: BTreeMap<SystemId, f64>,
}

impl HumanAssessment {
    /// Build from records that already carry z-scores. Validates raw score
    /// range and computes per-system DA means.
    pub fn new(records: Vec<AssessmentRecord>) -> Result<Self> {
        if records.is_empty() {
            return Err(Error::InvalidInput("no assessment records".into()));
        }
        let mut z_by_system: BTreeMap<SystemId, Vec<f64>> = BTreeMap::new();
        for record in &records {
            if !(0.0..=100.0).contains(&record.raw) {
                return Err(Error::ScoreOutOfRange(record.raw));
            }
            if !record.z.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "non-finite z-score for system {}",
                    record.system
                )));
            }
            z_by_system
                .entry(record.system.clone())
                .or_default()
                .push(record.z);
        }
        let da = z_by_system
            .iter()
            .map(|(system, zs)| {
                let mean = zs.iter().sum::<f64>() / zs.len() as f64;
                (system.clone(), mean)
            })
            .collect();
        Ok(HumanAssessment {
            records,
            z_by_system,
            da,
        })
    }

    /// Build from raw scores, standardizing per annotator. Every record must
    /// name an annotator.
    pub fn from_raw(
        records: Vec<(SystemId, usize, String, f64)>,
    ) -> Result<Self> {
        let raw: Vec<(String, f64)> = records
            .iter()
            .map(|(_, _, annotator, value)| (annotator.clone(), *value))
            .collect();
        let z = standardize_annotator(&raw)?;
        let full = records
            .into_iter()
            .zip(z)
            .map(|((system, segment, annotator, raw), z)| AssessmentRecord {
                system,
                segment,
                annotator: Some(annotator),
                raw,
                z,
            })
            .collect();
        HumanAssessment::new(full)
    }

    pub fn records(&self) -> &[AssessmentRecord] {
        &self.records
    }

    /// Per-system DA score: the mean of the system's standardized segment
    /// scores.
    pub fn da_scores(&self) -> &BTreeMap<SystemId, f64> {
        &self.da
    }

    pub fn da_score(&self, system: &SystemId) -> Result<f64> {
        self.da
            .get(system)
            .copied()
            .ok_or_else(|| Error::MissingSystem(system.to_string()))
    }

    /// All z-scores recorded for one system, in record order.
    pub fn z_samples(&self, system: &SystemId) -> Result<&[f64]> {
        self.z_by_system
            .get(system)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::MissingSystem(system.to_string()))
    }

    pub fn annotation_count(&self, system: &SystemId) -> usize {
        self.z_by_system.get(system).map_or(0, Vec::len)
    }

    pub fn system_ids(&self) -> impl Iterator<Item = &SystemId> {
        self.da.keys()
    }
}

/// Standardize raw scores per annotator: `z = (raw - mean) / sd` with the
/// sample standard deviation (divisor n-1). Annotators with a single score
/// or zero deviation get z = 0 for all their scores. Output order matches
/// input order.
pub fn standardize_annotator(raw_scores: &[(String, f64)]) -> Result<Vec<f64>> {
    for (_, value) in raw_scores {
        if !(0.0..=100.0).contains(value) {
            return Err(Error::ScoreOutOfRange(*value));
        }
    }
    let mut by_annotator: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
    for (annotator, value) in raw_scores {
        by_annotator.entry(annotator).or_default().push(*value);
    }
    let mut stats: BTreeMap<&str, (f64, f64)> = BTreeMap::new();
    for (annotator, values) in &by_annotator {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let sd = if values.len() < 2 {
            0.0
        } else {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        };
        stats.insert(annotator, (mean, sd));
    }
    Ok(raw_scores
        .iter()
        .map(|(annotator, value)| {
            let (mean, sd) = stats[annotator.as_str()];
            if sd == 0.0 {
                0.0
            } else {
                (value - mean) / sd
            }
        })
        .collect())
}

/// System x metric table of system-level scores, with optional per-segment
/// score vectors and a per-metric orientation flag.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ScoreMatrix {
    system_scores: BTreeMap<MetricId, BTreeMap<SystemId, f64>>,
    segment_scores: BTreeMap<MetricId, BTreeMap<SystemId, Vec<f64>>>,
    orientations: BTreeMap<MetricId, Orientation>,
}

impl ScoreMatrix {
    pub fn new() -> Self {
        ScoreMatrix::default()
    }

    pub fn insert_system_score(
        &mut self,
        metric: MetricId,
        system: SystemId,
        score: f64,
    ) -> Result<()> {
        if !score.is_finite() {
            return Err(Error::InvalidInput(format!(
                "non-finite score for ({metric}, {system})"
            )));
        }
        let orientation = Orientation::for_metric(&metric);
        let slot = self.system_scores.entry(metric.clone()).or_default();
        if slot.insert(system.clone(), score).is_some() {
            return Err(Error::DuplicateKey(format!("({metric}, {system}, sys)")));
        }
        self.orientations.entry(metric).or_insert(orientation);
        Ok(())
    }

    pub fn insert_segment_scores(
        &mut self,
        metric: MetricId,
        system: SystemId,
        scores: Vec<f64>,
    ) -> Result<()> {
        if scores.iter().any(|s| !s.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "non-finite segment score for ({metric}, {system})"
            )));
        }
        let orientation = Orientation::for_metric(&metric);
        let slot = self.segment_scores.entry(metric.clone()).or_default();
        if slot.insert(system.clone(), scores).is_some() {
            return Err(Error::DuplicateKey(format!("({metric}, {system}, seg)")));
        }
        self.orientations.entry(metric).or_insert(orientation);
        Ok(())
    }

    pub fn set_orientation(&mut self, metric: MetricId, orientation: Orientation) {
        self.orientations.insert(metric, orientation);
    }

    pub fn orientation(&self, metric: &MetricId) -> Orientation {
        self.orientations
            .get(metric)
            .copied()
            .unwrap_or_else(|| Orientation::for_metric(metric))
    }

    /// Metrics with system-level scores.
    pub fn metrics(&self) -> impl Iterator<Item = &MetricId> {
        self.system_scores.keys()
    }

    /// Metrics with segment-level vectors (usually a subset of `metrics`).
    pub fn segment_metrics(&self) -> impl Iterator<Item = &MetricId> {
        self.segment_scores.keys()
    }

    /// Explicit system set scored by one metric.
    pub fn systems(&self, metric: &MetricId) -> Result<Vec<&SystemId>> {
        self.system_scores
            .get(metric)
            .map(|m| m.keys().collect())
            .ok_or_else(|| Error::InvalidInput(format!("no scores for metric {metric}")))
    }

    pub fn system_scores(&self, metric: &MetricId) -> Result<&BTreeMap<SystemId, f64>> {
        self.system_scores
            .get(metric)
            .ok_or_else(|| Error::InvalidInput(format!("no scores for metric {metric}")))
    }

    pub fn system_score(&self, metric: &MetricId, system: &SystemId) -> Result<f64> {
        self.system_scores(metric)?
            .get(system)
            .copied()
            .ok_or_else(|| Error::MissingSystem(format!("{system} (metric {metric})")))
    }

    pub fn segment_scores(&self, metric: &MetricId, system: &SystemId) -> Option<&[f64]> {
        self.segment_scores
            .get(metric)?
            .get(system)
            .map(Vec::as_slice)
    }

    /// Segment-level vectors, when present, must match the corpus segment
    /// count.
    pub fn validate_against_corpus(&self, corpus: &EvalCorpus) -> Result<()> {
        for (metric, by_system) in &self.segment_scores {
            for (system, scores) in by_system {
                if scores.len() != corpus.len() {
                    return Err(Error::InvalidInput(format!(
                        "segment scores for ({metric}, {system}) have length {}, corpus has {}",
                        scores.len(),
                        corpus.len()
                    )));
                }
            }
        }
        Ok(())
    }

    /// Merge `other` into `self`; duplicate (metric, system, level) entries
    /// are an error.
    pub fn merge(&mut self, other: ScoreMatrix) -> Result<()> {
        for (metric, by_system) in other.system_scores {
            for (system, score) in by_system {
                self.insert_system_score(metric.clone(), system, score)?;
            }
        }
        for (metric, by_system) in other.segment_scores {
            for (system, scores) in by_system {
                self.insert_segment_scores(metric.clone(), system, scores)?;
            }
        }
        for (metric, orientation) in other.orientations {
            self.orientations.insert(metric, orientation);
        }
        Ok(())
    }
}
