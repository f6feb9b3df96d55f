//! System-pair decision analysis: for every pair of systems, compare the
//! metric verdict (significance plus delta bin) with the human verdict,
//! classify Type I / Type II errors, and tally cross-metric agreement.
//!
//! Type I here means the metric missed a human-significant difference; Type
//! II means the metric claimed a difference humans do not support.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::csv;
use crate::data_model::{EvalCorpus, HumanAssessment, MetricId, ScoreMatrix, SystemId};
use crate::error::{Error, Result};
use crate::metrics::{
    corpus_bleu, corpus_chrf, ter_segment_counts, BleuSmoothing, ChrfMode, DEFAULT_MAX_N,
};
use crate::significance::{
    paired_bootstrap, paired_t_test, wilcoxon_rank_sum, BootstrapConfig, Direction,
    SignificancePolicy, TestKind, TestResult,
};

/// Half-open delta bins over [0, inf): `[e0,e1), ..., [e_last, inf)`, plus
/// the NS bin for metric-insignificant pairs. The first edge must be 0 so
/// the bins cover every non-negative delta.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinEdges {
    edges: Vec<f64>,
}

pub const NS_BIN: &str = "NS";

impl BinEdges {
    pub fn new(edges: Vec<f64>) -> Result<Self> {
        if edges.is_empty() {
            return Err(Error::InvalidParameter("no bin edges".into()));
        }
        if edges[0] != 0.0 {
            return Err(Error::InvalidParameter(
                "first bin edge must be 0 so bins cover [0, inf)".into(),
            ));
        }
        if edges.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter(
                "bin edges must be strictly ascending".into(),
            ));
        }
        Ok(BinEdges { edges })
    }

    /// Index of the half-open bin containing `delta` (which must be >= 0).
    pub fn assign(&self, delta: f64) -> usize {
        debug_assert!(delta >= 0.0);
        self.edges
            .iter()
            .rposition(|&edge| delta >= edge)
            .unwrap_or_default()
    }

    pub fn label(&self, index: usize) -> String {
        if index + 1 < self.edges.len() {
            format!("[{},{})", self.edges[index], self.edges[index + 1])
        } else {
            format!("[{},inf)", self.edges[index])
        }
    }

    /// All bin labels, NS first.
    pub fn labels_with_ns(&self) -> Vec<String> {
        std::iter::once(NS_BIN.to_string())
            .chain((0..self.edges.len()).map(|i| self.label(i)))
            .collect()
    }
}

impl Default for BinEdges {
    fn default() -> Self {
        BinEdges::new(vec![0.0, 1.0, 2.0, 3.0, 5.0, 10.0]).expect("valid default edges")
    }
}

/// Human judgment of a pair, phrased relative to the metric's preferred
/// ordering (system a is the one the metric favors).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HumanVerdict {
    #[serde(rename = "a-significantly-better")]
    FirstSignificantlyBetter,
    #[serde(rename = "b-significantly-better")]
    SecondSignificantlyBetter,
    #[serde(rename = "insignificant")]
    Insignificant,
}

impl HumanVerdict {
    fn label(&self) -> &'static str {
        match self {
            HumanVerdict::FirstSignificantlyBetter => "a-significantly-better",
            HumanVerdict::SecondSignificantlyBetter => "b-significantly-better",
            HumanVerdict::Insignificant => "insignificant",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ErrorClass {
    #[serde(rename = "none")]
    None,
    #[serde(rename = "type-1")]
    Type1,
    #[serde(rename = "type-2")]
    Type2,
}

impl ErrorClass {
    pub fn label(&self) -> &'static str {
        match self {
            ErrorClass::None => "none",
            ErrorClass::Type1 => "type-1",
            ErrorClass::Type2 => "type-2",
        }
    }

    /// Neutral name: Type 1 is a miss, Type 2 a false alarm.
    pub fn neutral_label(&self) -> &'static str {
        match self {
            ErrorClass::None => "none",
            ErrorClass::Type1 => "miss",
            ErrorClass::Type2 => "false-alarm",
        }
    }

    pub fn is_error(&self) -> bool {
        !matches!(self, ErrorClass::None)
    }
}

/// One system pair judged by one metric against the human verdict.
/// `system_a` is ordered so the orientation-adjusted metric delta is >= 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairDecision {
    pub language_pair: String,
    pub metric: MetricId,
    pub system_a: SystemId,
    pub system_b: SystemId,
    /// Orientation-adjusted metric delta (positive = a better).
    pub delta: f64,
    pub metric_p: f64,
    pub metric_significant: bool,
    /// "NS" when the metric difference is insignificant, else the delta bin.
    pub bin: String,
    pub human_p: f64,
    pub human_verdict: HumanVerdict,
    pub error_class: ErrorClass,
}

/// Everything needed to decide pairs for one language pair.
pub struct PairContext<'a> {
    pub language_pair: String,
    pub matrix: &'a ScoreMatrix,
    pub human: &'a HumanAssessment,
    /// Required only for metrics whose policy is the bootstrap.
    pub corpus: Option<&'a EvalCorpus>,
    pub policy: &'a SignificancePolicy,
    pub bins: &'a BinEdges,
    pub metric_alpha: f64,
    pub human_alpha: f64,
    pub bootstrap_samples: usize,
    pub seed: u64,
}

/// Corpus-level scoring closure: (hypotheses, references) -> higher-better
/// score.
type CorpusScorer<'a> = Box<dyn Fn(&[&str], &[&str]) -> Result<f64> + 'a>;

/// Corpus-scoring closure for a natively computable metric. TER results are
/// negated and its per-segment edit counts memoized, since the bootstrap
/// rescoring only ever permutes whole segments.
fn bootstrap_metric_fn<'a>(metric: &MetricId) -> Option<CorpusScorer<'a>> {
    match metric.as_str().to_ascii_lowercase().as_str() {
        "bleu" => Some(Box::new(|hyps: &[&str], refs: &[&str]| {
            Ok(corpus_bleu(hyps, refs, DEFAULT_MAX_N, BleuSmoothing::None)?.value)
        })),
        "chrf" => Some(Box::new(|hyps: &[&str], refs: &[&str]| {
            Ok(corpus_chrf(hyps, refs, ChrfMode::Macro)?.value)
        })),
        "ter" => {
            let cache: RefCell<HashMap<(String, String), (u64, u64)>> =
                RefCell::new(HashMap::new());
            Some(Box::new(move |hyps: &[&str], refs: &[&str]| {
                let mut edits = 0u64;
                let mut tokens = 0u64;
                for (hyp, reference) in hyps.iter().zip(refs.iter()) {
                    let key = (hyp.to_string(), reference.to_string());
                    let counts = cache.borrow().get(&key).copied();
                    let counts = match counts {
                        Some(counts) => counts,
                        None => {
                            let fresh = ter_segment_counts(hyp, reference)?;
                            cache.borrow_mut().insert(key, fresh);
                            fresh
                        }
                    };
                    edits += counts.0;
                    tokens += counts.1;
                }
                Ok(-(edits as f64 / tokens as f64))
            }))
        }
        _ => None,
    }
}

fn metric_test(
    ctx: &PairContext<'_>,
    metric: &MetricId,
    a: &SystemId,
    b: &SystemId,
) -> Result<TestResult> {
    let orientation = ctx.matrix.orientation(metric);
    match ctx.policy.test_for(metric) {
        TestKind::Bootstrap => {
            let corpus = ctx.corpus.ok_or_else(|| {
                Error::InvalidInput(format!(
                    "metric {metric} is tested by bootstrap, which needs the corpus texts"
                ))
            })?;
            let scorer = bootstrap_metric_fn(metric).ok_or_else(|| {
                Error::InvalidInput(format!(
                    "metric {metric} cannot be re-scored for bootstrap (not a native metric)"
                ))
            })?;
            paired_bootstrap(
                scorer,
                corpus,
                a,
                b,
                BootstrapConfig::new(ctx.bootstrap_samples, ctx.seed, ctx.metric_alpha),
            )
        }
        TestKind::PairedT | TestKind::Wilcoxon => {
            let need = |system: &SystemId| {
                ctx.matrix.segment_scores(metric, system).ok_or_else(|| {
                    Error::InvalidInput(format!(
                        "metric {metric} is tested on segment scores, but none are loaded \
                         for system {system}"
                    ))
                })
            };
            let seg_a: Vec<f64> = need(a)?.iter().map(|s| orientation.adjust(*s)).collect();
            let seg_b: Vec<f64> = need(b)?.iter().map(|s| orientation.adjust(*s)).collect();
            match ctx.policy.test_for(metric) {
                TestKind::PairedT => paired_t_test(&seg_a, &seg_b, ctx.metric_alpha),
                _ => wilcoxon_rank_sum(&seg_a, &seg_b, ctx.metric_alpha),
            }
        }
    }
}

/// Decide one unordered pair for one metric: run the metric's significance
/// test and the human Wilcoxon test, bin the delta, classify the error.
pub fn decide_pair(
    ctx: &PairContext<'_>,
    metric: &MetricId,
    x: &SystemId,
    y: &SystemId,
) -> Result<PairDecision> {
    if x == y {
        return Err(Error::InvalidInput(format!("pair of {x} with itself")));
    }
    let orientation = ctx.matrix.orientation(metric);
    let score_x = orientation.adjust(ctx.matrix.system_score(metric, x)?);
    let score_y = orientation.adjust(ctx.matrix.system_score(metric, y)?);
    // Order so the adjusted delta is non-negative; break exact ties by id.
    let (a, b, delta) = if score_x > score_y || (score_x == score_y && x < y) {
        (x.clone(), y.clone(), score_x - score_y)
    } else {
        (y.clone(), x.clone(), score_y - score_x)
    };

    let metric_result = metric_test(ctx, metric, &a, &b)?;
    let human_result = wilcoxon_rank_sum(
        ctx.human.z_samples(&a)?,
        ctx.human.z_samples(&b)?,
        ctx.human_alpha,
    )?;
    let human_verdict = match human_result.direction {
        Direction::FirstBetter => HumanVerdict::FirstSignificantlyBetter,
        Direction::SecondBetter => HumanVerdict::SecondSignificantlyBetter,
        Direction::None => HumanVerdict::Insignificant,
    };

    let bin = if metric_result.significant {
        ctx.bins.label(ctx.bins.assign(delta))
    } else {
        NS_BIN.to_string()
    };
    let human_significant = human_verdict != HumanVerdict::Insignificant;
    let error_class = match (metric_result.significant, human_significant) {
        (false, true) => ErrorClass::Type1,
        (true, false) => ErrorClass::Type2,
        _ => ErrorClass::None,
    };
    Ok(PairDecision {
        language_pair: ctx.language_pair.clone(),
        metric: metric.clone(),
        system_a: a,
        system_b: b,
        delta,
        metric_p: metric_result.p_value,
        metric_significant: metric_result.significant,
        bin,
        human_p: human_result.p_value,
        human_verdict,
        error_class,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct BinCounts {
    pub human_better: u64,
    pub human_worse: u64,
    pub human_insignificant: u64,
}

impl BinCounts {
    pub fn total(&self) -> u64 {
        self.human_better + self.human_worse + self.human_insignificant
    }
}

/// Per (metric, bin) counts of human verdicts: the payload behind the
/// pairwise-difference chart.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinnedSummary {
    pub bin_labels: Vec<String>,
    pub counts: BTreeMap<MetricId, BTreeMap<String, BinCounts>>,
    pub total_pairs: BTreeMap<MetricId, u64>,
}

/// Tally decisions into the binned summary; every (metric, bin) cell is
/// present even when zero.
pub fn binned_summary(decisions: &[PairDecision], bins: &BinEdges) -> BinnedSummary {
    let labels = bins.labels_with_ns();
    let mut counts: BTreeMap<MetricId, BTreeMap<String, BinCounts>> = BTreeMap::new();
    let mut total_pairs: BTreeMap<MetricId, u64> = BTreeMap::new();
    for decision in decisions {
        counts.entry(decision.metric.clone()).or_insert_with(|| {
            labels
                .iter()
                .map(|label| (label.clone(), BinCounts::default()))
                .collect()
        });
    }
    for decision in decisions {
        let slot = counts
            .get_mut(&decision.metric)
            .and_then(|bins| bins.get_mut(&decision.bin))
            .expect("bin label from the same edges");
        match decision.human_verdict {
            HumanVerdict::FirstSignificantlyBetter => slot.human_better += 1,
            HumanVerdict::SecondSignificantlyBetter => slot.human_worse += 1,
            HumanVerdict::Insignificant => slot.human_insignificant += 1,
        }
        *total_pairs.entry(decision.metric.clone()).or_insert(0) += 1;
    }
    BinnedSummary {
        bin_labels: labels,
        counts,
        total_pairs,
    }
}

/// Decisions plus their binned summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairAnalysis {
    pub decisions: Vec<PairDecision>,
    pub summary: BinnedSummary,
}

/// Decide every unordered pair of systems for every selected metric.
///
/// Pairs are taken over the systems covered by the human assessment and by
/// every selected metric, enumerated in sorted order so output is
/// deterministic.
pub fn analyze_all_pairs(ctx: &PairContext<'_>, metrics: &[MetricId]) -> Result<PairAnalysis> {
    if metrics.is_empty() {
        return Err(Error::InvalidInput("no metrics selected".into()));
    }
    let mut systems: Vec<SystemId> = ctx.human.system_ids().cloned().collect();
    for metric in metrics {
        let scored = ctx.matrix.system_scores(metric)?;
        systems.retain(|s| scored.contains_key(s));
    }
    if systems.len() < 2 {
        return Err(Error::InsufficientData {
            what: "systems shared by humans and every metric",
            needed: 2,
            found: systems.len(),
        });
    }
    let mut decisions = Vec::new();
    for metric in metrics {
        for i in 0..systems.len() {
            for j in i + 1..systems.len() {
                decisions.push(decide_pair(ctx, metric, &systems[i], &systems[j])?);
            }
        }
    }
    let summary = binned_summary(&decisions, ctx.bins);
    Ok(PairAnalysis { decisions, summary })
}

/// Render decisions as CSV, one row per (pair, metric).
pub fn decisions_to_csv(decisions: &[PairDecision]) -> String {
    let mut out = csv::line([
        "language_pair",
        "metric",
        "system_a",
        "system_b",
        "delta",
        "bin",
        "metric_p",
        "metric_significant",
        "human_p",
        "human_verdict",
        "error_class",
    ]);
    for d in decisions {
        out.push_str(&csv::line([
            d.language_pair.as_str(),
            d.metric.as_str(),
            d.system_a.as_str(),
            d.system_b.as_str(),
            &d.delta.to_string(),
            &d.bin,
            &d.metric_p.to_string(),
            if d.metric_significant { "true" } else { "false" },
            &d.human_p.to_string(),
            d.human_verdict.label(),
            d.error_class.label(),
        ]));
    }
    out
}

/// Cross-metric error agreement: the diagonal counts each metric's total
/// errors; cell (row m, column m') counts errors of m on pairs where m' was
/// correct.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgreementMatrix {
    pub metrics: Vec<MetricId>,
    pub counts: Vec<Vec<u64>>,
    pub total_pairs: u64,
}

impl AgreementMatrix {
    pub fn cell(&self, row: &MetricId, column: &MetricId) -> Option<u64> {
        let r = self.metrics.iter().position(|m| m == row)?;
        let c = self.metrics.iter().position(|m| m == column)?;
        Some(self.counts[r][c])
    }
}

/// Build the agreement matrix from decisions that may span several language
/// pairs. Every metric must have decided every pair.
pub fn agreement_matrix(decisions: &[PairDecision]) -> Result<AgreementMatrix> {
    let metrics: Vec<MetricId> = decisions
        .iter()
        .map(|d| d.metric.clone())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    if metrics.is_empty() {
        return Err(Error::InvalidInput("no decisions".into()));
    }
    // Group by unordered pair within language pair.
    type PairKey = (String, SystemId, SystemId);
    let mut by_pair: BTreeMap<PairKey, BTreeMap<&MetricId, bool>> = BTreeMap::new();
    for decision in decisions {
        let (lo, hi) = if decision.system_a <= decision.system_b {
            (decision.system_a.clone(), decision.system_b.clone())
        } else {
            (decision.system_b.clone(), decision.system_a.clone())
        };
        let key = (decision.language_pair.clone(), lo, hi);
        let slot = by_pair.entry(key.clone()).or_default();
        if slot
            .insert(&decision.metric, decision.error_class.is_error())
            .is_some()
        {
            return Err(Error::CoverageMismatch(format!(
                "duplicate decision for {} / {} vs {} by {}",
                key.0, key.1, key.2, decision.metric
            )));
        }
    }
    let mut counts = vec![vec![0u64; metrics.len()]; metrics.len()];
    for (key, verdicts) in &by_pair {
        if verdicts.len() != metrics.len() {
            return Err(Error::CoverageMismatch(format!(
                "pair {} / {} vs {} decided by {} of {} metrics",
                key.0,
                key.1,
                key.2,
                verdicts.len(),
                metrics.len()
            )));
        }
        for (i, row) in metrics.iter().enumerate() {
            if !verdicts[row] {
                continue;
            }
            for (j, column) in metrics.iter().enumerate() {
                if i == j || !verdicts[column] {
                    counts[i][j] += 1;
                }
            }
        }
    }
    Ok(AgreementMatrix {
        metrics,
        counts,
        total_pairs: by_pair.len() as u64,
    })
}
