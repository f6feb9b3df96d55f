//! Significance tests for score differences between two systems: Wilcoxon
//! rank-sum on human segment scores, paired bootstrap for corpus-level
//! metrics, and the paired t-test for segment-averaged metrics, plus the
//! policy table that assigns a test to each metric.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::data_model::{EvalCorpus, MetricId, SystemId};
use crate::dist::{normal_cdf, student_t_cdf};
use crate::error::{Error, Result};
use crate::rng::{resample_indices, stream_rng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TestMethod {
    WilcoxonRankSum,
    PairedBootstrap,
    PairedT,
}

/// Which side of a comparison won, when the difference is significant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    FirstBetter,
    SecondBetter,
    None,
}

/// Outcome of one significance test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    /// Test statistic (rank sum, t, or the observed corpus delta). Infinite
    /// for zero-variance t-tests, hence the marker representation.
    #[serde(with = "crate::serde_ext::finite_or_marker")]
    pub statistic: f64,
    pub p_value: f64,
    pub alpha: f64,
    pub significant: bool,
    pub direction: Direction,
    pub method: TestMethod,
}

impl TestResult {
    fn build(
        statistic: f64,
        p_value: f64,
        alpha: f64,
        first_leads: bool,
        method: TestMethod,
    ) -> TestResult {
        let p_value = p_value.clamp(0.0, 1.0);
        let significant = p_value < alpha;
        let direction = if !significant {
            Direction::None
        } else if first_leads {
            Direction::FirstBetter
        } else {
            Direction::SecondBetter
        };
        TestResult {
            statistic,
            p_value,
            alpha,
            significant,
            direction,
            method,
        }
    }
}

/// Midranks of the pooled sample, scaled by 2 so that every rank (and every
/// rank sum) is an exact integer.
fn double_midranks(pooled: &[f64]) -> Vec<u64> {
    let mut order: Vec<usize> = (0..pooled.len()).collect();
    order.sort_by(|&a, &b| pooled[a].total_cmp(&pooled[b]));
    let mut double_ranks = vec![0u64; pooled.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && pooled[order[j + 1]] == pooled[order[i]] {
            j += 1;
        }
        // Positions i..=j (0-based) share the midrank (i+1 + j+1)/2.
        let doubled = (i + 1 + j + 1) as u64;
        for &index in &order[i..=j] {
            double_ranks[index] = doubled;
        }
        i = j + 1;
    }
    double_ranks
}

/// Exact two-sided p for the rank-sum statistic by enumerating every
/// assignment of pooled observations to the first sample.
fn wilcoxon_exact_p(double_ranks: &[u64], n_first: usize) -> f64 {
    let n = double_ranks.len();
    debug_assert!(n <= 16);
    let observed: u64 = double_ranks[..n_first].iter().sum();
    let mut total = 0u64;
    let mut at_most = 0u64;
    let mut at_least = 0u64;
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != n_first {
            continue;
        }
        let mut sum = 0u64;
        for (index, rank) in double_ranks.iter().enumerate() {
            if mask & (1 << index) != 0 {
                sum += rank;
            }
        }
        total += 1;
        if sum <= observed {
            at_most += 1;
        }
        if sum >= observed {
            at_least += 1;
        }
    }
    let tail = (at_most.min(at_least) as f64) / total as f64;
    (2.0 * tail).min(1.0)
}

/// Wilcoxon rank-sum test (two-sided) between two independent samples.
///
/// Ties get midranks. Both samples of size <= 8 take the exact enumeration
/// path; larger samples use the normal approximation with tie-corrected
/// variance and continuity correction.
pub fn wilcoxon_rank_sum(
    scores_a: &[f64],
    scores_b: &[f64],
    alpha: f64,
) -> Result<TestResult> {
    if scores_a.len() < 2 || scores_b.len() < 2 {
        return Err(Error::InsufficientData {
            what: "observations per sample for rank-sum test",
            needed: 2,
            found: scores_a.len().min(scores_b.len()),
        });
    }
    let n_a = scores_a.len();
    let n_b = scores_b.len();
    let pooled: Vec<f64> = scores_a.iter().chain(scores_b.iter()).copied().collect();
    let double_ranks = double_midranks(&pooled);
    let rank_sum_a = double_ranks[..n_a].iter().sum::<u64>() as f64 / 2.0;
    let expected = n_a as f64 * (n_a + n_b + 1) as f64 / 2.0;

    let p_value = if n_a <= 8 && n_b <= 8 {
        wilcoxon_exact_p(&double_ranks, n_a)
    } else {
        let n = (n_a + n_b) as f64;
        // Sum of t^3 - t over tie groups.
        let mut tie_term = 0.0;
        let mut sorted = pooled.clone();
        sorted.sort_by(f64::total_cmp);
        let mut i = 0;
        while i < sorted.len() {
            let mut j = i;
            while j + 1 < sorted.len() && sorted[j + 1] == sorted[i] {
                j += 1;
            }
            let t = (j - i + 1) as f64;
            tie_term += t * t * t - t;
            i = j + 1;
        }
        let variance =
            (n_a as f64 * n_b as f64 / 12.0) * ((n + 1.0) - tie_term / (n * (n - 1.0)));
        if variance <= 0.0 {
            1.0 // every observation tied: no evidence either way
        } else {
            // Continuity correction shrinks the deviation toward zero by
            // half a step, never across it.
            let deviation = rank_sum_a - expected;
            let corrected = deviation.signum() * (deviation.abs() - 0.5).max(0.0);
            let z = corrected / variance.sqrt();
            (2.0 * normal_cdf(-z.abs())).min(1.0)
        }
    };
    Ok(TestResult::build(
        rank_sum_a,
        p_value,
        alpha,
        rank_sum_a > expected,
        TestMethod::WilcoxonRankSum,
    ))
}

/// Paired t-test (two-sided) over aligned segment-score vectors.
///
/// Zero-variance differences degenerate cleanly: a nonzero mean gives p = 0,
/// a zero mean gives p = 1.
pub fn paired_t_test(
    seg_scores_a: &[f64],
    seg_scores_b: &[f64],
    alpha: f64,
) -> Result<TestResult> {
    if seg_scores_a.len() != seg_scores_b.len() {
        return Err(Error::LengthMismatch {
            left: seg_scores_a.len(),
            right: seg_scores_b.len(),
        });
    }
    let m = seg_scores_a.len();
    if m < 2 {
        return Err(Error::InsufficientData {
            what: "paired observations",
            needed: 2,
            found: m,
        });
    }
    let diffs: Vec<f64> = seg_scores_a
        .iter()
        .zip(seg_scores_b.iter())
        .map(|(a, b)| a - b)
        .collect();
    let mean = diffs.iter().sum::<f64>() / m as f64;
    let variance = diffs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (m as f64 - 1.0);
    let (statistic, p_value) = if variance == 0.0 {
        if mean == 0.0 {
            (0.0, 1.0)
        } else {
            (mean.signum() * f64::INFINITY, 0.0)
        }
    } else {
        let t = mean / (variance.sqrt() / (m as f64).sqrt());
        let p = 2.0 * (1.0 - student_t_cdf(t.abs(), (m - 1) as f64));
        (t, p)
    };
    Ok(TestResult::build(
        statistic,
        p_value,
        alpha,
        mean > 0.0,
        TestMethod::PairedT,
    ))
}

/// Knobs for the paired bootstrap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BootstrapConfig {
    /// Number of accepted resamples (B).
    pub samples: usize,
    pub seed: u64,
    pub alpha: f64,
}

impl BootstrapConfig {
    pub fn new(samples: usize, seed: u64, alpha: f64) -> Self {
        BootstrapConfig {
            samples,
            seed,
            alpha,
        }
    }
}

/// Paired bootstrap test for a corpus-level metric difference between two
/// systems of `corpus`.
///
/// `metric` scores one (hypotheses, references) pair and must return values
/// where higher is better (negate lower-is-better metrics). Segment indices
/// are resampled with replacement B times; the one-sided p is the fraction
/// of resamples in which the full-corpus winner fails to win. A resample on
/// which the metric is undefined is redrawn; more than 10% rejections is an
/// error. Deterministic for a fixed seed: resample `i` draws from its own
/// ChaCha8 stream `i + 1`.
pub fn paired_bootstrap<F>(
    metric: F,
    corpus: &EvalCorpus,
    system_a: &SystemId,
    system_b: &SystemId,
    config: BootstrapConfig,
) -> Result<TestResult>
where
    F: Fn(&[&str], &[&str]) -> Result<f64>,
{
    if config.samples < 100 {
        return Err(Error::InvalidParameter(format!(
            "bootstrap needs >= 100 samples, got {}",
            config.samples
        )));
    }
    let outputs_a = corpus.output(system_a)?;
    let outputs_b = corpus.output(system_b)?;
    let references = corpus.references();
    let n = corpus.len();

    let full_refs: Vec<&str> = references.iter().map(String::as_str).collect();
    let full_a: Vec<&str> = outputs_a.iter().map(String::as_str).collect();
    let full_b: Vec<&str> = outputs_b.iter().map(String::as_str).collect();
    let observed_delta = metric(&full_a, &full_refs)? - metric(&full_b, &full_refs)?;

    let budget = config.samples / 10;
    let mut rejected = 0usize;
    let mut losses = 0usize; // resamples where the observed winner does not win
    for resample in 0..config.samples {
        let mut rng = stream_rng(config.seed, resample as u64 + 1);
        let delta = loop {
            let indices = resample_indices(&mut rng, n);
            let hyp_a: Vec<&str> = indices.iter().map(|&i| outputs_a[i].as_str()).collect();
            let hyp_b: Vec<&str> = indices.iter().map(|&i| outputs_b[i].as_str()).collect();
            let refs: Vec<&str> = indices.iter().map(|&i| references[i].as_str()).collect();
            match (metric(&hyp_a, &refs), metric(&hyp_b, &refs)) {
                (Ok(a), Ok(b)) => break a - b,
                _ => {
                    rejected += 1;
                    if rejected > budget {
                        return Err(Error::BootstrapRejection {
                            rejected,
                            requested: config.samples,
                        });
                    }
                }
            }
        };
        if delta * observed_delta.signum() <= 0.0 {
            losses += 1;
        }
    }

    let p_value = if observed_delta == 0.0 {
        1.0
    } else {
        losses as f64 / config.samples as f64
    };
    Ok(TestResult::build(
        observed_delta,
        p_value,
        config.alpha,
        observed_delta > 0.0,
        TestMethod::PairedBootstrap,
    ))
}

/// Which significance test applies to which metric.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TestKind {
    Bootstrap,
    PairedT,
    Wilcoxon,
}

impl TestKind {
    fn parse(name: &str) -> Option<TestKind> {
        match name {
            "bootstrap" => Some(TestKind::Bootstrap),
            "paired-t" => Some(TestKind::PairedT),
            "wilcoxon" => Some(TestKind::Wilcoxon),
            _ => None,
        }
    }

    fn name(&self) -> &'static str {
        match self {
            TestKind::Bootstrap => "bootstrap",
            TestKind::PairedT => "paired-t",
            TestKind::Wilcoxon => "wilcoxon",
        }
    }
}

/// Per-metric significance test assignments.
///
/// Defaults: BLEU and TER (corpus-pooled statistics) use the paired
/// bootstrap; chrF, treated as a micro-average of sentence scores, and every
/// ingested segment-scored metric use the paired t-test. The table can be
/// overridden from a config file of `metric = test` lines with tests named
/// `bootstrap`, `paired-t`, or `wilcoxon`; `#` starts a comment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignificancePolicy {
    assignments: BTreeMap<MetricId, TestKind>,
    default: TestKind,
}

impl Default for SignificancePolicy {
    fn default() -> Self {
        let assignments = [
            (MetricId::new("BLEU"), TestKind::Bootstrap),
            (MetricId::new("TER"), TestKind::Bootstrap),
            (MetricId::new("chrF"), TestKind::PairedT),
        ]
        .into();
        SignificancePolicy {
            assignments,
            default: TestKind::PairedT,
        }
    }
}

impl SignificancePolicy {
    pub fn test_for(&self, metric: &MetricId) -> TestKind {
        self.assignments
            .get(metric)
            .copied()
            .unwrap_or(self.default)
    }

    pub fn set(&mut self, metric: MetricId, test: TestKind) {
        self.assignments.insert(metric, test);
    }

    /// Parse override lines on top of the defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let mut policy = SignificancePolicy::default();
        for (line_no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (metric, test) = line.split_once('=').ok_or_else(|| {
                Error::InvalidInput(format!(
                    "policy line {}: expected `metric = test`, found {raw:?}",
                    line_no + 1
                ))
            })?;
            let test = TestKind::parse(test.trim()).ok_or_else(|| {
                Error::InvalidInput(format!(
                    "policy line {}: unknown test {:?} (expected bootstrap, paired-t, wilcoxon)",
                    line_no + 1,
                    test.trim()
                ))
            })?;
            policy.set(MetricId::new(metric.trim()), test);
        }
        Ok(policy)
    }

    pub fn to_config_string(&self) -> String {
        let mut out = String::new();
        for (metric, test) in &self.assignments {
            out.push_str(&format!("{metric} = {}\n", test.name()));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::metrics::{corpus_bleu, BleuSmoothing};

    #[test]
    fn wilcoxon_identical_samples_not_significant() {
        let a = [1.0, 2.0, 3.0];
        let result = wilcoxon_rank_sum(&a, &a, 0.05).unwrap();
        assert_eq!(result.p_value, 1.0);
        assert!(!result.significant);
        assert_eq!(result.direction, Direction::None);
    }

    #[test]
    fn wilcoxon_exact_extreme_case() {
        // All mass at the extreme: p = 2 * 1/C(6,3) = 0.1.
        let result = wilcoxon_rank_sum(&[1.0, 2.0, 3.0], &[10.0, 11.0, 12.0], 0.05).unwrap();
        assert!((result.p_value - 0.1).abs() < 1e-12);
        assert!(!result.significant);
    }

    #[test]
    fn wilcoxon_large_disjoint_samples() {
        let a: Vec<f64> = (0..100).map(|i| i as f64).collect();
        let b: Vec<f64> = (0..100).map(|i| 1000.0 + i as f64).collect();
        let result = wilcoxon_rank_sum(&a, &b, 0.05).unwrap();
        assert!(result.p_value < 1e-10);
        assert!(result.significant);
        assert_eq!(result.direction, Direction::SecondBetter);
    }

    #[test]
    fn wilcoxon_all_tied_large_sample() {
        let a = vec![5.0; 20];
        let b = vec![5.0; 20];
        let result = wilcoxon_rank_sum(&a, &b, 0.05).unwrap();
        assert_eq!(result.p_value, 1.0);
    }

    #[test]
    fn wilcoxon_symmetry() {
        let a = [1.0, 4.0, 2.5, 8.0, 3.0, 9.0, 2.0, 7.5, 6.0];
        let b = [2.0, 5.0, 5.5, 9.0, 1.5, 10.0, 11.0, 3.5, 4.5];
        let ab = wilcoxon_rank_sum(&a, &b, 0.5).unwrap();
        let ba = wilcoxon_rank_sum(&b, &a, 0.5).unwrap();
        assert!((ab.p_value - ba.p_value).abs() < 1e-12);
    }

    #[test]
    fn wilcoxon_exact_agrees_with_normal_approximation() {
        // Sizes 7-8: the exact path and the tie-corrected, continuity-
        // corrected normal approximation stay within 0.02 absolute p.
        use crate::dist::normal_cdf;
        use crate::rng::{next_below, stream_rng};
        for case in 0..200u64 {
            let mut rng = stream_rng(77, case);
            let n_a = 7 + next_below(&mut rng, 2) as usize;
            let n_b = 7 + next_below(&mut rng, 2) as usize;
            // Continuous draws: tie-free, the regime the approximation is
            // built for (tied data is covered by the enumeration oracle).
            let draw = |rng: &mut rand_chacha::ChaCha8Rng, n: usize| -> Vec<f64> {
                (0..n)
                    .map(|_| next_below(rng, 1 << 30) as f64 / (1u64 << 30) as f64)
                    .collect()
            };
            let a = draw(&mut rng, n_a);
            let b = draw(&mut rng, n_b);
            let exact = wilcoxon_rank_sum(&a, &b, 0.05).unwrap();

            // Normal approximation, computed here from the same definitions.
            let mut pooled: Vec<f64> = a.iter().chain(b.iter()).copied().collect();
            let w = exact.statistic;
            let n = pooled.len() as f64;
            let expected = n_a as f64 * (n + 1.0) / 2.0;
            pooled.sort_by(f64::total_cmp);
            let mut tie_term = 0.0;
            let mut i = 0;
            while i < pooled.len() {
                let mut j = i;
                while j + 1 < pooled.len() && pooled[j + 1] == pooled[i] {
                    j += 1;
                }
                let t = (j - i + 1) as f64;
                tie_term += t * t * t - t;
                i = j + 1;
            }
            let variance = (n_a as f64 * n_b as f64 / 12.0)
                * ((n + 1.0) - tie_term / (n * (n - 1.0)));
            let approx = if variance <= 0.0 {
                1.0
            } else {
                let deviation = w - expected;
                let corrected = deviation.signum() * (deviation.abs() - 0.5).max(0.0);
                let z = corrected / variance.sqrt();
                (2.0 * normal_cdf(-z.abs())).min(1.0)
            };
            assert!(
                (exact.p_value - approx).abs() < 0.02,
                "case {case}: exact {} vs approx {approx} (a={a:?}, b={b:?})",
                exact.p_value
            );
        }
    }

    #[test]
    fn t_test_identical_is_p1() {
        let a = [0.3, 0.5, 0.9, 0.2];
        let result = paired_t_test(&a, &a, 0.05).unwrap();
        assert_eq!(result.p_value, 1.0);
        assert!(!result.significant);
    }

    #[test]
    fn t_test_constant_positive_difference() {
        let a = [2.0, 3.0, 4.0, 5.0];
        let b = [1.0, 2.0, 3.0, 4.0];
        let result = paired_t_test(&a, &b, 0.05).unwrap();
        assert_eq!(result.p_value, 0.0);
        assert!(result.significant);
        assert_eq!(result.direction, Direction::FirstBetter);
        assert_eq!(result.statistic, f64::INFINITY);
    }

    #[test]
    fn t_test_hand_case() {
        // d = [0.5, -0.2, 0.3, 0.1, -0.1]: mean .12, sd .28636, t = .937
        let a = [0.5, 0.0, 0.3, 0.1, 0.0];
        let b = [0.0, 0.2, 0.0, 0.0, 0.1];
        let result = paired_t_test(&a, &b, 0.05).unwrap();
        assert!((result.statistic - 0.93699).abs() < 1e-4);
        assert!((result.p_value - 0.4018).abs() < 1e-3);
        assert!(!result.significant);
    }

    #[test]
    fn t_test_swap_flips_direction() {
        let a = [5.0, 6.0, 7.0, 8.0, 5.5];
        let b = [1.0, 2.0, 1.5, 2.5, 1.2];
        let ab = paired_t_test(&a, &b, 0.05).unwrap();
        let ba = paired_t_test(&b, &a, 0.05).unwrap();
        assert!((ab.p_value - ba.p_value).abs() < 1e-12);
        assert_eq!(ab.direction, Direction::FirstBetter);
        assert_eq!(ba.direction, Direction::SecondBetter);
    }

    fn fixture_corpus() -> EvalCorpus {
        let refs: Vec<String> = (0..20)
            .map(|i| format!("segment {i} of the reference text"))
            .collect();
        let good: Vec<String> = refs.clone();
        let bad: Vec<String> = (0..20).map(|i| format!("zzz qqq {i}")).collect();
        let systems: BTreeMap<SystemId, Vec<String>> = [
            (SystemId::new("good"), good),
            (SystemId::new("bad"), bad),
        ]
        .into();
        EvalCorpus::new("xx-yy", refs.clone(), refs, systems).unwrap()
    }

    fn bleu_fn(hyps: &[&str], refs: &[&str]) -> Result<f64> {
        Ok(corpus_bleu(hyps, refs, 4, BleuSmoothing::ExpFloor)?.value)
    }

    #[test]
    fn bootstrap_identical_outputs_not_significant() {
        let corpus = fixture_corpus();
        let result = paired_bootstrap(
            bleu_fn,
            &corpus,
            &SystemId::new("good"),
            &SystemId::new("good"),
            BootstrapConfig::new(200, 7, 0.05),
        )
        .unwrap();
        assert_eq!(result.p_value, 1.0);
        assert!(!result.significant);
        assert_eq!(result.direction, Direction::None);
    }

    #[test]
    fn bootstrap_clear_winner_has_p0() {
        let corpus = fixture_corpus();
        let result = paired_bootstrap(
            bleu_fn,
            &corpus,
            &SystemId::new("good"),
            &SystemId::new("bad"),
            BootstrapConfig::new(200, 7, 0.05),
        )
        .unwrap();
        assert_eq!(result.p_value, 0.0);
        assert!(result.significant);
        assert_eq!(result.direction, Direction::FirstBetter);
    }

    #[test]
    fn bootstrap_is_deterministic_for_seed() {
        let corpus = fixture_corpus();
        let run = || {
            paired_bootstrap(
                bleu_fn,
                &corpus,
                &SystemId::new("good"),
                &SystemId::new("bad"),
                BootstrapConfig::new(150, 42, 0.05),
            )
            .unwrap()
        };
        let first = run();
        let second = run();
        assert_eq!(first.p_value.to_bits(), second.p_value.to_bits());
        assert_eq!(first.statistic.to_bits(), second.statistic.to_bits());
    }

    #[test]
    fn bootstrap_swap_preserves_p_and_flips_direction() {
        let corpus = fixture_corpus();
        let config = BootstrapConfig::new(150, 9, 0.05);
        let ab = paired_bootstrap(
            bleu_fn,
            &corpus,
            &SystemId::new("good"),
            &SystemId::new("bad"),
            config,
        )
        .unwrap();
        let ba = paired_bootstrap(
            bleu_fn,
            &corpus,
            &SystemId::new("bad"),
            &SystemId::new("good"),
            config,
        )
        .unwrap();
        assert_eq!(ab.p_value, ba.p_value);
        assert_eq!(ab.direction, Direction::FirstBetter);
        assert_eq!(ba.direction, Direction::SecondBetter);
        assert_eq!(ab.statistic, -ba.statistic);
    }

    #[test]
    fn bootstrap_rejects_undefined_metric_runs() {
        let corpus = fixture_corpus();
        let failing = |_: &[&str], _: &[&str]| -> Result<f64> {
            Err(Error::InvalidInput("always undefined".into()))
        };
        assert!(matches!(
            paired_bootstrap(
                failing,
                &corpus,
                &SystemId::new("good"),
                &SystemId::new("bad"),
                BootstrapConfig::new(100, 1, 0.05),
            ),
            Err(Error::InvalidInput(_)) | Err(Error::BootstrapRejection { .. })
        ));
    }

    #[test]
    fn policy_defaults_and_overrides() {
        let policy = SignificancePolicy::default();
        assert_eq!(policy.test_for(&MetricId::new("BLEU")), TestKind::Bootstrap);
        assert_eq!(policy.test_for(&MetricId::new("chrF")), TestKind::PairedT);
        assert_eq!(policy.test_for(&MetricId::new("YiSi-1")), TestKind::PairedT);

        let parsed = SignificancePolicy::parse(
            "# comment\nBLEU = paired-t\nMyMetric = bootstrap  # trailing\n",
        )
        .unwrap();
        assert_eq!(parsed.test_for(&MetricId::new("BLEU")), TestKind::PairedT);
        assert_eq!(
            parsed.test_for(&MetricId::new("MyMetric")),
            TestKind::Bootstrap
        );
        assert!(SignificancePolicy::parse("BLEU = banana").is_err());
    }

    #[test]
    fn test_result_json_handles_infinite_statistic() {
        let a = [2.0, 3.0];
        let b = [1.0, 2.0];
        let result = paired_t_test(&a, &b, 0.05).unwrap();
        let json = serde_json::to_string(&result).unwrap();
        assert!(json.contains("\"inf\""));
        let back: TestResult = serde_json::from_str(&json).unwrap();
        assert_eq!(back, result);
    }
}
