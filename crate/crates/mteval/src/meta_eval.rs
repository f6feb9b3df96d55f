//! Correlation-based meta-evaluation of metrics against DA system scores:
//! correlations with and without outlier systems, top-N and rolling-window
//! curves, repeated subsampling, the Williams test for dependent
//! correlations, and metric ranking.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::csv;
use crate::data_model::{MetricId, ScoreMatrix, SystemId};
use crate::dist::student_t_cdf;
use crate::error::{Error, Result};
use crate::rng::{sample_without_replacement, stream_rng};
use crate::robust_stats::{detect_outliers, pearson, OutlierReport};

/// A Pearson correlation that may be undefined (zero variance or too few
/// systems). Undefined values are carried through reports rather than
/// skipped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Correlation {
    Defined(f64),
    Undefined { reason: String },
}

impl Correlation {
    pub fn value(&self) -> Option<f64> {
        match self {
            Correlation::Defined(r) => Some(*r),
            Correlation::Undefined { .. } => None,
        }
    }

    fn csv_cells(&self) -> (String, String) {
        match self {
            Correlation::Defined(r) => (r.to_string(), String::new()),
            Correlation::Undefined { reason } => (String::new(), reason.clone()),
        }
    }
}

/// Pearson r over a set of systems, pairing DA with metric scores;
/// degenerate inputs yield `Undefined`. The summation order is canonical
/// (system-id order) so the same system set gives the bit-identical r no
/// matter which analysis produced it.
fn correlate_systems(
    systems: &[SystemId],
    da: &BTreeMap<SystemId, f64>,
    scores: &BTreeMap<SystemId, f64>,
) -> Correlation {
    let mut order = systems.to_vec();
    order.sort();
    let x: Vec<f64> = order.iter().map(|s| da[s]).collect();
    let y: Vec<f64> = order.iter().map(|s| scores[s]).collect();
    match pearson(&x, &y) {
        Ok(r) => Correlation::Defined(r),
        Err(Error::UndefinedCorrelation(reason)) => Correlation::Undefined {
            reason: reason.to_string(),
        },
        Err(Error::InsufficientData { found, .. }) => Correlation::Undefined {
            reason: format!("only {found} systems"),
        },
        Err(_) => unreachable!("aligned inputs"),
    }
}

/// Systems scored by both DA and the metric, in id order.
fn common_systems(
    da: &BTreeMap<SystemId, f64>,
    scores: &BTreeMap<SystemId, f64>,
) -> Vec<SystemId> {
    da.keys().filter(|s| scores.contains_key(*s)).cloned().collect()
}

/// One metric's correlations over all systems and over non-outliers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationEntry {
    pub all: Correlation,
    pub n_all: usize,
    pub without_outliers: Option<Correlation>,
    pub n_without: Option<usize>,
}

/// Per-metric correlation table for one language pair, with and without the
/// outlier systems flagged on the DA scores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationTable {
    pub language_pair: String,
    pub outlier_report: OutlierReport,
    pub entries: BTreeMap<MetricId, CorrelationEntry>,
}

impl CorrelationTable {
    pub fn to_csv(&self) -> String {
        let mut out = csv::line(["language_pair", "metric", "condition", "n", "r", "note"]);
        for (metric, entry) in &self.entries {
            let (r, note) = entry.all.csv_cells();
            out.push_str(&csv::line([
                self.language_pair.as_str(),
                metric.as_str(),
                "all",
                &entry.n_all.to_string(),
                &r,
                &note,
            ]));
            if let (Some(without), Some(n)) = (&entry.without_outliers, entry.n_without) {
                let (r, note) = without.csv_cells();
                out.push_str(&csv::line([
                    self.language_pair.as_str(),
                    metric.as_str(),
                    "without-outliers",
                    &n.to_string(),
                    &r,
                    &note,
                ]));
            }
        }
        out
    }
}

/// Correlation of every metric in `matrix` with the DA scores, over all
/// common systems and, when the DA scores contain outliers, over the
/// retained systems only. Outliers are detected on the DA scores at
/// `cutoff`, never on metric scores.
pub fn correlations_with_without_outliers(
    language_pair: &str,
    da: &BTreeMap<SystemId, f64>,
    matrix: &ScoreMatrix,
    cutoff: f64,
) -> Result<CorrelationTable> {
    if matrix.metrics().count() == 0 {
        return Err(Error::InvalidInput("score matrix has no metrics".into()));
    }
    let outlier_report = detect_outliers(da, cutoff)?;
    let mut entries = BTreeMap::new();
    for metric in matrix.metrics() {
        let scores = matrix.system_scores(metric)?;
        let common = common_systems(da, scores);
        let all = correlate_systems(&common, da, scores);
        let flagged: Vec<SystemId> = common
            .iter()
            .filter(|s| outlier_report.outliers.contains(*s))
            .cloned()
            .collect();
        let (without_outliers, n_without) = if flagged.is_empty() {
            (None, None)
        } else {
            let retained: Vec<SystemId> = common
                .iter()
                .filter(|s| !outlier_report.outliers.contains(*s))
                .cloned()
                .collect();
            let r = correlate_systems(&retained, da, scores);
            (Some(r), Some(retained.len()))
        };
        entries.insert(
            metric.clone(),
            CorrelationEntry {
                all,
                n_all: common.len(),
                without_outliers,
                n_without,
            },
        );
    }
    Ok(CorrelationTable {
        language_pair: language_pair.to_string(),
        outlier_report,
        entries,
    })
}

/// Sort systems by DA score; ties break lexicographically by system id for
/// reproducibility.
fn sorted_by_da(
    systems: &[SystemId],
    da: &BTreeMap<SystemId, f64>,
    descending: bool,
) -> Vec<SystemId> {
    let mut sorted = systems.to_vec();
    sorted.sort_by(|a, b| {
        let by_score = if descending {
            da[b].total_cmp(&da[a])
        } else {
            da[a].total_cmp(&da[b])
        };
        by_score.then_with(|| a.cmp(b))
    });
    sorted
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopNPoint {
    pub n: usize,
    pub r: Correlation,
}

/// Correlation over the top N systems by DA score, for N from all systems
/// down to `n_min`.
pub fn topn_curve(
    da: &BTreeMap<SystemId, f64>,
    scores: &BTreeMap<SystemId, f64>,
    n_min: usize,
) -> Result<Vec<TopNPoint>> {
    if n_min < 3 {
        return Err(Error::InvalidParameter(
            "top-N needs n_min >= 3 for a defined correlation".into(),
        ));
    }
    let common = common_systems(da, scores);
    if common.len() < n_min {
        return Err(Error::InsufficientData {
            what: "systems for top-N curve",
            needed: n_min,
            found: common.len(),
        });
    }
    let ranked = sorted_by_da(&common, da, true);
    let mut curve = Vec::with_capacity(ranked.len() - n_min + 1);
    for n in (n_min..=ranked.len()).rev() {
        curve.push(TopNPoint {
            n,
            r: correlate_systems(&ranked[..n], da, scores),
        });
    }
    Ok(curve)
}

pub fn topn_curve_to_csv(curve: &[TopNPoint]) -> String {
    let mut out = csv::line(["n", "r", "note"]);
    for point in curve {
        let (r, note) = point.r.csv_cells();
        out.push_str(&csv::line([point.n.to_string().as_str(), &r, &note]));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowPoint {
    /// Start index in DA-ascending order (0 = worst systems first).
    pub start: usize,
    pub r: Correlation,
}

/// Correlations over a rolling window of fixed size, DA-ascending.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowCurve {
    pub window: usize,
    pub points: Vec<WindowPoint>,
}

impl WindowCurve {
    pub fn to_csv(&self) -> String {
        let mut out = csv::line(["window", "start", "r", "note"]);
        for point in &self.points {
            let (r, note) = point.r.csv_cells();
            out.push_str(&csv::line([
                self.window.to_string().as_str(),
                &point.start.to_string(),
                &r,
                &note,
            ]));
        }
        out
    }
}

/// Correlation of a rolling window of `window` systems, starting from the
/// worst systems and stepping one system at a time. Produces
/// `#systems - window + 1` points.
pub fn rolling_window_curve(
    da: &BTreeMap<SystemId, f64>,
    scores: &BTreeMap<SystemId, f64>,
    window: usize,
) -> Result<WindowCurve> {
    if window < 3 {
        return Err(Error::InvalidParameter(
            "window must be >= 3 for a defined correlation".into(),
        ));
    }
    let common = common_systems(da, scores);
    if common.len() < window {
        return Err(Error::InsufficientData {
            what: "systems for rolling window",
            needed: window,
            found: common.len(),
        });
    }
    let ranked = sorted_by_da(&common, da, false);
    let points = (0..=ranked.len() - window)
        .map(|start| WindowPoint {
            start,
            r: correlate_systems(&ranked[start..start + window], da, scores),
        })
        .collect();
    Ok(WindowCurve { window, points })
}

/// Correlation samples from repeated system subsampling, grouped by which
/// designated outlier systems the subsample contains.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsampleReport {
    pub k: usize,
    pub trials: usize,
    pub seed: u64,
    /// metric -> group label -> r per trial that fell in the group. The
    /// label is "none" or the sorted designated outliers present, joined
    /// with "+".
    pub samples: BTreeMap<MetricId, BTreeMap<String, Vec<Correlation>>>,
}

impl SubsampleReport {
    pub fn to_csv(&self) -> String {
        let mut out = csv::line(["metric", "group", "r", "note"]);
        for (metric, groups) in &self.samples {
            for (group, samples) in groups {
                for sample in samples {
                    let (r, note) = sample.csv_cells();
                    out.push_str(&csv::line([metric.as_str(), group, &r, &note]));
                }
            }
        }
        out
    }
}

fn group_label(present: &BTreeSet<&SystemId>) -> String {
    if present.is_empty() {
        "none".to_string()
    } else {
        present
            .iter()
            .map(|s| s.as_str())
            .collect::<Vec<_>>()
            .join("+")
    }
}

/// Draw `trials` subsamples of `k` systems (uniformly, without replacement,
/// seeded; trial `i` uses ChaCha8 stream `i`) and compute each metric's
/// correlation with DA on every subsample.
pub fn subsample_correlations(
    da: &BTreeMap<SystemId, f64>,
    matrix: &ScoreMatrix,
    metrics: &[MetricId],
    k: usize,
    trials: usize,
    seed: u64,
    designated_outliers: &BTreeSet<SystemId>,
) -> Result<SubsampleReport> {
    if trials < 1 {
        return Err(Error::InvalidParameter("trials must be >= 1".into()));
    }
    let mut pool: Option<Vec<SystemId>> = None;
    for metric in metrics {
        let scores = matrix.system_scores(metric)?;
        let common = common_systems(da, scores);
        pool = Some(match pool {
            None => common,
            Some(prev) => prev.into_iter().filter(|s| common.contains(s)).collect(),
        });
    }
    let pool = pool.ok_or_else(|| Error::InvalidInput("no metrics selected".into()))?;
    if k > pool.len() {
        return Err(Error::InvalidParameter(format!(
            "subsample size {k} exceeds the {} systems scored by every metric",
            pool.len()
        )));
    }
    if k == 0 {
        return Err(Error::InvalidParameter("subsample size must be >= 1".into()));
    }

    let mut samples: BTreeMap<MetricId, BTreeMap<String, Vec<Correlation>>> = BTreeMap::new();
    for trial in 0..trials {
        let mut rng = stream_rng(seed, trial as u64);
        let mut drawn: Vec<SystemId> = sample_without_replacement(&mut rng, pool.len(), k)
            .into_iter()
            .map(|i| pool[i].clone())
            .collect();
        drawn.sort();
        let present: BTreeSet<&SystemId> = drawn
            .iter()
            .filter(|s| designated_outliers.contains(*s))
            .collect();
        let label = group_label(&present);
        for metric in metrics {
            let scores = matrix.system_scores(metric)?;
            let r = correlate_systems(&drawn, da, scores);
            samples
                .entry(metric.clone())
                .or_default()
                .entry(label.clone())
                .or_default()
                .push(r);
        }
    }
    Ok(SubsampleReport {
        k,
        trials,
        seed,
        samples,
    })
}

/// Williams test outcome for one dependent-correlation comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WilliamsResult {
    #[serde(with = "crate::serde_ext::finite_or_marker")]
    pub t: f64,
    /// One-sided p: small when r12 is significantly larger than r13.
    pub p: f64,
}

/// Williams test for the difference between two dependent correlations
/// sharing one variable: r12 and r13 share variable 1, r23 is the
/// correlation between variables 2 and 3. One-sided, Student-t with n-3
/// degrees of freedom.
pub fn williams_test(r12: f64, r13: f64, r23: f64, n: usize) -> Result<WilliamsResult> {
    if n < 4 {
        return Err(Error::InsufficientData {
            what: "observations for Williams test",
            needed: 4,
            found: n,
        });
    }
    for r in [r12, r13, r23] {
        if !(-1.0..=1.0).contains(&r) {
            return Err(Error::InvalidParameter(format!(
                "correlation {r} outside [-1, 1]"
            )));
        }
    }
    let k = 1.0 - r12 * r12 - r13 * r13 - r23 * r23 + 2.0 * r12 * r13 * r23;
    if k < -1e-9 {
        return Err(Error::InvalidCorrelationMatrix { k });
    }
    let k = k.max(0.0);
    let nf = n as f64;
    let numerator = (nf - 1.0) * (1.0 + r23);
    let denominator =
        2.0 * k * (nf - 1.0) / (nf - 3.0) + ((r12 + r13).powi(2) / 4.0) * (1.0 - r23).powi(3);
    let t = if r12 == r13 {
        0.0
    } else if denominator <= 0.0 {
        // Degenerate but direction-determined: the correlations differ while
        // the implied noise term vanishes.
        (r12 - r13).signum() * f64::INFINITY
    } else {
        (r12 - r13) * (numerator / denominator).sqrt()
    };
    let p = 1.0 - student_t_cdf(t, nf - 3.0);
    Ok(WilliamsResult { t, p })
}

/// Metrics not significantly outperformed by any other metric under the
/// one-sided Williams test on |r| at `alpha`. Always non-empty.
///
/// The comparison uses correlation magnitudes: each metric's score vector is
/// sign-aligned with DA (so lower-is-better metrics are not penalized), and
/// the inter-metric correlation gets the matching sign adjustment.
pub fn rank_metrics(
    da: &BTreeMap<SystemId, f64>,
    matrix: &ScoreMatrix,
    metrics: &[MetricId],
    alpha: f64,
) -> Result<BTreeSet<MetricId>> {
    if metrics.is_empty() {
        return Err(Error::InvalidInput("no metrics selected".into()));
    }
    if metrics.len() == 1 {
        return Ok(metrics.iter().cloned().collect());
    }
    let mut common: Vec<SystemId> = common_systems(da, matrix.system_scores(&metrics[0])?);
    for metric in &metrics[1..] {
        let scores = matrix.system_scores(metric)?;
        common.retain(|s| scores.contains_key(s));
    }
    if common.len() < 4 {
        return Err(Error::InsufficientData {
            what: "systems shared by every metric",
            needed: 4,
            found: common.len(),
        });
    }
    let da_vec: Vec<f64> = common.iter().map(|s| da[s]).collect();
    let mut r_with_da = BTreeMap::new();
    let mut vectors = BTreeMap::new();
    for metric in metrics {
        let scores = matrix.system_scores(metric)?;
        let vector: Vec<f64> = common.iter().map(|s| scores[s]).collect();
        r_with_da.insert(metric.clone(), pearson(&da_vec, &vector)?);
        vectors.insert(metric.clone(), vector);
    }

    let mut winners = BTreeSet::new();
    for metric in metrics {
        let r_self = r_with_da[metric];
        let mut beaten = false;
        for challenger in metrics {
            if challenger == metric {
                continue;
            }
            let r_chal = r_with_da[challenger];
            let r23 = pearson(&vectors[challenger], &vectors[metric])?
                * r_chal.signum()
                * r_self.signum();
            let outcome =
                williams_test(r_chal.abs(), r_self.abs(), r23.clamp(-1.0, 1.0), common.len())?;
            if outcome.p < alpha {
                beaten = true;
                break;
            }
        }
        if !beaten {
            winners.insert(metric.clone());
        }
    }
    debug_assert!(!winners.is_empty() || metrics.is_empty());
    if winners.is_empty() {
        // Cannot happen with a coherent one-sided test (the metric with the
        // largest |r| is never beaten), but never return an empty winner set.
        winners.insert(
            metrics
                .iter()
                .max_by(|a, b| r_with_da[*a].abs().total_cmp(&r_with_da[*b].abs()))
                .expect("non-empty metrics")
                .clone(),
        );
    }
    Ok(winners)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn system_map(pairs: &[(&str, f64)]) -> BTreeMap<SystemId, f64> {
        pairs
            .iter()
            .map(|(id, v)| (SystemId::new(*id), *v))
            .collect()
    }

    fn matrix_of(metric: &str, pairs: &[(&str, f64)]) -> ScoreMatrix {
        let mut matrix = ScoreMatrix::new();
        for (id, v) in pairs {
            matrix
                .insert_system_score(MetricId::new(metric), SystemId::new(*id), *v)
                .unwrap();
        }
        matrix
    }

    #[test]
    fn with_without_outliers_basic() {
        // Systems: linear relation except the outlier E, which the metric
        // also ranks lowest, inflating r.
        let da = system_map(&[
            ("A", 0.30),
            ("B", 0.20),
            ("C", 0.10),
            ("D", 0.25),
            ("E", -4.0),
        ]);
        let metric = matrix_of(
            "M",
            &[("A", 0.1), ("B", 0.7), ("C", 0.3), ("D", 0.9), ("E", -9.0)],
        );
        let table =
            correlations_with_without_outliers("xx-yy", &da, &metric, 2.5).unwrap();
        let entry = &table.entries[&MetricId::new("M")];
        assert_eq!(entry.n_all, 5);
        assert_eq!(entry.n_without, Some(4));
        let r_all = entry.all.value().unwrap();
        let r_without = entry.without_outliers.as_ref().unwrap().value().unwrap();
        assert!(r_all > 0.9, "outlier inflates r: {r_all}");
        assert!(r_without < 0.5, "without outlier r collapses: {r_without}");
        assert!(table
            .outlier_report
            .outliers
            .contains(&SystemId::new("E")));
    }

    #[test]
    fn no_outliers_means_single_condition() {
        let da = system_map(&[("A", 0.1), ("B", 0.2), ("C", 0.3), ("D", 0.4)]);
        let metric = matrix_of("M", &[("A", 0.1), ("B", 0.2), ("C", 0.3), ("D", 0.4)]);
        let table =
            correlations_with_without_outliers("xx-yy", &da, &metric, 2.5).unwrap();
        let entry = &table.entries[&MetricId::new("M")];
        assert_eq!(entry.all.value().unwrap(), 1.0);
        assert!(entry.without_outliers.is_none());
    }

    #[test]
    fn zero_variance_metric_reports_undefined() {
        let da = system_map(&[("A", 0.1), ("B", 0.2), ("C", 0.3), ("D", 4.0)]);
        let metric = matrix_of("M", &[("A", 5.0), ("B", 5.0), ("C", 5.0), ("D", 5.0)]);
        let table =
            correlations_with_without_outliers("xx-yy", &da, &metric, 2.5).unwrap();
        let entry = &table.entries[&MetricId::new("M")];
        assert!(matches!(entry.all, Correlation::Undefined { .. }));
    }

    #[test]
    fn topn_counts_and_perfect_metric() {
        let systems: Vec<(String, f64)> =
            (0..10).map(|i| (format!("s{i:02}"), i as f64 * 0.1)).collect();
        let da: BTreeMap<SystemId, f64> = systems
            .iter()
            .map(|(id, v)| (SystemId::new(id.clone()), *v))
            .collect();
        let curve = topn_curve(&da, &da, 4).unwrap();
        assert_eq!(curve.len(), 7);
        assert_eq!(curve[0].n, 10);
        assert_eq!(curve.last().unwrap().n, 4);
        for point in &curve {
            assert!((point.r.value().unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn topn_full_equals_direct_pearson() {
        let da = system_map(&[("a", 0.9), ("b", 0.2), ("c", 0.5), ("d", 0.1), ("e", 0.7)]);
        let scores = system_map(&[("a", 60.0), ("b", 20.0), ("c", 40.0), ("d", 25.0), ("e", 50.0)]);
        let curve = topn_curve(&da, &scores, 4).unwrap();
        let ids: Vec<SystemId> = da.keys().cloned().collect();
        let expected = correlate_systems(&ids, &da, &scores).value().unwrap();
        assert_eq!(curve[0].r.value().unwrap(), expected);
    }

    #[test]
    fn topn_constructed_case_flips_sign_at_the_top() {
        // Top four systems are exactly anti-linear with the metric while the
        // full six-system correlation is dominated by the quality gap.
        let da = system_map(&[
            ("s1", 10.0),
            ("s2", 9.5),
            ("s3", 9.0),
            ("s4", 8.5),
            ("s5", 2.0),
            ("s6", 1.0),
        ]);
        let scores = system_map(&[
            ("s1", 5.0),
            ("s2", 6.0),
            ("s3", 7.0),
            ("s4", 8.0),
            ("s5", 1.0),
            ("s6", 0.0),
        ]);
        let curve = topn_curve(&da, &scores, 4).unwrap();
        let full = curve[0].r.value().unwrap();
        let top4 = curve.last().unwrap().r.value().unwrap();
        assert!(full > 0.9, "full r = {full}");
        assert!((top4 + 1.0).abs() < 1e-12, "top-4 r = {top4}");
    }

    #[test]
    fn curves_invariant_under_system_relabeling() {
        let da = system_map(&[
            ("a", 0.9),
            ("b", 0.2),
            ("c", 0.5),
            ("d", 0.1),
            ("e", 0.7),
            ("f", 0.4),
        ]);
        let scores = system_map(&[
            ("a", 8.0),
            ("b", 3.0),
            ("c", 6.0),
            ("d", 2.5),
            ("e", 7.0),
            ("f", 4.5),
        ]);
        // Relabel by reversing names; scores follow their system.
        let rename = |id: &SystemId| SystemId::new(format!("zz-{id}"));
        let da2: BTreeMap<SystemId, f64> = da.iter().map(|(k, v)| (rename(k), *v)).collect();
        let scores2: BTreeMap<SystemId, f64> =
            scores.iter().map(|(k, v)| (rename(k), *v)).collect();
        let top1: Vec<_> = topn_curve(&da, &scores, 4)
            .unwrap()
            .into_iter()
            .map(|p| p.r)
            .collect();
        let top2: Vec<_> = topn_curve(&da2, &scores2, 4)
            .unwrap()
            .into_iter()
            .map(|p| p.r)
            .collect();
        assert_eq!(top1, top2);
        let roll1: Vec<_> = rolling_window_curve(&da, &scores, 4)
            .unwrap()
            .points
            .into_iter()
            .map(|p| p.r)
            .collect();
        let roll2: Vec<_> = rolling_window_curve(&da2, &scores2, 4)
            .unwrap()
            .points
            .into_iter()
            .map(|p| p.r)
            .collect();
        assert_eq!(roll1, roll2);
    }

    #[test]
    fn da_ties_break_lexicographically() {
        let da = system_map(&[("x", 1.0), ("m", 1.0), ("a", 1.0), ("z", 0.5), ("q", 2.0)]);
        let scores = system_map(&[("x", 1.0), ("m", 2.0), ("a", 3.0), ("z", 4.0), ("q", 5.0)]);
        let ranked = sorted_by_da(&da.keys().cloned().collect::<Vec<_>>(), &da, true);
        let names: Vec<&str> = ranked.iter().map(SystemId::as_str).collect();
        assert_eq!(names, ["q", "a", "m", "x", "z"]);
        // And therefore the curve is reproducible as-is.
        let again = topn_curve(&da, &scores, 4).unwrap();
        assert_eq!(topn_curve(&da, &scores, 4).unwrap(), again);
    }

    #[test]
    fn zero_variance_window_reports_undefined_points() {
        let da = system_map(&[
            ("a", 1.0),
            ("b", 2.0),
            ("c", 3.0),
            ("d", 4.0),
            ("e", 5.0),
        ]);
        let flat: BTreeMap<SystemId, f64> = da.keys().map(|k| (k.clone(), 3.0)).collect();
        let curve = rolling_window_curve(&da, &flat, 4).unwrap();
        assert_eq!(curve.points.len(), 2);
        for point in &curve.points {
            assert!(matches!(point.r, Correlation::Undefined { .. }));
        }
        // Undefined points are carried into the CSV, not dropped.
        let csv = curve.to_csv();
        assert_eq!(csv.lines().count(), 3);
        assert!(csv.contains("zero variance"));
    }

    #[test]
    fn rolling_window_anti_linear_is_minus_one() {
        let da = system_map(&[
            ("a", 1.0),
            ("b", 2.0),
            ("c", 3.0),
            ("d", 4.0),
            ("e", 5.0),
            ("f", 6.0),
            ("g", 7.0),
            ("h", 8.0),
        ]);
        let negated: BTreeMap<SystemId, f64> =
            da.iter().map(|(k, v)| (k.clone(), -v)).collect();
        let curve = rolling_window_curve(&da, &negated, 4).unwrap();
        assert_eq!(curve.points.len(), 5);
        for point in &curve.points {
            assert!((point.r.value().unwrap() + 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn window_equal_to_system_count_is_single_full_point() {
        let da = system_map(&[("a", 1.0), ("b", 3.0), ("c", 2.0), ("d", 5.0)]);
        let scores = system_map(&[("a", 2.0), ("b", 5.0), ("c", 1.0), ("d", 9.0)]);
        let curve = rolling_window_curve(&da, &scores, 4).unwrap();
        assert_eq!(curve.points.len(), 1);
        let ids: Vec<SystemId> = da.keys().cloned().collect();
        assert_eq!(
            curve.points[0].r,
            correlate_systems(&ids, &da, &scores)
        );
    }

    #[test]
    fn subsample_full_k_matches_full_r_and_is_deterministic() {
        let da = system_map(&[("a", 1.0), ("b", 3.0), ("c", 2.0), ("d", 5.0), ("e", 4.0)]);
        let matrix = matrix_of("M", &[("a", 1.5), ("b", 2.9), ("c", 2.4), ("d", 4.1), ("e", 4.4)]);
        let outliers = BTreeSet::new();
        let metrics = [MetricId::new("M")];
        let report =
            subsample_correlations(&da, &matrix, &metrics, 5, 8, 13, &outliers).unwrap();
        let ids: Vec<SystemId> = da.keys().cloned().collect();
        let full = correlate_systems(&ids, &da, matrix.system_scores(&metrics[0]).unwrap());
        let group = &report.samples[&metrics[0]]["none"];
        assert_eq!(group.len(), 8);
        for sample in group {
            assert_eq!(sample, &full);
        }
        let again =
            subsample_correlations(&da, &matrix, &metrics, 5, 8, 13, &outliers).unwrap();
        assert_eq!(report, again);
    }

    #[test]
    fn subsample_groups_by_outlier_membership() {
        let da = system_map(&[("a", 1.0), ("b", 2.0), ("c", 3.0), ("d", 4.0), ("out", -9.0)]);
        let matrix = matrix_of(
            "M",
            &[("a", 1.0), ("b", 2.2), ("c", 2.9), ("d", 4.2), ("out", -8.0)],
        );
        let outliers: BTreeSet<SystemId> = [SystemId::new("out")].into();
        let metrics = [MetricId::new("M")];
        let report =
            subsample_correlations(&da, &matrix, &metrics, 3, 64, 99, &outliers).unwrap();
        let groups = &report.samples[&metrics[0]];
        assert!(groups.contains_key("none"));
        assert!(groups.contains_key("out"));
        let total: usize = groups.values().map(Vec::len).sum();
        assert_eq!(total, 64);
    }

    #[test]
    fn subsample_k_too_large_errors() {
        let da = system_map(&[("a", 1.0), ("b", 2.0), ("c", 3.0)]);
        let matrix = matrix_of("M", &[("a", 1.0), ("b", 2.0), ("c", 3.0)]);
        assert!(subsample_correlations(
            &da,
            &matrix,
            &[MetricId::new("M")],
            4,
            1,
            0,
            &BTreeSet::new()
        )
        .is_err());
    }

    #[test]
    fn williams_zero_numerator_is_half() {
        let result = williams_test(0.8, 0.8, 0.5, 10).unwrap();
        assert_eq!(result.t, 0.0);
        assert!((result.p - 0.5).abs() < 1e-12);
    }

    #[test]
    fn williams_antisymmetry() {
        let ab = williams_test(0.95, 0.80, 0.85, 16).unwrap();
        let ba = williams_test(0.80, 0.95, 0.85, 16).unwrap();
        assert!((ab.t + ba.t).abs() < 1e-12);
        assert!((ab.p + ba.p - 1.0).abs() < 1e-12);
    }

    #[test]
    fn williams_t_grows_as_r23_approaches_one() {
        // Valid triples only: for r12 = 0.6, r13 = 0.4, K >= 0 needs
        // r23 in [-0.49, 0.97].
        let mut previous = 0.0;
        for r23 in [0.0, 0.4, 0.8, 0.95] {
            let result = williams_test(0.6, 0.4, r23, 12).unwrap();
            assert!(result.t > previous, "r23={r23}: t={}", result.t);
            previous = result.t;
        }
    }

    #[test]
    fn williams_matches_reference_cdf_on_worked_example() {
        use statrs::distribution::{ContinuousCDF, StudentsT};
        let result = williams_test(0.95, 0.80, 0.85, 16).unwrap();
        // K = 0.027, sqrt(27.75 / 0.0648914), t = 0.15 * 20.68.
        assert!((result.t - 3.1019).abs() < 1e-3, "t = {}", result.t);
        let reference = 1.0 - StudentsT::new(0.0, 1.0, 13.0).unwrap().cdf(result.t);
        assert!((result.p - reference).abs() < 1e-9);
        assert!(result.p < 0.005);
    }

    #[test]
    fn williams_rejects_bad_inputs() {
        assert!(williams_test(0.5, 0.5, 0.5, 3).is_err());
        assert!(williams_test(1.5, 0.5, 0.5, 10).is_err());
        // r12 = r13 = 1, r23 = -1 is an impossible triple (K < 0).
        assert!(matches!(
            williams_test(1.0, 1.0, -1.0, 10),
            Err(Error::InvalidCorrelationMatrix { .. })
        ));
    }

    #[test]
    fn rank_single_metric_wins() {
        let da = system_map(&[("a", 1.0), ("b", 2.0), ("c", 3.0), ("d", 4.0)]);
        let matrix = matrix_of("M", &[("a", 1.0), ("b", 2.0), ("c", 3.0), ("d", 4.0)]);
        let winners = rank_metrics(&da, &matrix, &[MetricId::new("M")], 0.05).unwrap();
        assert_eq!(winners.len(), 1);
    }

    #[test]
    fn rank_identical_metrics_both_win() {
        let da = system_map(&[("a", 1.0), ("b", 2.0), ("c", 3.5), ("d", 4.0), ("e", 2.2)]);
        let scores = [("a", 10.0), ("b", 19.0), ("c", 36.0), ("d", 44.0), ("e", 21.0)];
        let mut matrix = matrix_of("M1", &scores);
        matrix.merge(matrix_of("M2", &scores)).unwrap();
        let winners = rank_metrics(
            &da,
            &matrix,
            &[MetricId::new("M1"), MetricId::new("M2")],
            0.05,
        )
        .unwrap();
        assert_eq!(winners.len(), 2);
    }

    #[test]
    fn rank_perfect_metric_beats_noise() {
        // 14 systems; M-good tracks DA exactly, M-noise is unrelated.
        let mut da = BTreeMap::new();
        let mut good = ScoreMatrix::new();
        let noise_values = [
            0.31, -0.62, 0.48, -0.11, 0.05, -0.47, 0.2, 0.33, -0.25, 0.14, -0.58, 0.41, -0.03,
            0.27,
        ];
        for (i, noise) in noise_values.iter().enumerate() {
            let id = SystemId::new(format!("s{i:02}"));
            let score = i as f64 * 0.1;
            da.insert(id.clone(), score);
            good.insert_system_score(MetricId::new("good"), id.clone(), score * 3.0 + 1.0)
                .unwrap();
            good.insert_system_score(MetricId::new("noise"), id, *noise)
                .unwrap();
        }
        let winners = rank_metrics(
            &da,
            &good,
            &[MetricId::new("good"), MetricId::new("noise")],
            0.05,
        )
        .unwrap();
        assert!(winners.contains(&MetricId::new("good")));
        assert!(!winners.contains(&MetricId::new("noise")));
    }

    #[test]
    fn rank_handles_lower_is_better_magnitude() {
        // A metric that is exactly -DA correlates at -1; on |r| it must not
        // lose to a weaker positively-correlated metric.
        let da = system_map(&[
            ("a", 1.0),
            ("b", 2.0),
            ("c", 3.0),
            ("d", 4.0),
            ("e", 5.0),
            ("f", 6.0),
        ]);
        let mut matrix = ScoreMatrix::new();
        for (id, v) in &da {
            matrix
                .insert_system_score(MetricId::new("negated"), id.clone(), -v)
                .unwrap();
        }
        for (i, (id, v)) in da.iter().enumerate() {
            let wobble = if i % 2 == 0 { 0.8 } else { -0.8 };
            matrix
                .insert_system_score(MetricId::new("weak"), id.clone(), v + wobble)
                .unwrap();
        }
        let winners = rank_metrics(
            &da,
            &matrix,
            &[MetricId::new("negated"), MetricId::new("weak")],
            0.05,
        )
        .unwrap();
        assert!(winners.contains(&MetricId::new("negated")));
    }

    #[test]
    fn correlation_table_csv_shape() {
        let da = system_map(&[("A", 0.1), ("B", 0.2), ("C", 0.3), ("D", 9.0)]);
        let metric = matrix_of("M", &[("A", 1.0), ("B", 2.0), ("C", 3.0), ("D", 90.0)]);
        let table = correlations_with_without_outliers("de-en", &da, &metric, 2.5).unwrap();
        let csv = table.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "language_pair,metric,condition,n,r,note");
        assert!(lines.iter().any(|l| l.contains("without-outliers")));
    }
}
