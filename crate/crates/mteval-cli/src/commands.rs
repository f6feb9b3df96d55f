//! The five subcommands: score, outliers, correlate, compare, report.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use mteval::data_model::{write_score_matrix_tsv, MetricId, SystemId};
use mteval::meta_eval::{
    correlations_with_without_outliers, rank_metrics, rolling_window_curve,
    subsample_correlations, topn_curve, Correlation, CorrelationTable, SubsampleReport,
};
use mteval::pairwise::{
    agreement_matrix, analyze_all_pairs, binned_summary, decisions_to_csv, AgreementMatrix,
    BinEdges, BinnedSummary, ErrorClass, PairContext, PairDecision,
};
use mteval::robust_stats::{detect_outliers, OutlierReport, DEFAULT_OUTLIER_CUTOFF};
use mteval::significance::{SignificancePolicy, TestKind};
use mteval::{score_all_systems, NativeMetric};

use crate::config::{parse_f64_list, FileConfig, Provenance};
use crate::inputs::{
    load_language_pair, load_manifest, parse_system_specs, require_exists, restrict_systems,
    LanguagePairData,
};
use crate::{
    CliError, CompareArgs, CorrelateArgs, OutlierArgs, ReportArgs, ScoreArgs,
};

fn write_file(path: &Path, content: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)
            .map_err(|e| CliError::Internal(format!("cannot create {}: {e}", parent.display())))?;
    }
    std::fs::write(path, content)
        .map_err(|e| CliError::Internal(format!("cannot write {}: {e}", path.display())))
}

fn to_json_pretty<T: Serialize>(value: &T) -> Result<String, CliError> {
    serde_json::to_string_pretty(value)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| CliError::Internal(format!("serialization failed: {e}")))
}

fn input_err(err: mteval::Error) -> CliError {
    CliError::Input(err.to_string())
}

fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn csv_line<S: AsRef<str>>(fields: impl IntoIterator<Item = S>) -> String {
    let cells: Vec<String> = fields.into_iter().map(|f| csv_field(f.as_ref())).collect();
    let mut line = cells.join(",");
    line.push('\n');
    line
}

/// Parse a comma-separated native metric selection ("bleu,ter,chrf").
fn parse_native_metrics(text: &str) -> Result<Vec<NativeMetric>, CliError> {
    let mut metrics = Vec::new();
    for name in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let metric = NativeMetric::parse(name)
            .ok_or_else(|| CliError::Usage(format!("unknown native metric {name:?}")))?;
        if !metrics.contains(&metric) {
            metrics.push(metric);
        }
    }
    if metrics.is_empty() {
        return Err(CliError::Usage("empty metric selection".into()));
    }
    Ok(metrics)
}

/// Parse a verbatim metric-id selection for analysis commands; `None` means
/// "every metric present in all loaded score tables".
fn resolve_metric_selection(
    selection: Option<&str>,
    pairs: &[LanguagePairData],
) -> Result<Vec<MetricId>, CliError> {
    match selection {
        Some(text) => {
            let metrics: Vec<MetricId> = text
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(MetricId::new)
                .collect();
            if metrics.is_empty() {
                return Err(CliError::Usage("empty metric selection".into()));
            }
            for pair in pairs {
                for metric in &metrics {
                    pair.matrix.system_scores(metric).map_err(|_| {
                        CliError::Input(format!(
                            "metric {metric} has no scores for language pair {}",
                            pair.language_pair
                        ))
                    })?;
                }
            }
            Ok(metrics)
        }
        None => {
            let mut common: Option<BTreeSet<MetricId>> = None;
            for pair in pairs {
                let here: BTreeSet<MetricId> = pair.matrix.metrics().cloned().collect();
                common = Some(match common {
                    None => here,
                    Some(prev) => prev.intersection(&here).cloned().collect(),
                });
            }
            let metrics: Vec<MetricId> = common.unwrap_or_default().into_iter().collect();
            if metrics.is_empty() {
                return Err(CliError::Input(
                    "no metric is scored in every loaded language pair".into(),
                ));
            }
            Ok(metrics)
        }
    }
}

fn print_warnings(pair: &LanguagePairData) {
    for warning in &pair.warnings {
        eprintln!("warning [{}]: {warning}", pair.language_pair);
    }
}

/// Apply an optional `--systems a,b,c` restriction to every loaded pair.
fn apply_system_filter(
    pairs: &mut [LanguagePairData],
    selection: Option<&str>,
) -> Result<(), CliError> {
    let Some(text) = selection else {
        return Ok(());
    };
    let keep: BTreeSet<SystemId> = text
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(SystemId::new)
        .collect();
    if keep.is_empty() {
        return Err(CliError::Usage("empty system selection".into()));
    }
    for pair in pairs {
        restrict_systems(pair, &keep)?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// score
// ---------------------------------------------------------------------------

pub fn cmd_score(args: ScoreArgs) -> Result<(), CliError> {
    let config = FileConfig::load(args.config.as_deref())?;
    let metric_text = config.resolve(args.metrics, "metrics", "bleu,ter,chrf".to_string())?;
    let segment_text = config.resolve(args.segment_level, "segment-level", "chrf".to_string())?;
    let metrics = parse_native_metrics(&metric_text)?;
    let segment_metrics = if segment_text.trim().is_empty() || segment_text.trim() == "none" {
        Vec::new()
    } else {
        parse_native_metrics(&segment_text)?
    };

    require_exists(&args.source)?;
    require_exists(&args.reference)?;
    let systems = parse_system_specs(&args.systems)?;
    if systems.is_empty() {
        return Err(CliError::Usage("at least one --system NAME=PATH is required".into()));
    }
    for (_, path) in &systems {
        require_exists(path)?;
    }
    let corpus = mteval::load_corpus(&args.language_pair, &args.source, &args.reference, &systems)
        .map_err(input_err)?;
    let matrix = score_all_systems(&corpus, &metrics, &segment_metrics).map_err(input_err)?;

    let mut resolved = BTreeMap::new();
    resolved.insert("command".into(), "score".into());
    resolved.insert("language-pair".into(), args.language_pair.clone());
    resolved.insert("source".into(), args.source.display().to_string());
    resolved.insert("reference".into(), args.reference.display().to_string());
    resolved.insert("systems".into(), args.systems.join(";"));
    resolved.insert("metrics".into(), metric_text);
    resolved.insert("segment-level".into(), segment_text);
    let provenance = Provenance::new(&resolved, None);

    let mut body = Vec::new();
    write_score_matrix_tsv(&matrix, &mut body)
        .map_err(|e| CliError::Internal(e.to_string()))?;
    let out = format!(
        "{}{}",
        provenance.header_block(),
        String::from_utf8(body).expect("tsv is utf-8")
    );
    let path = args.out_dir.join("scores.tsv");
    write_file(&path, &out)?;
    println!(
        "scored {} systems x {} metrics -> {}",
        corpus.n_systems(),
        metrics.len(),
        path.display()
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// outliers
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct OutlierOutput<'a> {
    provenance: &'a Provenance,
    language_pair: Option<&'a str>,
    report: &'a OutlierReport,
}

pub fn cmd_outliers(args: OutlierArgs) -> Result<(), CliError> {
    let config = FileConfig::load(args.config.as_deref())?;
    let cutoff = config.resolve(args.outlier_cutoff, "outlier-cutoff", DEFAULT_OUTLIER_CUTOFF)?;
    require_exists(&args.da)?;
    let human = mteval::load_assessments(&args.da).map_err(input_err)?;
    let report = detect_outliers(human.da_scores(), cutoff).map_err(input_err)?;

    let mut resolved = BTreeMap::new();
    resolved.insert("command".into(), "outliers".into());
    resolved.insert("da".into(), args.da.display().to_string());
    resolved.insert("outlier-cutoff".into(), cutoff.to_string());
    if let Some(lp) = &args.language_pair {
        resolved.insert("language-pair".into(), lp.clone());
    }
    let provenance = Provenance::new(&resolved, None);
    let output = OutlierOutput {
        provenance: &provenance,
        language_pair: args.language_pair.as_deref(),
        report: &report,
    };
    let path = args.out_dir.join("outliers.json");
    write_file(&path, &to_json_pretty(&output)?)?;
    println!(
        "{} systems, {} outliers ({}) -> {}",
        report.z.len(),
        report.outliers.len(),
        report
            .outliers
            .iter()
            .map(SystemId::as_str)
            .collect::<Vec<_>>()
            .join(", "),
        path.display()
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// correlate
// ---------------------------------------------------------------------------

fn correlation_cells(r: &Correlation) -> (String, String) {
    match r {
        Correlation::Defined(v) => (v.to_string(), String::new()),
        Correlation::Undefined { reason } => (String::new(), reason.clone()),
    }
}

fn filtered_table(table: &CorrelationTable, metrics: &[MetricId]) -> CorrelationTable {
    let entries = table
        .entries
        .iter()
        .filter(|(metric, _)| metrics.contains(metric))
        .map(|(metric, entry)| (metric.clone(), entry.clone()))
        .collect();
    CorrelationTable {
        language_pair: table.language_pair.clone(),
        outlier_report: table.outlier_report.clone(),
        entries,
    }
}

#[derive(Serialize)]
struct CorrelateJson<'a> {
    provenance: &'a Provenance,
    table: &'a CorrelationTable,
}

#[derive(Serialize)]
struct CurvesJson<'a, T: Serialize> {
    provenance: &'a Provenance,
    curves: &'a BTreeMap<MetricId, T>,
}

#[derive(Serialize)]
struct SubsampleJson<'a> {
    provenance: &'a Provenance,
    report: &'a SubsampleReport,
}

pub fn cmd_correlate(args: CorrelateArgs) -> Result<(), CliError> {
    let config = FileConfig::load(args.config.as_deref())?;
    let cutoff = config.resolve(args.outlier_cutoff, "outlier-cutoff", DEFAULT_OUTLIER_CUTOFF)?;
    let format = config.resolve(args.format, "format", "csv".to_string())?;
    if format != "csv" && format != "json" {
        return Err(CliError::Usage(format!(
            "--format must be csv or json, got {format:?}"
        )));
    }
    let windows: Vec<usize> = if args.window.is_empty() {
        match config.get("window") {
            Some(text) => text
                .split(',')
                .map(|w| {
                    w.trim()
                        .parse()
                        .map_err(|_| CliError::Input(format!("bad window {w:?}")))
                })
                .collect::<Result<_, _>>()?,
            None => Vec::new(),
        }
    } else {
        args.window.clone()
    };
    let subsample_k = config.resolve_opt(args.subsample_k, "subsample-k")?;
    let subsample_trials = config.resolve_opt(args.subsample_trials, "subsample-trials")?;
    let seed = config.resolve_opt(args.seed, "seed")?;
    if subsample_k.is_some() != subsample_trials.is_some() {
        return Err(CliError::Usage(
            "--subsample-k and --subsample-trials go together".into(),
        ));
    }
    if subsample_k.is_some() && seed.is_none() {
        return Err(CliError::Usage("subsampling requires --seed".into()));
    }

    let pairs = load_inputs_basic(
        args.manifest.as_deref(),
        args.language_pair.as_deref(),
        args.da.as_deref(),
        args.scores.as_deref(),
    )?;
    let metrics = resolve_metric_selection(args.metrics.as_deref(), &pairs)?;

    let mut resolved = BTreeMap::new();
    resolved.insert("command".into(), "correlate".into());
    resolved.insert("outlier-cutoff".into(), cutoff.to_string());
    resolved.insert("format".into(), format.clone());
    resolved.insert(
        "metrics".into(),
        metrics.iter().map(MetricId::as_str).collect::<Vec<_>>().join(","),
    );
    resolved.insert(
        "inputs".into(),
        pairs.iter().map(|p| p.language_pair.clone()).collect::<Vec<_>>().join(","),
    );
    if !windows.is_empty() {
        resolved.insert(
            "window".into(),
            windows.iter().map(usize::to_string).collect::<Vec<_>>().join(","),
        );
    }
    if let (Some(k), Some(trials)) = (subsample_k, subsample_trials) {
        resolved.insert("subsample-k".into(), k.to_string());
        resolved.insert("subsample-trials".into(), trials.to_string());
    }
    if let Some(seed) = seed {
        resolved.insert("seed".into(), seed.to_string());
    }
    let provenance = Provenance::new(&resolved, seed);

    for pair in &pairs {
        print_warnings(pair);
        let lp_dir = args.out_dir.join(&pair.language_pair);
        let da = pair.human.da_scores();
        let table = correlations_with_without_outliers(
            &pair.language_pair,
            da,
            &pair.matrix,
            cutoff,
        )
        .map_err(input_err)?;
        let table = filtered_table(&table, &metrics);
        if format == "csv" {
            let content = format!("{}{}", provenance.header_block(), table.to_csv());
            write_file(&lp_dir.join("correlations.csv"), &content)?;
        } else {
            let content = to_json_pretty(&CorrelateJson {
                provenance: &provenance,
                table: &table,
            })?;
            write_file(&lp_dir.join("correlations.json"), &content)?;
        }

        if args.topn {
            let mut csv = String::from("metric,n,r,note\n");
            let mut curves = BTreeMap::new();
            for metric in &metrics {
                let scores = pair.matrix.system_scores(metric).map_err(input_err)?;
                let curve = topn_curve(da, scores, 4).map_err(input_err)?;
                for point in &curve {
                    let (r, note) = correlation_cells(&point.r);
                    csv.push_str(&csv_line([
                        metric.as_str(),
                        &point.n.to_string(),
                        &r,
                        &note,
                    ]));
                }
                curves.insert(metric.clone(), curve);
            }
            if format == "csv" {
                let content = format!("{}{}", provenance.header_block(), csv);
                write_file(&lp_dir.join("topn.csv"), &content)?;
            } else {
                let content = to_json_pretty(&CurvesJson {
                    provenance: &provenance,
                    curves: &curves,
                })?;
                write_file(&lp_dir.join("topn.json"), &content)?;
            }
        }

        for window in &windows {
            let mut csv = String::from("metric,window,start,r,note\n");
            let mut curves = BTreeMap::new();
            for metric in &metrics {
                let scores = pair.matrix.system_scores(metric).map_err(input_err)?;
                let curve = rolling_window_curve(da, scores, *window).map_err(input_err)?;
                for point in &curve.points {
                    let (r, note) = correlation_cells(&point.r);
                    csv.push_str(&csv_line([
                        metric.as_str(),
                        &window.to_string(),
                        &point.start.to_string(),
                        &r,
                        &note,
                    ]));
                }
                curves.insert(metric.clone(), curve);
            }
            if format == "csv" {
                let content = format!("{}{}", provenance.header_block(), csv);
                write_file(&lp_dir.join(format!("window{window}.csv")), &content)?;
            } else {
                let content = to_json_pretty(&CurvesJson {
                    provenance: &provenance,
                    curves: &curves,
                })?;
                write_file(&lp_dir.join(format!("window{window}.json")), &content)?;
            }
        }

        if let (Some(k), Some(trials)) = (subsample_k, subsample_trials) {
            let outliers = detect_outliers(da, cutoff).map_err(input_err)?.outliers;
            let report = subsample_correlations(
                da,
                &pair.matrix,
                &metrics,
                k,
                trials,
                seed.expect("validated above"),
                &outliers,
            )
            .map_err(input_err)?;
            let content = to_json_pretty(&SubsampleJson {
                provenance: &provenance,
                report: &report,
            })?;
            write_file(&lp_dir.join("subsample.json"), &content)?;
            if format == "csv" {
                let content = format!("{}{}", provenance.header_block(), report.to_csv());
                write_file(&lp_dir.join("subsample.csv"), &content)?;
            }
        }
        println!(
            "correlated {} metrics over {} systems for {} -> {}",
            metrics.len(),
            da.len(),
            pair.language_pair,
            lp_dir.display()
        );
    }
    Ok(())
}

fn load_inputs_basic(
    manifest: Option<&Path>,
    language_pair: Option<&str>,
    da: Option<&Path>,
    scores: Option<&Path>,
) -> Result<Vec<LanguagePairData>, CliError> {
    match (manifest, language_pair, da, scores) {
        (Some(path), None, None, None) => load_manifest(path),
        (None, Some(lp), Some(da), Some(scores)) => {
            Ok(vec![load_language_pair(lp, da, scores, None)?])
        }
        _ => Err(CliError::Usage(
            "provide either --manifest or all of --language-pair/--da/--scores".into(),
        )),
    }
}

// ---------------------------------------------------------------------------
// compare
// ---------------------------------------------------------------------------

struct CompareSettings {
    metrics: Vec<MetricId>,
    policy: SignificancePolicy,
    bins: BinEdges,
    metric_alpha: f64,
    human_alpha: f64,
    bootstrap_samples: usize,
    seed: Option<u64>,
}

#[allow(clippy::too_many_arguments)]
fn resolve_compare_settings(
    config: &FileConfig,
    metrics_flag: Option<&str>,
    policy_path: Option<&Path>,
    bins_flag: Option<&str>,
    alpha: Option<f64>,
    human_alpha: Option<f64>,
    bootstrap_samples: Option<usize>,
    seed: Option<u64>,
    pairs: &[LanguagePairData],
) -> Result<CompareSettings, CliError> {
    let metrics = resolve_metric_selection(metrics_flag, pairs)?;
    let policy = match policy_path {
        Some(path) => {
            require_exists(path)?;
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
            SignificancePolicy::parse(&text).map_err(input_err)?
        }
        None => SignificancePolicy::default(),
    };
    let bins_text = config.resolve(
        bins_flag.map(str::to_string),
        "bins",
        "0,1,2,3,5,10".to_string(),
    )?;
    let bins = BinEdges::new(parse_f64_list(&bins_text)?).map_err(input_err)?;
    let metric_alpha = config.resolve(alpha, "alpha", 0.05)?;
    let human_alpha = config.resolve(human_alpha, "human-alpha", 0.05)?;
    let bootstrap_samples = config.resolve(bootstrap_samples, "bootstrap-samples", 1000)?;
    let seed = config.resolve_opt(seed, "seed")?;

    let needs_bootstrap = metrics
        .iter()
        .any(|m| policy.test_for(m) == TestKind::Bootstrap);
    if needs_bootstrap && seed.is_none() {
        return Err(CliError::Usage(
            "the bootstrap test is selected for at least one metric; --seed is required".into(),
        ));
    }
    Ok(CompareSettings {
        metrics,
        policy,
        bins,
        metric_alpha,
        human_alpha,
        bootstrap_samples,
        seed,
    })
}

fn decide_language_pair(
    pair: &LanguagePairData,
    settings: &CompareSettings,
) -> Result<Vec<PairDecision>, CliError> {
    let ctx = PairContext {
        language_pair: pair.language_pair.clone(),
        matrix: &pair.matrix,
        human: &pair.human,
        corpus: pair.corpus.as_ref(),
        policy: &settings.policy,
        bins: &settings.bins,
        metric_alpha: settings.metric_alpha,
        human_alpha: settings.human_alpha,
        bootstrap_samples: settings.bootstrap_samples,
        seed: settings.seed.unwrap_or(0),
    };
    Ok(analyze_all_pairs(&ctx, &settings.metrics)
        .map_err(input_err)?
        .decisions)
}

#[derive(Serialize)]
struct SummaryJson<'a> {
    provenance: &'a Provenance,
    summary: &'a BinnedSummary,
}

#[derive(Serialize)]
struct AgreementJson<'a> {
    provenance: &'a Provenance,
    agreement: &'a AgreementMatrix,
}

fn error_tallies(decisions: &[PairDecision]) -> BTreeMap<MetricId, (u64, u64)> {
    let mut tallies: BTreeMap<MetricId, (u64, u64)> = BTreeMap::new();
    for decision in decisions {
        let slot = tallies.entry(decision.metric.clone()).or_default();
        match decision.error_class {
            ErrorClass::Type1 => slot.0 += 1,
            ErrorClass::Type2 => slot.1 += 1,
            ErrorClass::None => {}
        }
    }
    tallies
}

pub fn cmd_compare(args: CompareArgs) -> Result<(), CliError> {
    let config = FileConfig::load(args.config.as_deref())?;
    let mut pairs = load_compare_inputs(&args)?;
    apply_system_filter(&mut pairs, args.systems.as_deref())?;
    let settings = resolve_compare_settings(
        &config,
        args.metrics.as_deref(),
        args.policy.as_deref(),
        args.bins.as_deref(),
        args.alpha,
        args.human_alpha,
        args.bootstrap_samples,
        args.seed,
        &pairs,
    )?;

    let mut resolved = BTreeMap::new();
    resolved.insert("command".into(), "compare".into());
    resolved.insert(
        "metrics".into(),
        settings.metrics.iter().map(MetricId::as_str).collect::<Vec<_>>().join(","),
    );
    resolved.insert("alpha".into(), settings.metric_alpha.to_string());
    resolved.insert("human-alpha".into(), settings.human_alpha.to_string());
    resolved.insert("bootstrap-samples".into(), settings.bootstrap_samples.to_string());
    resolved.insert(
        "inputs".into(),
        pairs.iter().map(|p| p.language_pair.clone()).collect::<Vec<_>>().join(","),
    );
    if let Some(systems) = &args.systems {
        resolved.insert("systems".into(), systems.clone());
    }
    if let Some(seed) = settings.seed {
        resolved.insert("seed".into(), seed.to_string());
    }
    let provenance = Provenance::new(&resolved, settings.seed);

    let mut decisions = Vec::new();
    for pair in &pairs {
        print_warnings(pair);
        decisions.extend(decide_language_pair(pair, &settings)?);
    }
    let summary = binned_summary(&decisions, &settings.bins);
    let agreement = agreement_matrix(&decisions).map_err(input_err)?;

    let csv = format!("{}{}", provenance.header_block(), decisions_to_csv(&decisions));
    write_file(&args.out_dir.join("decisions.csv"), &csv)?;
    write_file(
        &args.out_dir.join("binned_summary.json"),
        &to_json_pretty(&SummaryJson {
            provenance: &provenance,
            summary: &summary,
        })?,
    )?;
    write_file(
        &args.out_dir.join("agreement.json"),
        &to_json_pretty(&AgreementJson {
            provenance: &provenance,
            agreement: &agreement,
        })?,
    )?;

    for (metric, total) in &summary.total_pairs {
        let (miss, false_alarm) = error_tallies(&decisions)
            .get(metric)
            .copied()
            .unwrap_or((0, 0));
        println!(
            "{metric}: {total} comparisons, {miss} type-1 (miss), {false_alarm} type-2 (false alarm)"
        );
    }
    println!("wrote {}", args.out_dir.display());
    Ok(())
}

fn load_compare_inputs(args: &CompareArgs) -> Result<Vec<LanguagePairData>, CliError> {
    match (&args.manifest, &args.language_pair, &args.da, &args.scores) {
        (Some(path), None, None, None) => load_manifest(path),
        (None, Some(lp), Some(da), Some(scores)) => {
            let corpus = match (&args.source, &args.reference) {
                (Some(source), Some(reference)) => {
                    let systems = parse_system_specs(&args.system)?;
                    if systems.is_empty() {
                        return Err(CliError::Usage(
                            "--source/--reference also need --system NAME=PATH".into(),
                        ));
                    }
                    Some((source.as_path(), reference.as_path(), systems))
                }
                (None, None) => None,
                _ => {
                    return Err(CliError::Usage(
                        "--source and --reference go together".into(),
                    ))
                }
            };
            Ok(vec![load_language_pair(lp, da, scores, corpus)?])
        }
        _ => Err(CliError::Usage(
            "provide either --manifest or all of --language-pair/--da/--scores".into(),
        )),
    }
}

// ---------------------------------------------------------------------------
// report
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct LanguagePairReport {
    language_pair: String,
    n_systems: usize,
    outliers: OutlierReport,
    correlations: CorrelationTable,
    winners: Vec<MetricId>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pairwise: Option<BinnedSummary>,
}

#[derive(Serialize)]
struct PairwiseTotals {
    total_comparisons: u64,
    type1_per_metric: BTreeMap<MetricId, u64>,
    type2_per_metric: BTreeMap<MetricId, u64>,
}

#[derive(Serialize)]
struct Report {
    provenance: Provenance,
    language_pairs: Vec<LanguagePairReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pairwise_totals: Option<PairwiseTotals>,
    #[serde(skip_serializing_if = "Option::is_none")]
    agreement: Option<AgreementMatrix>,
}

pub fn cmd_report(args: ReportArgs) -> Result<(), CliError> {
    let config = FileConfig::load(args.config.as_deref())?;
    let cutoff = config.resolve(args.outlier_cutoff, "outlier-cutoff", DEFAULT_OUTLIER_CUTOFF)?;
    let mut pairs = load_inputs_basic(
        args.manifest.as_deref(),
        args.language_pair.as_deref(),
        args.da.as_deref(),
        args.scores.as_deref(),
    )?;
    apply_system_filter(&mut pairs, args.systems.as_deref())?;
    let settings = resolve_compare_settings(
        &config,
        args.metrics.as_deref(),
        args.policy.as_deref(),
        args.bins.as_deref(),
        args.alpha,
        args.human_alpha,
        args.bootstrap_samples,
        args.seed,
        &pairs,
    )?;
    let run_pairwise = !args.skip_pairwise;

    let mut resolved = BTreeMap::new();
    resolved.insert("command".into(), "report".into());
    resolved.insert("outlier-cutoff".into(), cutoff.to_string());
    resolved.insert(
        "metrics".into(),
        settings.metrics.iter().map(MetricId::as_str).collect::<Vec<_>>().join(","),
    );
    resolved.insert("alpha".into(), settings.metric_alpha.to_string());
    resolved.insert("human-alpha".into(), settings.human_alpha.to_string());
    resolved.insert("pairwise".into(), run_pairwise.to_string());
    resolved.insert(
        "inputs".into(),
        pairs.iter().map(|p| p.language_pair.clone()).collect::<Vec<_>>().join(","),
    );
    if let Some(systems) = &args.systems {
        resolved.insert("systems".into(), systems.clone());
    }
    if let Some(seed) = settings.seed {
        resolved.insert("seed".into(), seed.to_string());
    }
    let provenance = Provenance::new(&resolved, settings.seed);

    let mut sections = Vec::new();
    let mut all_decisions = Vec::new();
    for pair in &pairs {
        print_warnings(pair);
        let da = pair.human.da_scores();
        let outliers = detect_outliers(da, cutoff).map_err(input_err)?;
        let table =
            correlations_with_without_outliers(&pair.language_pair, da, &pair.matrix, cutoff)
                .map_err(input_err)?;
        let table = filtered_table(&table, &settings.metrics);
        let winners: Vec<MetricId> =
            rank_metrics(da, &pair.matrix, &settings.metrics, settings.metric_alpha)
                .map_err(input_err)?
                .into_iter()
                .collect();
        let pairwise = if run_pairwise {
            let decisions = decide_language_pair(pair, &settings)?;
            let summary = binned_summary(&decisions, &settings.bins);
            all_decisions.extend(decisions);
            Some(summary)
        } else {
            None
        };
        sections.push(LanguagePairReport {
            language_pair: pair.language_pair.clone(),
            n_systems: da.len(),
            outliers,
            correlations: table,
            winners,
            pairwise,
        });
    }

    let (pairwise_totals, agreement) = if run_pairwise {
        let tallies = error_tallies(&all_decisions);
        let totals = PairwiseTotals {
            total_comparisons: all_decisions.len() as u64 / settings.metrics.len() as u64,
            type1_per_metric: tallies.iter().map(|(m, t)| (m.clone(), t.0)).collect(),
            type2_per_metric: tallies.iter().map(|(m, t)| (m.clone(), t.1)).collect(),
        };
        let agreement = agreement_matrix(&all_decisions).map_err(input_err)?;
        (Some(totals), Some(agreement))
    } else {
        (None, None)
    };

    let report = Report {
        provenance,
        language_pairs: sections,
        pairwise_totals,
        agreement,
    };
    let path = args.out_dir.join("report.json");
    write_file(&path, &to_json_pretty(&report)?)?;
    print!("{}", render_text_summary(&report));
    println!("wrote {}", path.display());
    Ok(())
}

fn render_correlation(r: &Correlation) -> String {
    match r {
        Correlation::Defined(v) => format!("{v:+.4}"),
        Correlation::Undefined { .. } => "   n/a ".to_string(),
    }
}

fn render_text_summary(report: &Report) -> String {
    let mut out = String::new();
    for section in &report.language_pairs {
        let _ = writeln!(
            out,
            "{} ({} systems, {} outliers{})",
            section.language_pair,
            section.n_systems,
            section.outliers.outliers.len(),
            if section.outliers.outliers.is_empty() {
                String::new()
            } else {
                format!(
                    ": {}",
                    section
                        .outliers
                        .outliers
                        .iter()
                        .map(SystemId::as_str)
                        .collect::<Vec<_>>()
                        .join(", ")
                )
            }
        );
        let _ = writeln!(out, "  {:<14} {:>8} {:>8}  winner", "metric", "r(all)", "r(-out)");
        for (metric, entry) in &section.correlations.entries {
            let without = entry
                .without_outliers
                .as_ref()
                .map_or("      - ".to_string(), render_correlation);
            let _ = writeln!(
                out,
                "  {:<14} {:>8} {:>8}  {}",
                metric.to_string(),
                render_correlation(&entry.all),
                without,
                if section.winners.contains(metric) { "*" } else { "" }
            );
        }
        if let Some(summary) = &section.pairwise {
            let pairs = summary.total_pairs.values().next().copied().unwrap_or(0);
            let _ = writeln!(out, "  pairwise: {pairs} comparisons per metric");
        }
    }
    if let (Some(totals), Some(agreement)) = (&report.pairwise_totals, &report.agreement) {
        let _ = writeln!(
            out,
            "pairwise totals: {} comparisons per metric",
            totals.total_comparisons
        );
        for metric in &agreement.metrics {
            let errors = agreement.cell(metric, metric).unwrap_or(0);
            let t1 = totals.type1_per_metric.get(metric).copied().unwrap_or(0);
            let t2 = totals.type2_per_metric.get(metric).copied().unwrap_or(0);
            let _ = writeln!(
                out,
                "  {metric}: {errors} errors ({t1} type-1 miss, {t2} type-2 false alarm)"
            );
        }
    }
    out
}
