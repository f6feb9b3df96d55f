//! Meta-evaluation toolkit for machine-translation metrics.
//!
//! The crate scores MT system outputs with native lexical metrics (BLEU,
//! TER, chrF), ingests external metric score tables and human direct
//! assessments, and analyses how well metrics track the human judgments:
//!
//! - robust (median/MAD) outlier detection over human system scores and
//!   Pearson correlations with and without the flagged systems;
//! - top-N, rolling-window, and subsampled correlation curves;
//! - the Williams test for dependent correlations and metric ranking;
//! - significance tests for score differences (Wilcoxon rank-sum, paired
//!   bootstrap, paired t-test) under a per-metric policy;
//! - pairwise system decisions with Type I / Type II error classification
//!   and a cross-metric agreement matrix.
//!
//! Every stochastic step is seeded and streamed (ChaCha8), so any result is
//! reproducible bit-for-bit from its inputs, seed, and configuration.

pub mod data_model;
pub mod dist;
pub mod error;
pub mod meta_eval;
pub mod metrics;
pub mod pairwise;
pub mod rng;
pub mod robust_stats;
pub mod significance;

mod csv;
mod serde_ext;

pub use data_model::{
    load_assessments, load_corpus, load_score_matrix, load_segments, standardize_annotator,
    write_assessments_tsv, write_score_matrix_tsv, AssessmentRecord, EvalCorpus, HumanAssessment,
    MetricId, Orientation, ScoreMatrix, ScoreMatrixLoad, SystemId,
};
pub use error::{Error, Result};
pub use meta_eval::{
    correlations_with_without_outliers, rank_metrics, rolling_window_curve,
    subsample_correlations, topn_curve, williams_test, Correlation, CorrelationEntry,
    CorrelationTable, SubsampleReport, TopNPoint, WilliamsResult, WindowCurve, WindowPoint,
};
pub use metrics::{
    corpus_bleu, corpus_chrf, corpus_ter, score_all_systems, sentence_bleu, sentence_chrf, ter,
    tokenize, BleuSmoothing, ChrfMode, Level, MetricScore, NativeMetric, Scale, TokenizedSegment,
};
pub use pairwise::{
    agreement_matrix, analyze_all_pairs, binned_summary, decide_pair, decisions_to_csv,
    AgreementMatrix, BinCounts, BinEdges, BinnedSummary, ErrorClass, HumanVerdict, PairAnalysis,
    PairContext, PairDecision, NS_BIN,
};
pub use robust_stats::{
    detect_outliers, mad, median, pearson, robust_z, OutlierReport, DEFAULT_OUTLIER_CUTOFF,
    MAD_SCALE,
};
pub use significance::{
    paired_bootstrap, paired_t_test, wilcoxon_rank_sum, BootstrapConfig, Direction,
    SignificancePolicy, TestKind, TestMethod, TestResult,
};
