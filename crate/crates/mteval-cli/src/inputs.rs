//! Loading one or many language pairs from the command line or a manifest.
//!
//! Manifest format (TSV, `#` comments, paths relative to the manifest):
//!
//! ```text
//! language_pair<TAB>da<TAB>scores[<TAB>source<TAB>reference<TAB>systems_dir]
//! ```
//!
//! `systems_dir` holds one output file per system, named `<system-id>` or
//! `<system-id>.txt`; it is needed only when a metric's significance test is
//! the bootstrap, which re-scores resampled corpora.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use mteval::data_model::{
    load_assessments, load_corpus, load_score_matrix, EvalCorpus, HumanAssessment, ScoreMatrix,
    SystemId,
};

use crate::CliError;

/// `(system-id, output-file)` pairs naming one corpus's system outputs.
pub type SystemFiles = Vec<(SystemId, PathBuf)>;

pub struct LanguagePairData {
    pub language_pair: String,
    pub human: HumanAssessment,
    pub matrix: ScoreMatrix,
    pub corpus: Option<EvalCorpus>,
    pub warnings: Vec<String>,
}

fn input_err(err: mteval::Error) -> CliError {
    CliError::Input(err.to_string())
}

pub fn require_exists(path: &Path) -> Result<(), CliError> {
    if path.exists() {
        Ok(())
    } else {
        Err(CliError::Input(format!("{} does not exist", path.display())))
    }
}

/// `NAME=PATH` pairs from repeated `--system` flags.
pub fn parse_system_specs(specs: &[String]) -> Result<SystemFiles, CliError> {
    specs
        .iter()
        .map(|spec| {
            let (name, path) = spec.split_once('=').ok_or_else(|| {
                CliError::Usage(format!("--system expects NAME=PATH, got {spec:?}"))
            })?;
            Ok((SystemId::new(name), PathBuf::from(path)))
        })
        .collect()
}

fn load_systems_dir(dir: &Path) -> Result<SystemFiles, CliError> {
    let mut systems = Vec::new();
    let entries = std::fs::read_dir(dir)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", dir.display())))?;
    for entry in entries {
        let entry = entry.map_err(|e| CliError::Input(e.to_string()))?;
        let path = entry.path();
        if !path.is_file() {
            continue;
        }
        let name = path
            .file_name()
            .and_then(|n| n.to_str())
            .ok_or_else(|| CliError::Input(format!("non-UTF-8 file name in {}", dir.display())))?;
        let id = name.strip_suffix(".txt").unwrap_or(name);
        systems.push((SystemId::new(id), path.clone()));
    }
    if systems.is_empty() {
        return Err(CliError::Input(format!(
            "{} contains no system output files",
            dir.display()
        )));
    }
    systems.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(systems)
}

pub fn load_language_pair(
    language_pair: &str,
    da: &Path,
    scores: &Path,
    corpus_paths: Option<(&Path, &Path, SystemFiles)>,
) -> Result<LanguagePairData, CliError> {
    require_exists(da)?;
    require_exists(scores)?;
    let human = load_assessments(da).map_err(input_err)?;
    let loaded = load_score_matrix(scores).map_err(input_err)?;
    let corpus = match corpus_paths {
        Some((source, reference, systems)) => {
            require_exists(source)?;
            require_exists(reference)?;
            for (_, path) in &systems {
                require_exists(path)?;
            }
            let corpus =
                load_corpus(language_pair, source, reference, &systems).map_err(input_err)?;
            loaded.matrix.validate_against_corpus(&corpus).map_err(input_err)?;
            Some(corpus)
        }
        None => None,
    };
    Ok(LanguagePairData {
        language_pair: language_pair.to_string(),
        human,
        matrix: loaded.matrix,
        corpus,
        warnings: loaded.warnings,
    })
}

/// Restrict one language pair's data to a subset of systems (e.g. only
/// researcher-submitted systems). Systems named in `keep` but absent from
/// this pair are ignored; at least two must remain.
pub fn restrict_systems(
    data: &mut LanguagePairData,
    keep: &BTreeSet<SystemId>,
) -> Result<(), CliError> {
    let records: Vec<_> = data
        .human
        .records()
        .iter()
        .filter(|r| keep.contains(&r.system))
        .cloned()
        .collect();
    let kept = records
        .iter()
        .map(|r| r.system.clone())
        .collect::<BTreeSet<_>>();
    if kept.len() < 2 {
        return Err(CliError::Input(format!(
            "{}: fewer than 2 of the requested systems have data",
            data.language_pair
        )));
    }
    data.human = HumanAssessment::new(records)
        .map_err(|e| CliError::Input(e.to_string()))?;

    let mut matrix = ScoreMatrix::new();
    let metrics: Vec<_> = data.matrix.metrics().cloned().collect();
    for metric in &metrics {
        let scores = data
            .matrix
            .system_scores(metric)
            .map_err(|e| CliError::Input(e.to_string()))?
            .clone();
        for (system, score) in scores {
            if !kept.contains(&system) {
                continue;
            }
            matrix
                .insert_system_score(metric.clone(), system.clone(), score)
                .map_err(|e| CliError::Internal(e.to_string()))?;
            if let Some(segs) = data.matrix.segment_scores(metric, &system) {
                matrix
                    .insert_segment_scores(metric.clone(), system, segs.to_vec())
                    .map_err(|e| CliError::Internal(e.to_string()))?;
            }
        }
        matrix.set_orientation(metric.clone(), data.matrix.orientation(metric));
    }
    data.matrix = matrix;

    if let Some(corpus) = &data.corpus {
        let systems: BTreeMap<SystemId, Vec<String>> = corpus
            .system_ids()
            .filter(|s| kept.contains(*s))
            .map(|s| (s.clone(), corpus.output(s).expect("listed id").to_vec()))
            .collect();
        data.corpus = Some(
            EvalCorpus::new(
                corpus.language_pair(),
                corpus.sources().to_vec(),
                corpus.references().to_vec(),
                systems,
            )
            .map_err(|e| CliError::Input(e.to_string()))?,
        );
    }
    Ok(())
}

/// Load every language pair named by a manifest, sorted by language pair so
/// downstream output order is deterministic.
pub fn load_manifest(path: &Path) -> Result<Vec<LanguagePairData>, CliError> {
    require_exists(path)?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    let base = path.parent().unwrap_or(Path::new("."));
    let resolve = |p: &str| -> PathBuf {
        let candidate = Path::new(p);
        if candidate.is_absolute() {
            candidate.to_path_buf()
        } else {
            base.join(candidate)
        }
    };
    let mut rows = Vec::new();
    for (line_no, line) in text.lines().enumerate() {
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cells: Vec<&str> = line.split('\t').collect();
        if cells[0] == "language_pair" {
            continue; // optional header
        }
        if cells.len() != 3 && cells.len() != 6 {
            return Err(CliError::Input(format!(
                "{}:{}: manifest rows have 3 or 6 columns, found {}",
                path.display(),
                line_no + 1,
                cells.len()
            )));
        }
        let corpus_paths = if cells.len() == 6 {
            let systems = load_systems_dir(&resolve(cells[5]))?;
            Some((resolve(cells[3]), resolve(cells[4]), systems))
        } else {
            None
        };
        rows.push((
            cells[0].to_string(),
            resolve(cells[1]),
            resolve(cells[2]),
            corpus_paths,
        ));
    }
    if rows.is_empty() {
        return Err(CliError::Input(format!(
            "{} names no language pairs",
            path.display()
        )));
    }
    rows.sort_by(|a, b| a.0.cmp(&b.0));
    rows.into_iter()
        .map(|(lp, da, scores, corpus)| {
            let corpus_ref = corpus
                .as_ref()
                .map(|(s, r, sys)| (s.as_path(), r.as_path(), sys.clone()));
            load_language_pair(&lp, &da, &scores, corpus_ref)
        })
        .collect()
}
