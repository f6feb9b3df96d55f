//! File ingestion and serialization.
//!
//! Segment files are UTF-8 with LF line endings, one segment per line; only
//! a final trailing newline is ignored. Tabular files are TSV with a header
//! row; leading lines starting with `#` are treated as comments and skipped,
//! which is where the CLI places its provenance block.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

use super::{
    AssessmentRecord, EvalCorpus, HumanAssessment, MetricId, ScoreMatrix, SystemId,
};

pub const ASSESSMENT_HEADER: &str = "system\tsegment\tannotator\traw\tz";
pub const SCORE_MATRIX_HEADER: &str = "metric\tsystem\tlevel\tsegment\tscore";
const SCORE_MATRIX_HEADER_SHORT: &str = "metric\tsystem\tscore";

fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Read one segment file: one segment per line, final trailing newline
/// ignored. Empty files are rejected.
pub fn load_segments(path: &Path) -> Result<Vec<String>> {
    let text = read_to_string(path)?;
    if text.is_empty() {
        return Err(Error::InvalidInput(format!("{} is empty", path.display())));
    }
    let segments: Vec<String> = text.lines().map(str::to_string).collect();
    if segments.is_empty() {
        return Err(Error::InvalidInput(format!("{} is empty", path.display())));
    }
    Ok(segments)
}

/// Load source, reference, and per-system output files into an aligned
/// corpus. Line `i` of every file is segment `i`; a file with a different
/// line count is reported by name.
pub fn load_corpus(
    language_pair: impl Into<String>,
    source: &Path,
    reference: &Path,
    systems: &[(SystemId, PathBuf)],
) -> Result<EvalCorpus> {
    let sources = load_segments(source)?;
    let expected = sources.len();
    let references = load_segments(reference)?;
    if references.len() != expected {
        return Err(Error::Alignment {
            file: reference.to_path_buf(),
            expected,
            found: references.len(),
        });
    }
    let mut outputs = BTreeMap::new();
    for (id, path) in systems {
        let segments = load_segments(path)?;
        if segments.len() != expected {
            return Err(Error::Alignment {
                file: path.clone(),
                expected,
                found: segments.len(),
            });
        }
        if outputs.insert(id.clone(), segments).is_some() {
            return Err(Error::DuplicateKey(format!("system {id}")));
        }
    }
    EvalCorpus::new(language_pair, sources, references, outputs)
}

/// Lines of a tabular file with leading `#` comments stripped, paired with
/// their 1-based line numbers.
fn data_lines(text: &str) -> Vec<(usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, line)| (i + 1, line))
        .filter(|(_, line)| !line.starts_with('#'))
        .collect()
}

fn parse_err(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

/// Load a DA scores file (`system  segment  annotator  raw  z`, tab
/// separated).
///
/// If every row carries a z-score the file is taken as pre-standardized and
/// the z values are used as-is. If no row carries one, z-scores are computed
/// by per-annotator standardization, in which case every row must name an
/// annotator. Mixing the two is an error.
pub fn load_assessments(path: &Path) -> Result<HumanAssessment> {
    let text = read_to_string(path)?;
    let lines = data_lines(&text);
    let mut rows = lines.into_iter();
    let (header_no, header) = rows
        .next()
        .ok_or_else(|| Error::InvalidInput(format!("{} is empty", path.display())))?;
    if header != ASSESSMENT_HEADER {
        return Err(parse_err(
            path,
            header_no,
            format!("expected header {ASSESSMENT_HEADER:?}, found {header:?}"),
        ));
    }

    struct Row {
        system: SystemId,
        segment: usize,
        annotator: Option<String>,
        raw: f64,
        z: Option<f64>,
    }

    let mut parsed = Vec::new();
    for (line_no, line) in rows {
        if line.is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split('\t').collect();
        if cells.len() != 5 {
            return Err(parse_err(
                path,
                line_no,
                format!("expected 5 columns, found {}", cells.len()),
            ));
        }
        let segment: usize = cells[1]
            .parse()
            .map_err(|_| parse_err(path, line_no, format!("bad segment index {:?}", cells[1])))?;
        let raw: f64 = cells[3]
            .parse()
            .map_err(|_| parse_err(path, line_no, format!("bad raw score {:?}", cells[3])))?;
        let z = if cells[4].is_empty() {
            None
        } else {
            Some(cells[4].parse::<f64>().map_err(|_| {
                parse_err(path, line_no, format!("bad z-score {:?}", cells[4]))
            })?)
        };
        parsed.push(Row {
            system: SystemId::new(cells[0]),
            segment,
            annotator: (!cells[2].is_empty()).then(|| cells[2].to_string()),
            raw,
            z,
        });
    }
    if parsed.is_empty() {
        return Err(Error::InvalidInput(format!(
            "{} has no data rows",
            path.display()
        )));
    }

    let with_z = parsed.iter().filter(|r| r.z.is_some()).count();
    if with_z == parsed.len() {
        let records = parsed
            .into_iter()
            .map(|r| AssessmentRecord {
                system: r.system,
                segment: r.segment,
                annotator: r.annotator,
                raw: r.raw,
                z: r.z.expect("checked"),
            })
            .collect();
        HumanAssessment::new(records)
    } else if with_z == 0 {
        let raw_rows: Result<Vec<(SystemId, usize, String, f64)>> = parsed
            .into_iter()
            .map(|r| {
                let annotator = r.annotator.ok_or_else(|| {
                    Error::InvalidInput(format!(
                        "{}: rows without z-scores must name an annotator",
                        path.display()
                    ))
                })?;
                Ok((r.system, r.segment, annotator, r.raw))
            })
            .collect();
        HumanAssessment::from_raw(raw_rows?)
    } else {
        Err(Error::InvalidInput(format!(
            "{}: either all rows or no rows may carry z-scores",
            path.display()
        )))
    }
}

/// Write a DA scores file that `load_assessments` reads back to an equal
/// value.
pub fn write_assessments_tsv<W: Write>(assessment: &HumanAssessment, mut out: W) -> Result<()> {
    let write = |out: &mut W, line: &str| -> Result<()> {
        writeln!(out, "{line}").map_err(|source| Error::Io {
            path: PathBuf::from("<writer>"),
            source,
        })
    };
    write(&mut out, ASSESSMENT_HEADER)?;
    for record in assessment.records() {
        write(
            &mut out,
            &format!(
                "{}\t{}\t{}\t{}\t{}",
                record.system,
                record.segment,
                record.annotator.as_deref().unwrap_or(""),
                record.raw,
                record.z
            ),
        )?;
    }
    Ok(())
}

/// A loaded score matrix plus non-fatal findings (metrics whose system sets
/// disagree).
#[derive(Debug)]
pub struct ScoreMatrixLoad {
    pub matrix: ScoreMatrix,
    pub warnings: Vec<String>,
}

/// Load a metric score table.
///
/// Accepts the full five-column form (`metric system level segment score`,
/// `level` in {sys, seg}, `segment` empty for sys rows and a 0-based index
/// for seg rows) or the minimal three-column form (`metric system score`,
/// all rows system-level). Duplicate keys and non-numeric scores are errors;
/// metrics whose system sets differ from each other are reported as
/// warnings.
pub fn load_score_matrix(path: &Path) -> Result<ScoreMatrixLoad> {
    let text = read_to_string(path)?;
    let lines = data_lines(&text);
    let mut rows = lines.into_iter();
    let (header_no, header) = rows
        .next()
        .ok_or_else(|| Error::InvalidInput(format!("{} is empty", path.display())))?;
    let full_form = match header {
        SCORE_MATRIX_HEADER => true,
        SCORE_MATRIX_HEADER_SHORT => false,
        other => {
            return Err(parse_err(
                path,
                header_no,
                format!("expected header {SCORE_MATRIX_HEADER:?}, found {other:?}"),
            ))
        }
    };

    let mut matrix = ScoreMatrix::new();
    // (metric, system) -> sparse segment scores, assembled after the scan.
    let mut segments: BTreeMap<(MetricId, SystemId), BTreeMap<usize, f64>> = BTreeMap::new();
    for (line_no, line) in rows {
        if line.is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split('\t').collect();
        let expected = if full_form { 5 } else { 3 };
        if cells.len() != expected {
            return Err(parse_err(
                path,
                line_no,
                format!("expected {expected} columns, found {}", cells.len()),
            ));
        }
        let metric = MetricId::new(cells[0]);
        let system = SystemId::new(cells[1]);
        let (level, segment_cell, score_cell) = if full_form {
            (cells[2], cells[3], cells[4])
        } else {
            ("sys", "", cells[2])
        };
        let score: f64 = score_cell
            .parse()
            .map_err(|_| parse_err(path, line_no, format!("bad score {score_cell:?}")))?;
        if !score.is_finite() {
            return Err(parse_err(path, line_no, format!("bad score {score_cell:?}")));
        }
        match level {
            "sys" => {
                if !segment_cell.is_empty() {
                    return Err(parse_err(path, line_no, "sys row with a segment index"));
                }
                matrix.insert_system_score(metric, system, score)?;
            }
            "seg" => {
                let index: usize = segment_cell.parse().map_err(|_| {
                    parse_err(path, line_no, format!("bad segment index {segment_cell:?}"))
                })?;
                let slot = segments.entry((metric.clone(), system.clone())).or_default();
                if slot.insert(index, score).is_some() {
                    return Err(Error::DuplicateKey(format!(
                        "({metric}, {system}, seg, {index})"
                    )));
                }
            }
            other => {
                return Err(parse_err(path, line_no, format!("bad level {other:?}")));
            }
        }
    }

    for ((metric, system), sparse) in segments {
        let mut dense = Vec::with_capacity(sparse.len());
        for (expected, (index, score)) in sparse.into_iter().enumerate() {
            if index != expected {
                return Err(Error::InvalidInput(format!(
                    "segment scores for ({metric}, {system}) are not contiguous from 0 \
                     (missing index {expected})"
                )));
            }
            dense.push(score);
        }
        matrix.insert_segment_scores(metric, system, dense)?;
    }

    // Metrics are allowed to cover different system sets, but disagreement is
    // usually an ingestion mistake, so surface it.
    let mut warnings = Vec::new();
    for metric in matrix.segment_metrics() {
        if matrix.system_scores(metric).is_err() {
            warnings.push(format!(
                "metric {metric} has segment-level rows but no system-level scores"
            ));
        }
    }
    let metric_ids: Vec<MetricId> = matrix.metrics().cloned().collect();
    if let Some(first) = metric_ids.first() {
        let reference: Vec<&SystemId> = matrix.systems(first)?;
        for metric in &metric_ids[1..] {
            let this = matrix.systems(metric)?;
            if this != reference {
                warnings.push(format!(
                    "metric {metric} scores {} systems, {first} scores {}",
                    this.len(),
                    reference.len()
                ));
            }
        }
    }
    Ok(ScoreMatrixLoad { matrix, warnings })
}

/// Write a score matrix in the five-column TSV form; `load_score_matrix`
/// reads it back to an equal value.
pub fn write_score_matrix_tsv<W: Write>(matrix: &ScoreMatrix, mut out: W) -> Result<()> {
    let write = |out: &mut W, line: String| -> Result<()> {
        writeln!(out, "{line}").map_err(|source| Error::Io {
            path: PathBuf::from("<writer>"),
            source,
        })
    };
    write(&mut out, SCORE_MATRIX_HEADER.to_string())?;
    for metric in matrix.metrics() {
        for (system, score) in matrix.system_scores(metric)? {
            write(&mut out, format!("{metric}\t{system}\tsys\t\t{score}"))?;
        }
    }
    let metric_ids: Vec<MetricId> = matrix.metrics().cloned().collect();
    for metric in &metric_ids {
        let systems: Vec<SystemId> = matrix.systems(metric)?.into_iter().cloned().collect();
        for system in systems {
            if let Some(scores) = matrix.segment_scores(metric, &system) {
                for (index, score) in scores.iter().enumerate() {
                    write(
                        &mut out,
                        format!("{metric}\t{system}\tseg\t{index}\t{score}"),
                    )?;
                }
            }
        }
    }
    Ok(())
}
