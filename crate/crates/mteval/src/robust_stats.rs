//! Robust location/scale statistics, outlier detection over system scores,
//! and Pearson correlation.
//!
//! Outliers are flagged from human scores only: a system is discarded when
//! the magnitude of its robust z-score `(s - median) / MAD` exceeds the
//! cutoff, with `MAD = 1.483 * median(|s - median|)`.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::data_model::SystemId;
use crate::error::{Error, Result};

/// Consistency factor applied to the raw median absolute deviation.
pub const MAD_SCALE: f64 = 1.483;

/// Default robust z cutoff for flagging outlier systems.
pub const DEFAULT_OUTLIER_CUTOFF: f64 = 2.5;

/// Median of a non-empty sequence; even lengths average the two middle
/// elements.
pub fn median(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::InsufficientData {
            what: "values for median",
            needed: 1,
            found: 0,
        });
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let n = sorted.len();
    if n % 2 == 1 {
        Ok(sorted[n / 2])
    } else {
        Ok((sorted[n / 2 - 1] + sorted[n / 2]) / 2.0)
    }
}

/// Scaled median absolute deviation: `1.483 * median(|x - median(x)|)`.
pub fn mad(values: &[f64]) -> Result<f64> {
    let m = median(values)?;
    let deviations: Vec<f64> = values.iter().map(|v| (v - m).abs()).collect();
    Ok(MAD_SCALE * median(&deviations)?)
}

/// Robust z-scores `(x - median) / MAD`.
///
/// When MAD is zero the score is 0 for points equal to the median and a
/// signed infinity marker for any point that deviates; the division is never
/// performed, so no NaN can escape.
pub fn robust_z(values: &[f64]) -> Result<Vec<f64>> {
    if values.len() < 2 {
        return Err(Error::InsufficientData {
            what: "values for robust z",
            needed: 2,
            found: values.len(),
        });
    }
    let m = median(values)?;
    let scale = mad(values)?;
    Ok(values
        .iter()
        .map(|&v| {
            if scale == 0.0 {
                if v == m {
                    0.0
                } else if v > m {
                    f64::INFINITY
                } else {
                    f64::NEG_INFINITY
                }
            } else {
                (v - m) / scale
            }
        })
        .collect())
}

/// Outcome of robust outlier detection over per-system scores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutlierReport {
    pub median: f64,
    pub mad: f64,
    pub cutoff: f64,
    /// Robust z per system; infinity markers are serialized as the strings
    /// `"inf"` / `"-inf"` since JSON has no literal for them.
    #[serde(
        serialize_with = "serde_z::serialize",
        deserialize_with = "serde_z::deserialize"
    )]
    pub z: BTreeMap<SystemId, f64>,
    pub outliers: BTreeSet<SystemId>,
    pub retained: BTreeSet<SystemId>,
}

impl OutlierReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

mod serde_z {
    use std::collections::BTreeMap;

    use serde::de::Error as _;
    use serde::ser::SerializeMap;
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::data_model::SystemId;

    #[derive(serde::Serialize, serde::Deserialize)]
    #[serde(untagged)]
    enum ZRepr {
        Number(f64),
        Marker(String),
    }

    pub fn serialize<S: Serializer>(
        z: &BTreeMap<SystemId, f64>,
        ser: S,
    ) -> Result<S::Ok, S::Error> {
        let mut map = ser.serialize_map(Some(z.len()))?;
        for (system, value) in z {
            if value.is_finite() {
                map.serialize_entry(system, &ZRepr::Number(*value))?;
            } else {
                let marker = if *value > 0.0 { "inf" } else { "-inf" };
                map.serialize_entry(system, &ZRepr::Marker(marker.to_string()))?;
            }
        }
        map.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        de: D,
    ) -> Result<BTreeMap<SystemId, f64>, D::Error> {
        let raw: BTreeMap<SystemId, ZRepr> = BTreeMap::deserialize(de)?;
        raw.into_iter()
            .map(|(system, repr)| {
                let value = match repr {
                    ZRepr::Number(v) => v,
                    ZRepr::Marker(s) => match s.as_str() {
                        "inf" => f64::INFINITY,
                        "-inf" => f64::NEG_INFINITY,
                        other => return Err(D::Error::custom(format!("bad z marker {other:?}"))),
                    },
                };
                Ok((system, value))
            })
            .collect()
    }
}

/// Flag systems whose robust z magnitude exceeds `cutoff` (strictly).
///
/// Infinity markers from a zero-MAD sample are always flagged. Needs at
/// least 3 systems.
pub fn detect_outliers(
    scores: &BTreeMap<SystemId, f64>,
    cutoff: f64,
) -> Result<OutlierReport> {
    if scores.len() < 3 {
        return Err(Error::InsufficientData {
            what: "systems for outlier detection",
            needed: 3,
            found: scores.len(),
        });
    }
    if cutoff.is_nan() || cutoff <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "outlier cutoff must be positive, got {cutoff}"
        )));
    }
    let values: Vec<f64> = scores.values().copied().collect();
    let z_values = robust_z(&values)?;
    let mut z = BTreeMap::new();
    let mut outliers = BTreeSet::new();
    let mut retained = BTreeSet::new();
    for ((system, _), zv) in scores.iter().zip(z_values.iter()) {
        z.insert(system.clone(), *zv);
        if zv.abs() > cutoff {
            outliers.insert(system.clone());
        } else {
            retained.insert(system.clone());
        }
    }
    Ok(OutlierReport {
        median: median(&values)?,
        mad: mad(&values)?,
        cutoff,
        z,
        outliers,
        retained,
    })
}

/// Sample Pearson correlation coefficient.
///
/// Errors on length mismatch, fewer than 3 points, or zero variance in
/// either sequence; never silently returns 0 or NaN.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if x.len() < 3 {
        return Err(Error::InsufficientData {
            what: "points for correlation",
            needed: 3,
            found: x.len(),
        });
    }
    let n = x.len() as f64;
    let mean_x = x.iter().sum::<f64>() / n;
    let mean_y = y.iter().sum::<f64>() / n;
    let mut ss_x = 0.0;
    let mut ss_y = 0.0;
    let mut ss_xy = 0.0;
    for (xi, yi) in x.iter().zip(y.iter()) {
        let dx = xi - mean_x;
        let dy = yi - mean_y;
        ss_x += dx * dx;
        ss_y += dy * dy;
        ss_xy += dx * dy;
    }
    if ss_x == 0.0 {
        return Err(Error::UndefinedCorrelation("zero variance in x"));
    }
    if ss_y == 0.0 {
        return Err(Error::UndefinedCorrelation("zero variance in y"));
    }
    Ok((ss_xy / (ss_x.sqrt() * ss_y.sqrt())).clamp(-1.0, 1.0))
}
