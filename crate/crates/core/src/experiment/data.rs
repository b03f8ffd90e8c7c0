//! CSV ingestion.

use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::error::{Error, Result};

pub const LABEL_COLUMN: &str = "label";
pub const TIMESTAMP_COLUMN: &str = "timestamp";

/// Column roles. An unset name means "use the standard column if the file
/// has one"; a set name must exist.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct DataSchema {
    pub label_column: Option<String>,
    pub timestamp_column: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub feature_names: Vec<String>,
    pub features: Vec<Vec<f64>>,
    /// `true` marks an outlier.
    pub labels: Option<Vec<bool>>,
    pub timestamps: Option<Vec<i64>>,
}

impl Dataset {
    pub fn n_rows(&self) -> usize {
        self.features.len()
    }

    /// Rows at `idx`, in that order.
    pub fn select(&self, idx: &[usize]) -> Dataset {
        Dataset {
            feature_names: self.feature_names.clone(),
            features: idx.iter().map(|&i| self.features[i].clone()).collect(),
            labels: self.labels.as_ref().map(|l| idx.iter().map(|&i| l[i]).collect()),
            timestamps: self.timestamps.as_ref().map(|t| idx.iter().map(|&i| t[i]).collect()),
        }
    }
}

fn locate(headers: &csv::StringRecord, declared: &Option<String>, standard: &str) -> Result<Option<usize>> {
    match declared {
        Some(name) => headers
            .iter()
            .position(|h| h == name)
            .map(Some)
            .ok_or_else(|| Error::Schema(format!("declared column `{name}` is missing"))),
        None => Ok(headers.iter().position(|h| h == standard)),
    }
}

/// Reads a headed CSV file. Every column other than the label and
/// timestamp columns is a numeric feature. Parse errors report the 1-based
/// data row (the header is row 0).
pub fn ingest_csv(path: &Path, schema: &DataSchema) -> Result<Dataset> {
    let file = std::fs::File::open(path)?;
    ingest_reader(file, schema)
}

pub fn ingest_reader<R: std::io::Read>(reader: R, schema: &DataSchema) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.is_empty() {
        return Err(Error::Schema("missing header row".into()));
    }
    let label_col = locate(&headers, &schema.label_column, LABEL_COLUMN)?;
    let time_col = locate(&headers, &schema.timestamp_column, TIMESTAMP_COLUMN)?;
    let feature_cols: Vec<usize> =
        (0..headers.len()).filter(|&c| Some(c) != label_col && Some(c) != time_col).collect();
    if feature_cols.is_empty() {
        return Err(Error::Schema("no feature columns".into()));
    }
    let mut features = Vec::new();
    let mut labels = label_col.map(|_| Vec::new());
    let mut timestamps = time_col.map(|_| Vec::new());
    for (i, record) in rdr.records().enumerate() {
        let row = i + 1;
        let record = record?;
        let cell = |c: usize| record.get(c).unwrap_or("");
        let parse_err = |c: usize, message: String| Error::Parse { row, column: headers[c].to_string(), message };
        let values = feature_cols
            .iter()
            .map(|&c| {
                let text = cell(c);
                text.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| parse_err(c, format!("`{text}` is not a finite number")))
            })
            .collect::<Result<Vec<f64>>>()?;
        features.push(values);
        if let (Some(c), Some(l)) = (label_col, labels.as_mut()) {
            let text = cell(c);
            let v = match text.parse::<f64>() {
                Ok(0.0) => false,
                Ok(1.0) => true,
                _ => return Err(parse_err(c, format!("label `{text}` is not 0 or 1"))),
            };
            l.push(v);
        }
        if let (Some(c), Some(t)) = (time_col, timestamps.as_mut()) {
            let text = cell(c);
            t.push(text.parse::<i64>().map_err(|_| parse_err(c, format!("timestamp `{text}` is not an integer")))?);
        }
    }
    Ok(Dataset {
        feature_names: feature_cols.iter().map(|&c| headers[c].to_string()).collect(),
        features,
        labels,
        timestamps,
    })
}
