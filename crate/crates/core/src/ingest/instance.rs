//! Plain-text instance files.
//!
//! One example per line: comma-separated features, optionally followed by
//! `;` and a `+1` / `-1` label. Blank lines and lines starting with `#` are
//! skipped. Either every example carries a label or none does.
//!
//! ```text
//! # x1,x2;label
//! 0.5,-1.25;+1
//! 3,4;-1
//! ```

use std::path::Path;

use ndarray::{Array1, Array2};

use crate::data::{LabeledDataset, UnlabeledDataset};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Instances {
    pub features: Array2<f64>,
    pub labels: Option<Array1<f64>>,
}

impl Instances {
    pub fn labeled(&self) -> Result<LabeledDataset> {
        let labels = self.labels.clone().ok_or_else(|| Error::Instance {
            line: 0,
            message: "a labeled sample is required but the file has no labels".into(),
        })?;
        LabeledDataset::new(self.features.clone(), labels)
    }

    pub fn unlabeled(&self) -> Result<UnlabeledDataset> {
        UnlabeledDataset::new(self.features.clone())
    }
}

fn bad(line: usize, message: impl Into<String>) -> Error {
    Error::Instance {
        line,
        message: message.into(),
    }
}

pub fn read_instances(text: &str) -> Result<Instances> {
    let mut values = Vec::new();
    let mut labels = Vec::new();
    let mut dim: Option<usize> = None;
    let mut has_labels: Option<bool> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.trim();
        if body.is_empty() || body.starts_with('#') {
            continue;
        }
        let (feats, label) = match body.split_once(';') {
            Some((f, l)) => (f, Some(l.trim())),
            None => (body, None),
        };
        match has_labels {
            None => has_labels = Some(label.is_some()),
            Some(h) if h != label.is_some() => {
                return Err(bad(line, "mixes labeled and unlabeled examples"))
            }
            _ => {}
        }
        let row: Vec<f64> = feats
            .split(',')
            .map(|f| {
                let f = f.trim();
                f.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| bad(line, format!("`{f}` is not a finite number")))
            })
            .collect::<Result<_>>()?;
        match dim {
            None => dim = Some(row.len()),
            Some(d) if d != row.len() => {
                return Err(bad(
                    line,
                    format!("expected {d} features, found {}", row.len()),
                ))
            }
            _ => {}
        }
        values.extend(row);
        if let Some(l) = label {
            let y = match l {
                "+1" | "1" => 1.0,
                "-1" => -1.0,
                other => return Err(bad(line, format!("label `{other}` is not +1 or -1"))),
            };
            labels.push(y);
        }
    }
    let dim = dim.ok_or_else(|| bad(0, "no examples"))?;
    let n = values.len() / dim;
    let features = Array2::from_shape_vec((n, dim), values).expect("rows have equal length");
    Ok(Instances {
        features,
        labels: has_labels.unwrap_or(false).then(|| Array1::from(labels)),
    })
}

pub fn read_instances_file(path: impl AsRef<Path>) -> Result<Instances> {
    read_instances(&std::fs::read_to_string(path)?)
}

/// Render features, and labels when given, in the instance format. Values
/// use the shortest representation that parses back to the same `f64`.
pub fn write_instances(features: &Array2<f64>, labels: Option<&Array1<f64>>) -> Result<String> {
    if let Some(y) = labels {
        if y.len() != features.nrows() {
            return Err(Error::Shape(format!(
                "{} rows but {} labels",
                features.nrows(),
                y.len()
            )));
        }
    }
    let mut out = String::new();
    for (i, row) in features.rows().into_iter().enumerate() {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
        out.push_str(&cells.join(","));
        if let Some(y) = labels {
            out.push_str(if y[i] > 0.0 { ";+1" } else { ";-1" });
        }
        out.push('\n');
    }
    Ok(out)
}
