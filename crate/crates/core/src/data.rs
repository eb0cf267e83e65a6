//! Labeled and unlabeled samples.
//!
//! Features are stored row-major as an `n x d` matrix. Labels are `+1.0` or
//! `-1.0`; any other value is rejected at construction.

use ndarray::{concatenate, Array1, Array2, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn check_features(features: &Array2<f64>, what: &str) -> Result<()> {
    if features.nrows() == 0 {
        return Err(Error::Empty(format!("{what} has no rows")));
    }
    if features.ncols() == 0 {
        return Err(Error::Empty(format!("{what} has no feature columns")));
    }
    for ((row, col), v) in features.indexed_iter() {
        if !v.is_finite() {
            return Err(Error::NonFinite { row, col });
        }
    }
    Ok(())
}

/// Unlabeled inputs, e.g. the target sample or the source inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnlabeledDataset {
    features: Array2<f64>,
}

impl UnlabeledDataset {
    pub fn new(features: Array2<f64>) -> Result<Self> {
        check_features(&features, "unlabeled dataset")?;
        Ok(Self { features })
    }

    pub fn features(&self) -> &Array2<f64> {
        &self.features
    }

    pub fn len(&self) -> usize {
        self.features.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dim(&self) -> usize {
        self.features.ncols()
    }

    pub fn select(&self, rows: &[usize]) -> Result<Self> {
        Self::new(self.features.select(Axis(0), rows))
    }

    /// Stack two samples row-wise (`self` first).
    pub fn stack(&self, other: &UnlabeledDataset) -> Result<UnlabeledDataset> {
        if self.dim() != other.dim() {
            return Err(Error::Shape(format!(
                "cannot stack {}-dimensional and {}-dimensional inputs",
                self.dim(),
                other.dim()
            )));
        }
        let features = concatenate(Axis(0), &[self.features.view(), other.features.view()])
            .expect("column counts checked");
        Ok(UnlabeledDataset { features })
    }
}

/// Inputs with `+1` / `-1` labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledDataset {
    features: Array2<f64>,
    labels: Array1<f64>,
}

impl LabeledDataset {
    pub fn new(features: Array2<f64>, labels: Array1<f64>) -> Result<Self> {
        check_features(&features, "labeled dataset")?;
        if features.nrows() != labels.len() {
            return Err(Error::Shape(format!(
                "{} feature rows but {} labels",
                features.nrows(),
                labels.len()
            )));
        }
        if let Some((row, &value)) = labels
            .iter()
            .enumerate()
            .find(|(_, &y)| y != 1.0 && y != -1.0)
        {
            return Err(Error::InvalidLabel { row, value });
        }
        Ok(Self { features, labels })
    }

    pub fn features(&self) -> &Array2<f64> {
        &self.features
    }

    pub fn features_view(&self) -> ArrayView2<'_, f64> {
        self.features.view()
    }

    pub fn labels(&self) -> &Array1<f64> {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dim(&self) -> usize {
        self.features.ncols()
    }

    /// The source inputs without labels.
    pub fn inputs(&self) -> UnlabeledDataset {
        UnlabeledDataset {
            features: self.features.clone(),
        }
    }

    pub fn select(&self, rows: &[usize]) -> Result<Self> {
        Self::new(
            self.features.select(Axis(0), rows),
            self.labels.select(Axis(0), rows),
        )
    }

    /// Replace the features, keeping labels. Used by corruption and scaling.
    pub fn with_features(&self, features: Array2<f64>) -> Result<Self> {
        if features.nrows() != self.len() {
            return Err(Error::Shape(format!(
                "replacement has {} rows, dataset has {}",
                features.nrows(),
                self.len()
            )));
        }
        Self::new(features, self.labels.clone())
    }
}
