//! Linear-in-parameter hypotheses `x -> w . phi(x)` and the classes they live in.

use ndarray::{s, Array1, Array2, ArrayView1};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;

/// Sign with the convention `sign(0) = +1`.
#[inline]
pub fn sign(v: f64) -> f64 {
    if v >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisKind {
    /// `phi(x) = x`.
    Identity,
    /// `phi(x) = (x, 1)`.
    Affine,
    /// Rows are already basis outputs; behaves like `Identity`.
    Precomputed,
}

/// The fixed basis `phi` together with the bound `D_phi` on `||phi(x)||_2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BasisSpec {
    pub kind: BasisKind,
    pub input_dim: usize,
    pub output_dim: usize,
    pub feature_bound: f64,
}

impl BasisSpec {
    pub fn new(kind: BasisKind, input_dim: usize, feature_bound: f64) -> Result<Self> {
        if input_dim == 0 {
            return Err(Error::InvalidParameter(
                "basis input dimension is zero".into(),
            ));
        }
        if !(feature_bound > 0.0 && feature_bound.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "feature bound must be positive and finite, got {feature_bound}"
            )));
        }
        let output_dim = match kind {
            BasisKind::Affine => input_dim + 1,
            BasisKind::Identity | BasisKind::Precomputed => input_dim,
        };
        Ok(Self {
            kind,
            input_dim,
            output_dim,
            feature_bound,
        })
    }

    /// Basis whose bound is the largest feature norm over the given samples.
    pub fn from_data(kind: BasisKind, samples: &[&Array2<f64>]) -> Result<Self> {
        let input_dim = samples
            .first()
            .map(|x| x.ncols())
            .ok_or_else(|| Error::Empty("no samples to fit a basis on".into()))?;
        let mut bound: f64 = 0.0;
        for x in samples {
            if x.ncols() != input_dim {
                return Err(Error::Shape(format!(
                    "samples have {} and {} columns",
                    input_dim,
                    x.ncols()
                )));
            }
            for row in x.rows() {
                bound = bound.max(feature_norm(kind, row));
            }
        }
        // All-zero identity inputs would give a zero bound.
        Self::new(kind, input_dim, bound.max(f64::MIN_POSITIVE))
    }

    /// Check `||phi(x)||_2 <= D_phi` on every row.
    pub fn validate(&self, features: &Array2<f64>) -> Result<()> {
        if features.ncols() != self.input_dim {
            return Err(Error::Shape(format!(
                "basis expects {} input columns, got {}",
                self.input_dim,
                features.ncols()
            )));
        }
        for (row, x) in features.rows().into_iter().enumerate() {
            let norm = feature_norm(self.kind, x);
            if norm > self.feature_bound {
                return Err(Error::FeatureBound {
                    row,
                    norm,
                    bound: self.feature_bound,
                });
            }
        }
        Ok(())
    }

    /// Basis outputs for every row, `n x p`.
    pub fn design(&self, features: &Array2<f64>) -> Result<Array2<f64>> {
        self.check_cols(features)?;
        Ok(match self.kind {
            BasisKind::Identity | BasisKind::Precomputed => features.clone(),
            BasisKind::Affine => {
                let mut out = Array2::ones((features.nrows(), self.output_dim));
                out.slice_mut(s![.., ..self.input_dim]).assign(features);
                out
            }
        })
    }

    pub(crate) fn check_cols(&self, features: &Array2<f64>) -> Result<()> {
        if features.ncols() != self.input_dim {
            return Err(Error::Shape(format!(
                "basis expects {} input columns, got {}",
                self.input_dim,
                features.ncols()
            )));
        }
        Ok(())
    }
}

fn feature_norm(kind: BasisKind, x: ArrayView1<'_, f64>) -> f64 {
    let sq: f64 = x.iter().map(|v| v * v).sum();
    match kind {
        BasisKind::Affine => (sq + 1.0).sqrt(),
        _ => sq.sqrt(),
    }
}

/// A classifier `x -> w . phi(x)`; its label is `sign` of the score.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hypothesis {
    weights: Array1<f64>,
    basis: BasisSpec,
}

impl Hypothesis {
    pub fn new(weights: Array1<f64>, basis: BasisSpec) -> Result<Self> {
        if weights.len() != basis.output_dim {
            return Err(Error::Shape(format!(
                "{} weights for a {}-dimensional basis",
                weights.len(),
                basis.output_dim
            )));
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::InvalidParameter(
                "hypothesis weights must be finite".into(),
            ));
        }
        Ok(Self { weights, basis })
    }

    pub fn zeros(basis: BasisSpec) -> Self {
        Self {
            weights: Array1::zeros(basis.output_dim),
            basis,
        }
    }

    pub fn weights(&self) -> &Array1<f64> {
        &self.weights
    }

    pub fn basis(&self) -> &BasisSpec {
        &self.basis
    }

    pub fn norm(&self) -> f64 {
        self.weights.dot(&self.weights).sqrt()
    }

    /// `-h`: the negated weights. The zero hypothesis maps to itself.
    pub fn negate(&self) -> Self {
        Self {
            weights: self.weights.mapv(|w| if w == 0.0 { 0.0 } else { -w }),
            basis: self.basis,
        }
    }

    /// Positive rescaling `c * h`.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            weights: &self.weights * c,
            basis: self.basis,
        }
    }

    pub fn score_row(&self, x: ArrayView1<'_, f64>) -> f64 {
        let d = self.basis.input_dim;
        match self.basis.kind {
            BasisKind::Identity | BasisKind::Precomputed => self.weights.dot(&x),
            BasisKind::Affine => self.weights.slice(s![..d]).dot(&x) + self.weights[d],
        }
    }

    /// Raw scores `h(x_i)` for every row.
    pub fn scores(&self, features: &Array2<f64>) -> Result<Array1<f64>> {
        self.basis.check_cols(features)?;
        let d = self.basis.input_dim;
        Ok(match self.basis.kind {
            BasisKind::Identity | BasisKind::Precomputed => features.dot(&self.weights),
            BasisKind::Affine => {
                let bias = self.weights[d];
                let mut out = features.dot(&self.weights.slice(s![..d]));
                out.mapv_inplace(|v| v + bias);
                out
            }
        })
    }

    /// Hardened labels `sign(h(x_i))`.
    pub fn predict(&self, features: &Array2<f64>) -> Result<Array1<f64>> {
        Ok(self.scores(features)?.mapv(sign))
    }
}

/// The class `{ w . phi : ||w||_2 <= Lambda }`, optionally with a finite
/// grid of members used by the enumeration oracles.
#[derive(Debug, Clone)]
pub struct HypothesisClassSpec {
    basis: BasisSpec,
    norm_bound: f64,
    grid: Option<Grid>,
}

impl HypothesisClassSpec {
    pub fn new(basis: BasisSpec, norm_bound: f64) -> Result<Self> {
        if !(norm_bound > 0.0 && norm_bound.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "norm bound must be positive and finite, got {norm_bound}"
            )));
        }
        Ok(Self {
            basis,
            norm_bound,
            grid: None,
        })
    }

    /// Class with the default radius `100 * (1 + 1 / D_phi)`.
    pub fn linear(basis: BasisSpec) -> Self {
        let norm_bound = default_norm_bound(basis.feature_bound);
        Self {
            basis,
            norm_bound,
            grid: None,
        }
    }

    /// Attach a grid. Explicit grids must be symmetric, share the class basis
    /// and respect the norm bound.
    pub fn with_grid(mut self, grid: Grid) -> Result<Self> {
        grid.check_against(&self.basis, self.norm_bound)?;
        self.grid = Some(grid);
        Ok(self)
    }

    pub fn basis(&self) -> &BasisSpec {
        &self.basis
    }

    pub fn norm_bound(&self) -> f64 {
        self.norm_bound
    }

    pub fn grid(&self) -> Option<&Grid> {
        self.grid.as_ref()
    }

    pub fn require_grid(&self) -> Result<&Grid> {
        self.grid.as_ref().ok_or(Error::MissingGrid)
    }

    pub fn contains(&self, h: &Hypothesis) -> bool {
        h.basis == self.basis && h.norm() <= self.norm_bound * (1.0 + 1e-12)
    }
}

pub fn default_norm_bound(feature_bound: f64) -> f64 {
    100.0 * (1.0 + 1.0 / feature_bound)
}
