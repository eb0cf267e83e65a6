use ndarray::{Array1, Array2};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::data::LabeledDataset;
use crate::error::{Error, Result};

/// Two isotropic unit-variance Gaussians, one per class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianDomainSpec {
    pub mean_pos: Vec<f64>,
    pub mean_neg: Vec<f64>,
    pub n_per_class: usize,
    pub seed: u64,
}

impl GaussianDomainSpec {
    pub fn new(mean_pos: Vec<f64>, mean_neg: Vec<f64>, n_per_class: usize, seed: u64) -> Self {
        Self {
            mean_pos,
            mean_neg,
            n_per_class,
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n_per_class == 0 {
            return Err(Error::InvalidParameter(
                "n_per_class must be at least 1".into(),
            ));
        }
        if self.mean_pos.is_empty() || self.mean_pos.len() != self.mean_neg.len() {
            return Err(Error::Shape(
                "class means must share a nonzero dimension".into(),
            ));
        }
        if self
            .mean_pos
            .iter()
            .chain(&self.mean_neg)
            .any(|m| !m.is_finite())
        {
            return Err(Error::InvalidParameter("class means must be finite".into()));
        }
        Ok(())
    }
}

/// `n_per_class` rows from `N(mean_pos, I)` labeled `+1`, then as many from
/// `N(mean_neg, I)` labeled `-1`.
pub fn gen_gaussian_domain(spec: &GaussianDomainSpec) -> Result<LabeledDataset> {
    spec.validate()?;
    let d = spec.mean_pos.len();
    let n = spec.n_per_class;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut x = Array2::zeros((2 * n, d));
    for (i, mut row) in x.rows_mut().into_iter().enumerate() {
        let mean = if i < n {
            &spec.mean_pos
        } else {
            &spec.mean_neg
        };
        for (v, m) in row.iter_mut().zip(mean) {
            let z: f64 = StandardNormal.sample(&mut rng);
            *v = m + z;
        }
    }
    let y: Array1<f64> = (0..2 * n).map(|i| if i < n { 1.0 } else { -1.0 }).collect();
    LabeledDataset::new(x, y)
}
