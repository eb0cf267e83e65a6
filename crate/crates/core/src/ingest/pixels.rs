//! Digit labels, selection bias and pixel-space corruption.
//!
//! Corruption works on raw `0..=255` pixel values; [`scale_pixels`] maps to
//! `[0, 1]` afterwards, just before training.

use ndarray::{Array1, Array2};
use rand_distr::{Distribution, Normal};

use crate::data::LabeledDataset;
use crate::error::{Error, Result};

use super::stream_rng;

pub const PIXEL_MAX: f64 = 255.0;

/// Even digits map to `+1`, odd digits to `-1`.
pub fn even_odd_labels(digits: &[u8]) -> Result<Array1<f64>> {
    digits
        .iter()
        .enumerate()
        .map(|(row, &d)| match d {
            0..=9 => Ok(if d % 2 == 0 { 1.0 } else { -1.0 }),
            _ => Err(Error::InvalidParameter(format!(
                "digit {d} at row {row} is not in 0..=9"
            ))),
        })
        .collect()
}

/// Rows whose digit is in `keep`, in their original order.
pub fn selection_bias_filter(
    data: &LabeledDataset,
    digits: &[u8],
    keep: &[u8],
) -> Result<LabeledDataset> {
    if digits.len() != data.len() {
        return Err(Error::Shape(format!(
            "{} digits for {} rows",
            digits.len(),
            data.len()
        )));
    }
    let rows: Vec<usize> = (0..data.len())
        .filter(|&i| keep.contains(&digits[i]))
        .collect();
    if rows.is_empty() {
        return Err(Error::Empty(format!("no rows with a digit in {keep:?}")));
    }
    data.select(&rows)
}

/// `clamp(x + N(0, sigma^2), 0, 255)` elementwise, row-major draw order.
pub fn corrupt_gaussian_noise(x: &Array2<f64>, sigma: f64, seed: u64) -> Result<Array2<f64>> {
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "noise sigma must be nonnegative, got {sigma}"
        )));
    }
    if let Some(((row, col), _)) = x
        .indexed_iter()
        .find(|(_, &v)| !(0.0..=PIXEL_MAX).contains(&v))
    {
        return Err(Error::InvalidParameter(format!(
            "pixel at row {row}, column {col} is outside 0..=255"
        )));
    }
    if sigma == 0.0 {
        return Ok(x.clone());
    }
    let normal = Normal::new(0.0, sigma).expect("sigma checked");
    let mut rng = stream_rng(seed, 0);
    Ok(x.mapv(|v| (v + normal.sample(&mut rng)).clamp(0.0, PIXEL_MAX)))
}

/// [`corrupt_gaussian_noise`] on the features; labels are untouched.
pub fn corrupt_dataset(data: &LabeledDataset, sigma: f64, seed: u64) -> Result<LabeledDataset> {
    data.with_features(corrupt_gaussian_noise(data.features(), sigma, seed)?)
}

/// Map `0..=255` pixels to `[0, 1]`.
pub fn scale_pixels(x: &Array2<f64>) -> Array2<f64> {
    x / PIXEL_MAX
}
