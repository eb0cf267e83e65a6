//! Synthetic digit-like images.
//!
//! Each of the ten digits has a fixed prototype: a few Gaussian blobs on a
//! `side x side` canvas, intensities in `0..=255`. A sample is its digit's
//! prototype under a per-sample contrast jitter plus pixel noise, clipped to
//! the pixel range. Domains differ by a style (contrast and brightness offset).

use ndarray::{Array1, Array2};
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::data::LabeledDataset;
use crate::error::{Error, Result};

use super::pixels::{even_odd_labels, PIXEL_MAX};
use super::stream_rng;

#[derive(Debug, Clone, PartialEq)]
pub struct SynthDigits {
    side: usize,
    prototypes: Vec<Array1<f64>>,
}

/// Raw pixel images with their digit labels.
#[derive(Debug, Clone, PartialEq)]
pub struct DigitSample {
    /// `n x side^2`, values in `0..=255`.
    pub pixels: Array2<f64>,
    pub digits: Vec<u8>,
}

impl DigitSample {
    /// Even/odd labeled dataset on the raw pixels.
    pub fn labeled(&self) -> Result<LabeledDataset> {
        LabeledDataset::new(self.pixels.clone(), even_odd_labels(&self.digits)?)
    }
}

/// How a domain renders the prototypes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Style {
    pub contrast: f64,
    pub offset: f64,
    /// Standard deviation of the per-pixel rendering noise.
    pub pixel_noise: f64,
}

impl Default for Style {
    fn default() -> Self {
        Self {
            contrast: 1.0,
            offset: 0.0,
            pixel_noise: 20.0,
        }
    }
}

impl SynthDigits {
    /// Prototypes drawn from `seed`: three blobs per digit.
    pub fn new(side: usize, seed: u64) -> Result<Self> {
        if side < 2 {
            return Err(Error::InvalidParameter(
                "canvas side must be at least 2".into(),
            ));
        }
        let mut rng = stream_rng(seed, 0);
        let s = side as f64;
        let prototypes = (0..10)
            .map(|_| {
                let blobs: Vec<(f64, f64, f64)> = (0..3)
                    .map(|_| {
                        (
                            rng.gen_range(0.0..s),
                            rng.gen_range(0.0..s),
                            rng.gen_range(0.12..0.3) * s,
                        )
                    })
                    .collect();
                Array1::from_shape_fn(side * side, |k| {
                    let (r, c) = ((k / side) as f64, (k % side) as f64);
                    let v: f64 = blobs
                        .iter()
                        .map(|&(br, bc, w)| {
                            (-((r - br).powi(2) + (c - bc).powi(2)) / (2.0 * w * w)).exp()
                        })
                        .sum();
                    (v.min(1.0) * 200.0).round()
                })
            })
            .collect();
        Ok(Self { side, prototypes })
    }

    pub fn dim(&self) -> usize {
        self.side * self.side
    }

    pub fn prototype(&self, digit: u8) -> &Array1<f64> {
        &self.prototypes[digit as usize]
    }

    /// `n` images with digits uniform over `digits`, drawn from stream `stream` of `seed`.
    pub fn sample(
        &self,
        n: usize,
        digits: &[u8],
        style: Style,
        seed: u64,
        stream: u64,
    ) -> Result<DigitSample> {
        if digits.is_empty() || digits.iter().any(|&d| d > 9) {
            return Err(Error::InvalidParameter(
                "digits must be a nonempty subset of 0..=9".into(),
            ));
        }
        if !(style.pixel_noise >= 0.0) {
            return Err(Error::InvalidParameter(
                "pixel noise must be nonnegative".into(),
            ));
        }
        let mut rng = stream_rng(seed, stream);
        let noise = Normal::new(0.0, style.pixel_noise.max(f64::MIN_POSITIVE)).expect("checked");
        let mut pixels = Array2::zeros((n, self.dim()));
        let mut labels = Vec::with_capacity(n);
        for mut row in pixels.rows_mut() {
            let d = digits[rng.gen_range(0..digits.len())];
            labels.push(d);
            let jitter = rng.gen_range(0.8..1.2);
            for (v, &p) in row.iter_mut().zip(self.prototypes[d as usize].iter()) {
                let z = if style.pixel_noise > 0.0 {
                    noise.sample(&mut rng)
                } else {
                    0.0
                };
                *v = (style.contrast * jitter * p + style.offset + z).clamp(0.0, PIXEL_MAX);
            }
        }
        Ok(DigitSample {
            pixels,
            digits: labels,
        })
    }
}
