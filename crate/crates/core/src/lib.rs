//! Domain-discrepancy estimation for unsupervised domain adaptation.
//!
//! The crate estimates how far a labeled source sample is from an unlabeled
//! target sample under three measures:
//!
//! - the source-guided discrepancy (S-disc), estimated by cost-sensitive
//!   learning on pseudo-labeled data ([`disc::estimate_sdisc`]);
//! - the d_H proxy, from a source-vs-target separator ([`disc::estimate_dh`]);
//! - the X-disc, by exact pair enumeration over a finite grid
//!   ([`disc::xdisc_bruteforce`]).
//!
//! Around these sit the finite-sample bound calculators ([`theory`]), data
//! generation and IDX ingestion ([`ingest`]), and the experiment harnesses
//! ([`experiments`]) driven by the `disckit` binary.

// `!(x > 0.0)` style checks reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod data;
pub mod disc;
pub mod error;
pub mod experiments;
pub mod grid;
pub mod hypothesis;
pub mod ingest;
pub mod learner;
pub mod loss;
pub mod theory;

pub use ndarray::{Array1, Array2};

pub use data::{LabeledDataset, UnlabeledDataset};
pub use error::{Error, IdxErrorKind, Result};
pub use grid::{Grid, SweepGrid};
pub use hypothesis::{sign, BasisKind, BasisSpec, Hypothesis, HypothesisClassSpec};
pub use learner::{
    train, train_detailed, train_from, train_tracking_zero_one, TrainConfig, TrainOutcome,
    WeightedSample,
};
pub use loss::{empirical_risk, ErrorCount, Loss, Reference};
