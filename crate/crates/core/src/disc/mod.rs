//! Discrepancy estimators.
//!
//! - [`estimate_sdisc`]: the source-guided discrepancy through cost-sensitive
//!   learning on pseudo-labeled data, evaluated with the 0-1 loss.
//! - [`estimate_dh`]: the d_H proxy through a source-vs-target separator.
//! - [`fixed_ref_disc`], [`sdisc_bruteforce`], [`xdisc_bruteforce`]: exact
//!   enumeration over a finite grid, used as oracles.
//! - [`build_xdisc_sdp`]: problem data of the semidefinite relaxation of the
//!   hinge-loss X-disc (construction only).
//! - [`rank_sources`]: source selection by ascending discrepancy.

mod dh;
mod fixed_ref;
mod rank;
mod report;
mod sdisc;
mod sdp;
mod xdisc;

pub use dh::{dh_bruteforce, estimate_dh};
pub use fixed_ref::{fixed_ref_disc, grid_min_cost_sensitive, FixedRefResult, GridMinimum};
pub use rank::{rank_sources, RankEntry, Ranking, SourceEntry, SourceTag};
pub use report::{Diagnostics, DiscrepancyReport, Measure, ResultRecord, Witness};
pub use sdisc::{estimate_sdisc, pseudo_label, sdisc_bruteforce, source_classifier};
pub use sdp::{build_xdisc_sdp, SdpProblemData, MAX_SDP_DIM};
pub use xdisc::{xdisc_bruteforce, xdisc_bruteforce_capped, DEFAULT_GRID_CAP};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::grid::{Grid, SweepGrid};
use crate::hypothesis::{BasisKind, BasisSpec, HypothesisClassSpec};
use crate::learner::TrainConfig;
use crate::Array2;

/// Everything an estimator needs besides the data: how to build the class
/// from the samples at hand, and how to train in it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimatorConfig {
    pub train: TrainConfig,
    pub basis: BasisKind,
    /// Class radius; `100 * (1 + 1 / D_phi)` when unset.
    pub norm_bound: Option<f64>,
    /// Directions for the oracle grid on inputs of dimension two or more.
    pub grid_directions: usize,
    /// Largest explicit grid accepted by the pair enumeration.
    pub grid_cap: usize,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        Self {
            train: TrainConfig::default(),
            basis: BasisKind::Affine,
            norm_bound: None,
            grid_directions: crate::grid::DEFAULT_DIRECTIONS_2D,
            grid_cap: DEFAULT_GRID_CAP,
        }
    }
}

impl EstimatorConfig {
    /// Class whose feature bound covers every given sample.
    pub fn class_for(&self, samples: &[&Array2<f64>]) -> Result<HypothesisClassSpec> {
        let basis = BasisSpec::from_data(self.basis, samples)?;
        match self.norm_bound {
            Some(l) => HypothesisClassSpec::new(basis, l),
            None => Ok(HypothesisClassSpec::linear(basis)),
        }
    }

    /// Class over affine inputs with the default oracle grid attached: every
    /// threshold in 1-D, the direction net crossed with data midpoints above.
    pub fn oracle_class_for(&self, samples: &[&Array2<f64>]) -> Result<HypothesisClassSpec> {
        let cfg = EstimatorConfig {
            basis: BasisKind::Affine,
            ..*self
        };
        let class = cfg.class_for(samples)?;
        let dim = class.basis().input_dim;
        let grid = if dim == 1 {
            SweepGrid::thresholds_1d()
        } else {
            SweepGrid::direction_net(dim, self.grid_directions)?
        };
        class.with_grid(Grid::Sweep(grid))
    }
}
