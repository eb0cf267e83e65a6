//! Problem data of the semidefinite relaxation of the hinge-loss X-disc.
//!
//! With `N = n_T + n_S`, `z = [xi; beta; beta']` and target points first:
//!
//! - `a_i = 1/n_T` on the target block and `-1/n_S` on the source block;
//! - `c = [a; 0_{2p}]`;
//! - `f_i = e_i`;
//! - `Phi_i` holds `phi_i phi_i^T / 2` in both off-diagonal `beta`/`beta'`
//!   blocks, so `z^T Phi_i z = (beta . phi_i)(beta' . phi_i)`.
//!
//! Each `Phi_i` is determined by `phi_i`, so only the `N x p` design is stored.
//! Dense matrices are produced on request for dimensions up to [`MAX_SDP_DIM`].

use ndarray::{s, Array1, Array2, ArrayView1};

use crate::data::UnlabeledDataset;
use crate::error::{Error, Result};
use crate::hypothesis::BasisSpec;

/// Largest `N + 2p` for which dense matrices are materialized.
pub const MAX_SDP_DIM: usize = 4096;

#[derive(Debug, Clone, PartialEq)]
pub struct SdpProblemData {
    n_t: usize,
    n_s: usize,
    a: Array1<f64>,
    /// Row `i` is `phi(x_i)`.
    phi: Array2<f64>,
}

/// Build `(a, c, f_i, Phi_i)` for the given samples. Nothing is solved.
pub fn build_xdisc_sdp(
    source: &UnlabeledDataset,
    target: &UnlabeledDataset,
    basis: &BasisSpec,
) -> Result<SdpProblemData> {
    let (n_t, n_s) = (target.len(), source.len());
    let p = basis.output_dim;
    n_t.checked_add(n_s)
        .and_then(|n| p.checked_mul(2).and_then(|q| n.checked_add(q)))
        .and_then(|d| d.checked_mul(d))
        .ok_or_else(|| Error::DimensionOverflow("N + 2p overflows".into()))?;
    let phi_t = basis.design(target.features())?;
    let phi_s = basis.design(source.features())?;
    let mut phi = Array2::zeros((n_t + n_s, p));
    phi.slice_mut(s![..n_t, ..]).assign(&phi_t);
    phi.slice_mut(s![n_t.., ..]).assign(&phi_s);
    let a = (0..n_t + n_s)
        .map(|i| {
            if i < n_t {
                1.0 / n_t as f64
            } else {
                -1.0 / n_s as f64
            }
        })
        .collect();
    Ok(SdpProblemData { n_t, n_s, a, phi })
}

impl SdpProblemData {
    /// `N = n_T + n_S`.
    pub fn n(&self) -> usize {
        self.n_t + self.n_s
    }

    pub fn n_target(&self) -> usize {
        self.n_t
    }

    pub fn n_source(&self) -> usize {
        self.n_s
    }

    /// Basis dimension `p`.
    pub fn p(&self) -> usize {
        self.phi.ncols()
    }

    /// Length of `z`: `N + 2p`.
    pub fn dim(&self) -> usize {
        self.n() + 2 * self.p()
    }

    pub fn a(&self) -> &Array1<f64> {
        &self.a
    }

    pub fn c(&self) -> Array1<f64> {
        let mut c = Array1::zeros(self.dim());
        c.slice_mut(s![..self.n()]).assign(&self.a);
        c
    }

    pub fn f(&self, i: usize) -> Array1<f64> {
        let mut f = Array1::zeros(self.dim());
        f[i] = 1.0;
        f
    }

    pub fn phi_row(&self, i: usize) -> ArrayView1<'_, f64> {
        self.phi.row(i)
    }

    /// Dense `Phi_i`.
    pub fn phi_matrix(&self, i: usize) -> Result<Array2<f64>> {
        let d = self.dim();
        if d > MAX_SDP_DIM {
            return Err(Error::DimensionOverflow(format!(
                "dense {d} x {d} matrix above the limit of {MAX_SDP_DIM}"
            )));
        }
        let (n, p) = (self.n(), self.p());
        let v = self.phi.row(i);
        let mut m = Array2::zeros((d, d));
        for r in 0..p {
            for c in 0..p {
                let half = 0.5 * v[r] * v[c];
                m[[n + r, n + p + c]] = half;
                m[[n + p + r, n + c]] = half;
            }
        }
        Ok(m)
    }

    /// `z^T Phi_i z` without materializing `Phi_i`.
    pub fn quad_form(&self, i: usize, z: &Array1<f64>) -> f64 {
        let (n, p) = (self.n(), self.p());
        let v = self.phi.row(i);
        let beta = z.slice(s![n..n + p]);
        let beta2 = z.slice(s![n + p..n + 2 * p]);
        // Both off-diagonal halves contribute (beta.v)(beta'.v)/2.
        0.5 * v.dot(&beta) * v.dot(&beta2) + 0.5 * v.dot(&beta2) * v.dot(&beta)
    }

    /// Feasible `z` for a given `(beta, beta')`: slacks set to the hinge values
    /// `max(0, 1 - (beta . phi_i)(beta' . phi_i))`.
    pub fn lift(&self, beta: &Array1<f64>, beta2: &Array1<f64>) -> Result<Array1<f64>> {
        let p = self.p();
        if beta.len() != p || beta2.len() != p {
            return Err(Error::Shape(format!("expected {p}-dimensional parameters")));
        }
        let n = self.n();
        let mut z = Array1::zeros(self.dim());
        for i in 0..n {
            let v = self.phi.row(i);
            z[i] = (1.0 - v.dot(beta) * v.dot(beta2)).max(0.0);
        }
        z.slice_mut(s![n..n + p]).assign(beta);
        z.slice_mut(s![n + p..]).assign(beta2);
        Ok(z)
    }

    /// Whether `z` satisfies both constraint families up to `tol`.
    pub fn is_feasible(&self, z: &Array1<f64>, tol: f64) -> bool {
        z.len() == self.dim()
            && (0..self.n()).all(|i| z[i] >= -tol && self.quad_form(i, z) + z[i] >= 1.0 - tol)
    }

    /// `c^T z`.
    pub fn objective(&self, z: &Array1<f64>) -> f64 {
        self.a.dot(&z.slice(s![..self.n()]))
    }
}
