//! Local autocovariance, local variance, and local autocorrelation from a
//! spectrum estimate: `c_hat(z, tau) = sum_{j=-J0}^{-1} S_hat_j(z) Psi_j(tau)`.

use crate::error::{Error, Result};
use crate::spectrum::SpectrumEstimate;
use crate::wavelets::AutocorrWaveletSet;
use ndarray::Array2;

/// Local autocovariance estimate on a time x lag grid.
#[derive(Debug, Clone)]
pub struct LacvEstimate {
    /// c_hat[(k, tau)] for tau = 0..=tau_max.
    pub c_hat: Array2<f64>,
    /// Number of finest scales used.
    pub j0: usize,
    /// Count of time points with negative lag-0 values (diagnostic).
    pub negative_variance_count: usize,
}

/// Default maximum lag, `2^(J0 - 3)` clamped to at least 1.
pub fn default_tau_max(j0: usize) -> usize {
    1usize << j0.saturating_sub(3)
}

/// Sum the finest `j0` scales of the spectrum against the autocorrelation
/// wavelets at each lag.
pub fn lacv(s: &SpectrumEstimate, acw: &AutocorrWaveletSet, j0: usize, tau_max: usize) -> Result<LacvEstimate> {
    if j0 == 0 || j0 > s.depth() {
        return Err(Error::DepthExceeded { requested: j0, available: s.depth() });
    }
    if j0 > acw.max_depth() {
        return Err(Error::DepthExceeded { requested: j0, available: acw.max_depth() });
    }
    let t = s.len();
    let mut c_hat = Array2::zeros((t, tau_max + 1));
    for tau in 0..=tau_max {
        let psi: Vec<f64> = (1..=j0).map(|m| acw.value(m, tau as i64)).collect();
        for k in 0..t {
            let mut acc = 0.0;
            for (m, &p) in psi.iter().enumerate() {
                acc += s.s_hat[(m, k)] * p;
            }
            c_hat[(k, tau)] = acc;
        }
    }
    let negative_variance_count = (0..t).filter(|&k| c_hat[(k, 0)] < 0.0).count();
    Ok(LacvEstimate { c_hat, j0, negative_variance_count })
}

impl LacvEstimate {
    pub fn len(&self) -> usize {
        self.c_hat.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.c_hat.is_empty()
    }

    pub fn tau_max(&self) -> usize {
        self.c_hat.ncols() - 1
    }

    /// The tau = 0 slice: local variance over time.
    pub fn local_variance(&self) -> Vec<f64> {
        (0..self.len()).map(|k| self.c_hat[(k, 0)]).collect()
    }

    /// Local autocorrelation with the variance floored at `floor` to avoid
    /// division blow-ups where the unbiased variance estimate dips <= 0.
    pub fn local_acf(&self, floor: f64) -> Array2<f64> {
        let mut out = self.c_hat.clone();
        for k in 0..self.len() {
            let denom = self.c_hat[(k, 0)].max(floor);
            for tau in 0..=self.tau_max() {
                out[(k, tau)] = self.c_hat[(k, tau)] / denom;
            }
        }
        out
    }

    /// Default ACF floor: 1e-8 times the largest variance estimate.
    pub fn default_floor(&self) -> f64 {
        let max_var = self.local_variance().into_iter().fold(0.0f64, f64::max);
        (1e-8 * max_var).max(f64::MIN_POSITIVE)
    }

    /// CSV export: `time_index,lag,value`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("time_index,lag,value\n");
        for k in 0..self.len() {
            for tau in 0..=self.tau_max() {
                out.push_str(&format!("{},{},{}\n", k, tau, self.c_hat[(k, tau)]));
            }
        }
        out
    }
}
