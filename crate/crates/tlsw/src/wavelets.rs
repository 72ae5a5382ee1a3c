//! Discrete non-decimated wavelet vectors and their autocorrelation functions.
//!
//! Scales are indexed by positive depth `m = 1, 2, ...` corresponding to the
//! negative scale `j = -m` (m = 1 finest). The vector at depth m has length
//! `L_m = (2^m - 1)(N_h - 1) + 1` and is built by the upsampled low-pass
//! recursion from the high-pass base case.

use crate::error::{Error, Result};
use crate::filters::WaveletFilter;

/// Largest supported cascade depth; L_m grows like 2^m (N_h - 1).
pub const MAX_CASCADE_DEPTH: usize = 20;

/// Discrete wavelet vectors psi_j for j = -1..-max_depth.
#[derive(Debug, Clone)]
pub struct DiscreteWaveletSet {
    pub filter: WaveletFilter,
    wavelets: Vec<Vec<f64>>,
    /// Energy centroid of each wavelet, used to centre NDWT coefficients in time.
    centres: Vec<usize>,
}

/// Expected support length of the depth-m wavelet.
pub fn support_len(filter_len: usize, depth: usize) -> usize {
    ((1usize << depth) - 1) * (filter_len - 1) + 1
}

fn energy_centre(v: &[f64]) -> usize {
    let c: f64 = v.iter().enumerate().map(|(n, x)| n as f64 * x * x).sum();
    c.round() as usize
}

/// Convolve `filter` with `v` upsampled by two: out_n = sum_k filter_{n-2k} v_k.
fn upsampled_convolve(filter: &[f64], v: &[f64]) -> Vec<f64> {
    let out_len = 2 * v.len() + filter.len() - 2;
    let mut out = vec![0.0; out_len];
    for (k, &vk) in v.iter().enumerate() {
        for (i, &fi) in filter.iter().enumerate() {
            out[2 * k + i] += fi * vk;
        }
    }
    out
}

impl DiscreteWaveletSet {
    /// Build wavelet vectors down to `max_depth` by the cascade recursion:
    /// the finest scale is the high-pass filter, each coarser scale the
    /// upsampled low-pass convolution of the previous one.
    pub fn new(filter: &WaveletFilter, max_depth: usize) -> Result<Self> {
        if max_depth == 0 || max_depth > MAX_CASCADE_DEPTH {
            return Err(Error::InvalidConfig {
                detail: format!("cascade depth {} outside 1..={}", max_depth, MAX_CASCADE_DEPTH),
            });
        }
        let mut wavelets = Vec::with_capacity(max_depth);
        wavelets.push(filter.high_pass.clone());
        // Carrier of the recursion: the scaling-side vector delta -> phi.
        let mut carrier = filter.high_pass.clone();
        for _ in 1..max_depth {
            carrier = upsampled_convolve(&filter.low_pass, &carrier);
            wavelets.push(carrier.clone());
        }
        let centres = wavelets.iter().map(|w| energy_centre(w)).collect();
        Ok(DiscreteWaveletSet { filter: filter.clone(), wavelets, centres })
    }

    pub fn max_depth(&self) -> usize {
        self.wavelets.len()
    }

    /// Wavelet vector at depth m (scale -m), m = 1..=max_depth.
    pub fn wavelet(&self, depth: usize) -> &[f64] {
        &self.wavelets[depth - 1]
    }

    /// Index of the wavelet's energy centroid at depth m.
    pub fn centre(&self, depth: usize) -> usize {
        self.centres[depth - 1]
    }

    /// Discrete father wavelet (scaling vector) at `depth`, with its centroid.
    pub fn father(&self, depth: usize) -> (Vec<f64>, usize) {
        let mut carrier = self.filter.low_pass.clone();
        for _ in 1..depth {
            carrier = upsampled_convolve(&self.filter.low_pass, &carrier);
        }
        let c = energy_centre(&carrier);
        (carrier, c)
    }
}

/// Autocorrelation wavelets Psi_j(tau) = sum_k psi_{j,k} psi_{j,k-tau}.
///
/// Only tau >= 0 is stored; the function is even in tau and zero outside
/// |tau| <= L_j - 1.
#[derive(Debug, Clone)]
pub struct AutocorrWaveletSet {
    pub filter: WaveletFilter,
    half: Vec<Vec<f64>>,
}

impl AutocorrWaveletSet {
    pub fn new(dws: &DiscreteWaveletSet) -> Self {
        let half = dws
            .wavelets
            .iter()
            .map(|w| {
                let l = w.len();
                (0..l)
                    .map(|tau| (tau..l).map(|k| w[k] * w[k - tau]).sum())
                    .collect()
            })
            .collect();
        AutocorrWaveletSet { filter: dws.filter.clone(), half }
    }

    pub fn from_filter(filter: &WaveletFilter, max_depth: usize) -> Result<Self> {
        Ok(Self::new(&DiscreteWaveletSet::new(filter, max_depth)?))
    }

    pub fn max_depth(&self) -> usize {
        self.half.len()
    }

    /// Psi at depth m evaluated at integer lag tau (any sign).
    pub fn value(&self, depth: usize, tau: i64) -> f64 {
        let row = &self.half[depth - 1];
        let t = tau.unsigned_abs() as usize;
        if t < row.len() {
            row[t]
        } else {
            0.0
        }
    }

    /// Support radius: Psi_m(tau) = 0 for |tau| > radius.
    pub fn radius(&self, depth: usize) -> usize {
        self.half[depth - 1].len() - 1
    }
}
