//! Wavelet-threshold trend estimation driven by the spectral estimate.
//!
//! Coefficient variances come from the cross-wavelet operator applied to
//! the estimated spectrum; each coefficient gets a universal threshold
//! `lambda(r,s) = sigma_hat(r,s) sqrt(2 ln T)`. Scales coarser than the
//! configured depth pass through untouched since the trend lives there.

use crate::error::{Error, Result};
use crate::filters::{WaveletFamily, WaveletFilter};
use crate::operators::{cross_matrix, OperatorMatrix};
use crate::series::TimeSeries;
use crate::smoothing::mad_sigma;
use crate::spectrum::{default_max_scale, SpectrumEstimate};
use crate::transform::{dwt, dwt_reconstruct, ndwt, ti_reconstruct};
use crate::wavelets::AutocorrWaveletSet;
use ndarray::Array2;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ThresholdRule {
    Hard,
    Soft,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TrendTransform {
    /// Non-decimated transform with basis-averaged inversion (recommended).
    Ti,
    /// Decimated pyramid transform.
    Dwt,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendConfig {
    pub trend_filter: WaveletFilter,
    /// Number of finest scales thresholded.
    pub depth: usize,
    pub rule: ThresholdRule,
    pub transform: TrendTransform,
}

impl TrendConfig {
    /// Defaults: least asymmetric wavelet with 4 vanishing moments, hard
    /// thresholding of the finest `floor(0.7 log2 T)` scales, TI transform.
    pub fn default_for(t: usize) -> Self {
        TrendConfig {
            trend_filter: WaveletFilter::new(WaveletFamily::DaubLeastAsymmetric, 4)
                .expect("la4 exists"),
            depth: default_max_scale(t),
            rule: ThresholdRule::Hard,
            transform: TrendTransform::Ti,
        }
    }
}

#[derive(Debug, Clone)]
pub struct TrendEstimate {
    pub mu_hat: Vec<f64>,
    /// Repaired coefficient variances, depth x T.
    pub variances: Array2<f64>,
    pub negatives_repaired: usize,
    pub config: TrendConfig,
}

impl TrendEstimate {
    /// CSV export: `time_index,value,local_sd` where the band half-width is
    /// the square root of the repaired finest-scale variance.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("time_index,value,local_sd\n");
        for (k, v) in self.mu_hat.iter().enumerate() {
            out.push_str(&format!("{},{},{}\n", k, v, self.variances[(0, k)].sqrt()));
        }
        out
    }
}

/// Coefficient variances `sigma2(r,s) = sum_l C_{rl} S_hat_l(s/T)` for the
/// finest `depth` scales, with non-positive entries replaced by the nearest
/// positive value along the time axis (smaller offset first, then the
/// earlier index). Errors with `AllNegativeRow` if a whole row is
/// non-positive.
pub fn coefficient_variance(
    s: &SpectrumEstimate,
    c: &OperatorMatrix,
    depth: usize,
) -> Result<(Array2<f64>, usize)> {
    if depth == 0 || depth > s.depth() {
        return Err(Error::DepthExceeded { requested: depth, available: s.depth() });
    }
    if c.dim < s.depth() {
        return Err(Error::ShapeMismatch {
            detail: format!("cross matrix dim {} smaller than spectrum depth {}", c.dim, s.depth()),
        });
    }
    let t = s.len();
    let j1 = s.depth();
    let mut var = Array2::zeros((depth, t));
    for r in 0..depth {
        for k in 0..t {
            let mut acc = 0.0;
            for l in 0..j1 {
                acc += c.entries[(r, l)] * s.s_hat[(l, k)];
            }
            var[(r, k)] = acc;
        }
    }
    let mut repaired = 0usize;
    for r in 0..depth {
        let row: Vec<f64> = var.row(r).to_vec();
        if row.iter().all(|&v| v <= 0.0) {
            return Err(Error::AllNegativeRow { scale: -(r as i32 + 1) });
        }
        for k in 0..t {
            if row[k] <= 0.0 {
                let mut replacement = None;
                'search: for off in 1..t {
                    if k >= off && row[k - off] > 0.0 {
                        replacement = Some(row[k - off]);
                        break 'search;
                    }
                    if k + off < t && row[k + off] > 0.0 {
                        replacement = Some(row[k + off]);
                        break 'search;
                    }
                }
                var[(r, k)] = replacement.expect("row has a positive entry");
                repaired += 1;
            }
        }
    }
    Ok((var, repaired))
}

fn threshold(value: f64, lambda: f64, rule: ThresholdRule) -> f64 {
    match rule {
        ThresholdRule::Hard => {
            if value.abs() > lambda {
                value
            } else {
                0.0
            }
        }
        ThresholdRule::Soft => {
            if value.abs() > lambda {
                value.signum() * (value.abs() - lambda)
            } else {
                0.0
            }
        }
    }
}

/// Estimate the trend of `x` by thresholding its wavelet coefficients with
/// per-coefficient universal thresholds derived from the spectrum estimate.
pub fn estimate_trend(x: &TimeSeries, s: &SpectrumEstimate, cfg: &TrendConfig) -> Result<TrendEstimate> {
    let t = x.len();
    if !x.is_dyadic() {
        return Err(Error::NonDyadicLength { len: t });
    }
    if s.len() != t {
        return Err(Error::ShapeMismatch {
            detail: format!("spectrum length {} != series length {}", s.len(), t),
        });
    }
    let full_depth = x.dyadic_exponent()?;
    if cfg.depth == 0 || cfg.depth > full_depth {
        return Err(Error::DepthExceeded { requested: cfg.depth, available: full_depth });
    }
    let j1 = s.depth();
    let acw0 = AutocorrWaveletSet::from_filter(&s.config.analysis_filter, j1)?;
    let acw1 = AutocorrWaveletSet::from_filter(&cfg.trend_filter, j1)?;
    let c = cross_matrix(&acw0, &acw1, j1)?;
    let (variances, negatives_repaired) = coefficient_variance(s, &c, cfg.depth.min(j1))?;
    if cfg.depth > j1 {
        return Err(Error::DepthExceeded { requested: cfg.depth, available: j1 });
    }
    let lambda_scale = (2.0 * (t as f64).ln()).sqrt();
    let mu_hat = match cfg.transform {
        TrendTransform::Ti => {
            let mut coeffs = ndwt(x, &cfg.trend_filter, full_depth)?;
            for r in 0..cfg.depth {
                for k in 0..t {
                    let lambda = variances[(r, k)].sqrt() * lambda_scale;
                    coeffs.coeffs[(r, k)] = threshold(coeffs.coeffs[(r, k)], lambda, cfg.rule);
                }
            }
            ti_reconstruct(&coeffs)?.values
        }
        TrendTransform::Dwt => {
            let mut coeffs = dwt(x, &cfg.trend_filter, full_depth)?;
            for r in 0..cfg.depth {
                let step = 1usize << (r + 1);
                let row_len = coeffs.details[r].len();
                for i in 0..row_len {
                    // centre of the dyadic block this coefficient covers
                    let pos = (step * i + step / 2).min(t - 1);
                    let lambda = variances[(r, pos)].sqrt() * lambda_scale;
                    coeffs.details[r][i] = threshold(coeffs.details[r][i], lambda, cfg.rule);
                }
            }
            dwt_reconstruct(&coeffs).values
        }
    };
    Ok(TrendEstimate { mu_hat, variances, negatives_repaired, config: cfg.clone() })
}

/// Stationary-noise baseline: one global threshold per scale from the MAD
/// of that scale's coefficients; otherwise the same pipeline.
pub fn estimate_trend_global_baseline(x: &TimeSeries, cfg: &TrendConfig) -> Result<TrendEstimate> {
    let t = x.len();
    if !x.is_dyadic() {
        return Err(Error::NonDyadicLength { len: t });
    }
    let full_depth = x.dyadic_exponent()?;
    if cfg.depth == 0 || cfg.depth > full_depth {
        return Err(Error::DepthExceeded { requested: cfg.depth, available: full_depth });
    }
    let lambda_scale = (2.0 * (t as f64).ln()).sqrt();
    let mut variances = Array2::zeros((cfg.depth, t));
    let mu_hat = match cfg.transform {
        TrendTransform::Ti => {
            let mut coeffs = ndwt(x, &cfg.trend_filter, full_depth)?;
            for r in 0..cfg.depth {
                let row: Vec<f64> = coeffs.coeffs.row(r).to_vec();
                let sigma = mad_sigma(&row);
                let lambda = sigma * lambda_scale;
                for k in 0..t {
                    variances[(r, k)] = sigma * sigma;
                    coeffs.coeffs[(r, k)] = threshold(coeffs.coeffs[(r, k)], lambda, cfg.rule);
                }
            }
            ti_reconstruct(&coeffs)?.values
        }
        TrendTransform::Dwt => {
            let mut coeffs = dwt(x, &cfg.trend_filter, full_depth)?;
            for r in 0..cfg.depth {
                let sigma = mad_sigma(&coeffs.details[r]);
                let lambda = sigma * lambda_scale;
                for k in 0..t {
                    variances[(r, k)] = sigma * sigma;
                }
                for v in coeffs.details[r].iter_mut() {
                    *v = threshold(*v, lambda, cfg.rule);
                }
            }
            dwt_reconstruct(&coeffs).values
        }
    };
    Ok(TrendEstimate { mu_hat, variances, negatives_repaired: 0, config: cfg.clone() })
}
