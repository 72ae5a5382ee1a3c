//! Evolutionary wavelet spectrum estimation from a (possibly differenced)
//! series: periodogram, smoothing, and bias correction by the inverse of
//! the matching operator matrix.

use crate::error::{Error, Result};
use crate::filters::{WaveletFamily, WaveletFilter};
use crate::operators::{
    diff_correction_matrix, inner_product_matrix, seasonal_correction_matrix, OperatorMatrix,
};
use crate::series::{difference, seasonal_difference, TimeSeries};
use crate::smoothing::{smooth_running_mean, smooth_ti_threshold};
use crate::transform::{ndwt, periodogram, Periodogram, PeriodogramSource};
use crate::wavelets::AutocorrWaveletSet;
use ndarray::Array2;
use serde::{Deserialize, Serialize};

/// Trend-removal step applied before the wavelet periodogram.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Detrend {
    /// No differencing; classical A-inverse correction.
    None,
    /// n-th order differencing, corrected by the D^n inverse.
    Diff(usize),
    /// Lag-L differencing, corrected by the D^L inverse.
    Seasonal(usize),
}

/// Periodogram smoother.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Smoother {
    /// No smoothing; used for averaged-estimate studies where realisation
    /// averaging already controls the variance.
    None,
    /// Centred circular running mean of half-width W.
    RunningMean(usize),
    /// Per-scale translation-invariant hard thresholding with the given
    /// smoothing wavelet.
    TiThreshold(WaveletFilter),
}

/// Rule-of-thumb number of analysed scales, `floor(0.7 log2 T)`.
pub fn default_max_scale(t: usize) -> usize {
    ((t as f64).log2() * 0.7).floor() as usize
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralConfig {
    pub analysis_filter: WaveletFilter,
    /// Number of scales J1 analysed.
    pub depth: usize,
    pub detrend: Detrend,
    pub smoother: Smoother,
}

impl SpectralConfig {
    /// Defaults for a series of length `t`: EP4 analysis wavelet, first
    /// differencing, running-mean smoothing with half-width T/8.
    pub fn default_for(t: usize) -> Self {
        SpectralConfig {
            analysis_filter: WaveletFilter::new(WaveletFamily::DaubExtremalPhase, 4)
                .expect("ep4 exists"),
            depth: default_max_scale(t),
            detrend: Detrend::Diff(1),
            smoother: Smoother::RunningMean(t / 8),
        }
    }
}

/// Estimated spectrum, scale-major: row m-1 holds scale -m.
#[derive(Debug, Clone)]
pub struct SpectrumEstimate {
    pub s_hat: Array2<f64>,
    pub config: SpectralConfig,
    /// The bias operator that was inverted (not its inverse).
    pub correction: OperatorMatrix,
    /// Count of negative estimates per scale; negatives are legitimate
    /// (the estimator is unbiased, not non-negative) and diagnostic.
    pub negative_counts: Vec<usize>,
}

impl SpectrumEstimate {
    pub fn depth(&self) -> usize {
        self.s_hat.nrows()
    }

    pub fn len(&self) -> usize {
        self.s_hat.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.s_hat.is_empty()
    }

    /// Long-format CSV: `scale,j,time_index,value`.
    pub fn to_long_csv(&self) -> String {
        let mut out = String::from("scale,j,time_index,value\n");
        for m in 1..=self.depth() {
            for k in 0..self.len() {
                out.push_str(&format!("{},{},{},{}\n", m, -(m as i64), k, self.s_hat[(m - 1, k)]));
            }
        }
        out
    }

    /// JSON envelope with the resolved configuration and diagnostics.
    pub fn diagnostics_json(&self) -> serde_json::Value {
        serde_json::json!({
            "config": self.config,
            "diagnostics": {
                "correction_kind": self.correction.kind.name(),
                "correction_condition_number": self.correction.condition_number(),
                "negative_counts": self.negative_counts,
            }
        })
    }
}

fn detrend_series(x: &TimeSeries, detrend: Detrend) -> Result<(TimeSeries, PeriodogramSource)> {
    match detrend {
        Detrend::None => Ok((x.clone(), PeriodogramSource::Raw)),
        Detrend::Diff(n) => Ok((difference(x, n)?, PeriodogramSource::Differenced(n))),
        Detrend::Seasonal(l) => Ok((seasonal_difference(x, l)?, PeriodogramSource::Seasonal(l))),
    }
}

/// Build the bias operator matching the detrend mode.
pub fn correction_matrix(acw: &AutocorrWaveletSet, depth: usize, detrend: Detrend) -> Result<OperatorMatrix> {
    match detrend {
        Detrend::None => inner_product_matrix(acw, depth, 0),
        Detrend::Diff(n) => diff_correction_matrix(acw, depth, n),
        Detrend::Seasonal(l) => seasonal_correction_matrix(acw, depth, l),
    }
}

/// Smoothed raw wavelet periodogram of the detrended series.
pub fn smoothed_periodogram(x: &TimeSeries, cfg: &SpectralConfig) -> Result<Periodogram> {
    let (detrended, source) = detrend_series(x, cfg.detrend)?;
    let coeffs = ndwt(&detrended, &cfg.analysis_filter, cfg.depth)?;
    let raw = periodogram(&coeffs, source);
    match &cfg.smoother {
        Smoother::None => Ok(raw),
        Smoother::RunningMean(w) => Ok(smooth_running_mean(&raw, *w)),
        Smoother::TiThreshold(f) => smooth_ti_threshold(&raw, f),
    }
}

/// Full spectral estimation pipeline: detrend, transform, square, smooth,
/// and correct each per-time scale vector by the inverse bias operator.
pub fn estimate_ews(x: &TimeSeries, cfg: &SpectralConfig) -> Result<SpectrumEstimate> {
    let t = x.len();
    if !x.is_dyadic() || t < 64 {
        return Err(Error::NonDyadicLength { len: t });
    }
    let max_depth = x.dyadic_exponent()?;
    if cfg.depth == 0 || cfg.depth > max_depth {
        return Err(Error::DepthExceeded { requested: cfg.depth, available: max_depth });
    }
    let smoothed = smoothed_periodogram(x, cfg)?;
    let acw = AutocorrWaveletSet::from_filter(&cfg.analysis_filter, cfg.depth)?;
    let correction = correction_matrix(&acw, cfg.depth, cfg.detrend)?;
    let inverse = correction.invert()?;
    let mut s_hat = Array2::zeros((cfg.depth, t));
    let mut col = vec![0.0; cfg.depth];
    for k in 0..t {
        for m in 0..cfg.depth {
            col[m] = smoothed.values[(m, k)];
        }
        let corrected = inverse.apply(&col);
        for (m, v) in corrected.into_iter().enumerate() {
            s_hat[(m, k)] = v;
        }
    }
    let negative_counts =
        (0..cfg.depth).map(|m| s_hat.row(m).iter().filter(|&&v| v < 0.0).count()).collect();
    Ok(SpectrumEstimate { s_hat, config: cfg.clone(), correction, negative_counts })
}

/// Expected periodogram `E I_k = M S(k/T)` given a true spectrum array;
/// the Monte-Carlo oracle for bias tests.
pub fn expected_periodogram(s_true: &Array2<f64>, m: &OperatorMatrix) -> Result<Array2<f64>> {
    if s_true.nrows() != m.dim {
        return Err(Error::ShapeMismatch {
            detail: format!("spectrum has {} scales, operator dim {}", s_true.nrows(), m.dim),
        });
    }
    let t = s_true.ncols();
    let mut out = Array2::zeros((m.dim, t));
    let mut col = vec![0.0; m.dim];
    for k in 0..t {
        for r in 0..m.dim {
            col[r] = s_true[(r, k)];
        }
        let v = m.apply(&col);
        for (r, val) in v.into_iter().enumerate() {
            out[(r, k)] = val;
        }
    }
    Ok(out)
}
