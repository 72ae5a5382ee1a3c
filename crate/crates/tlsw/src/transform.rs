//! Non-decimated wavelet transform, raw wavelet periodogram, and the
//! translation-invariant (basis-averaged) inverse.
//!
//! The transform runs the a-trous filter bank with periodic boundaries
//! (cost O(T J N_h) instead of O(T 2^J) for explicit per-scale
//! convolution). Coefficient rows are circularly shifted so that index k
//! aligns with the energy centre of the scale-j wavelet; `d[j][k]` then
//! describes behaviour around time k at every scale, which is what the
//! spectral and trend estimators assume.

use crate::error::{Error, Result};
use crate::filters::WaveletFilter;
use crate::series::TimeSeries;
use crate::wavelets::DiscreteWaveletSet;
use ndarray::Array2;

/// Boundary rule of the transform; only periodic is implemented.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    Periodic,
}

/// NDWT detail coefficients d_{j,k} plus the coarse scaling remainder.
#[derive(Debug, Clone)]
pub struct NdwtCoefficients {
    pub wavelet: WaveletFilter,
    pub depth: usize,
    /// Row m-1 holds scale -m; shape depth x T.
    pub coeffs: Array2<f64>,
    /// Scaling (father) coefficients at `depth`, length T, centred like the rows.
    pub scaling: Vec<f64>,
    pub boundary: Boundary,
    /// Circular shift applied to each row to centre it (needed to invert).
    shifts: Vec<usize>,
    scaling_shift: usize,
}

/// Circular convolution of `x` with `filter` upsampled by `step`:
/// out[t] = sum_i f[i] x[(t - i*step) mod T].
fn conv_upsampled(x: &[f64], filter: &[f64], step: usize) -> Vec<f64> {
    let t = x.len();
    let mut out = vec![0.0; t];
    for (i, &f) in filter.iter().enumerate() {
        let off = (i * step) % t;
        for k in 0..t {
            let src = if k >= off { k - off } else { k + t - off };
            out[k] += f * x[src];
        }
    }
    out
}

/// Adjoint of `conv_upsampled`: out[t] = sum_i f[i] y[(t + i*step) mod T].
fn corr_upsampled(y: &[f64], filter: &[f64], step: usize) -> Vec<f64> {
    let t = y.len();
    let mut out = vec![0.0; t];
    for (i, &f) in filter.iter().enumerate() {
        let off = (i * step) % t;
        for k in 0..t {
            let src = (k + off) % t;
            out[k] += f * y[src];
        }
    }
    out
}

fn roll_left(v: &[f64], by: usize) -> Vec<f64> {
    let t = v.len();
    let by = by % t;
    let mut out = Vec::with_capacity(t);
    out.extend_from_slice(&v[by..]);
    out.extend_from_slice(&v[..by]);
    out
}

fn roll_right(v: &[f64], by: usize) -> Vec<f64> {
    let t = v.len();
    roll_left(v, (t - by % t) % t)
}

/// Non-decimated wavelet transform of a dyadic-length series.
pub fn ndwt(x: &TimeSeries, filter: &WaveletFilter, depth: usize) -> Result<NdwtCoefficients> {
    let t = x.len();
    if !x.is_dyadic() {
        return Err(Error::NonDyadicLength { len: t });
    }
    let j = x.dyadic_exponent()?;
    if depth == 0 || depth > j {
        return Err(Error::DepthExceeded { requested: depth, available: j });
    }
    let dws = DiscreteWaveletSet::new(filter, depth)?;
    let mut coeffs = Array2::zeros((depth, t));
    let mut approx = x.values.clone();
    let mut shifts = Vec::with_capacity(depth);
    for m in 1..=depth {
        let step = 1usize << (m - 1);
        let detail = conv_upsampled(&approx, &filter.high_pass, step);
        approx = conv_upsampled(&approx, &filter.low_pass, step);
        let c = dws.centre(m) % t;
        shifts.push(c);
        let centred = roll_left(&detail, c);
        for (k, v) in centred.into_iter().enumerate() {
            coeffs[(m - 1, k)] = v;
        }
    }
    let (_, father_centre) = dws.father(depth);
    let scaling_shift = father_centre % t;
    let scaling = roll_left(&approx, scaling_shift);
    Ok(NdwtCoefficients {
        wavelet: filter.clone(),
        depth,
        coeffs,
        scaling,
        boundary: Boundary::Periodic,
        shifts,
        scaling_shift,
    })
}

/// Invert an NDWT by basis averaging. With unmodified coefficients this
/// reproduces the input to floating-point accuracy; with thresholded
/// coefficients it is the translation-invariant estimate.
pub fn ti_reconstruct(c: &NdwtCoefficients) -> Result<TimeSeries> {
    let t = c.coeffs.ncols();
    if c.scaling.len() != t {
        return Err(Error::ShapeMismatch {
            detail: format!("scaling remainder length {} != T {}", c.scaling.len(), t),
        });
    }
    let mut acc = roll_right(&c.scaling, c.scaling_shift);
    for m in (1..=c.depth).rev() {
        let step = 1usize << (m - 1);
        let row: Vec<f64> = c.coeffs.row(m - 1).to_vec();
        let detail = roll_right(&row, c.shifts[m - 1]);
        let up = corr_upsampled(&acc, &c.wavelet.low_pass, step);
        let det = corr_upsampled(&detail, &c.wavelet.high_pass, step);
        acc = up.iter().zip(det.iter()).map(|(a, d)| 0.5 * (a + d)).collect();
    }
    TimeSeries::new(acc)
}

/// How a periodogram was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PeriodogramSource {
    Raw,
    Differenced(usize),
    Seasonal(usize),
}

/// Squared NDWT coefficients I^j_k.
#[derive(Debug, Clone)]
pub struct Periodogram {
    pub values: Array2<f64>,
    pub source: PeriodogramSource,
    pub smoothed: bool,
}

/// Raw wavelet periodogram: elementwise square of the detail coefficients.
pub fn periodogram(c: &NdwtCoefficients, source: PeriodogramSource) -> Periodogram {
    Periodogram { values: c.coeffs.mapv(|v| v * v), source, smoothed: false }
}

/// Decimated (pyramid) DWT with periodic boundaries; used by the optional
/// DWT trend-thresholding route.
#[derive(Debug, Clone)]
pub struct DwtCoefficients {
    pub wavelet: WaveletFilter,
    pub depth: usize,
    /// details[m-1] has length T / 2^m.
    pub details: Vec<Vec<f64>>,
    pub approx: Vec<f64>,
}

pub fn dwt(x: &TimeSeries, filter: &WaveletFilter, depth: usize) -> Result<DwtCoefficients> {
    let t = x.len();
    if !x.is_dyadic() {
        return Err(Error::NonDyadicLength { len: t });
    }
    let j = x.dyadic_exponent()?;
    if depth == 0 || depth > j {
        return Err(Error::DepthExceeded { requested: depth, available: j });
    }
    let mut approx = x.values.clone();
    let mut details = Vec::with_capacity(depth);
    for _ in 1..=depth {
        let n = approx.len();
        let half = n / 2;
        let mut d = vec![0.0; half];
        let mut a = vec![0.0; half];
        for i in 0..half {
            let mut sd = 0.0;
            let mut sa = 0.0;
            for (k, (&h, &g)) in filter.low_pass.iter().zip(filter.high_pass.iter()).enumerate() {
                let src = (2 * i + k) % n;
                sa += h * approx[src];
                sd += g * approx[src];
            }
            d[i] = sd;
            a[i] = sa;
        }
        details.push(d);
        approx = a;
    }
    Ok(DwtCoefficients { wavelet: filter.clone(), depth, details, approx })
}

pub fn dwt_reconstruct(c: &DwtCoefficients) -> TimeSeries {
    let mut approx = c.approx.clone();
    for m in (1..=c.depth).rev() {
        let d = &c.details[m - 1];
        let n = 2 * d.len();
        let mut out = vec![0.0; n];
        for i in 0..d.len() {
            for (k, (&h, &g)) in c.wavelet.low_pass.iter().zip(c.wavelet.high_pass.iter()).enumerate() {
                let dst = (2 * i + k) % n;
                out[dst] += h * approx[i] + g * d[i];
            }
        }
        approx = out;
    }
    TimeSeries::new(approx).expect("reconstruction is finite")
}
