//! Periodogram smoothing: circular running mean and per-scale
//! translation-invariant wavelet thresholding.

use crate::error::Result;
use crate::filters::WaveletFilter;
use crate::series::TimeSeries;
use crate::transform::{ndwt, ti_reconstruct, Periodogram};

/// Median of a slice (average of the middle pair for even lengths).
pub fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = s.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    }
}

/// Median absolute deviation about the median, scaled by 1.4826 for
/// consistency at the Gaussian.
pub fn mad_sigma(v: &[f64]) -> f64 {
    let m = median(v);
    let dev: Vec<f64> = v.iter().map(|x| (x - m).abs()).collect();
    1.4826 * median(&dev)
}

/// Centred circular moving average of half-width `w` applied to each scale
/// row. Windows covering the whole row collapse to the row mean.
pub fn smooth_running_mean(p: &Periodogram, w: usize) -> Periodogram {
    let t = p.values.ncols();
    let mut out = p.values.clone();
    let width = 2 * w + 1;
    for mut row in out.rows_mut() {
        let vals: Vec<f64> = row.to_vec();
        if width >= t {
            let mean = vals.iter().sum::<f64>() / t as f64;
            row.fill(mean);
            continue;
        }
        // prefix sums over two periods to avoid wrap branching
        let mut prefix = vec![0.0; 2 * t + 1];
        for i in 0..2 * t {
            prefix[i + 1] = prefix[i] + vals[i % t];
        }
        for k in 0..t {
            let lo = k + t - w;
            let hi = k + t + w + 1;
            row[k] = (prefix[hi] - prefix[lo]) / width as f64;
        }
    }
    Periodogram { values: out, source: p.source, smoothed: true }
}

/// Translation-invariant wavelet smoothing of each periodogram row: hard
/// threshold `lambda_j = sigma_j ln T` on all detail coefficients, with
/// `sigma_j` the MAD estimate from the finest-scale coefficients of row j.
pub fn smooth_ti_threshold(p: &Periodogram, smoothing_filter: &WaveletFilter) -> Result<Periodogram> {
    let t = p.values.ncols();
    let mut out = p.values.clone();
    let depth = t.trailing_zeros() as usize;
    let log_t = (t as f64).ln();
    for mut row in out.rows_mut() {
        let series = TimeSeries::new(row.to_vec())?;
        let mut coeffs = ndwt(&series, smoothing_filter, depth)?;
        let finest: Vec<f64> = coeffs.coeffs.row(0).to_vec();
        let lambda = mad_sigma(&finest) * log_t;
        coeffs.coeffs.mapv_inplace(|v| if v.abs() > lambda { v } else { 0.0 });
        let rec = ti_reconstruct(&coeffs)?;
        for (k, v) in rec.values.into_iter().enumerate() {
            row[k] = v;
        }
    }
    Ok(Periodogram { values: out, source: p.source, smoothed: true })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filters::{WaveletFamily, WaveletFilter};
    use crate::transform::PeriodogramSource;
    use ndarray::Array2;

    fn pgram(rows: Vec<Vec<f64>>) -> Periodogram {
        let r = rows.len();
        let c = rows[0].len();
        let flat: Vec<f64> = rows.into_iter().flatten().collect();
        Periodogram {
            values: Array2::from_shape_vec((r, c), flat).unwrap(),
            source: PeriodogramSource::Raw,
            smoothed: false,
        }
    }

    #[test]
    fn running_mean_constant_unchanged() {
        let p = pgram(vec![vec![4.0; 16]]);
        let s = smooth_running_mean(&p, 3);
        assert!(s.smoothed);
        assert!(s.values.iter().all(|&v| (v - 4.0).abs() < 1e-15));
    }

    #[test]
    fn running_mean_impulse() {
        let mut row = vec![0.0; 8];
        row[3] = 1.0;
        let p = pgram(vec![row]);
        let s = smooth_running_mean(&p, 1);
        let expected = [0.0, 0.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.0, 0.0, 0.0];
        for k in 0..8 {
            assert!((s.values[(0, k)] - expected[k]).abs() < 1e-15, "k={}", k);
        }
    }

    #[test]
    fn running_mean_impulse_wraps() {
        let mut row = vec![0.0; 8];
        row[0] = 1.0;
        let p = pgram(vec![row]);
        let s = smooth_running_mean(&p, 1);
        assert!((s.values[(0, 7)] - 1.0 / 3.0).abs() < 1e-15);
        assert!((s.values[(0, 1)] - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn running_mean_full_window_is_row_mean() {
        let p = pgram(vec![(0..16).map(|k| k as f64).collect()]);
        let s = smooth_running_mean(&p, 8);
        let mean = 7.5;
        assert!(s.values.iter().all(|&v| (v - mean).abs() < 1e-12));
    }

    #[test]
    fn ti_threshold_zero_row_stays_zero() {
        let f = WaveletFilter::new(WaveletFamily::Haar, 1).unwrap();
        let p = pgram(vec![vec![0.0; 32]]);
        let s = smooth_ti_threshold(&p, &f).unwrap();
        assert!(s.values.iter().all(|&v| v.abs() < 1e-14));
    }

    #[test]
    fn ti_threshold_constant_row_preserved() {
        let f = WaveletFilter::new(WaveletFamily::DaubLeastAsymmetric, 4).unwrap();
        let p = pgram(vec![vec![7.5; 64]]);
        let s = smooth_ti_threshold(&p, &f).unwrap();
        assert!(s.values.iter().all(|&v| (v - 7.5).abs() < 1e-10));
    }

    #[test]
    fn mad_of_constants_is_zero() {
        assert_eq!(mad_sigma(&[2.0, 2.0, 2.0, 2.0]), 0.0);
    }

    #[test]
    fn median_even_odd() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
    }
}
