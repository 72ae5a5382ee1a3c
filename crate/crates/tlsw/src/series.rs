//! Time series container and differencing operators.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Real-valued samples; estimation entry points require dyadic length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    pub values: Vec<f64>,
    /// Optional (origin, sampling interval) in caller units.
    pub origin: Option<(f64, f64)>,
}

impl TimeSeries {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig { detail: "series contains non-finite values".to_string() });
        }
        Ok(TimeSeries { values, origin: None })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_dyadic(&self) -> bool {
        self.len() >= 2 && self.len().is_power_of_two()
    }

    /// log2 of the length for dyadic series.
    pub fn dyadic_exponent(&self) -> Result<usize> {
        if !self.is_dyadic() {
            return Err(Error::NonDyadicLength { len: self.len() });
        }
        Ok(self.len().trailing_zeros() as usize)
    }
}

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// n-th order difference with length preserved by replicating the first
/// valid difference into the left boundary.
pub fn difference(x: &TimeSeries, order: usize) -> Result<TimeSeries> {
    if order == 0 {
        return Err(Error::UnsupportedOrder { order, max: usize::MAX });
    }
    let t = x.len();
    if t <= order {
        return Err(Error::SeriesTooShort { len: t, needed: order });
    }
    let weights: Vec<f64> = (0..=order)
        .map(|k| {
            let b = binomial(order as u64, k as u64) as f64;
            if k % 2 == 0 {
                b
            } else {
                -b
            }
        })
        .collect();
    let mut out = vec![0.0; t];
    for i in order..t {
        out[i] = weights.iter().enumerate().map(|(k, w)| w * x.values[i - k]).sum();
    }
    for i in 0..order {
        out[i] = out[order];
    }
    Ok(TimeSeries { values: out, origin: x.origin })
}

/// Lag-L (seasonal) difference, length preserved by left padding.
pub fn seasonal_difference(x: &TimeSeries, period: usize) -> Result<TimeSeries> {
    if period == 0 {
        return Err(Error::InvalidConfig { detail: "seasonal period must be >= 1".to_string() });
    }
    let t = x.len();
    if t <= period {
        return Err(Error::SeriesTooShort { len: t, needed: period });
    }
    let mut out = vec![0.0; t];
    for i in period..t {
        out[i] = x.values[i] - x.values[i - period];
    }
    for i in 0..period {
        out[i] = out[period];
    }
    Ok(TimeSeries { values: out, origin: x.origin })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ts(v: &[f64]) -> TimeSeries {
        TimeSeries::new(v.to_vec()).unwrap()
    }

    #[test]
    fn difference_of_constant_is_zero() {
        let x = ts(&[3.5; 16]);
        let d = difference(&x, 1).unwrap();
        assert!(d.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn difference_of_linear_is_one() {
        let x = ts(&(0..16).map(|t| t as f64).collect::<Vec<_>>());
        let d = difference(&x, 1).unwrap();
        assert!(d.values.iter().all(|&v| (v - 1.0).abs() < 1e-15));
    }

    #[test]
    fn second_difference_hand_example() {
        let x = ts(&[1.0, 3.0, 6.0, 10.0]);
        let d = difference(&x, 2).unwrap();
        // interior: 6 - 2*3 + 1 = 1, 10 - 2*6 + 3 = 1
        assert_eq!(&d.values[2..], &[1.0, 1.0]);
        assert_eq!(&d.values[..2], &[1.0, 1.0]); // left pad replicates
    }

    #[test]
    fn repeated_first_difference_matches_higher_order_interior() {
        let x = ts(&(0..32).map(|t| ((t * t) as f64).sin()).collect::<Vec<_>>());
        let d2 = difference(&x, 2).unwrap();
        let d11 = difference(&difference(&x, 1).unwrap(), 1).unwrap();
        for i in 2..32 {
            assert!((d2.values[i] - d11.values[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn seasonal_difference_kills_periodic_pattern() {
        let pattern: Vec<f64> = (0..48).map(|t| [1.0, -2.0, 0.5, 7.0][t % 4]).collect();
        let d = seasonal_difference(&ts(&pattern), 4).unwrap();
        assert!(d.values.iter().all(|&v| v.abs() < 1e-15));
    }

    #[test]
    fn seasonal_lag_one_equals_first_difference() {
        let x = ts(&(0..16).map(|t| (t as f64).cos()).collect::<Vec<_>>());
        let a = seasonal_difference(&x, 1).unwrap();
        let b = difference(&x, 1).unwrap();
        assert_eq!(a.values, b.values);
    }

    #[test]
    fn seasonal_difference_of_linear() {
        let x = ts(&(0..16).map(|t| t as f64).collect::<Vec<_>>());
        let d = seasonal_difference(&x, 3).unwrap();
        assert!(d.values[3..].iter().all(|&v| (v - 3.0).abs() < 1e-15));
    }

    #[test]
    fn too_short_errors() {
        let x = ts(&[1.0, 2.0]);
        assert!(matches!(difference(&x, 2), Err(Error::SeriesTooShort { .. })));
        assert!(matches!(seasonal_difference(&x, 2), Err(Error::SeriesTooShort { .. })));
    }

    #[test]
    fn non_finite_rejected() {
        assert!(TimeSeries::new(vec![1.0, f64::NAN]).is_err());
    }
}
