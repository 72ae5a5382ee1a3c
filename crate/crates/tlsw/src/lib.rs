//! Joint estimation of time-varying trend and second-order structure of
//! nonstationary time series in the locally stationary wavelet framework.
//!
//! The pipeline differences a series to remove its trend, corrects the
//! wavelet periodogram of the differenced series with lagged
//! autocorrelation-wavelet operator matrices to recover the spectrum of the
//! original process, and feeds the spectral estimate into a
//! translation-invariant wavelet thresholding trend estimator. A seedable
//! simulator and a Monte-Carlo benchmark harness round out the crate.

pub mod error;
pub mod filters;
pub mod harness;
pub mod lacv;
pub mod operators;
pub mod series;
pub mod simulate;
pub mod smoothing;
pub mod spectrum;
pub mod transform;
pub mod trend;
pub mod wavelets;

pub use error::{Error, Result};
pub use filters::{WaveletFamily, WaveletFilter};
pub use series::TimeSeries;
