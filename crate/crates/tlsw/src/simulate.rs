//! Seedable simulation of locally stationary wavelet processes with
//! deterministic trend and seasonal components.
//!
//! A realisation is `X_t = mu(t/T) + s_t + sum_j sum_k w_{j,k} psi_{j,k-t} xi_{j,k}`
//! with `w_{j,k} = sqrt(S_j(k/T))` and periodic wrap. Innovations are drawn
//! scale-major (scales in declared order) then time-major, after any
//! random seasonal offsets/slopes; this fixed order makes seeds meaningful
//! and the naive reference implementation reproducible.

use crate::error::{Error, Result};
use crate::filters::{WaveletFamily, WaveletFilter};
use crate::series::TimeSeries;
use crate::wavelets::DiscreteWaveletSet;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

/// Compact serializable filter reference.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterId {
    pub family: WaveletFamily,
    pub vanishing_moments: usize,
}

impl FilterId {
    pub fn filter(&self) -> Result<WaveletFilter> {
        WaveletFilter::new(self.family, self.vanishing_moments)
    }

    pub fn ep4() -> Self {
        FilterId { family: WaveletFamily::DaubExtremalPhase, vanishing_moments: 4 }
    }

    pub fn haar() -> Self {
        FilterId { family: WaveletFamily::Haar, vanishing_moments: 1 }
    }
}

/// One term of a trigonometric piece.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TrigTerm {
    Sin { amplitude: f64, omega: f64 },
    Cos { amplitude: f64, omega: f64 },
}

/// Elementary closed-form function of rescaled time on an interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum PieceFn {
    Const(f64),
    /// sin^2(omega z)
    SinSq { omega: f64 },
    /// offset + sum of sin/cos terms
    Trig { offset: f64, terms: Vec<TrigTerm> },
    /// a z^2 + b z + c
    Quadratic { a: f64, b: f64, c: f64 },
    /// amplitude / (1 + exp(rate - scale * ln(mult * z)))
    LogLogistic { amplitude: f64, rate: f64, scale: f64, mult: f64 },
}

impl PieceFn {
    fn eval(&self, z: f64) -> f64 {
        match self {
            PieceFn::Const(c) => *c,
            PieceFn::SinSq { omega } => (omega * z).sin().powi(2),
            PieceFn::Trig { offset, terms } => {
                let mut acc = *offset;
                for t in terms {
                    acc += match t {
                        TrigTerm::Sin { amplitude, omega } => amplitude * (omega * z).sin(),
                        TrigTerm::Cos { amplitude, omega } => amplitude * (omega * z).cos(),
                    };
                }
                acc
            }
            PieceFn::Quadratic { a, b, c } => a * z * z + b * z + c,
            PieceFn::LogLogistic { amplitude, rate, scale, mult } => {
                amplitude / (1.0 + (rate - scale * (mult * z).ln()).exp())
            }
        }
    }
}

/// A function active on `[z_lo, z_hi)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Piece {
    pub z_lo: f64,
    pub z_hi: f64,
    pub func: PieceFn,
}

fn eval_pieces(pieces: &[Piece], z: f64) -> f64 {
    pieces.iter().filter(|p| z >= p.z_lo && z < p.z_hi).map(|p| p.func.eval(z)).sum()
}

/// Spectrum specification: list of (depth m meaning scale -m, pieces).
/// The declared order fixes the innovation draw order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSpec {
    pub scales: Vec<(usize, Vec<Piece>)>,
}

impl SpectrumSpec {
    pub fn max_depth(&self) -> usize {
        self.scales.iter().map(|(m, _)| *m).max().unwrap_or(0)
    }

    /// S at scale -m and rescaled time z (0 for undeclared scales).
    pub fn value(&self, depth: usize, z: f64) -> f64 {
        self.scales
            .iter()
            .filter(|(m, _)| *m == depth)
            .map(|(_, pieces)| eval_pieces(pieces, z))
            .sum()
    }

    /// Evaluate onto a depth x T grid (depth rows cover scales -1..-depth).
    pub fn truth_grid(&self, depth: usize, t: usize) -> ndarray::Array2<f64> {
        let mut out = ndarray::Array2::zeros((depth, t));
        for m in 1..=depth {
            for k in 0..t {
                out[(m - 1, k)] = self.value(m, k as f64 / t as f64);
            }
        }
        out
    }
}

/// Deterministic trend component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum TrendFn {
    Zero,
    /// 4z
    Linear,
    /// -2 sin(2 pi z) - 1.5 cos(pi z)
    Sine,
    /// 4 / (1 + exp(4 - 7 ln(4z)))
    Logistic,
    /// 12z^2 + 2z, then 1.81 - 16z^2 + 4z, then 4z - 7.94
    PiecewiseQuadratic,
    Custom(Vec<Piece>),
}

impl TrendFn {
    pub fn eval(&self, z: f64) -> f64 {
        match self {
            TrendFn::Zero => 0.0,
            TrendFn::Linear => 4.0 * z,
            TrendFn::Sine => {
                -2.0 * (2.0 * std::f64::consts::PI * z).sin()
                    - 1.5 * (std::f64::consts::PI * z).cos()
            }
            TrendFn::Logistic => {
                if z <= 0.0 {
                    0.0
                } else {
                    4.0 / (1.0 + (4.0 - 7.0 * (4.0 * z).ln()).exp())
                }
            }
            TrendFn::PiecewiseQuadratic => {
                if z < 300.0 / 1024.0 {
                    12.0 * z * z + 2.0 * z
                } else if z < 800.0 / 1024.0 {
                    1.81 - 16.0 * z * z + 4.0 * z
                } else {
                    4.0 * z - 7.94
                }
            }
            TrendFn::Custom(pieces) => eval_pieces(pieces, z),
        }
    }
}

/// Per-season values: fixed, or drawn uniformly once per realisation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SeasonalValues {
    Fixed(Vec<f64>),
    Uniform { lo: f64, hi: f64 },
}

/// Additive seasonal component with period K: offsets cycle; optional
/// per-season slopes make it time-varying, `s_t = offset[t mod K] + slope[t mod K] * t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeasonalSpec {
    pub period: usize,
    pub offsets: SeasonalValues,
    pub slopes: Option<SeasonalValues>,
}

/// Trend specification: a smooth component plus an optional seasonal part.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendSpec {
    pub base: TrendFn,
    pub seasonal: Option<SeasonalSpec>,
}

impl TrendSpec {
    pub fn bare(base: TrendFn) -> Self {
        TrendSpec { base, seasonal: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Innovations {
    Gaussian,
    /// Exp(1) - 1: zero mean, unit variance.
    ExponentialCentred,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub t: usize,
    pub generator: FilterId,
    pub spectrum: SpectrumSpec,
    pub trend: TrendSpec,
    pub innovations: Innovations,
    pub seed: u64,
}

/// i.i.d. zero-mean unit-variance draws of the requested kind.
pub fn innovations(kind: Innovations, count: usize, rng: &mut impl Rng) -> Vec<f64> {
    match kind {
        Innovations::Gaussian => (0..count).map(|_| rng.sample(StandardNormal)).collect(),
        Innovations::ExponentialCentred => {
            (0..count).map(|_| rng.sample::<f64, _>(Exp1) - 1.0).collect()
        }
    }
}

fn resolve_values(v: &SeasonalValues, period: usize, rng: &mut impl Rng) -> Vec<f64> {
    match v {
        SeasonalValues::Fixed(vals) => {
            let mut out = vals.clone();
            out.resize(period, 0.0);
            out
        }
        SeasonalValues::Uniform { lo, hi } => {
            (0..period).map(|_| rng.random_range(*lo..*hi)).collect()
        }
    }
}

/// Materialise the seasonal component, drawing any random offsets/slopes
/// from `rng` (offsets first, then slopes).
pub fn seasonal_component(spec: &SeasonalSpec, t: usize, rng: &mut impl Rng) -> Vec<f64> {
    let offsets = resolve_values(&spec.offsets, spec.period, rng);
    let slopes = spec.slopes.as_ref().map(|s| resolve_values(s, spec.period, rng));
    (0..t)
        .map(|i| {
            let m = i % spec.period;
            offsets[m] + slopes.as_ref().map_or(0.0, |s| s[m] * i as f64)
        })
        .collect()
}

/// Simulate one realisation of the trend-LSW model.
pub fn simulate_lsw(cfg: &SimConfig) -> Result<TimeSeries> {
    let t = cfg.t;
    if t < 2 || !t.is_power_of_two() {
        return Err(Error::NonDyadicLength { len: t });
    }
    let log2t = t.trailing_zeros() as usize;
    let depth = cfg.spectrum.max_depth();
    if depth > log2t {
        return Err(Error::DepthExceeded { requested: depth, available: log2t });
    }
    if cfg.spectrum.scales.is_empty() && matches!(cfg.trend.base, TrendFn::Zero) && cfg.trend.seasonal.is_none() {
        return Err(Error::InvalidConfig { detail: "empty spectrum and zero trend".to_string() });
    }
    let filter = cfg.generator.filter()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let seasonal = match &cfg.trend.seasonal {
        Some(spec) => seasonal_component(spec, t, &mut rng),
        None => vec![0.0; t],
    };

    let mut values: Vec<f64> = (0..t)
        .map(|i| cfg.trend.base.eval(i as f64 / t as f64) + seasonal[i])
        .collect();

    if depth > 0 {
        let dws = DiscreteWaveletSet::new(&filter, depth)?;
        for (m, pieces) in &cfg.spectrum.scales {
            let xi = innovations(cfg.innovations, t, &mut rng);
            let mut weighted = vec![0.0; t];
            let mut any = false;
            for (k, w) in weighted.iter_mut().enumerate() {
                let s = eval_pieces(pieces, k as f64 / t as f64);
                if s < 0.0 {
                    return Err(Error::InvalidConfig {
                        detail: format!("spectrum negative at scale -{}, k = {}", m, k),
                    });
                }
                if s > 0.0 {
                    any = true;
                    *w = s.sqrt() * xi[k];
                }
            }
            if !any {
                continue;
            }
            let w = dws.wavelet(*m);
            let centre = dws.centre(*m);
            // values[t] += sum_n psi[n] * weighted[(t + n - centre) mod T]
            for (n, &wn) in w.iter().enumerate() {
                let shift = (n as i64 - centre as i64).rem_euclid(t as i64) as usize;
                for (i, v) in values.iter_mut().enumerate() {
                    let src = i + shift;
                    let src = if src >= t { src - t } else { src };
                    *v += wn * weighted[src];
                }
            }
        }
    }
    TimeSeries::new(values)
}

/// Named spectra used by the benchmark harness and CLI.
pub fn builtin_spectrum(name: &str, t: usize) -> Result<SpectrumSpec> {
    use std::f64::consts::PI;
    let whole = |f: PieceFn| vec![Piece { z_lo: 0.0, z_hi: 1.0, func: f }];
    match name.to_ascii_lowercase().as_str() {
        "s1" => Ok(SpectrumSpec {
            scales: vec![
                (5, whole(PieceFn::SinSq { omega: 4.0 * PI })),
                (
                    1,
                    vec![Piece {
                        z_lo: 800.0 / 1024.0,
                        z_hi: 900.0 / 1024.0,
                        func: PieceFn::Const(1.0),
                    }],
                ),
            ],
        }),
        "s2" => Ok(SpectrumSpec {
            scales: (1..=4)
                .map(|m| {
                    (
                        m,
                        vec![Piece {
                            z_lo: (m as f64 - 1.0) * 0.25,
                            z_hi: m as f64 * 0.25,
                            func: PieceFn::Const(1.0),
                        }],
                    )
                })
                .collect(),
        }),
        "s3" => Ok(SpectrumSpec {
            scales: vec![
                (
                    1,
                    whole(PieceFn::Trig {
                        offset: 0.5,
                        terms: vec![
                            TrigTerm::Sin { amplitude: 0.25, omega: PI },
                            TrigTerm::Cos { amplitude: -0.5, omega: 1.5 * PI },
                        ],
                    }),
                ),
                (
                    3,
                    whole(PieceFn::Trig {
                        offset: 0.5,
                        terms: vec![
                            TrigTerm::Sin { amplitude: -0.125, omega: 2.0 * PI },
                            TrigTerm::Cos { amplitude: -0.25, omega: 0.5 * PI },
                        ],
                    }),
                ),
            ],
        }),
        "white_noise_haar" => {
            let depth = t.trailing_zeros() as usize;
            Ok(SpectrumSpec {
                scales: (1..=depth)
                    .map(|m| (m, whole(PieceFn::Const(0.5f64.powi(m as i32)))))
                    .collect(),
            })
        }
        "haar_ma1" => Ok(SpectrumSpec { scales: vec![(1, whole(PieceFn::Const(1.0)))] }),
        other => Err(Error::UnknownPreset { name: other.to_string() }),
    }
}

/// Named trends used by the benchmark harness and CLI.
pub fn builtin_trend(name: &str) -> Result<TrendSpec> {
    let base = match name.to_ascii_lowercase().as_str() {
        "zero" | "none" => TrendFn::Zero,
        "linear" => TrendFn::Linear,
        "sine" => TrendFn::Sine,
        "logistic" => TrendFn::Logistic,
        "piecewise_quadratic" | "pq" => TrendFn::PiecewiseQuadratic,
        other => return Err(Error::UnknownPreset { name: other.to_string() }),
    };
    Ok(TrendSpec::bare(base))
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic sub-seed for an independent stream: lane identifies the
/// (scenario, realisation) pair or any other parallel unit.
pub fn derive_seed(base: u64, lane: u64) -> u64 {
    splitmix64(base ^ splitmix64(lane))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(t: usize, spectrum: SpectrumSpec, trend: TrendSpec, seed: u64) -> SimConfig {
        SimConfig {
            t,
            generator: FilterId::ep4(),
            spectrum,
            trend,
            innovations: Innovations::Gaussian,
            seed,
        }
    }

    /// Naive triple-loop reference implementation on the same draw order.
    fn naive_simulate(c: &SimConfig) -> Vec<f64> {
        let t = c.t;
        let filter = c.generator.filter().unwrap();
        let depth = c.spectrum.max_depth();
        let dws = DiscreteWaveletSet::new(&filter, depth.max(1)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
        let mut out: Vec<f64> =
            (0..t).map(|i| c.trend.base.eval(i as f64 / t as f64)).collect();
        for (m, pieces) in &c.spectrum.scales {
            let xi = innovations(c.innovations, t, &mut rng);
            let w = dws.wavelet(*m);
            let centre = dws.centre(*m) as i64;
            for (i, o) in out.iter_mut().enumerate() {
                for k in 0..t {
                    let s = eval_pieces(pieces, k as f64 / t as f64);
                    if s <= 0.0 {
                        continue;
                    }
                    // psi~(k - i) with centred indexing, folded circularly
                    let mut acc = 0.0;
                    let mut n = ((k as i64 - i as i64 + centre).rem_euclid(t as i64)) as usize;
                    while n < w.len() {
                        acc += w[n];
                        n += t;
                    }
                    *o += s.sqrt() * xi[k] * acc;
                }
            }
        }
        out
    }

    #[test]
    fn matches_naive_reference_t64() {
        let spectrum = SpectrumSpec {
            scales: vec![
                (
                    1,
                    vec![Piece {
                        z_lo: 0.0,
                        z_hi: 1.0,
                        func: PieceFn::Trig {
                            offset: 0.6,
                            terms: vec![TrigTerm::Sin {
                                amplitude: 0.4,
                                omega: std::f64::consts::PI,
                            }],
                        },
                    }],
                ),
                (3, vec![Piece { z_lo: 0.25, z_hi: 0.75, func: PieceFn::Const(0.8) }]),
            ],
        };
        let c = cfg(64, spectrum, TrendSpec::bare(TrendFn::Linear), 42);
        let fast = simulate_lsw(&c).unwrap();
        let slow = naive_simulate(&c);
        for (a, b) in fast.values.iter().zip(slow.iter()) {
            assert!((a - b).abs() < 1e-12, "{} vs {}", a, b);
        }
    }

    #[test]
    fn reproducible_for_fixed_seed() {
        let c = cfg(
            128,
            builtin_spectrum("s3", 128).unwrap(),
            TrendSpec::bare(TrendFn::Sine),
            7,
        );
        let a = simulate_lsw(&c).unwrap();
        let b = simulate_lsw(&c).unwrap();
        assert_eq!(a.values, b.values);
    }

    #[test]
    fn zero_spectrum_linear_trend_is_exact() {
        let c = cfg(
            64,
            SpectrumSpec { scales: vec![] },
            TrendSpec::bare(TrendFn::Linear),
            1,
        );
        let x = simulate_lsw(&c).unwrap();
        for (i, v) in x.values.iter().enumerate() {
            assert_eq!(*v, 4.0 * i as f64 / 64.0);
        }
    }

    #[test]
    fn innovation_moments() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let n = 1_000_000;
        let e = innovations(Innovations::ExponentialCentred, n, &mut rng);
        let mean = e.iter().sum::<f64>() / n as f64;
        assert!(mean.abs() < 0.005, "exp mean {}", mean);
        let g = innovations(Innovations::Gaussian, n, &mut rng);
        let var = g.iter().map(|x| x * x).sum::<f64>() / n as f64;
        assert!((var - 1.0).abs() < 0.01, "gauss var {}", var);
    }

    #[test]
    fn innovation_stream_deterministic() {
        let a = innovations(Innovations::Gaussian, 10, &mut ChaCha8Rng::seed_from_u64(5));
        let b = innovations(Innovations::Gaussian, 10, &mut ChaCha8Rng::seed_from_u64(5));
        assert_eq!(a, b);
    }

    #[test]
    fn seasonal_stationary_periodicity() {
        let spec = SeasonalSpec {
            period: 12,
            offsets: SeasonalValues::Uniform { lo: 0.0, hi: 10.0 },
            slopes: None,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s = seasonal_component(&spec, 120, &mut rng);
        for i in 0..108 {
            assert_eq!(s[i], s[i + 12]);
        }
        // lag-12 difference of the seasonal component vanishes
        for i in 12..120 {
            assert_eq!(s[i] - s[i - 12], 0.0);
        }
    }

    #[test]
    fn seasonal_time_varying_formula() {
        let spec = SeasonalSpec {
            period: 3,
            offsets: SeasonalValues::Fixed(vec![1.0, 2.0, 3.0]),
            slopes: Some(SeasonalValues::Fixed(vec![0.1, -0.1, 0.0])),
        };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let s = seasonal_component(&spec, 9, &mut rng);
        for (i, v) in s.iter().enumerate() {
            let m = i % 3;
            let expected = [1.0, 2.0, 3.0][m] + [0.1, -0.1, 0.0][m] * i as f64;
            assert!((v - expected).abs() < 1e-15);
        }
    }

    #[test]
    fn preset_values_match_formulas() {
        let s1 = builtin_spectrum("s1", 1024).unwrap();
        assert!((s1.value(5, 0.125) - 1.0).abs() < 1e-15); // sin^2(pi/2)
        assert_eq!(s1.value(1, 850.0 / 1024.0), 1.0);
        assert_eq!(s1.value(1, 0.5), 0.0);
        let tr = builtin_trend("sine").unwrap();
        assert!((tr.base.eval(0.0) + 1.5).abs() < 1e-15);
        // piecewise quadratic branches agree near the first knot
        let pq = builtin_trend("piecewise_quadratic").unwrap();
        let z = 300.0 / 1024.0;
        let left = 12.0 * z * z + 2.0 * z;
        let right = 1.81 - 16.0 * z * z + 4.0 * z;
        assert!((left - right).abs() < 0.01);
        assert!((pq.base.eval(z - 1e-9) - left).abs() < 1e-6);
    }

    #[test]
    fn unknown_presets_rejected() {
        assert!(matches!(builtin_spectrum("s9", 64), Err(Error::UnknownPreset { .. })));
        assert!(matches!(builtin_trend("ramp"), Err(Error::UnknownPreset { .. })));
    }

    #[test]
    fn white_noise_preset_scales_with_length() {
        let s = builtin_spectrum("white_noise_haar", 256).unwrap();
        assert_eq!(s.max_depth(), 8);
        assert!((s.value(3, 0.4) - 0.125).abs() < 1e-15);
    }

    #[test]
    fn config_round_trips_through_json() {
        let c = cfg(
            1024,
            builtin_spectrum("s1", 1024).unwrap(),
            builtin_trend("logistic").unwrap(),
            12345,
        );
        let json = serde_json::to_string(&c).unwrap();
        let back: SimConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(c, back);
        assert_eq!(simulate_lsw(&c).unwrap().values, simulate_lsw(&back).unwrap().values);
    }

    #[test]
    fn derive_seed_spreads_lanes() {
        let a = derive_seed(1, 0);
        let b = derive_seed(1, 1);
        let c = derive_seed(2, 0);
        assert_ne!(a, b);
        assert_ne!(a, c);
        assert_eq!(a, derive_seed(1, 0));
    }
}
