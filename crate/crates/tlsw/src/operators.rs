//! Inner-product operator matrices over wavelet scales.
//!
//! All matrices are indexed by scale pairs (j, l) with j, l = -1..-J1,
//! stored with row/column 0 corresponding to the finest scale j = -1.
//! The appendix formulas of the reference constructions use positive
//! indices j_pos = -j; the mapping is fixed here once and documented on
//! each accessor.

use crate::error::{Error, Result};
use crate::filters::WaveletFilter;
use crate::wavelets::AutocorrWaveletSet;
use nalgebra::DMatrix;

/// Condition-number guard for all inversions: larger values signal that the
/// requested depth is too large for the wavelet/difference order.
pub const CONDITION_LIMIT: f64 = 1e12;

/// What an operator matrix represents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OperatorKind {
    /// Gram matrix of autocorrelation wavelets, `A_{jl} = <Psi_j, Psi_l>`.
    A,
    /// Lagged inner products `A^n_{jl} = sum_tau Psi_j(tau) Psi_l(tau - n)`.
    ALagged(usize),
    /// Bias operator of the n-times differenced periodogram.
    DiffCorrection(usize),
    /// Bias operator of the lag-L differenced periodogram.
    SeasonalCorrection(usize),
    /// Cross-wavelet inner products between two filters.
    Cross,
    /// Rescaled difference operator `P_{jl} = 2^{-j/2} D^1_{jl} 2^{-l/2}` (j, l negative).
    RescaledP,
    /// Inverse of another operator.
    Inverse(Box<OperatorKind>),
}

impl OperatorKind {
    pub fn name(&self) -> String {
        match self {
            OperatorKind::A => "A".to_string(),
            OperatorKind::ALagged(n) => format!("A^{}", n),
            OperatorKind::DiffCorrection(n) => format!("D^{}", n),
            OperatorKind::SeasonalCorrection(l) => format!("D_L{}", l),
            OperatorKind::Cross => "C".to_string(),
            OperatorKind::RescaledP => "P".to_string(),
            OperatorKind::Inverse(inner) => format!("{}^-1", inner.name()),
        }
    }
}

/// A J1 x J1 real matrix over scales with provenance.
#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    pub kind: OperatorKind,
    pub dim: usize,
    pub entries: DMatrix<f64>,
    /// Labels of the generating filter(s).
    pub filters: Vec<String>,
}

/// Compensated (Neumaier) summation; entries of coarse-scale matrices are
/// sums of thousands of products and plain accumulation loses digits.
fn neumaier_sum(it: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for x in it {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

fn lagged_entry(acw: &AutocorrWaveletSet, dj: usize, dl: usize, lag: i64) -> f64 {
    let rj = acw.radius(dj) as i64;
    let rl = acw.radius(dl) as i64;
    let lo = (-rj).max(lag - rl);
    let hi = rj.min(lag + rl);
    neumaier_sum((lo..=hi).map(|tau| acw.value(dj, tau) * acw.value(dl, tau - lag)))
}

/// `A_{jl}` for lag 0, `A^n_{jl}` for lag n.
pub fn inner_product_matrix(acw: &AutocorrWaveletSet, j1: usize, lag: usize) -> Result<OperatorMatrix> {
    if j1 == 0 || j1 > acw.max_depth() {
        return Err(Error::DepthExceeded { requested: j1, available: acw.max_depth() });
    }
    let entries = DMatrix::from_fn(j1, j1, |r, c| lagged_entry(acw, r + 1, c + 1, lag as i64));
    let kind = if lag == 0 { OperatorKind::A } else { OperatorKind::ALagged(lag) };
    Ok(OperatorMatrix { kind, dim: j1, entries, filters: vec![acw.filter.label()] })
}

/// Maximum supported difference order for `diff_correction_matrix`.
pub const MAX_DIFF_ORDER: usize = 5;

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

/// Bias operator of the n-th differenced periodogram,
/// `D^n = C(2n,n) A + 2 sum_{tau=1..n} (-1)^tau C(2n, n+tau) A^tau`.
pub fn diff_correction_matrix(acw: &AutocorrWaveletSet, j1: usize, order: usize) -> Result<OperatorMatrix> {
    if order == 0 || order > MAX_DIFF_ORDER {
        return Err(Error::UnsupportedOrder { order, max: MAX_DIFF_ORDER });
    }
    let a = inner_product_matrix(acw, j1, 0)?;
    let mut entries = a.entries * binomial(2 * order as u64, order as u64) as f64;
    for tau in 1..=order {
        let w = 2.0 * (binomial(2 * order as u64, (order + tau) as u64) as f64);
        let sign = if tau % 2 == 0 { 1.0 } else { -1.0 };
        let atau = inner_product_matrix(acw, j1, tau)?;
        entries += atau.entries * (sign * w);
    }
    Ok(OperatorMatrix {
        kind: OperatorKind::DiffCorrection(order),
        dim: j1,
        entries,
        filters: vec![acw.filter.label()],
    })
}

/// Bias operator of the lag-L differenced periodogram,
/// `D^L_{jl} = 2 sum_tau Psi_j(tau) (Psi_l(tau) - Psi_l(tau - L))`.
pub fn seasonal_correction_matrix(acw: &AutocorrWaveletSet, j1: usize, period: usize) -> Result<OperatorMatrix> {
    if period == 0 {
        return Err(Error::InvalidConfig { detail: "seasonal period must be >= 1".to_string() });
    }
    let a = inner_product_matrix(acw, j1, 0)?;
    let al = inner_product_matrix(acw, j1, period)?;
    let entries = a.entries * 2.0 - al.entries * 2.0;
    let m = OperatorMatrix {
        kind: OperatorKind::SeasonalCorrection(period),
        dim: j1,
        entries,
        filters: vec![acw.filter.label()],
    };
    let cond = m.condition_number();
    if !cond.is_finite() || cond > CONDITION_LIMIT {
        return Err(Error::SingularMatrix { condition: cond, limit: CONDITION_LIMIT });
    }
    Ok(m)
}

/// Cross-wavelet matrix `C^{1,0}_{jl} = sum_tau Psi0_j(tau) Psi1_l(tau)`.
pub fn cross_matrix(acw0: &AutocorrWaveletSet, acw1: &AutocorrWaveletSet, j1: usize) -> Result<OperatorMatrix> {
    if j1 == 0 || j1 > acw0.max_depth() {
        return Err(Error::DepthExceeded { requested: j1, available: acw0.max_depth() });
    }
    if j1 > acw1.max_depth() {
        return Err(Error::DepthExceeded { requested: j1, available: acw1.max_depth() });
    }
    let entries = DMatrix::from_fn(j1, j1, |r, c| {
        let rad = acw0.radius(r + 1).min(acw1.radius(c + 1)) as i64;
        neumaier_sum((-rad..=rad).map(|tau| acw0.value(r + 1, tau) * acw1.value(c + 1, tau)))
    });
    Ok(OperatorMatrix {
        kind: OperatorKind::Cross,
        dim: j1,
        entries,
        filters: vec![acw0.filter.label(), acw1.filter.label()],
    })
}

/// Rescale a first-difference operator: `P_{jl} = 2^{-j/2} D^1_{jl} 2^{-l/2}`
/// with j, l negative, so the finest scale row/column is scaled by sqrt(2).
pub fn rescale_p(d1: &OperatorMatrix) -> Result<OperatorMatrix> {
    if d1.kind != OperatorKind::DiffCorrection(1) {
        return Err(Error::KindMismatch {
            expected: "D^1".to_string(),
            found: d1.kind.name(),
        });
    }
    let entries = DMatrix::from_fn(d1.dim, d1.dim, |r, c| {
        let fr = 2f64.powf((r as f64 + 1.0) / 2.0);
        let fc = 2f64.powf((c as f64 + 1.0) / 2.0);
        fr * d1.entries[(r, c)] * fc
    });
    Ok(OperatorMatrix { kind: OperatorKind::RescaledP, dim: d1.dim, entries, filters: d1.filters.clone() })
}

impl OperatorMatrix {
    /// Entry by negative scale indices (j, l in -1..=-J1).
    pub fn entry(&self, j: i32, l: i32) -> f64 {
        let r = (-j as usize) - 1;
        let c = (-l as usize) - 1;
        self.entries[(r, c)]
    }

    /// Two-norm condition number from singular values.
    pub fn condition_number(&self) -> f64 {
        let sv = self.entries.clone().svd(false, false).singular_values;
        let max = sv.iter().cloned().fold(f64::MIN, f64::max);
        let min = sv.iter().cloned().fold(f64::MAX, f64::min);
        if min <= 0.0 {
            f64::INFINITY
        } else {
            max / min
        }
    }

    /// Smallest eigenvalue; meaningful for symmetric kinds.
    pub fn min_eigenvalue(&self) -> f64 {
        self.entries
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .cloned()
            .fold(f64::MAX, f64::min)
    }

    /// Invert with the condition-number guard; failure signals that J1 is
    /// too large for this wavelet/difference order.
    pub fn invert(&self) -> Result<OperatorMatrix> {
        let cond = self.condition_number();
        if !cond.is_finite() || cond > CONDITION_LIMIT {
            return Err(Error::SingularMatrix { condition: cond, limit: CONDITION_LIMIT });
        }
        let inv = self
            .entries
            .clone()
            .lu()
            .try_inverse()
            .ok_or(Error::SingularMatrix { condition: cond, limit: CONDITION_LIMIT })?;
        Ok(OperatorMatrix {
            kind: OperatorKind::Inverse(Box::new(self.kind.clone())),
            dim: self.dim,
            entries: inv,
            filters: self.filters.clone(),
        })
    }

    /// Apply the matrix to a per-scale vector (finest scale first).
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.dim, "vector length must equal matrix dim");
        (0..self.dim)
            .map(|r| (0..self.dim).map(|c| self.entries[(r, c)] * v[c]).sum())
            .collect()
    }

    /// CSV export for debugging: one row per scale from -1 to -J1, plain
    /// decimal with 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for r in 0..self.dim {
            let row: Vec<String> = (0..self.dim).map(|c| format!("{:.16e}", self.entries[(r, c)])).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filters::{WaveletFamily, WaveletFilter};

    fn haar_acw(depth: usize) -> AutocorrWaveletSet {
        let f = WaveletFilter::new(WaveletFamily::Haar, 1).unwrap();
        AutocorrWaveletSet::from_filter(&f, depth).unwrap()
    }

    #[test]
    fn haar_a_entries() {
        let acw = haar_acw(3);
        let a = inner_product_matrix(&acw, 3, 0).unwrap();
        assert!((a.entry(-1, -1) - 1.5).abs() < 1e-12);
        assert!((a.entry(-2, -2) - 1.75).abs() < 1e-12);
        assert!((a.entry(-1, -2) - 0.75).abs() < 1e-12);
    }

    #[test]
    fn haar_lag_one_diagonal() {
        let acw = haar_acw(2);
        let a1 = inner_product_matrix(&acw, 2, 1).unwrap();
        assert!((a1.entry(-1, -1) + 1.0).abs() < 1e-12);
    }

    #[test]
    fn diagonal_dominated_by_unity() {
        let f = WaveletFilter::new(WaveletFamily::DaubLeastAsymmetric, 6).unwrap();
        let acw = AutocorrWaveletSet::from_filter(&f, 5).unwrap();
        let a = inner_product_matrix(&acw, 5, 0).unwrap();
        for m in 1..=5 {
            assert!(a.entry(-(m as i32), -(m as i32)) >= 1.0);
        }
    }

    #[test]
    fn d1_haar_values_and_identity() {
        let acw = haar_acw(4);
        let d1 = diff_correction_matrix(&acw, 4, 1).unwrap();
        assert!((d1.entry(-1, -1) - 5.0).abs() < 1e-12);
        assert!((d1.entry(-1, -2) - 1.5).abs() < 1e-12);
        let a = inner_product_matrix(&acw, 4, 0).unwrap();
        let a1 = inner_product_matrix(&acw, 4, 1).unwrap();
        let direct = a.entries.clone() * 2.0 - a1.entries.clone() * 2.0;
        assert!((&d1.entries - direct).abs().max() < 1e-12);
    }

    /// D^2 against the direct route: Psi_l filtered by the squared-coefficient
    /// expansion of (1,-2,1), i.e. weights (1, -4, 6, -4, 1) over lags -2..2.
    #[test]
    fn d2_matches_convolution_oracle() {
        for (fam, vm) in [(WaveletFamily::Haar, 1), (WaveletFamily::DaubExtremalPhase, 4)] {
            let f = WaveletFilter::new(fam, vm).unwrap();
            let acw = AutocorrWaveletSet::from_filter(&f, 5).unwrap();
            let d2 = diff_correction_matrix(&acw, 5, 2).unwrap();
            let w = [(0i64, 6.0), (1, -4.0), (-1, -4.0), (2, 1.0), (-2, 1.0)];
            for j in 1..=5usize {
                for l in 1..=5usize {
                    let rj = acw.radius(j) as i64;
                    let mut oracle = 0.0;
                    for tau in -rj..=rj {
                        let filtered: f64 = w.iter().map(|&(d, c)| c * acw.value(l, tau - d)).sum();
                        oracle += acw.value(j, tau) * filtered;
                    }
                    assert!(
                        (d2.entry(-(j as i32), -(l as i32)) - oracle).abs() < 1e-10,
                        "({}, {}): {} vs {}",
                        j,
                        l,
                        d2.entry(-(j as i32), -(l as i32)),
                        oracle
                    );
                }
            }
        }
    }

    #[test]
    fn seasonal_lag_one_equals_first_difference() {
        let acw = haar_acw(4);
        let dl = seasonal_correction_matrix(&acw, 4, 1).unwrap();
        let d1 = diff_correction_matrix(&acw, 4, 1).unwrap();
        assert!((&dl.entries - &d1.entries).abs().max() < 1e-14);
    }

    #[test]
    fn seasonal_disjoint_supports_reduce_to_2a() {
        let acw = haar_acw(3);
        // L >= 2^|j| + 2^|l| makes the shifted supports disjoint.
        let dl = seasonal_correction_matrix(&acw, 2, 8).unwrap();
        let a = inner_product_matrix(&acw, 2, 0).unwrap();
        assert!((&dl.entries - a.entries * 2.0).abs().max() < 1e-13);
    }

    #[test]
    fn seasonal_lag12_positive_definite() {
        let acw = haar_acw(7);
        let dl = seasonal_correction_matrix(&acw, 7, 12).unwrap();
        assert!(dl.min_eigenvalue() > 0.0);
    }

    #[test]
    fn cross_identical_filters_is_a() {
        let acw = haar_acw(4);
        let c = cross_matrix(&acw, &acw, 4).unwrap();
        let a = inner_product_matrix(&acw, 4, 0).unwrap();
        assert!((&c.entries - &a.entries).abs().max() < 1e-13);
        assert!((c.entry(-1, -1) - 1.5).abs() < 1e-12);
    }

    #[test]
    fn cross_against_brute_force() {
        let h = WaveletFilter::new(WaveletFamily::Haar, 1).unwrap();
        let la = WaveletFilter::new(WaveletFamily::DaubLeastAsymmetric, 4).unwrap();
        let a0 = AutocorrWaveletSet::from_filter(&h, 4).unwrap();
        let a1 = AutocorrWaveletSet::from_filter(&la, 4).unwrap();
        let c = cross_matrix(&a0, &a1, 4).unwrap();
        for j in 1..=4usize {
            for l in 1..=4usize {
                let r = a0.radius(j).max(a1.radius(l)) as i64;
                let mut brute = 0.0;
                for tau in -r..=r {
                    brute += a0.value(j, tau) * a1.value(l, tau);
                }
                assert!((c.entry(-(j as i32), -(l as i32)) - brute).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rescaled_p_haar() {
        let acw = haar_acw(8);
        let d1 = diff_correction_matrix(&acw, 8, 1).unwrap();
        let p = rescale_p(&d1).unwrap();
        for m in 1..=8usize {
            assert!((p.entry(-(m as i32), -(m as i32)) - 10.0).abs() < 1e-10);
        }
        assert!((p.entry(-1, -2) - 6.0 / 2f64.sqrt()).abs() < 1e-11);
        // lambda_min(P) >= (18 + 8 sqrt 2) / (3 + 2 sqrt 2)
        let bound = (18.0 + 8.0 * 2f64.sqrt()) / (3.0 + 2.0 * 2f64.sqrt());
        assert!(p.min_eigenvalue() >= bound - 1e-9, "{} < {}", p.min_eigenvalue(), bound);
    }

    #[test]
    fn rescale_requires_d1() {
        let acw = haar_acw(3);
        let a = inner_product_matrix(&acw, 3, 0).unwrap();
        assert!(matches!(rescale_p(&a), Err(Error::KindMismatch { .. })));
    }

    #[test]
    fn invert_identity_and_residual() {
        let acw = haar_acw(7);
        let a = inner_product_matrix(&acw, 7, 0).unwrap();
        let inv = a.invert().unwrap();
        let residual = (&a.entries * &inv.entries - DMatrix::<f64>::identity(7, 7)).abs().max();
        assert!(residual < 1e-8, "residual {}", residual);
    }

    /// Classical A-inverse applied to the differenced Haar MA expectation
    /// vector is badly biased: scale -2 entry is about -0.79.
    #[test]
    fn differenced_ma_classical_correction_bias() {
        let acw = haar_acw(10);
        let a = inner_product_matrix(&acw, 10, 0).unwrap();
        let d1 = diff_correction_matrix(&acw, 10, 1).unwrap();
        let expectation: Vec<f64> = (0..10).map(|r| d1.entries[(r, 0)]).collect();
        let corrected = a.invert().unwrap().apply(&expectation);
        assert!((corrected[1] + 0.79).abs() < 0.005, "scale -2 value {}", corrected[1]);
    }

    #[test]
    fn symmetry_of_lagged_matrices() {
        let f = WaveletFilter::new(WaveletFamily::DaubExtremalPhase, 4).unwrap();
        let acw = AutocorrWaveletSet::from_filter(&f, 6).unwrap();
        for lag in 0..=2 {
            let m = inner_product_matrix(&acw, 6, lag).unwrap();
            assert!((&m.entries - m.entries.transpose()).abs().max() < 1e-12);
        }
    }

    #[test]
    fn csv_round_trips_entries() {
        let acw = haar_acw(3);
        let a = inner_product_matrix(&acw, 3, 0).unwrap();
        let csv = a.to_csv();
        let first: f64 = csv.lines().next().unwrap().split(',').next().unwrap().parse().unwrap();
        assert_eq!(first, a.entry(-1, -1));
    }
}
