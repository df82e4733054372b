//! Statistical kernel: correlation, least squares, t and F tests, and the
//! distribution functions behind them.

pub mod dist;
pub mod hypothesis;
pub mod ols;
pub mod special;

pub use dist::{f_cdf, f_sf, t_cdf, t_two_sided_p};
pub use hypothesis::{
    f_test_nested, two_sample_t_test, welch_t_test, DegreesOfFreedom, TestResult,
    VarianceAssumption,
};
pub use ols::{ols_fit, ssr_path, Matrix, OlsFit};

use crate::error::{Error, Result};

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance (`n - 1` denominator).
pub fn sample_variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (xs.len() as f64 - 1.0)
}

/// Sample Pearson correlation; `None` when either input has zero variance.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<Option<f64>> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "correlation needs at least 2 paired values, got {}",
            x.len()
        )));
    }
    Ok(pearson_unchecked(x, y))
}

/// Pearson r for equal-length slices of length >= 2.
pub(crate) fn pearson_unchecked(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let dx = a - mx;
        let dy = b - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 || !(sxx * syy).is_finite() {
        return None;
    }
    Some((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Linear-interpolation quantile of an ascending slice (`q` in `[0, 1]`).
///
/// Position `q * (n - 1)` between order statistics, so the 0.5 quantile of
/// an even-length sample is the mean of its two central values.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

/// Summary of a sample's spread.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct DistributionStats {
    pub n: usize,
    pub mean: f64,
    pub min: f64,
    pub p5: f64,
    pub p25: f64,
    pub median: f64,
    pub p75: f64,
    pub p95: f64,
    pub max: f64,
}

impl DistributionStats {
    pub fn from_values(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InsufficientData(
                "distribution statistics need at least one value".to_string(),
            ));
        }
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::invalid("distribution contains NaN"));
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        Ok(Self {
            n: sorted.len(),
            mean: mean(&sorted),
            min: sorted[0],
            p5: quantile_sorted(&sorted, 0.05),
            p25: quantile_sorted(&sorted, 0.25),
            median: quantile_sorted(&sorted, 0.5),
            p75: quantile_sorted(&sorted, 0.75),
            p95: quantile_sorted(&sorted, 0.95),
            max: sorted[sorted.len() - 1],
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pearson_perfect_relations() {
        let x = [1.0, 2.0, 3.0];
        assert_eq!(pearson(&x, &x).unwrap(), Some(1.0));
        assert_eq!(pearson(&x, &[3.0, 2.0, 1.0]).unwrap(), Some(-1.0));
    }

    #[test]
    fn pearson_undefined_and_errors() {
        assert_eq!(pearson(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]).unwrap(), None);
        assert!(matches!(
            pearson(&[1.0, 2.0], &[1.0]),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(matches!(pearson(&[1.0], &[1.0]), Err(Error::InsufficientData(_))));
    }

    #[test]
    fn quantiles() {
        let s = DistributionStats::from_values(&[4.0, 4.0, 4.0]).unwrap();
        assert_eq!((s.mean, s.median, s.p5, s.p95), (4.0, 4.0, 4.0, 4.0));
        let s = DistributionStats::from_values(&[4.0, 1.0, 3.0, 2.0]).unwrap();
        assert_eq!(s.median, 2.5);
        assert_eq!(s.max, 4.0);
        assert!(DistributionStats::from_values(&[]).is_err());
    }
}
