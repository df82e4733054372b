use serde::Serialize;

use super::dist::{f_sf, t_two_sided_p};
use super::{mean, sample_variance};
use crate::error::{Error, Result};

/// Slack allowed when a restricted model fits marginally better than the
/// unrestricted one because of rounding.
pub const SSR_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(untagged)]
pub enum DegreesOfFreedom {
    Single(f64),
    Pair(f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TestResult {
    pub statistic: f64,
    pub p_value: f64,
    pub df: DegreesOfFreedom,
}

/// Variance assumption for the two-sample t-test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VarianceAssumption {
    /// Unequal variances, Welch–Satterthwaite degrees of freedom.
    #[default]
    Welch,
    /// Equal variances, pooled estimate with `n_a + n_b - 2` degrees of freedom.
    Pooled,
}

pub fn welch_t_test(a: &[f64], b: &[f64]) -> Result<TestResult> {
    two_sample_t_test(a, b, VarianceAssumption::Welch)
}

/// Two-sided two-sample t-test of equal means.
pub fn two_sample_t_test(a: &[f64], b: &[f64], variance: VarianceAssumption) -> Result<TestResult> {
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "t-test needs at least 2 observations per sample (got {} and {})",
            a.len(),
            b.len()
        )));
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(Error::invalid("t-test samples contain non-finite values"));
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (ma, mb) = (mean(a), mean(b));
    let (va, vb) = (sample_variance(a), sample_variance(b));
    if va == 0.0 && vb == 0.0 {
        return Err(Error::Degenerate(
            "both t-test samples are constant".to_string(),
        ));
    }

    let (se2, df) = match variance {
        VarianceAssumption::Welch => {
            let (sa, sb) = (va / na, vb / nb);
            let se2 = sa + sb;
            let df = se2 * se2 / (sa * sa / (na - 1.0) + sb * sb / (nb - 1.0));
            (se2, df)
        }
        VarianceAssumption::Pooled => {
            let df = na + nb - 2.0;
            let pooled = ((na - 1.0) * va + (nb - 1.0) * vb) / df;
            (pooled * (1.0 / na + 1.0 / nb), df)
        }
    };
    let t = (ma - mb) / se2.sqrt();
    Ok(TestResult {
        statistic: t,
        p_value: t_two_sided_p(t, df)?,
        df: DegreesOfFreedom::Single(df),
    })
}

/// F-test comparing a restricted model nested inside an unrestricted one.
///
/// A perfect unrestricted fit (`ssr_unrestricted == 0`) with any remaining
/// restricted error yields `F = +inf, p = 0`.
pub fn f_test_nested(
    ssr_restricted: f64,
    ssr_unrestricted: f64,
    q: usize,
    df_denom: usize,
) -> Result<TestResult> {
    if q == 0 || df_denom == 0 {
        return Err(Error::invalid(format!(
            "F-test needs positive degrees of freedom (q={q}, df_denom={df_denom})"
        )));
    }
    if !ssr_restricted.is_finite() || !ssr_unrestricted.is_finite() {
        return Err(Error::invalid("sums of squared residuals must be finite"));
    }
    let slack = SSR_TOLERANCE * ssr_restricted.abs().max(1.0);
    if ssr_unrestricted < -slack {
        return Err(Error::invalid(format!(
            "unrestricted SSR is negative ({ssr_unrestricted})"
        )));
    }
    if ssr_restricted < ssr_unrestricted - slack {
        return Err(Error::invalid(format!(
            "restricted SSR {ssr_restricted} is smaller than unrestricted SSR {ssr_unrestricted}"
        )));
    }
    let df = DegreesOfFreedom::Pair(q as f64, df_denom as f64);
    let gain = (ssr_restricted - ssr_unrestricted).max(0.0);
    if gain == 0.0 {
        return Ok(TestResult {
            statistic: 0.0,
            p_value: 1.0,
            df,
        });
    }
    if ssr_unrestricted <= 0.0 {
        return Ok(TestResult {
            statistic: f64::INFINITY,
            p_value: 0.0,
            df,
        });
    }
    let f = (gain / q as f64) / (ssr_unrestricted / df_denom as f64);
    Ok(TestResult {
        statistic: f,
        p_value: f_sf(f, q as f64, df_denom as f64)?,
        df,
    })
}
