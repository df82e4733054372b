//! Student-t and Fisher F distribution functions.

use super::special::beta_reg;
use crate::error::{Error, Result};

fn check_finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} must be finite, got {v}")))
    }
}

fn check_df(name: &str, v: f64) -> Result<()> {
    check_finite(name, v)?;
    if v > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} must be positive, got {v}")))
    }
}

/// `P(T <= x)` for Student's t with `df` degrees of freedom.
pub fn t_cdf(x: f64, df: f64) -> Result<f64> {
    check_finite("t statistic", x)?;
    check_df("df", df)?;
    let tail = 0.5 * beta_reg(df / 2.0, 0.5, df / (df + x * x))?;
    Ok(if x > 0.0 { 1.0 - tail } else { tail })
}

/// Two-sided p-value `P(|T| >= |x|)`.
pub fn t_two_sided_p(x: f64, df: f64) -> Result<f64> {
    check_finite("t statistic", x)?;
    check_df("df", df)?;
    beta_reg(df / 2.0, 0.5, df / (df + x * x))
}

/// `P(F <= x)` for Fisher's F with `(d1, d2)` degrees of freedom.
pub fn f_cdf(x: f64, d1: f64, d2: f64) -> Result<f64> {
    check_finite("F statistic", x)?;
    check_df("d1", d1)?;
    check_df("d2", d2)?;
    if x <= 0.0 {
        return Ok(0.0);
    }
    beta_reg(d1 / 2.0, d2 / 2.0, d1 * x / (d1 * x + d2))
}

/// Upper tail `P(F > x)`, computed directly so tiny p-values survive.
pub fn f_sf(x: f64, d1: f64, d2: f64) -> Result<f64> {
    check_finite("F statistic", x)?;
    check_df("d1", d1)?;
    check_df("d2", d2)?;
    if x <= 0.0 {
        return Ok(1.0);
    }
    beta_reg(d2 / 2.0, d1 / 2.0, d2 / (d2 + d1 * x))
}
