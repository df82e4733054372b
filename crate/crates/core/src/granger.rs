//! Granger causality between two intensity series on a shared hourly grid.
//!
//! For every lag `L` in `1..=max_lag` the effect series is regressed on an
//! intercept and its own `L` lags (restricted), then additionally on `L`
//! lags of the cause (unrestricted). The SSR F-test compares the two. Both
//! series are standardized first and the first `max_lag` points are
//! trimmed from every model so all lags share one sample window.

use std::io::Write;

use serde::Serialize;

use crate::corpus::EventSeries;
use crate::error::{Error, Result};
use crate::hawkes::{self, IntensitySeries};
use crate::stats::{f_test_nested, mean, sample_variance, ssr_path, Matrix};
use crate::time::{Seconds, Timestamp, HOUR};

/// One lag = one grid step of this length.
pub const GRANGER_STEP: Seconds = HOUR;
pub const DEFAULT_MAX_LAG: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LagTest {
    pub lag: usize,
    #[serde(rename = "F")]
    pub f: f64,
    pub p: f64,
    #[serde(skip)]
    pub ssr_restricted: f64,
    #[serde(skip)]
    pub ssr_unrestricted: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrangerResult {
    /// `"<cause>-><effect>"`.
    pub direction: String,
    pub lags: Vec<LagTest>,
    /// Plain mean of the per-lag p-values.
    pub avg_p: f64,
}

impl GrangerResult {
    pub fn with_direction(mut self, cause: &str, effect: &str) -> Self {
        self.direction = format!("{cause}->{effect}");
        self
    }
}

/// Smallest series length accepted for `max_lag`.
pub fn required_length(max_lag: usize) -> usize {
    3 * max_lag + 2
}

/// Tests whether lags of `cause` help predict `effect`.
pub fn granger_test(effect: &IntensitySeries, cause: &IntensitySeries, max_lag: usize) -> Result<GrangerResult> {
    if !effect.same_grid(cause) {
        return Err(Error::invalid(format!(
            "Granger series must share a grid (t0 {} vs {}, step {}s vs {}s, length {} vs {})",
            effect.t0,
            cause.t0,
            effect.step,
            cause.step,
            effect.len(),
            cause.len()
        )));
    }
    granger_test_values(&effect.values, &cause.values, max_lag)
}

/// [`granger_test`] on raw equally spaced values.
pub fn granger_test_values(effect: &[f64], cause: &[f64], max_lag: usize) -> Result<GrangerResult> {
    if max_lag == 0 {
        return Err(Error::invalid("max_lag must be at least 1"));
    }
    if effect.len() != cause.len() {
        return Err(Error::LengthMismatch {
            left: effect.len(),
            right: cause.len(),
        });
    }
    let n = effect.len();
    if n < required_length(max_lag) {
        return Err(Error::InsufficientData(format!(
            "Granger test with max_lag {max_lag} requires n > {} observations, got {n}",
            3 * max_lag + 1
        )));
    }
    let effect = standardize(effect, "effect")?;
    let cause = standardize(cause, "cause")?;

    let n_used = n - max_lag;
    let y = &effect[max_lag..];
    let mut lags = Vec::with_capacity(max_lag);
    for lag in 1..=max_lag {
        // Column order [1, effect lags, cause lags] makes the restricted
        // model a prefix of the unrestricted one.
        let k = 2 * lag + 1;
        let design = Matrix::with_columns(n_used, k, |j, col| {
            if j == 0 {
                col.fill(1.0);
            } else {
                let (src, l) = if j <= lag { (&effect, j) } else { (&cause, j - lag) };
                col.copy_from_slice(&src[max_lag - l..n - l]);
            }
        });
        let path = ssr_path(&design, y)?;
        let (ssr_r, ssr_u) = (path[lag], path[k - 1]);
        let test = f_test_nested(ssr_r, ssr_u, lag, n_used - k)?;
        lags.push(LagTest {
            lag,
            f: test.statistic,
            p: test.p_value,
            ssr_restricted: ssr_r,
            ssr_unrestricted: ssr_u,
        });
    }
    let avg_p = lags.iter().map(|l| l.p).sum::<f64>() / lags.len() as f64;
    Ok(GrangerResult {
        direction: "cause->effect".to_string(),
        lags,
        avg_p,
    })
}

fn standardize(xs: &[f64], name: &str) -> Result<Vec<f64>> {
    if xs.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid(format!("{name} series contains non-finite values")));
    }
    let m = mean(xs);
    let sd = sample_variance(xs).sqrt();
    if !(sd > 0.0) {
        return Err(Error::Degenerate(format!("{name} series is constant")));
    }
    Ok(xs.iter().map(|v| (v - m) / sd).collect())
}

/// Hourly Hawkes intensity on `[t0, t1)` with the half-life set to the
/// series' average document period.
pub fn prepare_granger_series(events: &EventSeries, t0: Timestamp, t1: Timestamp) -> Result<IntensitySeries> {
    let half_life = hawkes::average_period(events)?;
    hawkes::smooth(events, t0, t1, GRANGER_STEP, half_life)
}

/// Both directions between two named series: `[a -> b, b -> a]`.
pub fn granger_both(
    a_name: &str,
    a: &IntensitySeries,
    b_name: &str,
    b: &IntensitySeries,
    max_lag: usize,
) -> Result<[GrangerResult; 2]> {
    Ok([
        granger_test(b, a, max_lag)?.with_direction(a_name, b_name),
        granger_test(a, b, max_lag)?.with_direction(b_name, a_name),
    ])
}

/// Mean of `avg_p` per direction, in first-seen direction order.
pub fn average_p_by_direction(results: &[GrangerResult]) -> Vec<(String, f64)> {
    let mut acc: Vec<(String, f64, usize)> = Vec::new();
    for r in results {
        match acc.iter_mut().find(|(d, _, _)| *d == r.direction) {
            Some(slot) => {
                slot.1 += r.avg_p;
                slot.2 += 1;
            }
            None => acc.push((r.direction.clone(), r.avg_p, 1)),
        }
    }
    acc.into_iter().map(|(d, s, n)| (d, s / n as f64)).collect()
}

/// `lag,F_<dir1>,p_<dir1>,F_<dir2>,p_<dir2>` for the F-versus-lag plot.
pub fn write_lag_csv<W: Write>(results: &[GrangerResult], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["lag".to_string()];
    for r in results {
        header.push(format!("F_{}", r.direction));
        header.push(format!("p_{}", r.direction));
    }
    w.write_record(&header).map_err(|e| Error::Output(e.to_string()))?;
    let n = results.iter().map(|r| r.lags.len()).max().unwrap_or(0);
    for i in 0..n {
        let mut rec = vec![(i + 1).to_string()];
        for r in results {
            match r.lags.get(i) {
                Some(l) => {
                    rec.push(l.f.to_string());
                    rec.push(l.p.to_string());
                }
                None => rec.extend([String::new(), String::new()]),
            }
        }
        w.write_record(&rec).map_err(|e| Error::Output(e.to_string()))?;
    }
    w.flush().map_err(|e| Error::Output(e.to_string()))
}
