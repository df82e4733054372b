//! Exponential-decay smoothing of publication instants.
//!
//! Every event contributes `exp(-r (t - t_e))` to the intensity at every
//! time `t >= t_e`, with `r = ln 2 / half_life`. This is the Hawkes kernel
//! used purely as a smoother; nothing is fitted.

use std::io::Write;

use serde::Serialize;

use crate::corpus::EventSeries;
use crate::error::{Error, Result};
use crate::time::{self, Seconds, Timestamp};

/// Smoothed intensity sampled at `t0 + k * step`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntensitySeries {
    pub t0: Timestamp,
    pub step: Seconds,
    pub values: Vec<f64>,
    /// Seconds; may be fractional.
    pub half_life: f64,
}

impl IntensitySeries {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn time_at(&self, k: usize) -> Timestamp {
        self.t0 + k as i64 * self.step
    }

    pub fn same_grid(&self, other: &IntensitySeries) -> bool {
        self.t0 == other.t0 && self.step == other.step && self.len() == other.len()
    }

    /// `t,value` CSV with RFC-3339 instants.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t", "value"]).map_err(|e| Error::Output(e.to_string()))?;
        for (k, v) in self.values.iter().enumerate() {
            w.write_record([time::format_rfc3339(self.time_at(k)), v.to_string()])
                .map_err(|e| Error::Output(e.to_string()))?;
        }
        w.flush().map_err(|e| Error::Output(e.to_string()))
    }
}

/// Decay constant in 1/second such that a lone contribution halves every `half_life` seconds.
pub fn decay_rate(half_life: f64) -> Result<f64> {
    if !(half_life > 0.0) || !half_life.is_finite() {
        return Err(Error::invalid(format!(
            "half-life must be a positive number of seconds, got {half_life}"
        )));
    }
    Ok(std::f64::consts::LN_2 / half_life)
}

/// Mean spacing between consecutive events, `(last - first) / (n - 1)` seconds.
pub fn average_period(events: &EventSeries) -> Result<f64> {
    let ts = events.timestamps();
    if ts.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "average period needs at least 2 events, got {}",
            ts.len()
        )));
    }
    Ok((ts[ts.len() - 1] - ts[0]) as f64 / (ts.len() - 1) as f64)
}

/// Samples the decayed event sum on the grid `t0 + k*step` for all such points `< t1`.
///
/// An event exactly on a grid point contributes 1 there. Events before `t0`
/// still contribute their decayed mass.
pub fn smooth(
    events: &EventSeries,
    t0: Timestamp,
    t1: Timestamp,
    step: Seconds,
    half_life: f64,
) -> Result<IntensitySeries> {
    smooth_timestamps(events.timestamps(), t0, t1, step, half_life)
}

/// [`smooth`] on a raw timestamp slice, which must be non-decreasing.
pub fn smooth_timestamps(
    ts: &[Timestamp],
    t0: Timestamp,
    t1: Timestamp,
    step: Seconds,
    half_life: f64,
) -> Result<IntensitySeries> {
    if t1 <= t0 {
        return Err(Error::invalid("smoothing range is empty (t1 <= t0)"));
    }
    if step <= 0 {
        return Err(Error::invalid(format!("grid step must be positive, got {step}")));
    }
    if let Some(i) = ts.windows(2).position(|w| w[1] < w[0]) {
        return Err(Error::invalid(format!(
            "event timestamps are not sorted at position {}",
            i + 1
        )));
    }
    let r = decay_rate(half_life)?;
    let n = ((t1 - t0 + step - 1) / step) as usize;
    let step_decay = (-r * step as f64).exp();

    // Mass already present at t0.
    let mut i = 0;
    let mut acc = 0.0;
    let mut last: Option<Timestamp> = None;
    while i < ts.len() && ts[i] <= t0 {
        if let Some(prev) = last {
            acc *= (-r * (ts[i] - prev) as f64).exp();
        }
        acc += 1.0;
        last = Some(ts[i]);
        i += 1;
    }
    if let Some(prev) = last {
        acc *= (-r * (t0 - prev) as f64).exp();
    }

    let mut values = Vec::with_capacity(n);
    values.push(acc);
    for k in 1..n {
        let tk = t0 + k as i64 * step;
        acc *= step_decay;
        while i < ts.len() && ts[i] <= tk {
            acc += (-r * (tk - ts[i]) as f64).exp();
            i += 1;
        }
        values.push(acc);
    }

    Ok(IntensitySeries {
        t0,
        step,
        values,
        half_life,
    })
}
