use serde::Serialize;

use super::SourceKind;
use crate::error::{Error, Result};
use crate::time::{self, Seconds, Timestamp, DAY, MINUTE};

/// Width of the fine-grained bins used for lag analysis.
pub const FIVE_MINUTES: Seconds = 5 * MINUTE;

/// Publication instants of one `(candidate, source)` stream, ascending.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EventSeries {
    pub candidate: String,
    pub source_kind: SourceKind,
    timestamps: Vec<Timestamp>,
}

impl EventSeries {
    /// Fails unless `timestamps` is non-decreasing.
    pub fn new(candidate: impl Into<String>, source_kind: SourceKind, timestamps: Vec<Timestamp>) -> Result<Self> {
        if let Some(i) = timestamps.windows(2).position(|w| w[1] < w[0]) {
            return Err(Error::invalid(format!(
                "event timestamps are not sorted at position {}",
                i + 1
            )));
        }
        Ok(Self::from_sorted_unchecked(candidate.into(), source_kind, timestamps))
    }

    pub fn from_unsorted(candidate: impl Into<String>, source_kind: SourceKind, mut timestamps: Vec<Timestamp>) -> Self {
        timestamps.sort_unstable();
        Self::from_sorted_unchecked(candidate.into(), source_kind, timestamps)
    }

    pub(crate) fn from_sorted_unchecked(candidate: String, source_kind: SourceKind, timestamps: Vec<Timestamp>) -> Self {
        debug_assert!(timestamps.windows(2).all(|w| w[0] <= w[1]));
        Self {
            candidate,
            source_kind,
            timestamps,
        }
    }

    pub fn timestamps(&self) -> &[Timestamp] {
        &self.timestamps
    }

    pub fn len(&self) -> usize {
        self.timestamps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.timestamps.is_empty()
    }

    pub fn first(&self) -> Option<Timestamp> {
        self.timestamps.first().copied()
    }

    pub fn last(&self) -> Option<Timestamp> {
        self.timestamps.last().copied()
    }
}

/// Counts over consecutive bins; bin `k` covers `[t0 + k*w, t0 + (k+1)*w)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BinnedSeries {
    pub t0: Timestamp,
    pub bin_width: Seconds,
    pub counts: Vec<u64>,
}

impl BinnedSeries {
    pub fn bin_start(&self, k: usize) -> Timestamp {
        self.t0 + k as i64 * self.bin_width
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn as_f64(&self) -> Vec<f64> {
        self.counts.iter().map(|&c| c as f64).collect()
    }
}

/// Counts events of `series` falling in `[t0, t1)`.
pub fn bin_events(series: &EventSeries, bin_width: Seconds, t0: Timestamp, t1: Timestamp) -> Result<BinnedSeries> {
    if bin_width <= 0 {
        return Err(Error::invalid(format!("bin width must be positive, got {bin_width}")));
    }
    if t1 <= t0 {
        return Err(Error::invalid("binning range is empty (t1 <= t0)"));
    }
    let n_bins = ((t1 - t0 + bin_width - 1) / bin_width) as usize;
    let mut counts = vec![0u64; n_bins];
    let ts = series.timestamps();
    let from = ts.partition_point(|&t| t < t0);
    let to = ts.partition_point(|&t| t < t1);
    for &t in &ts[from..to] {
        counts[((t - t0) / bin_width) as usize] += 1;
    }
    Ok(BinnedSeries {
        t0,
        bin_width,
        counts,
    })
}

/// Per-day counts from the first event's UTC day through the last event's.
pub fn daily_counts(series: &EventSeries) -> Result<BinnedSeries> {
    let (first, last) = match (series.first(), series.last()) {
        (Some(f), Some(l)) => (f, l),
        _ => {
            return Err(Error::InsufficientData(
                "daily counts need at least one event".into(),
            ))
        }
    };
    bin_events(series, DAY, time::floor_to(first, DAY), time::floor_to(last, DAY) + DAY)
}
