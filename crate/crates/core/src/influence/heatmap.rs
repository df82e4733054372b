use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{EventSeries, SourceKind, FIVE_MINUTES};
use crate::error::{Error, Result};
use crate::hawkes::{self, IntensitySeries};
use crate::stats::pearson_unchecked;
use crate::time::{self, Seconds, Timestamp, HOUR, WEEK};

/// Geometry of a windowed lag-correlation heatmap. All durations in seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HeatmapSpec {
    /// Length of each correlated window.
    pub window: Seconds,
    /// Distance between consecutive window starts.
    pub stride: Seconds,
    /// Offsets run from `-max_offset` to `+max_offset`.
    pub max_offset: Seconds,
    pub offset_step: Seconds,
    /// Smoothing half-life in seconds; `None` uses each series' average period.
    pub half_life: Option<f64>,
    pub grid_step: Seconds,
}

impl Default for HeatmapSpec {
    fn default() -> Self {
        Self {
            window: 2 * WEEK,
            stride: 12 * HOUR,
            max_offset: 48 * HOUR,
            offset_step: HOUR,
            half_life: None,
            grid_step: FIVE_MINUTES,
        }
    }
}

impl HeatmapSpec {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("window", self.window),
            ("stride", self.stride),
            ("offset step", self.offset_step),
            ("grid step", self.grid_step),
        ];
        for (name, v) in positive {
            if v <= 0 {
                return Err(Error::invalid(format!("heatmap {name} must be positive, got {v}")));
            }
        }
        if self.max_offset < 0 {
            return Err(Error::invalid("heatmap max offset must be non-negative"));
        }
        for (name, v) in [
            ("stride", self.stride),
            ("window", self.window),
            ("offset step", self.offset_step),
        ] {
            if v % self.grid_step != 0 {
                return Err(Error::invalid(format!(
                    "heatmap {name} ({v}s) is not a multiple of the grid step ({}s)",
                    self.grid_step
                )));
            }
        }
        if self.max_offset % self.offset_step != 0 {
            return Err(Error::invalid(
                "heatmap max offset is not a multiple of the offset step",
            ));
        }
        if self.window < 2 * self.grid_step {
            return Err(Error::invalid("heatmap window must span at least two grid points"));
        }
        if let Some(h) = self.half_life {
            hawkes::decay_rate(h)?;
        }
        Ok(())
    }

    /// Symmetric offsets `-max_offset ..= max_offset`, always including 0.
    pub fn offsets(&self) -> Vec<Seconds> {
        let k = self.max_offset / self.offset_step;
        (-k..=k).map(|i| i * self.offset_step).collect()
    }

    /// Shortest data range that yields one row.
    pub fn min_range(&self) -> Seconds {
        self.window + 2 * self.max_offset
    }

    /// Number of rows for a data range of `range` seconds.
    pub fn row_count(&self, range: Seconds) -> usize {
        if range < self.min_range() {
            0
        } else {
            ((range - self.min_range()) / self.stride + 1) as usize
        }
    }
}

/// Correlation of a fixed window of one series against shifted windows of another.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LagHeatmap {
    pub spec: HeatmapSpec,
    pub candidate: String,
    pub fixed_source: SourceKind,
    pub shifted_source: SourceKind,
    pub row_starts: Vec<Timestamp>,
    pub offsets: Vec<Seconds>,
    /// Row-major, `row_starts.len() x offsets.len()`; `None` where a window has no variance.
    pub cells: Vec<Option<f64>>,
    /// Half-lives actually used for the fixed and shifted series.
    pub half_lives: (f64, f64),
}

impl LagHeatmap {
    pub fn rows(&self) -> usize {
        self.row_starts.len()
    }

    pub fn cols(&self) -> usize {
        self.offsets.len()
    }

    pub fn get(&self, row: usize, col: usize) -> Option<f64> {
        self.cells[row * self.cols() + col]
    }

    pub fn row(&self, row: usize) -> &[Option<f64>] {
        &self.cells[row * self.cols()..(row + 1) * self.cols()]
    }

    /// Column of the offset with the largest defined correlation in `row`.
    pub fn argmax_offset(&self, row: usize) -> Option<Seconds> {
        let mut best: Option<(usize, f64)> = None;
        for (j, cell) in self.row(row).iter().enumerate() {
            if let Some(v) = *cell {
                if best.map_or(true, |(_, b)| v > b) {
                    best = Some((j, v));
                }
            }
        }
        best.map(|(j, _)| self.offsets[j])
    }

    pub fn defined_cells(&self) -> usize {
        self.cells.iter().filter(|c| c.is_some()).count()
    }

    /// `window_start,<offset>...` CSV; undefined cells are empty fields.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["window_start".to_string()];
        header.extend(self.offsets.iter().map(|&o| offset_label(o)));
        w.write_record(&header).map_err(|e| Error::Output(e.to_string()))?;
        for (i, &start) in self.row_starts.iter().enumerate() {
            let mut record = vec![time::format_rfc3339(start)];
            record.extend(
                self.row(i)
                    .iter()
                    .map(|c| c.map_or_else(String::new, |v| v.to_string())),
            );
            w.write_record(&record).map_err(|e| Error::Output(e.to_string()))?;
        }
        w.flush().map_err(|e| Error::Output(e.to_string()))
    }
}

/// `-48h`, `0h`, `+6h`; sub-hour offsets fall back to minutes or seconds.
pub fn offset_label(offset: Seconds) -> String {
    let sign = if offset > 0 { "+" } else if offset < 0 { "-" } else { "" };
    let a = offset.abs();
    if a % HOUR == 0 {
        format!("{sign}{}h", a / HOUR)
    } else if a % 60 == 0 {
        format!("{sign}{}m", a / 60)
    } else {
        format!("{sign}{a}s")
    }
}

/// Heatmap over the grid-aligned span of both event series.
///
/// `fixed` stays in place and `shifted` is moved by each offset, so a
/// positive offset correlates `fixed` at `t` with `shifted` at `t + o`:
/// the fixed series leads.
pub fn lag_heatmap(fixed: &EventSeries, shifted: &EventSeries, spec: &HeatmapSpec) -> Result<LagHeatmap> {
    spec.validate()?;
    let (first, last) = match (fixed.first(), fixed.last(), shifted.first(), shifted.last()) {
        (Some(a), Some(b), Some(c), Some(d)) => (a.min(c), b.max(d)),
        _ => {
            return Err(Error::InsufficientData(
                "lag heatmap needs events in both series".into(),
            ))
        }
    };
    let t0 = time::floor_to(first, spec.grid_step);
    let t1 = time::floor_to(last, spec.grid_step) + spec.grid_step;
    lag_heatmap_in_range(fixed, shifted, spec, t0, t1)
}

/// Heatmap over the grid `[t0, t1)`; both bounds must be multiples of the grid step.
pub fn lag_heatmap_in_range(
    fixed: &EventSeries,
    shifted: &EventSeries,
    spec: &HeatmapSpec,
    t0: Timestamp,
    t1: Timestamp,
) -> Result<LagHeatmap> {
    spec.validate()?;
    if fixed.is_empty() || shifted.is_empty() {
        return Err(Error::InsufficientData(
            "lag heatmap needs events in both series".into(),
        ));
    }
    if t0 % spec.grid_step != 0 || t1 % spec.grid_step != 0 || t1 <= t0 {
        return Err(Error::invalid(
            "heatmap range must be a non-empty interval aligned to the grid step",
        ));
    }
    let half_life = |s: &EventSeries| match spec.half_life {
        Some(h) => Ok(h),
        None => hawkes::average_period(s),
    };
    let (h_fixed, h_shifted) = (half_life(fixed)?, half_life(shifted)?);
    let a = hawkes::smooth(fixed, t0, t1, spec.grid_step, h_fixed)?;
    let b = hawkes::smooth(shifted, t0, t1, spec.grid_step, h_shifted)?;
    let mut map = heatmap_from_intensities(&a, &b, spec)?;
    map.candidate = fixed.candidate.clone();
    map.fixed_source = fixed.source_kind;
    map.shifted_source = shifted.source_kind;
    Ok(map)
}

/// Correlates windows of two intensity series that share one grid.
pub fn heatmap_from_intensities(
    fixed: &IntensitySeries,
    shifted: &IntensitySeries,
    spec: &HeatmapSpec,
) -> Result<LagHeatmap> {
    spec.validate()?;
    if !fixed.same_grid(shifted) {
        return Err(Error::invalid("intensity series are on different grids"));
    }
    if fixed.step != spec.grid_step {
        return Err(Error::invalid(format!(
            "intensity grid step {}s differs from the heatmap grid step {}s",
            fixed.step, spec.grid_step
        )));
    }
    let range = fixed.len() as i64 * spec.grid_step;
    let n_rows = spec.row_count(range);
    if n_rows == 0 {
        return Err(Error::InsufficientData(format!(
            "data range {} is shorter than window + 2 x max offset = {}",
            time::format_duration(range),
            time::format_duration(spec.min_range())
        )));
    }
    let g = spec.grid_step;
    let offsets = spec.offsets();
    let win = (spec.window / g) as usize;
    let margin = (spec.max_offset / g) as usize;
    let stride = (spec.stride / g) as usize;

    let cells: Vec<Option<f64>> = (0..n_rows)
        .into_par_iter()
        .flat_map_iter(|i| {
            let start = margin + i * stride;
            let x = &fixed.values[start..start + win];
            offsets.iter().map(move |&o| {
                let s = (start as i64 + o / g) as usize;
                pearson_unchecked(x, &shifted.values[s..s + win])
            })
        })
        .collect();

    Ok(LagHeatmap {
        spec: *spec,
        candidate: String::new(),
        fixed_source: SourceKind::Twitter,
        shifted_source: SourceKind::News,
        row_starts: (0..n_rows)
            .map(|i| fixed.t0 + spec.max_offset + i as i64 * spec.stride)
            .collect(),
        offsets,
        cells,
        half_lives: (fixed.half_life, shifted.half_life),
    })
}
