//! Instants and durations as whole Unix seconds (UTC).
//!
//! All analysis code works on `i64` seconds; chrono is only used at the
//! edges for parsing and formatting.

use chrono::{DateTime, NaiveDate, SecondsFormat, Utc};

use crate::error::{Error, Result};

/// Seconds since the Unix epoch, UTC.
pub type Timestamp = i64;

/// A span of time in whole seconds.
pub type Seconds = i64;

pub const MINUTE: Seconds = 60;
pub const HOUR: Seconds = 3_600;
pub const DAY: Seconds = 86_400;
pub const WEEK: Seconds = 7 * DAY;

/// Closed interval `[start, end]` of instants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct TimeRange {
    pub start: Timestamp,
    pub end: Timestamp,
}

impl TimeRange {
    pub fn new(start: Timestamp, end: Timestamp) -> Result<Self> {
        if end < start {
            return Err(Error::invalid(format!(
                "time range ends ({}) before it starts ({})",
                format_rfc3339(end),
                format_rfc3339(start)
            )));
        }
        Ok(Self { start, end })
    }

    pub fn contains(&self, t: Timestamp) -> bool {
        self.start <= t && t <= self.end
    }

    pub fn duration(&self) -> Seconds {
        self.end - self.start
    }
}

pub fn parse_rfc3339(s: &str) -> Result<Timestamp> {
    DateTime::parse_from_rfc3339(s.trim())
        .map(|dt| dt.with_timezone(&Utc).timestamp())
        .map_err(|e| Error::invalid(format!("unparsable timestamp {s:?}: {e}")))
}

pub fn format_rfc3339(t: Timestamp) -> String {
    match DateTime::<Utc>::from_timestamp(t, 0) {
        Some(dt) => dt.to_rfc3339_opts(SecondsFormat::Secs, true),
        None => format!("@{t}"),
    }
}

/// Largest multiple of `step` (counted from the epoch) that is `<= t`.
pub fn floor_to(t: Timestamp, step: Seconds) -> Timestamp {
    t.div_euclid(step) * step
}

/// Smallest multiple of `step` (counted from the epoch) that is `>= t`.
pub fn ceil_to(t: Timestamp, step: Seconds) -> Timestamp {
    let f = floor_to(t, step);
    if f == t {
        t
    } else {
        f + step
    }
}

/// UTC calendar date containing `t`.
pub fn date_of(t: Timestamp) -> NaiveDate {
    DateTime::<Utc>::from_timestamp(floor_to(t, DAY), 0)
        .map(|dt| dt.date_naive())
        .unwrap_or(NaiveDate::MIN)
}

/// UTC midnight that starts `date`.
pub fn midnight(date: NaiveDate) -> Timestamp {
    date.and_hms_opt(0, 0, 0)
        .map(|dt| dt.and_utc().timestamp())
        .unwrap_or(0)
}

pub fn parse_date(s: &str) -> Result<NaiveDate> {
    NaiveDate::parse_from_str(s.trim(), "%Y-%m-%d")
        .map_err(|e| Error::invalid(format!("unparsable date {s:?}: {e}")))
}

/// Parses durations such as `5m`, `12h`, `2w`, `30s`, `1d`, or a bare number of seconds.
pub fn parse_duration(s: &str) -> Result<Seconds> {
    let s = s.trim();
    let (digits, unit) = match s.find(|c: char| !(c.is_ascii_digit() || c == '-' || c == '+')) {
        Some(i) => (&s[..i], &s[i..]),
        None => (s, "s"),
    };
    let n: i64 = digits
        .parse()
        .map_err(|_| Error::invalid(format!("unparsable duration {s:?}")))?;
    let mult = match unit {
        "s" => 1,
        "m" | "min" => MINUTE,
        "h" => HOUR,
        "d" => DAY,
        "w" => WEEK,
        _ => return Err(Error::invalid(format!("unknown duration unit in {s:?}"))),
    };
    Ok(n * mult)
}

/// Renders a duration in the largest unit that divides it exactly.
pub fn format_duration(d: Seconds) -> String {
    for (unit, len) in [("w", WEEK), ("d", DAY), ("h", HOUR), ("m", MINUTE)] {
        if d != 0 && d % len == 0 {
            return format!("{}{unit}", d / len);
        }
    }
    format!("{d}s")
}
