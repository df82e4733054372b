//! Corpus directory reader and writer.
//!
//! ```text
//! corpus/
//!   manifest.json        candidates, time range, sources, outlet biases
//!   events/*.jsonl       one document per line
//!   series/<kind>.<candidate>.csv   `date,value` daily series
//! ```

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{AttachedSeries, Bias, Corpus, DocumentEvent, SourceKind, ValueSeries};
use crate::error::{Error, Result};
use crate::time::{self, TimeRange};

/// Declares a source stream; `candidate: None` applies to every candidate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceDeclaration {
    pub source_kind: SourceKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub candidate: Option<String>,
    /// Fraction of the stream that was collected (1.0 when complete).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sampling_rate: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub candidates: Vec<String>,
    /// RFC-3339 UTC start of the collection window (inclusive).
    pub start: String,
    /// RFC-3339 UTC end of the collection window (inclusive).
    pub end: String,
    /// When non-empty, events of undeclared source kinds are rejected.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sources: Vec<SourceDeclaration>,
    /// Outlet name to bias category; fills `unknown` news biases and must
    /// agree with any bias stated on the record.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub outlets: BTreeMap<String, Bias>,
}

impl Manifest {
    pub fn range(&self) -> Result<TimeRange> {
        TimeRange::new(time::parse_rfc3339(&self.start)?, time::parse_rfc3339(&self.end)?)
    }

    pub fn sampling_rate(&self, candidate: &str, kind: SourceKind) -> Option<f64> {
        let specific = self
            .sources
            .iter()
            .find(|s| s.source_kind == kind && s.candidate.as_deref() == Some(candidate));
        let general = || {
            self.sources
                .iter()
                .find(|s| s.source_kind == kind && s.candidate.is_none())
        };
        specific.or_else(general).and_then(|s| s.sampling_rate)
    }

    fn validate(&self) -> Result<()> {
        for s in &self.sources {
            if let Some(rate) = s.sampling_rate {
                if !(rate > 0.0 && rate <= 1.0) {
                    return Err(Error::invalid(format!(
                        "sampling rate for {} must lie in (0, 1], got {rate}",
                        s.source_kind
                    )));
                }
            }
            if let Some(c) = &s.candidate {
                if !self.candidates.contains(c) {
                    return Err(Error::invalid(format!(
                        "source declaration names undeclared candidate {c:?}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub(super) fn check_event(&self, e: &DocumentEvent, range: TimeRange) -> Result<()> {
        if !self.candidates.iter().any(|c| *c == e.candidate) {
            return Err(Error::invalid(format!(
                "document {:?} names undeclared candidate {:?}",
                e.id, e.candidate
            )));
        }
        if !range.contains(e.timestamp) {
            return Err(Error::invalid(format!(
                "document {:?} at {} lies outside the corpus range {} .. {}",
                e.id,
                time::format_rfc3339(e.timestamp),
                self.start,
                self.end
            )));
        }
        if e.source_kind != SourceKind::News && e.bias != Bias::Unknown {
            return Err(Error::invalid(format!(
                "document {:?}: only news documents carry a bias (got {} on {})",
                e.id, e.bias, e.source_kind
            )));
        }
        if !self.sources.is_empty() && !self.sources.iter().any(|s| s.source_kind == e.source_kind) {
            return Err(Error::invalid(format!(
                "document {:?} uses undeclared source kind {}",
                e.id, e.source_kind
            )));
        }
        Ok(())
    }
}

/// A `series/` file entry.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesFile {
    pub kind: String,
    pub candidate: String,
    pub path: PathBuf,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRecord {
    id: String,
    ts: String,
    source_kind: SourceKind,
    outlet: String,
    bias: Bias,
    candidate: String,
    text: String,
}

#[derive(Serialize)]
struct RawRecordOut<'a> {
    id: &'a str,
    ts: String,
    source_kind: SourceKind,
    outlet: &'a str,
    bias: Bias,
    candidate: &'a str,
    text: &'a str,
}

fn sorted_entries(dir: &Path, extension: &str) -> Result<Vec<PathBuf>> {
    if !dir.is_dir() {
        return Ok(Vec::new());
    }
    let mut paths = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if path.is_file() && path.extension().and_then(|e| e.to_str()) == Some(extension) {
            paths.push(path);
        }
    }
    paths.sort();
    Ok(paths)
}

/// Reads and validates a corpus directory.
pub fn ingest_corpus(dir: impl AsRef<Path>) -> Result<Corpus> {
    let dir = dir.as_ref();
    let manifest_path = dir.join("manifest.json");
    let text = fs::read_to_string(&manifest_path).map_err(|e| Error::io(&manifest_path, e))?;
    let manifest: Manifest = serde_json::from_str(&text)
        .map_err(|e| Error::parse(&manifest_path, e.line(), e.to_string()))?;
    manifest.validate()?;
    let range = manifest.range()?;

    let mut events = Vec::new();
    for path in sorted_entries(&dir.join("events"), "jsonl")? {
        read_events(&path, &manifest, range, &mut events)?;
    }

    let mut series = Vec::new();
    for path in sorted_entries(&dir.join("series"), "csv")? {
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or_default();
        let (kind, candidate) = stem.split_once('.').ok_or_else(|| {
            Error::parse(&path, 0, "series file name must be <kind>.<candidate>.csv")
        })?;
        if !manifest.candidates.iter().any(|c| c == candidate) {
            return Err(Error::parse(
                &path,
                0,
                format!("series names undeclared candidate {candidate:?}"),
            ));
        }
        series.push(AttachedSeries {
            kind: kind.to_string(),
            candidate: candidate.to_string(),
            series: read_value_series(&path)?,
        });
    }

    if events.is_empty() {
        return Err(Error::InsufficientData(format!(
            "corpus {} contains no events",
            dir.display()
        )));
    }
    Corpus::from_parts(manifest, events, series)
}

fn read_events(
    path: &Path,
    manifest: &Manifest,
    range: TimeRange,
    out: &mut Vec<DocumentEvent>,
) -> Result<()> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let lineno = i + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let raw: RawRecord =
            serde_json::from_str(&line).map_err(|e| Error::parse(path, lineno, e.to_string()))?;
        let timestamp =
            time::parse_rfc3339(&raw.ts).map_err(|e| Error::parse(path, lineno, e.to_string()))?;
        let mut bias = raw.bias;
        if raw.source_kind == SourceKind::News {
            if let Some(&mapped) = manifest.outlets.get(&raw.outlet) {
                if bias == Bias::Unknown {
                    bias = mapped;
                } else if bias != mapped {
                    return Err(Error::parse(
                        path,
                        lineno,
                        format!(
                            "outlet {:?} is {mapped} in the manifest but {bias} on the record",
                            raw.outlet
                        ),
                    ));
                }
            }
        }
        let event = DocumentEvent {
            id: raw.id,
            timestamp,
            source_kind: raw.source_kind,
            outlet: raw.outlet,
            bias,
            candidate: raw.candidate,
            text: raw.text,
        };
        manifest
            .check_event(&event, range)
            .map_err(|e| Error::parse(path, lineno, e.to_string()))?;
        out.push(event);
    }
    Ok(())
}

#[derive(Deserialize)]
struct SeriesRow {
    date: String,
    value: f64,
}

fn read_value_series(path: &Path) -> Result<ValueSeries> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| Error::parse(path, 0, e.to_string()))?;
    let headers = reader
        .headers()
        .map_err(|e| Error::parse(path, 1, e.to_string()))?
        .clone();
    if headers.iter().collect::<Vec<_>>() != ["date", "value"] {
        return Err(Error::parse(path, 1, "header must be exactly `date,value`"));
    }
    let mut start = None;
    let mut values = Vec::new();
    for (i, row) in reader.deserialize::<SeriesRow>().enumerate() {
        let lineno = i + 2;
        let row = row.map_err(|e| Error::parse(path, lineno, e.to_string()))?;
        let date = time::parse_date(&row.date).map_err(|e| Error::parse(path, lineno, e.to_string()))?;
        if !row.value.is_finite() {
            return Err(Error::parse(path, lineno, "value must be finite"));
        }
        let first = *start.get_or_insert(date);
        let expected = first + chrono::Days::new(values.len() as u64);
        if date != expected {
            return Err(Error::parse(
                path,
                lineno,
                format!("expected {expected} (daily series must have no gaps), found {date}"),
            ));
        }
        values.push(row.value);
    }
    match start {
        Some(start) => ValueSeries::new(start, values),
        None => Err(Error::parse(path, 1, "series has no rows")),
    }
}

/// Writes a corpus directory that [`ingest_corpus`] reads back identically.
///
/// All events go to `events/events.jsonl` in the given order.
pub fn write_corpus_dir(
    dir: impl AsRef<Path>,
    manifest: &Manifest,
    events: &[DocumentEvent],
    series: &[AttachedSeries],
) -> Result<()> {
    let dir = dir.as_ref();
    let events_dir = dir.join("events");
    fs::create_dir_all(&events_dir).map_err(|e| Error::io(&events_dir, e))?;

    let manifest_path = dir.join("manifest.json");
    let json = serde_json::to_string_pretty(manifest).map_err(|e| Error::Output(e.to_string()))?;
    fs::write(&manifest_path, json + "\n").map_err(|e| Error::io(&manifest_path, e))?;

    let events_path = events_dir.join("events.jsonl");
    let mut out = std::io::BufWriter::new(
        fs::File::create(&events_path).map_err(|e| Error::io(&events_path, e))?,
    );
    for e in events {
        let record = RawRecordOut {
            id: &e.id,
            ts: time::format_rfc3339(e.timestamp),
            source_kind: e.source_kind,
            outlet: &e.outlet,
            bias: e.bias,
            candidate: &e.candidate,
            text: &e.text,
        };
        let line = serde_json::to_string(&record).map_err(|e| Error::Output(e.to_string()))?;
        writeln!(out, "{line}").map_err(|e| Error::io(&events_path, e))?;
    }
    out.flush().map_err(|e| Error::io(&events_path, e))?;

    if !series.is_empty() {
        let series_dir = dir.join("series");
        fs::create_dir_all(&series_dir).map_err(|e| Error::io(&series_dir, e))?;
        for s in series {
            let path = series_dir.join(format!("{}.{}.csv", s.kind, s.candidate));
            let mut body = String::from("date,value\n");
            for (i, v) in s.series.values.iter().enumerate() {
                body.push_str(&format!("{},{v}\n", s.series.date(i)));
            }
            fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
        }
    }
    Ok(())
}
