//! Document-event corpora: validation, grouping, and binned counts.
//!
//! A [`Corpus`] is immutable once built. Events are grouped by
//! `(candidate, source_kind)` and each group is kept in timestamp order,
//! ties broken by ingestion order.

mod binning;
mod ingest;
mod summary;

pub use binning::{bin_events, daily_counts, BinnedSeries, EventSeries, FIVE_MINUTES};
pub use ingest::{ingest_corpus, write_corpus_dir, Manifest, SeriesFile, SourceDeclaration};
pub use summary::{
    corpus_summary, distribution_stats, format_grouped, CorpusSummary, SummaryRow,
};

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::time::{self, Timestamp, TimeRange, DAY};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceKind {
    Twitter,
    News,
    CandidateTwitter,
}

impl SourceKind {
    pub const ALL: [SourceKind; 3] = [Self::Twitter, Self::News, Self::CandidateTwitter];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Twitter => "twitter",
            Self::News => "news",
            Self::CandidateTwitter => "candidate_twitter",
        }
    }
}

impl fmt::Display for SourceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SourceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "twitter" => Ok(Self::Twitter),
            "news" => Ok(Self::News),
            "candidate_twitter" => Ok(Self::CandidateTwitter),
            _ => Err(Error::invalid(format!("unknown source kind {s:?}"))),
        }
    }
}

/// Political leaning of a news outlet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bias {
    Liberal,
    Central,
    Conservative,
    Unknown,
}

impl Bias {
    pub const CATEGORIES: [Bias; 3] = [Self::Liberal, Self::Central, Self::Conservative];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Liberal => "liberal",
            Self::Central => "central",
            Self::Conservative => "conservative",
            Self::Unknown => "unknown",
        }
    }
}

impl fmt::Display for Bias {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Bias {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "liberal" => Ok(Self::Liberal),
            "central" => Ok(Self::Central),
            "conservative" => Ok(Self::Conservative),
            "unknown" => Ok(Self::Unknown),
            _ => Err(Error::invalid(format!("unknown bias {s:?}"))),
        }
    }
}

/// One timestamped, candidate-tagged document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DocumentEvent {
    pub id: String,
    pub timestamp: Timestamp,
    pub source_kind: SourceKind,
    pub outlet: String,
    pub bias: Bias,
    pub candidate: String,
    pub text: String,
}

/// One value per calendar day without gaps.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValueSeries {
    pub start: NaiveDate,
    pub values: Vec<f64>,
}

impl ValueSeries {
    pub fn new(start: NaiveDate, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InsufficientData("value series has no days".into()));
        }
        Ok(Self { start, values })
    }

    pub fn date(&self, i: usize) -> NaiveDate {
        self.start + chrono::Days::new(i as u64)
    }

    pub fn end(&self) -> NaiveDate {
        self.date(self.values.len() - 1)
    }

    /// Daily counts as real values (bins must be one day wide and midnight aligned).
    pub fn from_daily(bins: &BinnedSeries) -> Result<Self> {
        if bins.bin_width != DAY || bins.t0.rem_euclid(DAY) != 0 {
            return Err(Error::invalid(
                "only midnight-aligned daily bins convert to a value series",
            ));
        }
        Self::new(
            time::date_of(bins.t0),
            bins.counts.iter().map(|&c| c as f64).collect(),
        )
    }

    /// Restricts both series to their common dates.
    pub fn intersect(&self, other: &ValueSeries) -> Option<(ValueSeries, ValueSeries)> {
        let start = self.start.max(other.start);
        let end = self.end().min(other.end());
        if end < start {
            return None;
        }
        let slice = |s: &ValueSeries| {
            let from = (start - s.start).num_days() as usize;
            let to = (end - s.start).num_days() as usize;
            ValueSeries {
                start,
                values: s.values[from..=to].to_vec(),
            }
        };
        Some((slice(self), slice(other)))
    }
}

/// An auxiliary daily series attached to a candidate (search trends, polls, ...).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AttachedSeries {
    pub kind: String,
    pub candidate: String,
    pub series: ValueSeries,
}

/// Immutable, validated collection of document events.
#[derive(Debug, Clone)]
pub struct Corpus {
    manifest: Manifest,
    range: TimeRange,
    events: Vec<DocumentEvent>,
    groups: BTreeMap<(String, SourceKind), Vec<usize>>,
    series: Vec<AttachedSeries>,
}

impl Corpus {
    /// Validates events against the manifest and builds the group index.
    pub fn from_parts(
        manifest: Manifest,
        events: Vec<DocumentEvent>,
        series: Vec<AttachedSeries>,
    ) -> Result<Self> {
        let range = manifest.range()?;
        if manifest.candidates.is_empty() {
            return Err(Error::invalid("manifest declares no candidates"));
        }
        let mut declared = HashSet::new();
        for c in &manifest.candidates {
            if !declared.insert(c.as_str()) {
                return Err(Error::invalid(format!("candidate {c:?} declared twice")));
            }
        }
        if events.is_empty() {
            return Err(Error::InsufficientData("corpus contains no events".into()));
        }

        let mut ids = HashSet::with_capacity(events.len());
        for e in &events {
            manifest.check_event(e, range)?;
            if !ids.insert(e.id.as_str()) {
                return Err(Error::invalid(format!("duplicate document id {:?}", e.id)));
            }
        }
        for s in &series {
            if !declared.contains(s.candidate.as_str()) {
                return Err(Error::invalid(format!(
                    "series {:?} refers to undeclared candidate {:?}",
                    s.kind, s.candidate
                )));
            }
        }

        let mut groups: BTreeMap<(String, SourceKind), Vec<usize>> = BTreeMap::new();
        for (i, e) in events.iter().enumerate() {
            groups
                .entry((e.candidate.clone(), e.source_kind))
                .or_default()
                .push(i);
        }
        for idx in groups.values_mut() {
            idx.sort_by_key(|&i| events[i].timestamp);
        }

        Ok(Self {
            manifest,
            range,
            events,
            groups,
            series,
        })
    }

    pub fn manifest(&self) -> &Manifest {
        &self.manifest
    }

    pub fn candidates(&self) -> &[String] {
        &self.manifest.candidates
    }

    pub fn range(&self) -> TimeRange {
        self.range
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn events(&self) -> &[DocumentEvent] {
        &self.events
    }

    pub fn has_candidate(&self, candidate: &str) -> bool {
        self.manifest.candidates.iter().any(|c| c == candidate)
    }

    pub fn require_candidate(&self, candidate: &str) -> Result<()> {
        if self.has_candidate(candidate) {
            Ok(())
        } else {
            Err(Error::invalid(format!(
                "unknown candidate {candidate:?}; declared: {}",
                self.manifest.candidates.join(", ")
            )))
        }
    }

    /// Documents of one group in timestamp order.
    pub fn documents(
        &self,
        candidate: &str,
        kind: SourceKind,
    ) -> impl Iterator<Item = &DocumentEvent> + '_ {
        self.groups
            .get(&(candidate.to_string(), kind))
            .into_iter()
            .flatten()
            .map(move |&i| &self.events[i])
    }

    pub fn group_len(&self, candidate: &str, kind: SourceKind) -> usize {
        self.groups
            .get(&(candidate.to_string(), kind))
            .map_or(0, Vec::len)
    }

    /// Number of events per `(candidate, source_kind)` group.
    pub fn group_counts(&self) -> BTreeMap<(String, SourceKind), usize> {
        self.groups
            .iter()
            .map(|(k, v)| (k.clone(), v.len()))
            .collect()
    }

    pub fn event_series(&self, candidate: &str, kind: SourceKind) -> EventSeries {
        EventSeries::from_sorted_unchecked(
            candidate.to_string(),
            kind,
            self.documents(candidate, kind).map(|e| e.timestamp).collect(),
        )
    }

    /// Daily counts of one group over the whole corpus range (UTC midnight bins).
    pub fn daily_counts(&self, candidate: &str, kind: SourceKind) -> BinnedSeries {
        let (t0, t1) = self.day_bounds();
        bin_events(&self.event_series(candidate, kind), DAY, t0, t1)
            .expect("corpus day bounds are non-empty")
    }

    /// Midnight-aligned `[t0, t1)` covering every day of the corpus range.
    pub fn day_bounds(&self) -> (Timestamp, Timestamp) {
        (
            time::floor_to(self.range.start, DAY),
            time::floor_to(self.range.end, DAY) + DAY,
        )
    }

    pub fn n_days(&self) -> usize {
        let (t0, t1) = self.day_bounds();
        ((t1 - t0) / DAY) as usize
    }

    pub fn attached_series(&self) -> &[AttachedSeries] {
        &self.series
    }

    pub fn series_for(&self, candidate: &str) -> impl Iterator<Item = &AttachedSeries> + '_ {
        let candidate = candidate.to_string();
        self.series.iter().filter(move |s| s.candidate == candidate)
    }

    pub fn sampling_rate(&self, candidate: &str, kind: SourceKind) -> Option<f64> {
        self.manifest.sampling_rate(candidate, kind)
    }

    /// Outlet name to bias category, as observed in the news events.
    pub fn outlet_biases(&self) -> HashMap<&str, Bias> {
        self.events
            .iter()
            .filter(|e| e.source_kind == SourceKind::News)
            .map(|e| (e.outlet.as_str(), e.bias))
            .collect()
    }
}
