use serde::Serialize;

use crate::corpus::{Corpus, SourceKind, ValueSeries};
use crate::error::{Error, Result};
use crate::stats::{pearson, DistributionStats};

fn aligned(a: &ValueSeries, b: &ValueSeries) -> Result<(ValueSeries, ValueSeries)> {
    match a.intersect(b) {
        Some((x, y)) if x.values.len() >= 2 => Ok((x, y)),
        Some((x, _)) => Err(Error::InsufficientData(format!(
            "series overlap on {} day(s); correlation needs at least 2",
            x.values.len()
        ))),
        None => Err(Error::InsufficientData(
            "series share no dates; correlation needs at least 2".into(),
        )),
    }
}

/// Pearson r of two daily series over their common dates.
pub fn cross_source_correlation(a: &ValueSeries, b: &ValueSeries) -> Result<Option<f64>> {
    let (x, y) = aligned(a, b)?;
    pearson(&x.values, &y.values)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoCorrelation {
    pub r: Option<f64>,
    pub n_days: usize,
    /// `(x_day, y_day)` points for a scatter plot.
    pub points: Vec<(f64, f64)>,
}

/// Correlation of two candidates' daily counts on one platform.
pub fn co_correlation(x: &ValueSeries, y: &ValueSeries) -> Result<CoCorrelation> {
    let (a, b) = aligned(x, y)?;
    let r = pearson(&a.values, &b.values)?;
    Ok(CoCorrelation {
        r,
        n_days: a.values.len(),
        points: a.values.into_iter().zip(b.values).collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairCorrelation {
    pub a: String,
    pub b: String,
    pub r: Option<f64>,
    pub n_days: usize,
}

/// All unordered candidate pairs on one source.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoCorrelationMatrix {
    pub source_kind: SourceKind,
    pub pairs: Vec<PairCorrelation>,
    /// Mean over defined `r` only.
    pub mean_r: Option<f64>,
    /// Pairs left out of `mean_r` because their correlation is undefined.
    pub excluded: usize,
    pub distribution: Option<DistributionStats>,
}

impl CoCorrelationMatrix {
    /// Symmetric lookup; `None` for unknown pairs and the diagonal.
    pub fn get(&self, a: &str, b: &str) -> Option<&PairCorrelation> {
        self.pairs
            .iter()
            .find(|p| (p.a == a && p.b == b) || (p.a == b && p.b == a))
    }
}

pub fn co_correlation_matrix(corpus: &Corpus, source_kind: SourceKind) -> Result<CoCorrelationMatrix> {
    let candidates = corpus.candidates();
    if candidates.len() < 2 {
        return Err(Error::InsufficientData(
            "co-correlation needs at least 2 candidates".into(),
        ));
    }
    let daily: Vec<ValueSeries> = candidates
        .iter()
        .map(|c| ValueSeries::from_daily(&corpus.daily_counts(c, source_kind)))
        .collect::<Result<_>>()?;

    let mut pairs = Vec::new();
    for i in 0..candidates.len() {
        for j in i + 1..candidates.len() {
            let cc = co_correlation(&daily[i], &daily[j])?;
            pairs.push(PairCorrelation {
                a: candidates[i].clone(),
                b: candidates[j].clone(),
                r: cc.r,
                n_days: cc.n_days,
            });
        }
    }
    let defined: Vec<f64> = pairs.iter().filter_map(|p| p.r).collect();
    let excluded = pairs.len() - defined.len();
    if excluded > 0 {
        log::warn!(
            "{excluded} {source_kind} candidate pair(s) have undefined correlation and are excluded from the mean"
        );
    }
    let mean_r = (!defined.is_empty()).then(|| defined.iter().sum::<f64>() / defined.len() as f64);
    Ok(CoCorrelationMatrix {
        source_kind,
        pairs,
        mean_r,
        excluded,
        distribution: DistributionStats::from_values(&defined).ok(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SourcePairCorrelation {
    pub candidate: String,
    pub left: String,
    pub right: String,
    pub r: Option<f64>,
    pub n_days: usize,
}

/// Table-2 style correlations between every pair of a candidate's daily
/// sources: news and twitter counts plus any attached value series.
pub fn source_correlation_table(corpus: &Corpus, candidate: &str) -> Result<Vec<SourcePairCorrelation>> {
    corpus.require_candidate(candidate)?;
    let mut sources: Vec<(String, ValueSeries)> = vec![
        (
            SourceKind::News.to_string(),
            ValueSeries::from_daily(&corpus.daily_counts(candidate, SourceKind::News))?,
        ),
        (
            SourceKind::Twitter.to_string(),
            ValueSeries::from_daily(&corpus.daily_counts(candidate, SourceKind::Twitter))?,
        ),
    ];
    let mut extra: Vec<_> = corpus.series_for(candidate).collect();
    extra.sort_by(|a, b| a.kind.cmp(&b.kind));
    sources.extend(extra.into_iter().map(|s| (s.kind.clone(), s.series.clone())));

    let mut rows = Vec::new();
    for i in 0..sources.len() {
        for j in i + 1..sources.len() {
            let (left, a) = &sources[i];
            let (right, b) = &sources[j];
            let (r, n_days) = match aligned(a, b) {
                Ok((x, y)) => (pearson(&x.values, &y.values)?, x.values.len()),
                Err(Error::InsufficientData(_)) => (None, a.intersect(b).map_or(0, |(x, _)| x.values.len())),
                Err(e) => return Err(e),
            };
            rows.push(SourcePairCorrelation {
                candidate: candidate.to_string(),
                left: left.clone(),
                right: right.clone(),
                r,
                n_days,
            });
        }
    }
    Ok(rows)
}
