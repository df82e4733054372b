//! Lexicon-based sentiment: document scoring, positive:negative ratios per
//! source scope, and comparisons across news-bias categories.

mod lexicon;
mod scorer;

pub use lexicon::{load_lexicon, Lexicon, RuleConstants};
pub use scorer::{classify, classify_with, score, tokenize, Polarity, Thresholds};

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::corpus::{Bias, Corpus, DocumentEvent, SourceKind};
use crate::error::{Error, Result};
use crate::stats::{mean, two_sample_t_test, TestResult, VarianceAssumption};
use crate::time::{self, DAY};

/// Which documents a summary covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Scope {
    /// Every news article.
    News,
    /// News articles from outlets of one bias category.
    NewsBias(Bias),
    Twitter,
    CandidateTwitter,
}

impl Scope {
    pub fn matches(&self, e: &DocumentEvent) -> bool {
        match self {
            Scope::News => e.source_kind == SourceKind::News,
            Scope::NewsBias(b) => e.source_kind == SourceKind::News && e.bias == *b,
            Scope::Twitter => e.source_kind == SourceKind::Twitter,
            Scope::CandidateTwitter => e.source_kind == SourceKind::CandidateTwitter,
        }
    }

    fn source_kind(&self) -> SourceKind {
        match self {
            Scope::News | Scope::NewsBias(_) => SourceKind::News,
            Scope::Twitter => SourceKind::Twitter,
            Scope::CandidateTwitter => SourceKind::CandidateTwitter,
        }
    }
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scope::News => f.write_str("news"),
            Scope::NewsBias(b) => write!(f, "news:{b}"),
            Scope::Twitter => f.write_str("twitter"),
            Scope::CandidateTwitter => f.write_str("candidate_twitter"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SentimentSummary {
    pub candidate: String,
    pub scope: Scope,
    pub positive: usize,
    pub negative: usize,
    pub neutral: usize,
    /// `positive / negative`; `None` when there are no negative documents.
    pub ratio: Option<f64>,
    /// Mean over days of the per-day mean compound (days without documents skipped).
    pub mean_daily_sentiment: f64,
    /// `(UTC day start, mean compound)` for each day with documents.
    #[serde(skip)]
    pub daily: Vec<(i64, f64)>,
}

impl SentimentSummary {
    pub fn total(&self) -> usize {
        self.positive + self.negative + self.neutral
    }

    pub fn daily_means(&self) -> Vec<f64> {
        self.daily.iter().map(|&(_, m)| m).collect()
    }

    /// `∞` for positive-only scopes, `—` when nothing is polar.
    pub fn ratio_label(&self) -> String {
        match self.ratio {
            Some(r) => r.to_string(),
            None if self.positive > 0 => "∞".to_string(),
            None => "—".to_string(),
        }
    }
}

/// Scores, classifies, and aggregates every in-scope document of a candidate.
pub fn sentiment_summary(
    corpus: &Corpus,
    candidate: &str,
    scope: Scope,
    lexicon: &Lexicon,
    thresholds: &Thresholds,
) -> Result<SentimentSummary> {
    corpus.require_candidate(candidate)?;
    let docs: Vec<&DocumentEvent> = corpus
        .documents(candidate, scope.source_kind())
        .filter(|e| scope.matches(e))
        .collect();
    if docs.is_empty() {
        return Err(Error::InsufficientData(format!(
            "no {scope} documents for {candidate}"
        )));
    }
    let compounds: Vec<f64> = docs.par_iter().map(|e| score(&e.text, lexicon)).collect();

    let (mut positive, mut negative, mut neutral) = (0, 0, 0);
    let mut by_day: BTreeMap<i64, (f64, usize)> = BTreeMap::new();
    for (e, &c) in docs.iter().zip(&compounds) {
        match classify_with(c, thresholds) {
            Polarity::Positive => positive += 1,
            Polarity::Negative => negative += 1,
            Polarity::Neutral => neutral += 1,
        }
        let slot = by_day.entry(time::floor_to(e.timestamp, DAY)).or_insert((0.0, 0));
        slot.0 += c;
        slot.1 += 1;
    }
    let daily: Vec<(i64, f64)> = by_day
        .into_iter()
        .map(|(day, (sum, n))| (day, sum / n as f64))
        .collect();
    let mean_daily_sentiment = mean(&daily.iter().map(|d| d.1).collect::<Vec<_>>());

    Ok(SentimentSummary {
        candidate: candidate.to_string(),
        scope,
        positive,
        negative,
        neutral,
        ratio: (negative > 0).then(|| positive as f64 / negative as f64),
        mean_daily_sentiment,
        daily,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CategorySentiment {
    pub bias: Bias,
    pub summary: SentimentSummary,
    /// Ratio minus the mean of all defined category ratios.
    pub delta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairTest {
    pub a: Bias,
    pub b: Bias,
    /// `None` when the daily samples are too small or both constant.
    pub result: Option<TestResult>,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BiasComparison {
    pub candidate: String,
    pub categories: Vec<CategorySentiment>,
    /// Categories without documents for this candidate.
    pub omitted: Vec<Bias>,
    pub tests: Vec<PairTest>,
}

/// Per-bias ratios, their mean-shifted deltas, and pairwise t-tests on daily mean sentiment.
pub fn bias_comparison(
    corpus: &Corpus,
    candidate: &str,
    lexicon: &Lexicon,
    thresholds: &Thresholds,
    variance: VarianceAssumption,
) -> Result<BiasComparison> {
    corpus.require_candidate(candidate)?;
    let mut summaries = Vec::new();
    let mut omitted = Vec::new();
    for bias in Bias::CATEGORIES {
        match sentiment_summary(corpus, candidate, Scope::NewsBias(bias), lexicon, thresholds) {
            Ok(s) => summaries.push((bias, s)),
            Err(Error::InsufficientData(_)) => omitted.push(bias),
            Err(e) => return Err(e),
        }
    }
    if summaries.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "{candidate} has news in {} bias categor{}; comparison needs at least 2",
            summaries.len(),
            if summaries.len() == 1 { "y" } else { "ies" }
        )));
    }
    if !omitted.is_empty() {
        log::info!(
            "{candidate}: no news from {} outlets",
            omitted.iter().map(|b| b.as_str()).collect::<Vec<_>>().join(", ")
        );
    }

    let mut tests = Vec::new();
    for i in 0..summaries.len() {
        for j in i + 1..summaries.len() {
            let (a, sa) = &summaries[i];
            let (b, sb) = &summaries[j];
            let (result, note) = match two_sample_t_test(&sa.daily_means(), &sb.daily_means(), variance) {
                Ok(r) => (Some(r), None),
                Err(e @ (Error::InsufficientData(_) | Error::Degenerate(_))) => (None, Some(e.to_string())),
                Err(e) => return Err(e),
            };
            tests.push(PairTest {
                a: *a,
                b: *b,
                result,
                note,
            });
        }
    }

    let deltas = ratio_deltas(summaries.iter().map(|(_, s)| s));
    let categories = summaries
        .into_iter()
        .zip(deltas)
        .map(|((bias, summary), delta)| CategorySentiment { bias, delta, summary })
        .collect();
    Ok(BiasComparison {
        candidate: candidate.to_string(),
        categories,
        omitted,
        tests,
    })
}

/// Each defined ratio minus the mean of all defined ratios.
pub fn ratio_deltas<'a>(summaries: impl IntoIterator<Item = &'a SentimentSummary>) -> Vec<Option<f64>> {
    let ratios: Vec<Option<f64>> = summaries.into_iter().map(|s| s.ratio).collect();
    let defined: Vec<f64> = ratios.iter().flatten().copied().collect();
    let center = (!defined.is_empty()).then(|| mean(&defined));
    ratios.into_iter().map(|r| r.zip(center).map(|(r, c)| r - c)).collect()
}

/// `candidate,scope,pos,neg,neu,ratio,mean_daily` rows.
pub fn write_summary_csv<W: Write>(rows: &[SentimentSummary], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["candidate", "scope", "pos", "neg", "neu", "ratio", "mean_daily"])
        .map_err(|e| Error::Output(e.to_string()))?;
    for s in rows {
        w.write_record([
            s.candidate.clone(),
            s.scope.to_string(),
            s.positive.to_string(),
            s.negative.to_string(),
            s.neutral.to_string(),
            s.ratio_label(),
            s.mean_daily_sentiment.to_string(),
        ])
        .map_err(|e| Error::Output(e.to_string()))?;
    }
    w.flush().map_err(|e| Error::Output(e.to_string()))
}
