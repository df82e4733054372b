use serde::Serialize;

use super::{BinnedSeries, Corpus, SourceKind};
use crate::error::Result;
use crate::stats::{mean, DistributionStats};

/// Per-candidate tweet/article rates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub candidate: String,
    pub avg_tweets_per_day: f64,
    pub avg_articles_per_day: f64,
    /// `avg_tweets_per_day / avg_articles_per_day`; `None` without articles.
    pub ratio: Option<f64>,
    pub tweet_sampling_rate: Option<f64>,
    pub article_sampling_rate: Option<f64>,
}

impl SummaryRow {
    /// Rates divided by the declared sampling rates (unchanged when none is declared).
    pub fn scaled(&self) -> (f64, f64, Option<f64>) {
        let tweets = self.avg_tweets_per_day / self.tweet_sampling_rate.unwrap_or(1.0);
        let articles = self.avg_articles_per_day / self.article_sampling_rate.unwrap_or(1.0);
        (tweets, articles, ratio(tweets, articles))
    }

    /// Presentation strings: whole tweets, articles to two decimals, whole ratio.
    pub fn formatted(&self) -> [String; 3] {
        [
            format_grouped(self.avg_tweets_per_day, 0),
            format_grouped(self.avg_articles_per_day, 2),
            self.ratio
                .map_or_else(|| "—".to_string(), |r| format_grouped(r, 0)),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusSummary {
    pub days: usize,
    pub rows: Vec<SummaryRow>,
}

fn ratio(num: f64, den: f64) -> Option<f64> {
    (den > 0.0).then(|| num / den)
}

/// Mean daily tweet and article counts for every declared candidate.
pub fn corpus_summary(corpus: &Corpus) -> CorpusSummary {
    let rows = corpus
        .candidates()
        .iter()
        .map(|c| {
            let tweets = mean(&corpus.daily_counts(c, SourceKind::Twitter).as_f64());
            let articles = mean(&corpus.daily_counts(c, SourceKind::News).as_f64());
            SummaryRow {
                candidate: c.clone(),
                avg_tweets_per_day: tweets,
                avg_articles_per_day: articles,
                ratio: ratio(tweets, articles),
                tweet_sampling_rate: corpus.sampling_rate(c, SourceKind::Twitter),
                article_sampling_rate: corpus.sampling_rate(c, SourceKind::News),
            }
        })
        .collect();
    CorpusSummary {
        days: corpus.n_days(),
        rows,
    }
}

/// Order statistics of daily counts.
pub fn distribution_stats(daily: &BinnedSeries) -> Result<DistributionStats> {
    DistributionStats::from_values(&daily.as_f64())
}

/// Rounds half away from zero to `decimals` places and groups the integer
/// part in thousands: `6956.4 -> "6,956"`, `7.655 -> "7.66"`.
pub fn format_grouped(value: f64, decimals: usize) -> String {
    if !value.is_finite() {
        return if value.is_nan() { "—".into() } else if value > 0.0 { "∞".into() } else { "-∞".into() };
    }
    let scale = 10f64.powi(decimals as i32);
    let rounded = (value.abs() * scale).round() / scale;
    let body = format!("{rounded:.decimals$}");
    let (int_part, frac_part) = match body.split_once('.') {
        Some((i, f)) => (i, Some(f)),
        None => (body.as_str(), None),
    };
    let mut grouped = String::new();
    for (i, ch) in int_part.chars().enumerate() {
        if i > 0 && (int_part.len() - i) % 3 == 0 {
            grouped.push(',');
        }
        grouped.push(ch);
    }
    if let Some(f) = frac_part {
        grouped.push('.');
        grouped.push_str(f);
    }
    if value < 0.0 && rounded != 0.0 {
        grouped.insert(0, '-');
    }
    grouped
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grouping() {
        assert_eq!(format_grouped(53_286.0 / 7.66, 0), "6,956");
        assert_eq!(format_grouped(53_286.0, 0), "53,286");
        assert_eq!(format_grouped(7.66, 2), "7.66");
        assert_eq!(format_grouped(1_234_567.891, 1), "1,234,567.9");
        assert_eq!(format_grouped(999.5, 0), "1,000");
        assert_eq!(format_grouped(-12_345.0, 0), "-12,345");
        assert_eq!(format_grouped(0.0, 2), "0.00");
    }

    #[test]
    fn undefined_ratio_renders_as_dash() {
        let row = SummaryRow {
            candidate: "x".into(),
            avg_tweets_per_day: 10.0,
            avg_articles_per_day: 0.0,
            ratio: None,
            tweet_sampling_rate: None,
            article_sampling_rate: None,
        };
        assert_eq!(row.formatted()[2], "—");
    }

    #[test]
    fn scaled_view_divides_by_rate() {
        let row = SummaryRow {
            candidate: "x".into(),
            avg_tweets_per_day: 10.0,
            avg_articles_per_day: 4.0,
            ratio: Some(2.5),
            tweet_sampling_rate: Some(0.1),
            article_sampling_rate: None,
        };
        let (t, a, r) = row.scaled();
        assert!((t - 100.0).abs() < 1e-12);
        assert_eq!(a, 4.0);
        assert!((r.unwrap() - 25.0).abs() < 1e-12);
    }
}
