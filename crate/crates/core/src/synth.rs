//! Seeded synthetic data: Poisson event streams and a small self-consistent
//! corpus with its lexicon, topics, embeddings, and run configuration.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};

use crate::corpus::{write_corpus_dir, AttachedSeries, Bias, DocumentEvent, Manifest, SourceDeclaration, SourceKind, ValueSeries};
use crate::error::{Error, Result};
use crate::time::{self, Timestamp, DAY, HOUR};

/// Homogeneous Poisson arrivals on `[t0, t1)`, truncated to whole seconds.
pub fn poisson_times<R: Rng>(rng: &mut R, rate_per_hour: f64, t0: Timestamp, t1: Timestamp) -> Vec<Timestamp> {
    let gap = Exp::new(rate_per_hour / HOUR as f64).expect("rate must be positive");
    let mut out = Vec::new();
    let mut t = t0 as f64;
    loop {
        t += gap.sample(rng);
        if t >= t1 as f64 {
            return out;
        }
        out.push(t.floor() as Timestamp);
    }
}

/// `n` sorted uniform times on `[t0, t1)`.
pub fn uniform_times<R: Rng>(rng: &mut R, n: usize, t0: Timestamp, t1: Timestamp) -> Vec<Timestamp> {
    let mut ts: Vec<Timestamp> = (0..n).map(|_| rng.random_range(t0..t1)).collect();
    ts.sort_unstable();
    ts
}

/// Per-candidate volumes of the bundled fixture; the `_per_day` fields are
/// exact 30-day means.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixtureCandidate {
    pub name: &'static str,
    pub tweets_per_day: usize,
    pub articles_per_day: usize,
    pub candidate_tweets_per_day: usize,
    /// Probability a document carries a positive rather than negative word.
    pub positivity: f64,
    /// Daily counts swing by `swing * ((day * cycle_step) % 5 - 2)`, which
    /// averages to zero over whole 5-day cycles.
    pub cycle_step: i64,
    pub tweet_swing: i64,
    pub article_swing: i64,
    /// Index into [`FIXTURE_TOPICS`] of the preferred topic on Twitter.
    pub twitter_topic: usize,
    /// Preferred topic in the news.
    pub news_topic: usize,
}

pub const FIXTURE_CANDIDATES: [FixtureCandidate; 3] = [
    FixtureCandidate {
        name: "alice",
        cycle_step: 1,
        tweet_swing: 4,
        article_swing: 1,
        tweets_per_day: 24,
        articles_per_day: 4,
        candidate_tweets_per_day: 2,
        positivity: 0.75,
        twitter_topic: 0,
        news_topic: 1,
    },
    FixtureCandidate {
        name: "bob",
        cycle_step: 2,
        tweet_swing: 3,
        article_swing: 1,
        tweets_per_day: 12,
        articles_per_day: 3,
        candidate_tweets_per_day: 2,
        positivity: 0.5,
        twitter_topic: 2,
        news_topic: 2,
    },
    FixtureCandidate {
        name: "carol",
        cycle_step: 3,
        tweet_swing: 2,
        article_swing: 1,
        tweets_per_day: 6,
        articles_per_day: 2,
        candidate_tweets_per_day: 1,
        positivity: 0.25,
        twitter_topic: 3,
        news_topic: 0,
    },
];

pub const FIXTURE_START: &str = "2020-01-01T00:00:00Z";
pub const FIXTURE_DAYS: i64 = 30;
pub const FIXTURE_SEED: u64 = 2020;

/// `(name, description, words)`; each topic owns one embedding axis.
pub const FIXTURE_TOPICS: [(&str, &str, [&str; 4]); 4] = [
    ("Economy", "jobs and wages", ["economy", "jobs", "wages", "taxes"]),
    ("Health", "health care coverage", ["health", "care", "insurance", "hospital"]),
    ("Guns", "firearm regulation", ["guns", "rifle", "firearm", "shooting"]),
    ("Climate", "climate and emissions", ["climate", "warming", "carbon", "emissions"]),
];

const POSITIVE: [(&str, f64); 4] = [("good", 1.9), ("great", 3.1), ("hope", 1.9), ("win", 2.8)];
const NEGATIVE: [(&str, f64); 4] = [("bad", -2.5), ("terrible", -2.1), ("corrupt", -2.6), ("failure", -2.3)];
const FILLER: [&str; 6] = ["the", "plan", "debate", "today", "voters", "said"];
const OUTLETS: [(&str, Bias); 3] = [
    ("Left Daily", Bias::Liberal),
    ("Center Post", Bias::Central),
    ("Right Herald", Bias::Conservative),
];

pub const FIXTURE_TOXIC_WORDS: [&str; 4] = ["terrible", "corrupt", "idiot", "stupid"];

impl FixtureCandidate {
    /// `(tweets, articles)` on day `day` (0-based).
    pub fn volume(&self, day: i64) -> (usize, usize) {
        let phase = (day * self.cycle_step).rem_euclid(5) - 2;
        (
            (self.tweets_per_day as i64 + self.tweet_swing * phase) as usize,
            (self.articles_per_day as i64 + self.article_swing * phase) as usize,
        )
    }
}

fn text<R: Rng>(rng: &mut R, c: &FixtureCandidate, preferred: usize) -> String {
    let topic = if rng.random_bool(0.7) { preferred } else { rng.random_range(0..FIXTURE_TOPICS.len()) };
    let words = FIXTURE_TOPICS[topic].2;
    let mood = if rng.random_bool(c.positivity) {
        POSITIVE[rng.random_range(0..POSITIVE.len())].0
    } else {
        NEGATIVE[rng.random_range(0..NEGATIVE.len())].0
    };
    let mut parts = vec![
        c.name.to_string(),
        FILLER[rng.random_range(0..FILLER.len())].to_string(),
        words[rng.random_range(0..4)].to_string(),
        mood.to_string(),
        words[rng.random_range(0..4)].to_string(),
    ];
    if rng.random_bool(0.2) {
        parts.push("very".to_string());
        parts.swap(3, 5);
    }
    parts.join(" ")
}

/// Events with exact per-day counts. Articles repeat a same-day tweet time
/// shifted 6 hours later, so news trails Twitter.
pub fn fixture_events(seed: u64) -> Vec<DocumentEvent> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = time::parse_rfc3339(FIXTURE_START).expect("valid constant");
    let mut events = Vec::new();
    let mut next_id = 0usize;
    let mut push = |events: &mut Vec<DocumentEvent>, ts, kind, outlet: &str, bias, cand: &str, text| {
        next_id += 1;
        events.push(DocumentEvent {
            id: format!("d{next_id:06}"),
            timestamp: ts,
            source_kind: kind,
            outlet: outlet.to_string(),
            bias,
            candidate: cand.to_string(),
            text,
        });
    };
    for day in 0..FIXTURE_DAYS {
        let d0 = start + day * DAY;
        for c in &FIXTURE_CANDIDATES {
            let (n_tweets, n_articles) = c.volume(day);
            let tweets = uniform_times(&mut rng, n_tweets, d0, d0 + 18 * HOUR);
            for &t in &tweets {
                let body = text(&mut rng, c, c.twitter_topic);
                push(&mut events, t, SourceKind::Twitter, "", Bias::Unknown, c.name, body);
            }
            let picks = rand::seq::index::sample(&mut rng, tweets.len(), n_articles).into_vec();
            for (k, i) in picks.into_iter().enumerate() {
                let (outlet, bias) = OUTLETS[(day as usize + k) % OUTLETS.len()];
                let body = text(&mut rng, c, c.news_topic);
                push(&mut events, tweets[i] + 6 * HOUR, SourceKind::News, outlet, bias, c.name, body);
            }
            for t in uniform_times(&mut rng, c.candidate_tweets_per_day, d0, d0 + DAY) {
                let body = text(&mut rng, c, c.twitter_topic);
                push(&mut events, t, SourceKind::CandidateTwitter, "", Bias::Unknown, c.name, body);
            }
        }
    }
    events.sort_by(|a, b| a.timestamp.cmp(&b.timestamp).then_with(|| a.id.cmp(&b.id)));
    events
}

pub fn fixture_manifest() -> Manifest {
    let end = time::parse_rfc3339(FIXTURE_START).expect("valid constant") + FIXTURE_DAYS * DAY - 1;
    Manifest {
        candidates: FIXTURE_CANDIDATES.iter().map(|c| c.name.to_string()).collect(),
        start: FIXTURE_START.to_string(),
        end: time::format_rfc3339(end),
        sources: SourceKind::ALL
            .iter()
            .map(|&k| SourceDeclaration {
                source_kind: k,
                candidate: None,
                sampling_rate: None,
            })
            .collect(),
        outlets: OUTLETS.iter().map(|(o, b)| (o.to_string(), *b)).collect::<BTreeMap<_, _>>(),
    }
}

/// Daily `trends` and `polls` series loosely tracking tweet volume.
pub fn fixture_series(seed: u64) -> Vec<AttachedSeries> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let start = time::date_of(time::parse_rfc3339(FIXTURE_START).expect("valid constant"));
    let mut out = Vec::new();
    for c in &FIXTURE_CANDIDATES {
        let trends: Vec<f64> = (0..FIXTURE_DAYS)
            .map(|d| (c.tweets_per_day as f64 * 2.0 + d as f64 * 0.5 + rng.random_range(-3.0..3.0)).round())
            .collect();
        let polls: Vec<f64> = (0..FIXTURE_DAYS)
            .map(|d| ((c.tweets_per_day as f64 + d as f64 * 0.1 + rng.random_range(-1.0..1.0)) * 10.0).round() / 10.0)
            .collect();
        for (kind, values) in [("trends", trends), ("polls", polls)] {
            out.push(AttachedSeries {
                kind: kind.to_string(),
                candidate: c.name.to_string(),
                series: ValueSeries::new(start, values).expect("non-empty"),
            });
        }
    }
    out
}

/// Word vectors: topic words load on their topic's axis, everything else
/// on a shared noise axis.
pub fn fixture_embeddings(seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xe3b);
    let dim = FIXTURE_TOPICS.len() + 1;
    let mut rows: Vec<(String, Vec<f64>)> = Vec::new();
    for (axis, (name, description, words)) in FIXTURE_TOPICS.iter().enumerate() {
        let mut tokens: Vec<String> = words.iter().map(|w| w.to_string()).collect();
        tokens.push(name.to_lowercase());
        tokens.extend(description.split_whitespace().map(str::to_string));
        for t in tokens {
            if rows.iter().any(|(r, _)| *r == t) {
                continue;
            }
            let mut v: Vec<f64> = (0..dim).map(|_| (rng.random_range(-0.1..0.1) * 1e4f64).round() / 1e4).collect();
            v[axis] = 1.0;
            rows.push((t, v));
        }
    }
    let others = POSITIVE
        .iter()
        .chain(&NEGATIVE)
        .map(|(w, _)| *w)
        .chain(FILLER)
        .chain(FIXTURE_CANDIDATES.iter().map(|c| c.name))
        .chain(["very"]);
    for t in others {
        let mut v: Vec<f64> = (0..dim).map(|_| (rng.random_range(-0.1..0.1) * 1e4f64).round() / 1e4).collect();
        v[dim - 1] = 0.5;
        rows.push((t.to_string(), v));
    }
    let mut out = format!("{} {dim}\n", rows.len());
    for (t, v) in rows {
        let _ = write!(out, "{t}");
        for x in v {
            let _ = write!(out, " {x}");
        }
        out.push('\n');
    }
    out
}

pub fn fixture_lexicon() -> String {
    let mut out = String::from("# token\tvalence\n");
    for (w, v) in POSITIVE.iter().chain(&NEGATIVE) {
        let _ = writeln!(out, "{w}\t{v}");
    }
    out
}

pub fn fixture_topics_json() -> String {
    let entries: Vec<serde_json::Value> = FIXTURE_TOPICS
        .iter()
        .map(|(n, d, _)| serde_json::json!({"name": n, "description": d}))
        .collect();
    serde_json::to_string_pretty(&entries).expect("serializable") + "\n"
}

pub const FIXTURE_CONFIG: &str = r#"{
  "corpus": "corpus",
  "seed": 7,
  "sentiment": { "lexicon": "lexicon.tsv" },
  "topics": { "topics": "topics.json", "embeddings": "embeddings.txt", "cutoff": 0.3 },
  "toxicity": { "backend": "lexicon", "toxic_words": "toxic_words.txt", "sample_size": 200 }
}
"#;

/// Writes the complete fixture (corpus directory plus side inputs) to `dir`.
pub fn write_fixture(dir: impl AsRef<Path>, seed: u64) -> Result<()> {
    let dir = dir.as_ref();
    write_corpus_dir(dir.join("corpus"), &fixture_manifest(), &fixture_events(seed), &fixture_series(seed))?;
    let files = [
        ("lexicon.tsv", fixture_lexicon()),
        ("topics.json", fixture_topics_json()),
        ("embeddings.txt", fixture_embeddings(seed)),
        ("toxic_words.txt", FIXTURE_TOXIC_WORDS.join("\n") + "\n"),
        ("config.json", FIXTURE_CONFIG.to_string()),
    ];
    for (name, body) in files {
        let path = dir.join(name);
        fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poisson_rate_is_plausible() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let ts = poisson_times(&mut rng, 2.0, 0, 1000 * HOUR);
        assert!((1800..2200).contains(&ts.len()), "{}", ts.len());
        assert!(ts.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn fixture_counts_are_exact() {
        let events = fixture_events(1);
        let start = time::parse_rfc3339(FIXTURE_START).unwrap();
        for c in &FIXTURE_CANDIDATES {
            for day in 0..FIXTURE_DAYS {
                let in_day = |k: SourceKind| {
                    events
                        .iter()
                        .filter(|e| e.candidate == c.name && e.source_kind == k)
                        .filter(|e| (e.timestamp - start).div_euclid(DAY) == day)
                        .count()
                };
                assert_eq!((in_day(SourceKind::Twitter), in_day(SourceKind::News)), c.volume(day));
            }
            let days: Vec<(usize, usize)> = (0..FIXTURE_DAYS).map(|d| c.volume(d)).collect();
            assert_eq!(days.iter().map(|v| v.0).sum::<usize>(), c.tweets_per_day * FIXTURE_DAYS as usize);
            assert_eq!(days.iter().map(|v| v.1).sum::<usize>(), c.articles_per_day * FIXTURE_DAYS as usize);
        }
        assert_eq!(events, fixture_events(1));
    }
}
