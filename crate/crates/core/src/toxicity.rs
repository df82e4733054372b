//! Sampled toxicity scoring through a pluggable backend.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::thread;
use std::time::Duration;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, SourceKind};
use crate::error::{Error, Result};
use crate::time::{self, DAY};
use crate::topics::normalize_tokens;

pub const API_KEY_ENV: &str = "PERSPECTIVE_API_KEY";
pub const DEFAULT_ENDPOINT: &str = "https://commentanalyzer.googleapis.com/v1alpha1/comments:analyze";
pub const DEFAULT_SAMPLE_SIZE: usize = 1000;
pub const DEFAULT_CONCURRENCY: usize = 4;

/// Word list for [`LexiconBackend`] when none is supplied.
pub const DEFAULT_TOXIC_WORDS: &[&str] = &[
    "idiot", "idiots", "stupid", "moron", "dumb", "hate", "disgusting", "pathetic", "loser",
    "liar", "scum", "trash", "fool", "corrupt", "terrible", "disgrace", "clown", "crook",
];

#[derive(Debug, Clone, PartialEq)]
pub enum BackendError {
    /// Worth retrying; `retry_after` is the server's requested wait, if any.
    Transient {
        message: String,
        retry_after: Option<Duration>,
    },
    Permanent(String),
}

impl fmt::Display for BackendError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BackendError::Transient { message, .. } => write!(f, "transient: {message}"),
            BackendError::Permanent(m) => write!(f, "permanent: {m}"),
        }
    }
}

/// A source of toxicity probabilities.
pub trait Backend: Sync {
    fn toxicity(&self, text: &str) -> std::result::Result<f64, BackendError>;
}

/// Returns the same score for every document.
#[derive(Debug, Clone, Copy)]
pub struct ConstantBackend(pub f64);

impl Backend for ConstantBackend {
    fn toxicity(&self, _: &str) -> std::result::Result<f64, BackendError> {
        Ok(self.0)
    }
}

/// `hits / (tokens + 1)` against a set of toxic words.
#[derive(Debug, Clone)]
pub struct LexiconBackend {
    toxic: HashSet<String>,
}

impl LexiconBackend {
    pub fn new<S: AsRef<str>>(words: impl IntoIterator<Item = S>) -> Self {
        Self {
            toxic: words.into_iter().map(|w| w.as_ref().to_lowercase()).collect(),
        }
    }

    /// One word per line; blank lines and `#` comments skipped.
    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let words: Vec<&str> = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .collect();
        if words.is_empty() {
            return Err(Error::parse(path, 0, "toxic word list is empty"));
        }
        Ok(Self::new(words))
    }

    pub fn score(&self, text: &str) -> f64 {
        let (mut hits, mut n) = (0usize, 0usize);
        for token in normalize_tokens(text) {
            n += 1;
            hits += usize::from(self.toxic.contains(&token));
        }
        hits as f64 / (n + 1) as f64
    }
}

impl Backend for LexiconBackend {
    fn toxicity(&self, text: &str) -> std::result::Result<f64, BackendError> {
        Ok(self.score(text))
    }
}

/// Comment-analysis HTTP endpoint speaking the Perspective wire format.
pub struct HttpBackend {
    endpoint: String,
    api_key: Option<String>,
    agent: ureq::Agent,
}

impl HttpBackend {
    pub fn new(endpoint: impl Into<String>, api_key: Option<String>, timeout: Duration) -> Self {
        let agent = ureq::Agent::config_builder()
            .http_status_as_error(false)
            .timeout_global(Some(timeout))
            .build()
            .into();
        Self {
            endpoint: endpoint.into(),
            api_key,
            agent,
        }
    }

    /// Reads the key from [`API_KEY_ENV`].
    pub fn from_env(endpoint: impl Into<String>) -> Result<Self> {
        let key = std::env::var(API_KEY_ENV)
            .map_err(|_| Error::invalid(format!("set {API_KEY_ENV} to use the live toxicity backend")))?;
        Ok(Self::new(endpoint, Some(key), Duration::from_secs(30)))
    }

    fn url(&self) -> String {
        match &self.api_key {
            Some(k) => {
                let sep = if self.endpoint.contains('?') { '&' } else { '?' };
                format!("{}{sep}key={k}", self.endpoint)
            }
            None => self.endpoint.clone(),
        }
    }
}

impl Backend for HttpBackend {
    fn toxicity(&self, text: &str) -> std::result::Result<f64, BackendError> {
        let body = serde_json::json!({
            "comment": {"text": text},
            "requestedAttributes": {"TOXICITY": {}},
        });
        let mut resp = self.agent.post(&self.url()).send_json(&body).map_err(|e| BackendError::Transient {
            message: e.to_string(),
            retry_after: None,
        })?;
        let status = resp.status().as_u16();
        if status == 429 || status >= 500 {
            let retry_after = resp
                .headers()
                .get("retry-after")
                .and_then(|v| v.to_str().ok())
                .and_then(|v| v.trim().parse::<u64>().ok())
                .map(Duration::from_secs);
            return Err(BackendError::Transient {
                message: format!("HTTP {status}"),
                retry_after,
            });
        }
        if !(200..300).contains(&status) {
            let detail = resp.body_mut().read_to_string().unwrap_or_default();
            return Err(BackendError::Permanent(format!("HTTP {status}: {}", detail.trim())));
        }
        let json: serde_json::Value = resp
            .body_mut()
            .read_json()
            .map_err(|e| BackendError::Permanent(format!("unreadable response: {e}")))?;
        json.pointer("/attributeScores/TOXICITY/summaryScore/value")
            .and_then(serde_json::Value::as_f64)
            .filter(|v| (0.0..=1.0).contains(v))
            .ok_or_else(|| BackendError::Permanent("response lacks a toxicity score in [0, 1]".to_string()))
    }
}

/// Attempts and exponential backoff for transient failures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RetryPolicy {
    pub max_attempts: u32,
    /// Wait after the first failure; doubles after each further failure.
    #[serde(rename = "base_delay_ms", with = "millis")]
    pub base_delay: Duration,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        Self {
            max_attempts: 3,
            base_delay: Duration::from_secs(1),
        }
    }
}

mod millis {
    use serde::{Deserialize, Deserializer, Serializer};
    use std::time::Duration;

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u64(d.as_millis() as u64)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        u64::deserialize(d).map(Duration::from_millis)
    }
}

impl RetryPolicy {
    fn delay(&self, failures: u32, retry_after: Option<Duration>) -> Duration {
        let backoff = self.base_delay.saturating_mul(1 << (failures - 1).min(16));
        retry_after.map_or(backoff, |r| r.max(backoff))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scored {
    pub value: f64,
    pub retries: u32,
}

/// Scores one document, retrying transient failures under `policy`.
pub fn score_document(text: &str, backend: &dyn Backend, policy: &RetryPolicy) -> Result<Scored> {
    if text.trim().is_empty() {
        return Err(Error::invalid("cannot score an empty document"));
    }
    let attempts = policy.max_attempts.max(1);
    let mut failures = 0;
    loop {
        match backend.toxicity(text) {
            Ok(v) if (0.0..=1.0).contains(&v) => {
                return Ok(Scored {
                    value: v,
                    retries: failures,
                })
            }
            Ok(v) => return Err(Error::Backend(format!("score {v} outside [0, 1]"))),
            Err(BackendError::Permanent(m)) => return Err(Error::Backend(m)),
            Err(BackendError::Transient { message, retry_after }) => {
                failures += 1;
                if failures >= attempts {
                    return Err(Error::Backend(format!("{message} (gave up after {attempts} attempts)")));
                }
                let wait = policy.delay(failures, retry_after);
                log::warn!("toxicity backend: {message}; retry {failures} in {wait:?}");
                thread::sleep(wait);
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sampling {
    /// Uniform without replacement over all tweets.
    #[default]
    Uniform,
    /// Per-UTC-day quotas proportional to volume, uniform within a day.
    TimeStratified,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ToxicityOptions {
    pub sample_size: usize,
    pub seed: u64,
    pub concurrency: usize,
    pub sampling: Sampling,
    pub retry: RetryPolicy,
}

impl Default for ToxicityOptions {
    fn default() -> Self {
        Self {
            sample_size: DEFAULT_SAMPLE_SIZE,
            seed: 0,
            concurrency: DEFAULT_CONCURRENCY,
            sampling: Sampling::Uniform,
            retry: RetryPolicy::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ToxicityReport {
    pub candidate: String,
    pub n_scored: usize,
    pub mean_toxicity: f64,
    pub sample_seed: u64,
    pub n_sampled: usize,
    /// Sampled documents that could not be scored.
    pub skipped: usize,
    pub retries: u32,
}

/// Sorted sample of `k` distinct indices from `0..n`.
pub fn sample_uniform(n: usize, k: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut idx = rand::seq::index::sample(&mut rng, n, k.min(n)).into_vec();
    idx.sort_unstable();
    idx
}

/// Sorted sample with per-day quotas (largest-remainder apportionment).
pub fn sample_stratified(timestamps: &[i64], k: usize, seed: u64) -> Vec<usize> {
    let n = timestamps.len();
    let k = k.min(n);
    let mut days: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    for (i, &t) in timestamps.iter().enumerate() {
        days.entry(time::floor_to(t, DAY)).or_default().push(i);
    }
    let strata: Vec<Vec<usize>> = days.into_values().collect();
    let exact: Vec<f64> = strata.iter().map(|s| s.len() as f64 * k as f64 / n as f64).collect();
    let mut quota: Vec<usize> = exact.iter().map(|q| q.floor() as usize).collect();
    let mut order: Vec<usize> = (0..strata.len()).collect();
    order.sort_by(|&a, &b| (exact[b] - exact[b].floor()).total_cmp(&(exact[a] - exact[a].floor())).then(a.cmp(&b)));
    let short = k - quota.iter().sum::<usize>();
    for &s in order.iter().take(short) {
        quota[s] += 1;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(k);
    for (members, q) in strata.iter().zip(quota) {
        for j in rand::seq::index::sample(&mut rng, members.len(), q).into_iter() {
            out.push(members[j]);
        }
    }
    out.sort_unstable();
    out
}

/// Scores `texts` with at most `concurrency` requests in flight; results are in input order.
pub fn score_all(
    texts: &[&str],
    backend: &dyn Backend,
    policy: &RetryPolicy,
    concurrency: usize,
) -> Vec<Result<Scored>> {
    let next = AtomicUsize::new(0);
    let workers = concurrency.clamp(1, texts.len().max(1));
    let mut tagged: Vec<(usize, Result<Scored>)> = thread::scope(|s| {
        let handles: Vec<_> = (0..workers)
            .map(|_| {
                s.spawn(|| {
                    let mut local = Vec::new();
                    loop {
                        let i = next.fetch_add(1, Ordering::Relaxed);
                        let Some(text) = texts.get(i) else { break };
                        local.push((i, score_document(text, backend, policy)));
                    }
                    local
                })
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("scoring worker panicked"))
            .collect()
    });
    tagged.sort_by_key(|(i, _)| *i);
    tagged.into_iter().map(|(_, r)| r).collect()
}

/// Mean toxicity of a seeded sample of the candidate's tweets.
pub fn candidate_toxicity(
    corpus: &Corpus,
    candidate: &str,
    backend: &dyn Backend,
    opts: &ToxicityOptions,
) -> Result<ToxicityReport> {
    corpus.require_candidate(candidate)?;
    if opts.sample_size == 0 {
        return Err(Error::invalid("toxicity sample size must be positive"));
    }
    let docs: Vec<_> = corpus.documents(candidate, SourceKind::Twitter).collect();
    if docs.is_empty() {
        return Err(Error::InsufficientData(format!("{candidate} has no tweets to score")));
    }
    let picked = match opts.sampling {
        Sampling::Uniform => sample_uniform(docs.len(), opts.sample_size, opts.seed),
        Sampling::TimeStratified => {
            let ts: Vec<i64> = docs.iter().map(|d| d.timestamp).collect();
            sample_stratified(&ts, opts.sample_size, opts.seed)
        }
    };
    let texts: Vec<&str> = picked.iter().map(|&i| docs[i].text.as_str()).collect();
    let results = score_all(&texts, backend, &opts.retry, opts.concurrency);

    let (mut sum, mut n, mut skipped, mut retries) = (0.0, 0usize, 0usize, 0u32);
    for (r, &i) in results.iter().zip(&picked) {
        match r {
            Ok(s) => {
                sum += s.value;
                n += 1;
                retries += s.retries;
            }
            Err(e) => {
                log::warn!("skipping document {}: {e}", docs[i].id);
                skipped += 1;
            }
        }
    }
    if n == 0 {
        return Err(Error::Backend(format!(
            "none of the {} sampled documents for {candidate} could be scored",
            picked.len()
        )));
    }
    Ok(ToxicityReport {
        candidate: candidate.to_string(),
        n_scored: n,
        mean_toxicity: (sum / n as f64).clamp(0.0, 1.0),
        sample_seed: opts.seed,
        n_sampled: picked.len(),
        skipped,
        retries,
    })
}
