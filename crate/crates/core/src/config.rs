//! Run configuration: a JSON file whose fields all have defaults, with
//! relative paths resolved against the file's directory.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::granger::DEFAULT_MAX_LAG;
use crate::influence::HeatmapSpec;
use crate::sentiment::Thresholds;
use crate::stats::VarianceAssumption;
use crate::time::{format_duration, parse_duration};
use crate::topics::DEFAULT_CUTOFF;
use crate::toxicity::{RetryPolicy, Sampling, DEFAULT_CONCURRENCY, DEFAULT_ENDPOINT, DEFAULT_SAMPLE_SIZE};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub corpus: Option<PathBuf>,
    pub out: Option<PathBuf>,
    /// Restricts per-candidate outputs; all manifest candidates when absent.
    pub candidates: Option<Vec<String>>,
    pub seed: u64,
    pub heatmap: HeatmapSettings,
    pub granger: GrangerSettings,
    pub sentiment: SentimentSettings,
    pub topics: TopicSettings,
    pub toxicity: ToxicitySettings,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            corpus: None,
            out: None,
            candidates: None,
            seed: 0,
            heatmap: HeatmapSettings::default(),
            granger: GrangerSettings::default(),
            sentiment: SentimentSettings::default(),
            topics: TopicSettings::default(),
            toxicity: ToxicitySettings::default(),
        }
    }
}

/// Heatmap geometry with human-readable durations (`"2w"`, `"12h"`, `"5m"`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HeatmapSettings {
    pub window: String,
    pub stride: String,
    pub max_offset: String,
    pub offset_step: String,
    pub grid_step: String,
    /// Fixed smoothing half-life; each series' average period when absent.
    pub half_life: Option<String>,
}

impl Default for HeatmapSettings {
    fn default() -> Self {
        let d = HeatmapSpec::default();
        Self {
            window: format_duration(d.window),
            stride: format_duration(d.stride),
            max_offset: format_duration(d.max_offset),
            offset_step: format_duration(d.offset_step),
            grid_step: format_duration(d.grid_step),
            half_life: None,
        }
    }
}

impl HeatmapSettings {
    pub fn spec(&self) -> Result<HeatmapSpec> {
        let field = |name: &str, v: &str| {
            parse_duration(v).map_err(|e| Error::invalid(format!("heatmap.{name}: {e}")))
        };
        let spec = HeatmapSpec {
            window: field("window", &self.window)?,
            stride: field("stride", &self.stride)?,
            max_offset: field("max_offset", &self.max_offset)?,
            offset_step: field("offset_step", &self.offset_step)?,
            grid_step: field("grid_step", &self.grid_step)?,
            half_life: self
                .half_life
                .as_deref()
                .map(|h| field("half_life", h).map(|s| s as f64))
                .transpose()?,
        };
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GrangerSettings {
    pub max_lag: usize,
}

impl Default for GrangerSettings {
    fn default() -> Self {
        Self { max_lag: DEFAULT_MAX_LAG }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SentimentSettings {
    pub lexicon: Option<PathBuf>,
    pub thresholds: Thresholds,
    pub variance: VarianceAssumption,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TopicSettings {
    pub topics: Option<PathBuf>,
    pub embeddings: Option<PathBuf>,
    pub cutoff: f64,
}

impl Default for TopicSettings {
    fn default() -> Self {
        Self {
            topics: None,
            embeddings: None,
            cutoff: DEFAULT_CUTOFF,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BackendKind {
    /// Toxic-word proportion mock.
    #[default]
    Lexicon,
    Constant,
    /// Live comment-analysis endpoint; key from the environment.
    Http,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ToxicitySettings {
    pub backend: BackendKind,
    /// One word per line for the lexicon mock; a built-in list when absent.
    pub toxic_words: Option<PathBuf>,
    pub constant: f64,
    pub endpoint: String,
    pub sample_size: usize,
    pub concurrency: usize,
    pub sampling: Sampling,
    pub retry: RetryPolicy,
}

impl Default for ToxicitySettings {
    fn default() -> Self {
        Self {
            backend: BackendKind::Lexicon,
            toxic_words: None,
            constant: 0.5,
            endpoint: DEFAULT_ENDPOINT.to_string(),
            sample_size: DEFAULT_SAMPLE_SIZE,
            concurrency: DEFAULT_CONCURRENCY,
            sampling: Sampling::Uniform,
            retry: RetryPolicy::default(),
        }
    }
}

impl RunConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg: RunConfig =
            serde_json::from_str(&text).map_err(|e| Error::parse(path, e.line(), e.to_string()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        cfg.resolve_paths(base);
        Ok(cfg)
    }

    fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut Option<PathBuf>| {
            if let Some(path) = p {
                if path.is_relative() {
                    *path = base.join(&*path);
                }
            }
        };
        fix(&mut self.corpus);
        fix(&mut self.out);
        fix(&mut self.sentiment.lexicon);
        fix(&mut self.topics.topics);
        fix(&mut self.topics.embeddings);
        fix(&mut self.toxicity.toxic_words);
    }

    /// Range checks and existence of every configured input path.
    pub fn validate(&self) -> Result<()> {
        self.heatmap.spec()?;
        if self.granger.max_lag == 0 {
            return Err(Error::invalid("granger.max_lag must be at least 1"));
        }
        let t = &self.sentiment.thresholds;
        if !(t.negative <= t.positive && t.negative >= -1.0 && t.positive <= 1.0) {
            return Err(Error::invalid(
                "sentiment.thresholds need -1 <= negative <= positive <= 1",
            ));
        }
        if !(-1.0..=1.0).contains(&self.topics.cutoff) {
            return Err(Error::invalid("topics.cutoff must lie in [-1, 1]"));
        }
        let x = &self.toxicity;
        if x.sample_size == 0 || x.concurrency == 0 || x.retry.max_attempts == 0 {
            return Err(Error::invalid(
                "toxicity.sample_size, concurrency and retry.max_attempts must be positive",
            ));
        }
        if !(0.0..=1.0).contains(&x.constant) {
            return Err(Error::invalid("toxicity.constant must lie in [0, 1]"));
        }
        let inputs = [
            ("corpus", &self.corpus),
            ("sentiment.lexicon", &self.sentiment.lexicon),
            ("topics.topics", &self.topics.topics),
            ("topics.embeddings", &self.topics.embeddings),
            ("toxicity.toxic_words", &self.toxicity.toxic_words),
        ];
        for (name, path) in inputs {
            if let Some(p) = path {
                if !p.exists() {
                    return Err(Error::invalid(format!("{name}: {} does not exist", p.display())));
                }
            }
        }
        Ok(())
    }

    /// `name` as a required path, with a hint for how to supply it.
    pub fn require<'a>(value: &'a Option<PathBuf>, key: &str, flag: &str) -> Result<&'a Path> {
        value
            .as_deref()
            .ok_or_else(|| Error::invalid(format!("missing {key}: set it in the config file or pass {flag}")))
    }
}
