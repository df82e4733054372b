use std::collections::HashMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tunable constants of the scoring rules.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RuleConstants {
    /// Multiplier applied (with a sign flip) to a negated token.
    pub negation_factor: f64,
    /// Magnitude added or removed by a booster or dampener word.
    pub booster_increment: f64,
    /// Magnitude added to an all-caps token in mixed-case text.
    pub caps_boost: f64,
    /// `alpha` in `s / sqrt(s^2 + alpha)`.
    pub normalization_alpha: f64,
}

impl Default for RuleConstants {
    fn default() -> Self {
        Self {
            negation_factor: 0.74,
            booster_increment: 0.293,
            caps_boost: 0.733,
            normalization_alpha: 15.0,
        }
    }
}

impl RuleConstants {
    pub fn validate(&self) -> Result<()> {
        let all = [
            self.negation_factor,
            self.booster_increment,
            self.caps_boost,
            self.normalization_alpha,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("lexicon rule constants must be finite"));
        }
        if self.normalization_alpha <= 0.0 {
            return Err(Error::invalid("normalization_alpha must be positive"));
        }
        Ok(())
    }

    fn set(&mut self, key: &str, value: f64) -> Result<()> {
        match key {
            "negation_factor" => self.negation_factor = value,
            "booster_increment" => self.booster_increment = value,
            "caps_boost" => self.caps_boost = value,
            "normalization_alpha" => self.normalization_alpha = value,
            _ => return Err(Error::invalid(format!("unknown rule constant {key:?}"))),
        }
        Ok(())
    }
}

/// Token valences plus rule constants. Tokens are stored lowercase.
#[derive(Debug, Clone, PartialEq)]
pub struct Lexicon {
    entries: HashMap<String, f64>,
    pub constants: RuleConstants,
}

impl Lexicon {
    pub fn new(entries: impl IntoIterator<Item = (String, f64)>, constants: RuleConstants) -> Result<Self> {
        constants.validate()?;
        let mut map = HashMap::new();
        for (token, valence) in entries {
            if !valence.is_finite() {
                return Err(Error::invalid(format!("valence of {token:?} is not finite")));
            }
            let key = token.to_lowercase();
            if map.insert(key, valence).is_some() {
                return Err(Error::invalid(format!("duplicate lexicon token {token:?}")));
            }
        }
        if map.is_empty() {
            return Err(Error::invalid("lexicon is empty"));
        }
        Ok(Self {
            entries: map,
            constants,
        })
    }

    pub fn valence(&self, token: &str) -> Option<f64> {
        self.entries.get(token).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Reads a `token<TAB>valence` file.
///
/// Extra tab-separated columns are ignored, blank lines and `#` comments are
/// skipped, and `#! name = value` lines override a rule constant.
pub fn load_lexicon(path: impl AsRef<Path>) -> Result<Lexicon> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_lexicon(&text, path)
}

pub(crate) fn parse_lexicon(text: &str, path: &Path) -> Result<Lexicon> {
    let mut constants = RuleConstants::default();
    let mut entries: HashMap<String, f64> = HashMap::new();
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        if let Some(setting) = line.strip_prefix("#!") {
            let (key, value) = setting
                .split_once('=')
                .ok_or_else(|| Error::parse(path, lineno, "constant override must be `#! name = value`"))?;
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|_| Error::parse(path, lineno, format!("unparsable constant {:?}", value.trim())))?;
            constants
                .set(key.trim(), value)
                .map_err(|e| Error::parse(path, lineno, e.to_string()))?;
            continue;
        }
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split('\t');
        let token = fields.next().unwrap_or_default().trim();
        let raw = fields
            .next()
            .ok_or_else(|| Error::parse(path, lineno, "expected `token<TAB>valence`"))?;
        if token.is_empty() {
            return Err(Error::parse(path, lineno, "empty token"));
        }
        let valence: f64 = raw
            .trim()
            .parse()
            .ok()
            .filter(|v: &f64| v.is_finite())
            .ok_or_else(|| Error::parse(path, lineno, format!("unparsable valence {:?}", raw.trim())))?;
        if entries.insert(token.to_lowercase(), valence).is_some() {
            return Err(Error::parse(path, lineno, format!("duplicate token {token:?}")));
        }
    }
    constants
        .validate()
        .map_err(|e| Error::parse(path, 0, e.to_string()))?;
    if entries.is_empty() {
        return Err(Error::parse(path, 0, "lexicon has no entries"));
    }
    Ok(Lexicon { entries, constants })
}
