//! Lexicon and rule based compound scoring.

use serde::{Deserialize, Serialize};

use super::Lexicon;

/// How many preceding tokens a negation or booster reaches.
const SCOPE: usize = 3;

const BOOSTERS: &[&str] = &[
    "absolutely", "amazingly", "awfully", "completely", "considerably", "decidedly", "deeply",
    "enormously", "entirely", "especially", "exceptionally", "extremely", "fabulously", "fully",
    "greatly", "highly", "hugely", "incredibly", "intensely", "majorly", "more", "most",
    "particularly", "purely", "quite", "really", "remarkably", "so", "substantially",
    "thoroughly", "totally", "tremendously", "unbelievably", "unusually", "utterly", "very",
];

const DAMPENERS: &[&str] = &[
    "almost", "barely", "hardly", "kinda", "less", "little", "marginally", "occasionally",
    "partly", "scarcely", "slightly", "somewhat", "sorta",
];

const NEGATIONS: &[&str] = &[
    "aint", "arent", "cannot", "cant", "couldnt", "darent", "didnt", "doesnt", "dont", "hadnt",
    "hasnt", "havent", "isnt", "mightnt", "mustnt", "neither", "neednt", "never", "none", "nope",
    "nor", "not", "nothing", "nowhere", "oughtnt", "shant", "shouldnt", "wasnt", "werent",
    "without", "wont", "wouldnt", "rarely", "seldom", "despite",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Polarity {
    Positive,
    Negative,
    Neutral,
}

/// Cutoffs for [`classify`]; both bounds are inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Thresholds {
    pub positive: f64,
    pub negative: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            positive: 0.05,
            negative: -0.05,
        }
    }
}

pub fn classify(compound: f64) -> Polarity {
    classify_with(compound, &Thresholds::default())
}

pub fn classify_with(compound: f64, t: &Thresholds) -> Polarity {
    if compound >= t.positive {
        Polarity::Positive
    } else if compound <= t.negative {
        Polarity::Negative
    } else {
        Polarity::Neutral
    }
}

fn is_emoji(c: char) -> bool {
    matches!(c as u32,
        0x1F000..=0x1FAFF | 0x2600..=0x27BF | 0x2B00..=0x2BFF | 0xFE00..=0xFE0F | 0x200D | 0xE0020..=0xE007F)
}

fn is_url(word: &str) -> bool {
    let w = word.to_ascii_lowercase();
    w.contains("://") || w.starts_with("www.")
}

/// Case-preserving tokens after stripping URLs and emoji.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    for word in text.split_whitespace().filter(|w| !is_url(w)) {
        let mut current = String::new();
        for c in word.chars().filter(|c| !is_emoji(*c)) {
            let c = if c == '\u{2019}' { '\'' } else { c };
            if c.is_alphanumeric() || c == '\'' {
                current.push(c);
            } else if !current.is_empty() {
                push_token(&mut tokens, std::mem::take(&mut current));
            }
        }
        if !current.is_empty() {
            push_token(&mut tokens, current);
        }
    }
    tokens
}

fn push_token(tokens: &mut Vec<String>, token: String) {
    let trimmed = token.trim_matches('\'');
    if !trimmed.is_empty() {
        tokens.push(trimmed.to_string());
    }
}

fn is_all_caps(token: &str) -> bool {
    token.chars().any(char::is_alphabetic)
        && token.chars().filter(|c| c.is_alphabetic()).all(char::is_uppercase)
}

fn is_negation(lower: &str) -> bool {
    lower.contains("n't") || NEGATIONS.contains(&lower.replace('\'', "").as_str())
}

/// Compound sentiment in `(-1, 1)`; 0 when no token is in the lexicon.
pub fn score(text: &str, lexicon: &Lexicon) -> f64 {
    let c = &lexicon.constants;
    let tokens = tokenize(text);
    let lower: Vec<String> = tokens.iter().map(|t| t.to_lowercase()).collect();

    let cased: Vec<bool> = tokens.iter().map(|t| is_all_caps(t)).collect();
    let alphabetic = tokens.iter().filter(|t| t.chars().any(char::is_alphabetic)).count();
    let n_caps = cased.iter().filter(|&&b| b).count();
    let caps_differential = n_caps > 0 && n_caps < alphabetic;

    let mut sum = 0.0;
    for (i, word) in lower.iter().enumerate() {
        let Some(mut v) = lexicon.valence(word) else {
            continue;
        };
        let sign = v.signum() * f64::from(u8::from(v != 0.0));
        if caps_differential && cased[i] {
            v += c.caps_boost * sign;
        }
        let window = &lower[i.saturating_sub(SCOPE)..i];
        for prev in window {
            if BOOSTERS.contains(&prev.as_str()) {
                v += c.booster_increment * sign;
            } else if DAMPENERS.contains(&prev.as_str()) {
                v -= c.booster_increment * sign;
            }
        }
        if window.iter().any(|w| is_negation(w)) {
            v *= -c.negation_factor;
        }
        sum += v;
    }
    if sum == 0.0 {
        return 0.0;
    }
    let compound = sum / (sum * sum + c.normalization_alpha).sqrt();
    // keep strictly inside (-1, 1) even when s^2 swamps alpha in floating point
    compound.clamp(-1.0 + f64::EPSILON, 1.0 - f64::EPSILON)
}
