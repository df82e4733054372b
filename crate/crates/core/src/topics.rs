//! Embedding-based topic assignment and cross-source topic mismatch.

use std::collections::HashMap;
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, SourceKind};
use crate::error::{Error, Result};

pub const DEFAULT_CUTOFF: f64 = 0.3;

/// Pre-trained word vectors of one dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    dimension: usize,
    vectors: HashMap<String, Vec<f64>>,
}

impl EmbeddingTable {
    pub fn new(dimension: usize, vectors: impl IntoIterator<Item = (String, Vec<f64>)>) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::invalid("embedding dimension must be positive"));
        }
        let mut map = HashMap::new();
        for (token, v) in vectors {
            if v.len() != dimension {
                return Err(Error::invalid(format!(
                    "vector for {token:?} has {} components, expected {dimension}",
                    v.len()
                )));
            }
            map.insert(token, v);
        }
        if map.is_empty() {
            return Err(Error::invalid("embedding vocabulary is empty"));
        }
        Ok(Self { dimension, vectors: map })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn get(&self, token: &str) -> Option<&[f64]> {
        self.vectors.get(token).map(Vec::as_slice)
    }
}

/// Reads the word2vec text format: a `V D` header, then `token v1 … vD` per line.
pub fn load_embeddings(path: impl AsRef<Path>) -> Result<EmbeddingTable> {
    let path = path.as_ref();
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut lines = BufReader::new(file).lines();
    let header = lines
        .next()
        .transpose()
        .map_err(|e| Error::io(path, e))?
        .ok_or_else(|| Error::parse(path, 1, "missing `V D` header"))?;
    let mut parts = header.split_whitespace().map(str::parse::<usize>);
    let (v, d) = match (parts.next(), parts.next(), parts.next()) {
        (Some(Ok(v)), Some(Ok(d)), None) if d > 0 => (v, d),
        _ => return Err(Error::parse(path, 1, format!("expected `V D` header, got {header:?}"))),
    };

    let mut vectors = HashMap::with_capacity(v);
    for (i, line) in lines.enumerate() {
        let lineno = i + 2;
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split_whitespace();
        let token = fields.next().unwrap_or_default();
        let values = fields
            .map(|f| f.parse::<f64>().ok().filter(|x| x.is_finite()))
            .collect::<Option<Vec<f64>>>()
            .ok_or_else(|| Error::parse(path, lineno, "unparsable vector component"))?;
        if values.len() != d {
            return Err(Error::parse(
                path,
                lineno,
                format!("{token:?} has {} components, expected {d}", values.len()),
            ));
        }
        if vectors.insert(token.to_string(), values).is_some() {
            return Err(Error::parse(path, lineno, format!("duplicate token {token:?}")));
        }
    }
    if vectors.len() != v {
        return Err(Error::parse(
            path,
            1,
            format!("header declares {v} tokens, file has {}", vectors.len()),
        ));
    }
    EmbeddingTable::new(d, vectors).map_err(|e| Error::parse(path, 1, e.to_string()))
}

/// Lowercased words with punctuation removed.
pub fn normalize_tokens(text: &str) -> impl Iterator<Item = String> + '_ {
    text.split_whitespace()
        .map(|w| w.chars().filter(|c| c.is_alphanumeric()).flat_map(char::to_lowercase).collect::<String>())
        .filter(|w| !w.is_empty())
}

/// Mean vector of the in-vocabulary tokens; `None` if there are none.
pub fn embed_text(text: &str, table: &EmbeddingTable) -> Option<Vec<f64>> {
    let mut sum = vec![0.0; table.dimension];
    let mut n = 0usize;
    for token in normalize_tokens(text) {
        if let Some(v) = table.get(&token) {
            sum.iter_mut().zip(v).for_each(|(s, x)| *s += x);
            n += 1;
        }
    }
    (n > 0).then(|| sum.into_iter().map(|s| s / n as f64).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Topic {
    pub name: String,
    pub description: String,
    pub vector: Vec<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TopicEntry {
    name: String,
    #[serde(default)]
    description: String,
}

/// Embeds `name + " " + description`; a topic with no usable vector is an error.
pub fn make_topic(name: &str, description: &str, table: &EmbeddingTable) -> Result<Topic> {
    let vector = embed_text(&format!("{name} {description}"), table)
        .filter(|v| norm(v) > 0.0)
        .ok_or_else(|| Error::invalid(format!("topic {name:?} has no in-vocabulary words")))?;
    Ok(Topic {
        name: name.to_string(),
        description: description.to_string(),
        vector,
    })
}

/// Reads a JSON array of `{name, description}` objects.
pub fn load_topics(path: impl AsRef<Path>, table: &EmbeddingTable) -> Result<Vec<Topic>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let entries: Vec<TopicEntry> = serde_json::from_str(&text)
        .map_err(|e| Error::parse(path, e.line(), e.to_string()))?;
    if entries.is_empty() {
        return Err(Error::parse(path, 1, "topic list is empty"));
    }
    let mut seen = std::collections::HashSet::new();
    entries
        .iter()
        .map(|e| {
            if !seen.insert(e.name.as_str()) {
                return Err(Error::invalid(format!("duplicate topic {:?} in {}", e.name, path.display())));
            }
            make_topic(&e.name, &e.description, table)
        })
        .collect()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn cosine(a: &[f64], b: &[f64]) -> Option<f64> {
    let (na, nb) = (norm(a), norm(b));
    if na == 0.0 || nb == 0.0 {
        return None;
    }
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    Some((dot / (na * nb)).clamp(-1.0, 1.0))
}

/// Index and similarity of the closest topic, or `None` when the best
/// similarity is under `cutoff`. Ties resolve to the earlier topic.
pub fn match_topic(doc: &[f64], topics: &[Topic], cutoff: f64) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (i, t) in topics.iter().enumerate() {
        let sim = cosine(doc, &t.vector)?;
        if best.map_or(true, |(_, b)| sim > b) {
            best = Some((i, sim));
        }
    }
    best.filter(|&(_, s)| s >= cutoff)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TopicDistribution {
    pub candidate: String,
    pub source: SourceKind,
    pub topics: Vec<String>,
    /// Share of matched documents per topic, in topic order.
    pub shares: Vec<f64>,
    pub counts: Vec<usize>,
    pub matched: usize,
    pub discarded_below_cutoff: usize,
    pub discarded_oov: usize,
}

impl TopicDistribution {
    pub fn discarded(&self) -> usize {
        self.discarded_below_cutoff + self.discarded_oov
    }

    pub fn share(&self, topic: &str) -> Option<f64> {
        self.topics.iter().position(|t| t == topic).map(|i| self.shares[i])
    }

    pub fn label(&self) -> String {
        format!("{}:{}", self.candidate, self.source)
    }
}

/// Matches every document of one candidate and source against `topics`.
pub fn topic_distribution(
    corpus: &Corpus,
    candidate: &str,
    source: SourceKind,
    topics: &[Topic],
    table: &EmbeddingTable,
    cutoff: f64,
) -> Result<TopicDistribution> {
    corpus.require_candidate(candidate)?;
    let texts: Vec<&str> = corpus.documents(candidate, source).map(|e| e.text.as_str()).collect();
    distribution_from_texts(candidate, source, &texts, topics, table, cutoff)
}

/// [`topic_distribution`] over an explicit document list.
pub fn distribution_from_texts(
    candidate: &str,
    source: SourceKind,
    texts: &[&str],
    topics: &[Topic],
    table: &EmbeddingTable,
    cutoff: f64,
) -> Result<TopicDistribution> {
    if topics.is_empty() {
        return Err(Error::invalid("topic list is empty"));
    }
    if !(-1.0..=1.0).contains(&cutoff) {
        return Err(Error::invalid(format!("cutoff {cutoff} outside [-1, 1]")));
    }
    if texts.is_empty() {
        return Err(Error::InsufficientData(format!("no {source} documents for {candidate}")));
    }
    // Some(Some(i)) matched, Some(None) below cutoff, None unembeddable
    let outcomes: Vec<Option<Option<usize>>> = texts
        .par_iter()
        .map(|t| embed_text(t, table).map(|v| match_topic(&v, topics, cutoff).map(|m| m.0)))
        .collect();

    let mut counts = vec![0usize; topics.len()];
    let (mut below, mut oov) = (0, 0);
    for o in outcomes {
        match o {
            Some(Some(i)) => counts[i] += 1,
            Some(None) => below += 1,
            None => oov += 1,
        }
    }
    let matched: usize = counts.iter().sum();
    if matched == 0 {
        return Err(Error::InsufficientData(format!(
            "no {source} document for {candidate} reached cutoff {cutoff} \
             ({below} below cutoff, {oov} without known words); try a lower cutoff"
        )));
    }
    Ok(TopicDistribution {
        candidate: candidate.to_string(),
        source,
        topics: topics.iter().map(|t| t.name.clone()).collect(),
        shares: counts.iter().map(|&c| c as f64 / matched as f64).collect(),
        counts,
        matched,
        discarded_below_cutoff: below,
        discarded_oov: oov,
    })
}

/// Jensen-Shannon divergence in bits, in `[0, 1]`.
pub fn jensen_shannon(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::LengthMismatch {
            left: p.len(),
            right: q.len(),
        });
    }
    let kl_to_mid = |a: &[f64], b: &[f64]| -> f64 {
        a.iter()
            .zip(b)
            .filter(|(x, _)| **x > 0.0)
            .map(|(x, y)| x * (2.0 * x / (x + y)).log2())
            .sum()
    };
    let d = 0.5 * kl_to_mid(p, q) + 0.5 * kl_to_mid(q, p);
    Ok(d.clamp(0.0, 1.0))
}

pub fn mismatch(a: &TopicDistribution, b: &TopicDistribution) -> Result<f64> {
    if a.topics != b.topics {
        return Err(Error::invalid(format!(
            "distributions {} and {} use different topic lists",
            a.label(),
            b.label()
        )));
    }
    jensen_shannon(&a.shares, &b.shares)
}

/// Rows are topics, one column per distribution (`candidate:source`).
pub fn write_distribution_csv<W: Write>(dists: &[TopicDistribution], out: W) -> Result<()> {
    let Some(first) = dists.first() else {
        return Err(Error::invalid("no distributions to write"));
    };
    if dists.iter().any(|d| d.topics != first.topics) {
        return Err(Error::invalid("distributions use different topic lists"));
    }
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["topic".to_string()];
    header.extend(dists.iter().map(TopicDistribution::label));
    w.write_record(&header).map_err(|e| Error::Output(e.to_string()))?;
    for (i, topic) in first.topics.iter().enumerate() {
        let mut rec = vec![topic.clone()];
        rec.extend(dists.iter().map(|d| d.shares[i].to_string()));
        w.write_record(&rec).map_err(|e| Error::Output(e.to_string()))?;
    }
    w.flush().map_err(|e| Error::Output(e.to_string()))
}

/// Symmetric matrix of pairwise mismatches.
pub fn write_mismatch_csv<W: Write>(dists: &[TopicDistribution], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec![String::new()];
    header.extend(dists.iter().map(TopicDistribution::label));
    w.write_record(&header).map_err(|e| Error::Output(e.to_string()))?;
    for a in dists {
        let mut rec = vec![a.label()];
        for b in dists {
            rec.push(mismatch(a, b)?.to_string());
        }
        w.write_record(&rec).map_err(|e| Error::Output(e.to_string()))?;
    }
    w.flush().map_err(|e| Error::Output(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> EmbeddingTable {
        EmbeddingTable::new(
            3,
            [
                ("guns".to_string(), vec![1.0, 0.0, 0.0]),
                ("rifle".to_string(), vec![0.9, 0.1, 0.0]),
                ("health".to_string(), vec![0.0, 1.0, 0.0]),
                ("care".to_string(), vec![0.0, 0.8, 0.2]),
                ("weather".to_string(), vec![0.0, 0.0, 1.0]),
            ],
        )
        .unwrap()
    }

    fn topics(t: &EmbeddingTable) -> Vec<Topic> {
        vec![make_topic("Guns", "rifle", t).unwrap(), make_topic("Health", "care", t).unwrap()]
    }

    #[test]
    fn embedding_is_mean_of_known_tokens() {
        let t = table();
        assert_eq!(embed_text("GUNS!", &t).unwrap(), vec![1.0, 0.0, 0.0]);
        assert_eq!(embed_text("guns, health and more", &t).unwrap(), vec![0.5, 0.5, 0.0]);
        assert_eq!(embed_text("nothing here", &t), None);
    }

    #[test]
    fn matching_and_cutoff() {
        let t = table();
        let ts = topics(&t);
        let (i, s) = match_topic(&ts[1].vector, &ts, 0.3).unwrap();
        assert_eq!(i, 1);
        assert!((s - 1.0).abs() < 1e-12);
        assert_eq!(match_topic(&[0.0, 0.0, 1.0], &ts, 0.3), None);
        assert_eq!(match_topic(&[0.0, 0.0, 0.0], &ts, -1.0), None);
    }

    #[test]
    fn ties_go_to_first_topic() {
        let same = vec![
            Topic { name: "a".into(), description: String::new(), vector: vec![1.0, 0.0] },
            Topic { name: "b".into(), description: String::new(), vector: vec![2.0, 0.0] },
        ];
        assert_eq!(match_topic(&[1.0, 1.0], &same, 0.0).unwrap().0, 0);
    }

    #[test]
    fn distribution_counts() {
        let t = table();
        let ts = topics(&t);
        let d = distribution_from_texts(
            "c",
            SourceKind::News,
            &["guns", "rifle guns", "health care", "weather", "zzz"],
            &ts,
            &t,
            0.3,
        )
        .unwrap();
        assert_eq!(d.counts, vec![2, 1]);
        assert_eq!(d.shares, vec![2.0 / 3.0, 1.0 / 3.0]);
        assert_eq!((d.discarded_below_cutoff, d.discarded_oov), (1, 1));
        let err = distribution_from_texts("c", SourceKind::News, &["weather"], &ts, &t, 0.3).unwrap_err();
        assert!(err.to_string().contains("lower cutoff"));
    }

    #[test]
    fn jsd_bounds() {
        assert_eq!(jensen_shannon(&[0.5, 0.5], &[0.5, 0.5]).unwrap(), 0.0);
        assert!((jensen_shannon(&[1.0, 0.0], &[0.0, 1.0]).unwrap() - 1.0).abs() < 1e-15);
        assert!(jensen_shannon(&[1.0], &[0.5, 0.5]).is_err());
    }

    #[test]
    fn loading_files() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("e.txt");
        let mut f = fs::File::create(&p).unwrap();
        writeln!(f, "3 4\na 1 0 0 0\nb 0 1 0 0\nc 0 0 1 0").unwrap();
        assert_eq!(load_embeddings(&p).unwrap().len(), 3);

        let mut f = fs::File::create(&p).unwrap();
        writeln!(f, "2 4\na 1 0 0 0\nb 0 1 0").unwrap();
        match load_embeddings(&p) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }

        let tp = dir.path().join("topics.json");
        fs::write(&tp, r#"[{"name": "Guns", "description": "rifle"}, {"name": "Health", "description": "care"}]"#).unwrap();
        let ts = load_topics(&tp, &table()).unwrap();
        assert_eq!(ts.len(), 2);
        fs::write(&tp, r#"[{"name": "Zzz", "description": ""}]"#).unwrap();
        assert!(load_topics(&tp, &table()).is_err());
    }

    #[test]
    fn csv_shapes() {
        let t = table();
        let ts = topics(&t);
        let a = distribution_from_texts("c", SourceKind::News, &["guns"], &ts, &t, 0.3).unwrap();
        let b = distribution_from_texts("c", SourceKind::Twitter, &["care"], &ts, &t, 0.3).unwrap();
        let mut buf = Vec::new();
        write_distribution_csv(&[a.clone(), b.clone()], &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "topic,c:news,c:twitter\nGuns,1,0\nHealth,0,1\n");
        let mut buf = Vec::new();
        write_mismatch_csv(&[a, b], &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), ",c:news,c:twitter\nc:news,0,1\nc:twitter,1,0\n");
    }
}
