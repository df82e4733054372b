//! Time-series analytics relating social-media and news document streams.
//!
//! The pipeline ingests a corpus of timestamped, candidate-tagged
//! documents and produces the analyses in the sibling modules:
//!
//! - [`corpus`]: ingestion, binning, per-candidate rate summaries
//! - [`stats`]: Pearson correlation, least squares, t and F tests
//! - [`hawkes`]: exponential-decay intensity smoothing
//! - [`influence`]: cross-source and candidate co-correlations, lag heatmaps
//! - [`granger`]: bidirectional Granger causality
//! - [`sentiment`]: lexicon and rule based scoring, bias comparisons
//! - [`topics`]: embedding-based topic matching and distribution mismatch
//! - [`toxicity`]: sampled toxicity scoring through a pluggable backend
//! - [`render`]: SVG figures

pub mod cli;
pub mod config;
pub mod corpus;
pub mod error;
pub mod granger;
pub mod hawkes;
pub mod influence;
pub mod render;
pub mod sentiment;
pub mod stats;
pub mod synth;
pub mod time;
pub mod topics;
pub mod toxicity;

pub use error::{Error, Result};
