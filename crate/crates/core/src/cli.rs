//! Command-line front end. Each subcommand loads its inputs, calls the
//! analysis modules, and writes the CSV tables and SVG figures of one
//! report section; `report` writes every section.
//!
//! Exit codes: 0 success, 1 usage or validation error, 2 runtime error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, CommandFactory, Parser, Subcommand};

use crate::config::{BackendKind, RunConfig};
use crate::corpus::{corpus_summary, distribution_stats, ingest_corpus, Bias, Corpus, SourceKind, ValueSeries};
use crate::error::{Error, Result};
use crate::granger::{self, GrangerResult};
use crate::influence::{co_correlation, co_correlation_matrix, lag_heatmap_in_range, source_correlation_table};
use crate::render;
use crate::sentiment::{self, load_lexicon, Scope, SentimentSummary};
use crate::stats::{DegreesOfFreedom, DistributionStats, VarianceAssumption};
use crate::time;
use crate::topics::{self, load_embeddings, load_topics, TopicDistribution};
use crate::toxicity::{self, Backend, ConstantBackend, HttpBackend, LexiconBackend, Sampling, ToxicityOptions};

#[derive(Parser, Debug)]
#[command(
    name = "crossmedia",
    version,
    about = "Relate news and social-media document streams: rates, correlations, lag heatmaps, Granger tests, sentiment, topics, toxicity"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Default, Clone)]
pub struct GlobalArgs {
    /// Run configuration (JSON); flags override its values
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Corpus directory (manifest.json, events/, series/)
    #[arg(long, global = true, value_name = "PATH")]
    pub corpus: Option<PathBuf>,
    /// Output directory; without it tables are printed to stdout and figures skipped
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Restrict per-candidate outputs to one candidate
    #[arg(long, global = true, value_name = "NAME")]
    pub candidate: Option<String>,
    /// Seed for every random choice
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Validate a corpus and print per-group document counts
    IngestCheck,
    /// Average daily tweets and articles per candidate, daily-count spread
    Summary,
    /// Pearson correlations between each candidate's daily sources
    Correlate,
    /// Candidate-pair co-correlations of daily counts on news and Twitter
    Cocorr,
    /// Windowed lag-correlation heatmap of Twitter against news
    Heatmap(HeatmapArgs),
    /// Granger causality between Twitter and news in both directions
    Granger(GrangerArgs),
    /// Positive:negative ratios overall and per news-bias category
    Sentiment(SentimentArgs),
    /// Topic distributions per candidate and source, with mismatch
    Topics(TopicArgs),
    /// Mean toxicity of a seeded sample of tweets per candidate
    Toxicity(ToxicityArgs),
    /// Run every analysis and write all tables and figures to --out
    Report(ReportArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::IngestCheck => "ingest-check",
            Command::Summary => "summary",
            Command::Correlate => "correlate",
            Command::Cocorr => "cocorr",
            Command::Heatmap(_) => "heatmap",
            Command::Granger(_) => "granger",
            Command::Sentiment(_) => "sentiment",
            Command::Topics(_) => "topics",
            Command::Toxicity(_) => "toxicity",
            Command::Report(_) => "report",
        }
    }
}

#[derive(Args, Debug, Default, Clone)]
pub struct HeatmapArgs {
    /// Correlation window length, e.g. 2w
    #[arg(long, value_name = "DURATION")]
    pub window: Option<String>,
    /// Distance between window starts, e.g. 12h
    #[arg(long, value_name = "DURATION")]
    pub stride: Option<String>,
    /// Largest offset in either direction, e.g. 48h
    #[arg(long, value_name = "DURATION")]
    pub max_offset: Option<String>,
    /// Offset increment, e.g. 1h
    #[arg(long, value_name = "DURATION")]
    pub offset_step: Option<String>,
    /// Smoothing grid step, e.g. 5m
    #[arg(long, value_name = "DURATION")]
    pub grid_step: Option<String>,
    /// Fixed smoothing half-life; each series' average period by default
    #[arg(long, value_name = "DURATION")]
    pub half_life: Option<String>,
}

#[derive(Args, Debug, Default, Clone)]
pub struct GrangerArgs {
    /// Largest lag in hours
    #[arg(long, value_name = "N")]
    pub max_lag: Option<usize>,
}

#[derive(Args, Debug, Default, Clone)]
pub struct SentimentArgs {
    /// Sentiment lexicon (token<TAB>valence)
    #[arg(long, value_name = "PATH")]
    pub lexicon: Option<PathBuf>,
    /// Variance assumption of the bias-category t-tests
    #[arg(long, value_parser = ["welch", "pooled"])]
    pub variance: Option<String>,
}

#[derive(Args, Debug, Default, Clone)]
pub struct TopicArgs {
    /// Topic list: JSON array of {name, description}
    #[arg(long, value_name = "PATH")]
    pub topics: Option<PathBuf>,
    /// Word vectors in word2vec text format
    #[arg(long, value_name = "PATH")]
    pub embeddings: Option<PathBuf>,
    /// Minimum cosine similarity for a match
    #[arg(long, value_name = "X", allow_negative_numbers = true)]
    pub cutoff: Option<f64>,
}

#[derive(Args, Debug, Default, Clone)]
pub struct ToxicityArgs {
    /// Scoring backend
    #[arg(long, value_parser = ["lexicon", "constant", "http"])]
    pub backend: Option<String>,
    /// Toxic word list for the lexicon backend
    #[arg(long, value_name = "PATH")]
    pub toxic_words: Option<PathBuf>,
    /// Tweets sampled per candidate
    #[arg(long, value_name = "N")]
    pub sample_size: Option<usize>,
    /// Requests in flight
    #[arg(long, value_name = "N")]
    pub concurrency: Option<usize>,
    /// Per-day quotas instead of uniform sampling
    #[arg(long)]
    pub stratified: bool,
    /// Endpoint of the http backend
    #[arg(long, value_name = "URL")]
    pub endpoint: Option<String>,
}

#[derive(Args, Debug, Default, Clone)]
pub struct ReportArgs {
    #[command(flatten)]
    pub heatmap: HeatmapArgs,
    #[command(flatten)]
    pub granger: GrangerArgs,
    #[command(flatten)]
    pub sentiment: SentimentArgs,
    #[command(flatten)]
    pub topics: TopicArgs,
    #[command(flatten)]
    pub toxicity: ToxicityArgs,
}

impl HeatmapArgs {
    fn apply(&self, cfg: &mut RunConfig) {
        let h = &mut cfg.heatmap;
        for (flag, field) in [
            (&self.window, &mut h.window),
            (&self.stride, &mut h.stride),
            (&self.max_offset, &mut h.max_offset),
            (&self.offset_step, &mut h.offset_step),
            (&self.grid_step, &mut h.grid_step),
        ] {
            if let Some(v) = flag {
                *field = v.clone();
            }
        }
        if self.half_life.is_some() {
            h.half_life = self.half_life.clone();
        }
    }
}

impl GrangerArgs {
    fn apply(&self, cfg: &mut RunConfig) {
        if let Some(l) = self.max_lag {
            cfg.granger.max_lag = l;
        }
    }
}

impl SentimentArgs {
    fn apply(&self, cfg: &mut RunConfig) {
        if self.lexicon.is_some() {
            cfg.sentiment.lexicon = self.lexicon.clone();
        }
        match self.variance.as_deref() {
            Some("pooled") => cfg.sentiment.variance = VarianceAssumption::Pooled,
            Some(_) => cfg.sentiment.variance = VarianceAssumption::Welch,
            None => {}
        }
    }
}

impl TopicArgs {
    fn apply(&self, cfg: &mut RunConfig) {
        if self.topics.is_some() {
            cfg.topics.topics = self.topics.clone();
        }
        if self.embeddings.is_some() {
            cfg.topics.embeddings = self.embeddings.clone();
        }
        if let Some(c) = self.cutoff {
            cfg.topics.cutoff = c;
        }
    }
}

impl ToxicityArgs {
    fn apply(&self, cfg: &mut RunConfig) {
        let t = &mut cfg.toxicity;
        match self.backend.as_deref() {
            Some("constant") => t.backend = BackendKind::Constant,
            Some("http") => t.backend = BackendKind::Http,
            Some(_) => t.backend = BackendKind::Lexicon,
            None => {}
        }
        if self.toxic_words.is_some() {
            t.toxic_words = self.toxic_words.clone();
        }
        if let Some(n) = self.sample_size {
            t.sample_size = n;
        }
        if let Some(n) = self.concurrency {
            t.concurrency = n;
        }
        if self.stratified {
            t.sampling = Sampling::TimeStratified;
        }
        if let Some(e) = &self.endpoint {
            t.endpoint = e.clone();
        }
    }
}

/// Exit status for an error: 1 for bad input, 2 for failures while running.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::InvalidArgument(_) | Error::Parse { .. } | Error::LengthMismatch { .. } => 1,
        _ => 2,
    }
}

/// Parses `args` (program name first) and runs; returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{text}");
                    0
                }
                _ => {
                    let _ = write!(stderr, "{text}");
                    1
                }
            };
        }
    };
    let name = cli.command.name();
    match execute(cli, stdout, stderr) {
        Ok(()) => 0,
        Err(e) => {
            let code = exit_code(&e);
            let _ = writeln!(stderr, "error: {e}");
            if code == 1 {
                let mut cmd = Cli::command();
                cmd.build();
                if let Some(sub) = cmd.find_subcommand_mut(name) {
                    let _ = writeln!(stderr, "\n{}", sub.render_usage());
                }
                let _ = writeln!(stderr, "For more information, try 'crossmedia {name} --help'.");
            }
            code
        }
    }
}

/// Builds the effective configuration: file, then flags.
pub fn resolve_config(global: &GlobalArgs, command: &Command) -> Result<RunConfig> {
    let mut cfg = match &global.config {
        Some(path) if !path.is_file() => {
            return Err(Error::invalid(format!("config file {} does not exist", path.display())))
        }
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if global.corpus.is_some() {
        cfg.corpus = global.corpus.clone();
    }
    if global.out.is_some() {
        cfg.out = global.out.clone();
    }
    if let Some(seed) = global.seed {
        cfg.seed = seed;
    }
    if let Some(c) = &global.candidate {
        cfg.candidates = Some(vec![c.clone()]);
    }
    match command {
        Command::Heatmap(a) => a.apply(&mut cfg),
        Command::Granger(a) => a.apply(&mut cfg),
        Command::Sentiment(a) => a.apply(&mut cfg),
        Command::Topics(a) => a.apply(&mut cfg),
        Command::Toxicity(a) => a.apply(&mut cfg),
        Command::Report(a) => {
            a.heatmap.apply(&mut cfg);
            a.granger.apply(&mut cfg);
            a.sentiment.apply(&mut cfg);
            a.topics.apply(&mut cfg);
            a.toxicity.apply(&mut cfg);
        }
        _ => {}
    }
    cfg.validate()?;
    Ok(cfg)
}

fn execute(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    let cfg = resolve_config(&cli.global, &cli.command)?;
    if matches!(cli.command, Command::Report(_)) && cfg.out.is_none() {
        return Err(Error::invalid("report needs an output directory: set out in the config file or pass --out"));
    }
    let corpus_path = RunConfig::require(&cfg.corpus, "corpus", "--corpus")?;
    let corpus = ingest_corpus(corpus_path)?;
    let candidates = selected_candidates(&cfg, &corpus)?;
    let mut run = Run {
        cfg: &cfg,
        corpus: &corpus,
        candidates,
        sink: Sink::new(cfg.out.clone())?,
        notes: Vec::new(),
    };
    match &cli.command {
        Command::IngestCheck => run.ingest_check()?,
        Command::Summary => run.summary()?,
        Command::Correlate => run.correlate()?,
        Command::Cocorr => run.cocorr()?,
        Command::Heatmap(_) => run.heatmap()?,
        Command::Granger(_) => run.granger()?,
        Command::Sentiment(_) => run.sentiment()?,
        Command::Topics(_) => run.topics()?,
        Command::Toxicity(_) => run.toxicity()?,
        Command::Report(_) => run.report()?,
    }
    let Run { sink, notes, .. } = run;
    for n in &notes {
        let _ = writeln!(stderr, "note: {n}");
    }
    sink.finish(stdout)
}

fn selected_candidates(cfg: &RunConfig, corpus: &Corpus) -> Result<Vec<String>> {
    match &cfg.candidates {
        Some(list) => {
            for c in list {
                corpus.require_candidate(c)?;
            }
            Ok(list.clone())
        }
        None => Ok(corpus.candidates().to_vec()),
    }
}

/// Collects outputs: files in a directory, or CSV text for stdout.
struct Sink {
    dir: Option<PathBuf>,
    printed: Vec<(String, Vec<u8>)>,
    written: Vec<PathBuf>,
}

impl Sink {
    fn new(dir: Option<PathBuf>) -> Result<Self> {
        if let Some(d) = &dir {
            fs::create_dir_all(d).map_err(|e| Error::io(d, e))?;
        }
        Ok(Self {
            dir,
            printed: Vec::new(),
            written: Vec::new(),
        })
    }

    fn file(&mut self, name: &str, bytes: Vec<u8>) -> Result<()> {
        match &self.dir {
            Some(d) => {
                let path = d.join(name);
                fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;
                self.written.push(path);
            }
            None if name.ends_with(".csv") || name.ends_with(".txt") => self.printed.push((name.to_string(), bytes)),
            None => {}
        }
        Ok(())
    }

    fn svg(&mut self, name: &str, svg: Result<String>) -> Result<()> {
        if self.dir.is_none() {
            return Ok(());
        }
        self.file(name, svg?.into_bytes())
    }

    fn finish(self, out: &mut dyn Write) -> Result<()> {
        let io = |e| Error::Output(format!("writing to stdout: {e}"));
        if self.dir.is_some() {
            for p in &self.written {
                writeln!(out, "{}", p.display()).map_err(io)?;
            }
        } else if let [(_, bytes)] = self.printed.as_slice() {
            out.write_all(bytes).map_err(io)?;
        } else {
            for (name, bytes) in &self.printed {
                writeln!(out, "# {name}").map_err(io)?;
                out.write_all(bytes).map_err(io)?;
            }
        }
        Ok(())
    }
}

fn csv_bytes(header: &[&str], rows: &[Vec<String>]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| Error::Output(e.to_string());
    w.write_record(header).map_err(err)?;
    for r in rows {
        w.write_record(r).map_err(err)?;
    }
    w.into_inner().map_err(|e| Error::Output(e.to_string()))
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn slug(s: &str) -> String {
    s.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect()
}

fn stats_cells(s: &DistributionStats) -> Vec<String> {
    [s.mean, s.min, s.p5, s.p25, s.median, s.p75, s.p95, s.max]
        .iter()
        .map(f64::to_string)
        .collect()
}

const STATS_HEADER: [&str; 8] = ["mean", "min", "p5", "p25", "median", "p75", "p95", "max"];

fn ratio_cell(s: &SentimentSummary) -> String {
    s.ratio.map(|r| r.to_string()).unwrap_or_else(|| s.ratio_label())
}

struct Run<'a> {
    cfg: &'a RunConfig,
    corpus: &'a Corpus,
    candidates: Vec<String>,
    sink: Sink,
    notes: Vec<String>,
}

impl Run<'_> {
    fn note(&mut self, msg: String) {
        log::warn!("{msg}");
        self.notes.push(msg);
    }

    /// Runs `f` per candidate, turning data shortfalls into notes.
    fn per_candidate<T>(&mut self, what: &str, mut f: impl FnMut(&Self, &str) -> Result<T>) -> Result<Vec<(String, T)>> {
        let mut out = Vec::new();
        for c in self.candidates.clone() {
            match f(self, &c) {
                Ok(v) => out.push((c, v)),
                Err(e @ (Error::InsufficientData(_) | Error::Degenerate(_) | Error::RankDeficient { .. })) => {
                    self.note(format!("{what} skipped for {c}: {e}"))
                }
                Err(e) => return Err(e),
            }
        }
        if out.is_empty() {
            return Err(Error::InsufficientData(format!("{what}: no candidate has enough data")));
        }
        Ok(out)
    }

    fn ingest_check(&mut self) -> Result<()> {
        let mut rows = Vec::new();
        for c in &self.candidates {
            for k in SourceKind::ALL {
                rows.push(vec![c.clone(), k.to_string(), self.corpus.group_len(c, k).to_string()]);
            }
        }
        for s in self.corpus.attached_series() {
            if self.candidates.contains(&s.candidate) {
                rows.push(vec![s.candidate.clone(), format!("series:{}", s.kind), s.series.values.len().to_string()]);
            }
        }
        let bytes = csv_bytes(&["candidate", "source", "count"], &rows)?;
        self.sink.file("ingest_check.csv", bytes)
    }

    fn summary(&mut self) -> Result<()> {
        let summary = corpus_summary(self.corpus);
        let rows: Vec<Vec<String>> = summary
            .rows
            .iter()
            .filter(|r| self.candidates.contains(&r.candidate))
            .map(|r| {
                let (st, sa, sr) = r.scaled();
                vec![
                    r.candidate.clone(),
                    r.avg_tweets_per_day.to_string(),
                    r.avg_articles_per_day.to_string(),
                    opt(r.ratio),
                    st.to_string(),
                    sa.to_string(),
                    opt(sr),
                ]
            })
            .collect();
        let header = [
            "candidate",
            "avg_tweets_per_day",
            "avg_articles_per_day",
            "tweets_per_article",
            "scaled_tweets_per_day",
            "scaled_articles_per_day",
            "scaled_tweets_per_article",
        ];
        self.sink.file("table01_summary.csv", csv_bytes(&header, &rows)?)?;

        let mut rows = Vec::new();
        let mut groups = Vec::new();
        for c in &self.candidates {
            for (kind, label) in [(SourceKind::Twitter, "tweets"), (SourceKind::News, "news")] {
                let stats = distribution_stats(&self.corpus.daily_counts(c, kind))?;
                let mut row = vec![c.clone(), kind.to_string(), stats.n.to_string()];
                row.extend(stats_cells(&stats));
                rows.push(row);
                groups.push((format!("{c} {label}"), stats));
            }
        }
        let mut header = vec!["candidate", "source", "days"];
        header.extend(STATS_HEADER);
        self.sink.file("fig01_daily_counts.csv", csv_bytes(&header, &rows)?)?;
        self.sink.svg(
            "fig01_daily_counts.svg",
            render::box_plot("Documents per day", &groups, "documents per day"),
        )
    }

    fn correlate(&mut self) -> Result<()> {
        let mut rows = Vec::new();
        for c in &self.candidates {
            for p in source_correlation_table(self.corpus, c)? {
                rows.push(vec![p.candidate, p.left, p.right, opt(p.r), p.n_days.to_string()]);
            }
        }
        let bytes = csv_bytes(&["candidate", "left", "right", "r", "n_days"], &rows)?;
        self.sink.file("table02_correlations.csv", bytes)?;
        self.timeseries()
    }

    /// Daily news, tweet and attached series per candidate, each scaled to its peak for plotting.
    fn timeseries(&mut self) -> Result<()> {
        let mut rows = Vec::new();
        for c in self.candidates.clone() {
            let mut named: Vec<(String, ValueSeries)> = Vec::new();
            for kind in [SourceKind::News, SourceKind::Twitter] {
                named.push((kind.to_string(), ValueSeries::from_daily(&self.corpus.daily_counts(&c, kind))?));
            }
            for s in self.corpus.series_for(&c) {
                named.push((s.kind.clone(), s.series.clone()));
            }
            let origin = named[0].1.start;
            let mut lines = Vec::new();
            for (name, series) in &named {
                let peak = series.values.iter().cloned().fold(0.0, f64::max);
                let mut pts = Vec::new();
                for (i, &v) in series.values.iter().enumerate() {
                    let date = series.date(i);
                    rows.push(vec![c.clone(), name.clone(), date.to_string(), v.to_string()]);
                    let x = (date - origin).num_days() as f64;
                    pts.push((x, if peak > 0.0 { v / peak } else { 0.0 }));
                }
                lines.push((name.as_str(), pts));
            }
            let title = format!("{c}: daily activity (scaled to peak)");
            let x_label = format!("days since {origin}");
            self.sink.svg(
                &format!("fig02_timeseries_{c}.svg"),
                render::line_chart(&title, &x_label, "fraction of peak", &lines),
            )?;
        }
        let bytes = csv_bytes(&["candidate", "series", "date", "value"], &rows)?;
        self.sink.file("fig02_timeseries.csv", bytes)
    }

    fn cocorr(&mut self) -> Result<()> {
        if let [a, b, ..] = self.candidates.as_slice() {
            let mut rows = Vec::new();
            for (kind, fig) in [(SourceKind::News, "fig06a_news.svg"), (SourceKind::Twitter, "fig06b_twitter.svg")] {
                let da = ValueSeries::from_daily(&self.corpus.daily_counts(a, kind))?;
                let db = ValueSeries::from_daily(&self.corpus.daily_counts(b, kind))?;
                let cc = co_correlation(&da, &db)?;
                for &(x, y) in &cc.points {
                    rows.push(vec![kind.to_string(), x.to_string(), y.to_string()]);
                }
                let r = cc.r.map_or("undefined".to_string(), |r| format!("{r:.2}"));
                let title = format!("{kind}: {a} vs {b} daily counts (r = {r})");
                self.sink.svg(fig, render::scatter_plot(&title, a, b, &cc.points))?;
            }
            self.sink.file("fig06_cocorrelation_pair.csv", csv_bytes(&["source", a, b], &rows)?)?;
        } else {
            self.note("co-correlation example needs two candidates".to_string());
        }

        let mut rows = Vec::new();
        let mut groups = Vec::new();
        for kind in [SourceKind::News, SourceKind::Twitter] {
            let m = co_correlation_matrix(self.corpus, kind)?;
            for p in &m.pairs {
                rows.push(vec![kind.to_string(), p.a.clone(), p.b.clone(), opt(p.r), p.n_days.to_string()]);
            }
            if let Some(d) = m.distribution {
                groups.push((kind.to_string(), d));
            }
        }
        self.sink.file("fig07_cocorrelation.csv", csv_bytes(&["source", "a", "b", "r", "n_days"], &rows)?)?;
        if groups.is_empty() {
            self.note("no defined co-correlations to plot".to_string());
            return Ok(());
        }
        self.sink.svg(
            "fig07_cocorrelation.svg",
            render::box_plot("Candidate co-correlations", &groups, "Pearson r"),
        )
    }

    fn heatmap(&mut self) -> Result<()> {
        let spec = self.cfg.heatmap.spec()?;
        let (d0, d1) = self.corpus.day_bounds();
        let (t0, t1) = (time::floor_to(d0, spec.grid_step), time::ceil_to(d1, spec.grid_step));
        let maps = self.per_candidate("heatmap", |run, c| {
            let tw = run.corpus.event_series(c, SourceKind::Twitter);
            let news = run.corpus.event_series(c, SourceKind::News);
            lag_heatmap_in_range(&tw, &news, &spec, t0, t1)
        })?;
        for (c, map) in maps {
            let mut buf = Vec::new();
            map.write_csv(&mut buf)?;
            let stem = format!("fig08_heatmap_{}", slug(&c));
            self.sink.file(&format!("{stem}.csv"), buf)?;
            let title = format!("{c}: Twitter vs news windowed correlation");
            self.sink.svg(&format!("{stem}.svg"), render::heatmap_svg(&map, &title))?;
        }
        Ok(())
    }

    fn granger(&mut self) -> Result<()> {
        let max_lag = self.cfg.granger.max_lag;
        let (t0, t1) = self.corpus.day_bounds();
        let results = self.per_candidate("granger", |run, c| {
            let tw = granger::prepare_granger_series(&run.corpus.event_series(c, SourceKind::Twitter), t0, t1)?;
            let news = granger::prepare_granger_series(&run.corpus.event_series(c, SourceKind::News), t0, t1)?;
            granger::granger_both("twitter", &tw, "news", &news, max_lag)
        })?;
        let mut rows = Vec::new();
        let mut all: Vec<GrangerResult> = Vec::new();
        for (c, pair) in &results {
            let mut buf = Vec::new();
            granger::write_lag_csv(pair, &mut buf)?;
            let stem = format!("fig12_granger_{}", slug(c));
            self.sink.file(&format!("{stem}.csv"), buf)?;
            let series: Vec<(&str, Vec<(f64, f64)>)> = pair
                .iter()
                .map(|r| (r.direction.as_str(), r.lags.iter().map(|l| (l.lag as f64, l.f)).collect()))
                .collect();
            self.sink.svg(
                &format!("{stem}.svg"),
                render::line_chart(&format!("{c}: Granger F-statistic by lag"), "lag (hours)", "F", &series),
            )?;
            for r in pair {
                rows.push(vec![c.clone(), r.direction.clone(), r.avg_p.to_string()]);
            }
            all.extend(pair.iter().cloned());
        }
        for (direction, p) in granger::average_p_by_direction(&all) {
            rows.push(vec!["all".to_string(), direction, p.to_string()]);
        }
        self.sink.file("fig12_granger_summary.csv", csv_bytes(&["candidate", "direction", "avg_p"], &rows)?)
    }

    fn sentiment(&mut self) -> Result<()> {
        let path = RunConfig::require(&self.cfg.sentiment.lexicon, "sentiment.lexicon", "--lexicon")?;
        let lexicon = load_lexicon(path)?;
        let thresholds = self.cfg.sentiment.thresholds;

        let mut all = Vec::new();
        for scope in [Scope::News, Scope::Twitter, Scope::CandidateTwitter] {
            let found = self.per_candidate(&format!("{scope} sentiment"), |run, c| {
                sentiment::sentiment_summary(run.corpus, c, scope, &lexicon, &thresholds)
            });
            match found {
                Ok(v) => all.extend(v.into_iter().map(|(_, s)| s)),
                Err(Error::InsufficientData(m)) => self.note(m),
                Err(e) => return Err(e),
            }
        }
        let mut buf = Vec::new();
        sentiment::write_summary_csv(&all, &mut buf)?;
        self.sink.file("sentiment_summary.csv", buf)?;

        let news: Vec<&SentimentSummary> = all.iter().filter(|s| s.scope == Scope::News).collect();
        let names: Vec<String> = news.iter().map(|s| s.candidate.clone()).collect();
        let rows: Vec<Vec<String>> = news
            .iter()
            .map(|s| vec![s.candidate.clone(), s.positive.to_string(), s.negative.to_string(), s.neutral.to_string(), ratio_cell(s)])
            .collect();
        self.sink.file("fig03_news_sentiment.csv", csv_bytes(&["candidate", "pos", "neg", "neu", "ratio"], &rows)?)?;
        if !news.is_empty() {
            let values = news.iter().map(|s| s.ratio).collect();
            self.sink.svg(
                "fig03_news_sentiment.svg",
                render::bar_chart("News positive:negative ratio", &names, &[("ratio", values)], "positive / negative"),
            )?;
        }

        let variance = self.cfg.sentiment.variance;
        let comparisons = self.per_candidate("bias comparison", |run, c| {
            sentiment::bias_comparison(run.corpus, c, &lexicon, &thresholds, variance)
        });
        match comparisons {
            Ok(cmps) => {
                let (mut rows, mut tests) = (Vec::new(), Vec::new());
                for (c, cmp) in &cmps {
                    for cat in &cmp.categories {
                        let s = &cat.summary;
                        rows.push(vec![
                            c.clone(),
                            cat.bias.to_string(),
                            s.positive.to_string(),
                            s.negative.to_string(),
                            s.neutral.to_string(),
                            ratio_cell(s),
                            opt(cat.delta),
                        ]);
                    }
                    for t in &cmp.tests {
                        let (stat, df, p) = match &t.result {
                            Some(r) => {
                                let df = match r.df {
                                    DegreesOfFreedom::Single(d) => d.to_string(),
                                    DegreesOfFreedom::Pair(a, b) => format!("{a};{b}"),
                                };
                                (r.statistic.to_string(), df, r.p_value.to_string())
                            }
                            None => Default::default(),
                        };
                        tests.push(vec![c.clone(), t.a.to_string(), t.b.to_string(), stat, df, p, t.note.clone().unwrap_or_default()]);
                    }
                }
                self.sink.file(
                    "fig04_news_bias.csv",
                    csv_bytes(&["candidate", "bias", "pos", "neg", "neu", "ratio", "delta"], &rows)?,
                )?;
                self.sink.file(
                    "fig04_bias_ttests.csv",
                    csv_bytes(&["candidate", "a", "b", "t", "df", "p", "note"], &tests)?,
                )?;
                let cands: Vec<String> = cmps.iter().map(|(c, _)| c.clone()).collect();
                let series: Vec<(&str, Vec<Option<f64>>)> = Bias::CATEGORIES
                    .iter()
                    .map(|b| {
                        let vals = cmps
                            .iter()
                            .map(|(_, cmp)| cmp.categories.iter().find(|x| x.bias == *b).and_then(|x| x.delta))
                            .collect();
                        (b.as_str(), vals)
                    })
                    .collect();
                self.sink.svg(
                    "fig04_news_bias.svg",
                    render::bar_chart("News sentiment ratio by outlet bias, mean shifted to zero", &cands, &series, "ratio - mean"),
                )?;
            }
            Err(Error::InsufficientData(m)) => self.note(m),
            Err(e) => return Err(e),
        }

        let tweets: Vec<&SentimentSummary> = all.iter().filter(|s| s.scope == Scope::Twitter).collect();
        let deltas = sentiment::ratio_deltas(tweets.iter().copied());
        let rows: Vec<Vec<String>> = tweets
            .iter()
            .zip(&deltas)
            .map(|(s, d)| {
                vec![s.candidate.clone(), s.positive.to_string(), s.negative.to_string(), s.neutral.to_string(), ratio_cell(s), opt(*d)]
            })
            .collect();
        self.sink.file(
            "fig05_twitter_sentiment.csv",
            csv_bytes(&["candidate", "pos", "neg", "neu", "ratio", "delta"], &rows)?,
        )?;
        if deltas.iter().any(Option::is_some) {
            let names: Vec<String> = tweets.iter().map(|s| s.candidate.clone()).collect();
            self.sink.svg(
                "fig05_twitter_sentiment.svg",
                render::bar_chart("Tweet positive:negative ratio, mean shifted to zero", &names, &[("delta", deltas)], "ratio - mean"),
            )?;
        }
        Ok(())
    }

    fn topics(&mut self) -> Result<()> {
        let emb = RunConfig::require(&self.cfg.topics.embeddings, "topics.embeddings", "--embeddings")?;
        let top = RunConfig::require(&self.cfg.topics.topics, "topics.topics", "--topics")?;
        let table = load_embeddings(emb)?;
        let topic_list = load_topics(top, &table)?;
        let cutoff = self.cfg.topics.cutoff;

        let mut dists: Vec<TopicDistribution> = Vec::new();
        for source in SourceKind::ALL {
            let found = self.per_candidate(&format!("{source} topics"), |run, c| {
                topics::topic_distribution(run.corpus, c, source, &topic_list, &table, cutoff)
            });
            match found {
                Ok(v) => dists.extend(v.into_iter().map(|(_, d)| d)),
                Err(Error::InsufficientData(m)) => self.note(m),
                Err(e) => return Err(e),
            }
        }
        if dists.is_empty() {
            return Err(Error::InsufficientData(format!(
                "no topic distribution could be built at cutoff {cutoff}; try a lower cutoff"
            )));
        }
        dists.sort_by(|a, b| (&a.candidate, a.source).cmp(&(&b.candidate, b.source)));
        dists.sort_by_key(|d| self.candidates.iter().position(|c| *c == d.candidate));

        let mut buf = Vec::new();
        topics::write_distribution_csv(&dists, &mut buf)?;
        self.sink.file("fig11_topics.csv", buf)?;
        let mut buf = Vec::new();
        topics::write_mismatch_csv(&dists, &mut buf)?;
        self.sink.file("fig11_topic_mismatch.csv", buf)?;
        let rows: Vec<Vec<String>> = dists
            .iter()
            .map(|d| {
                vec![
                    d.candidate.clone(),
                    d.source.to_string(),
                    d.matched.to_string(),
                    d.discarded_below_cutoff.to_string(),
                    d.discarded_oov.to_string(),
                ]
            })
            .collect();
        self.sink.file(
            "fig11_topic_counts.csv",
            csv_bytes(&["candidate", "source", "matched", "below_cutoff", "out_of_vocabulary"], &rows)?,
        )?;
        let labels: Vec<String> = dists.iter().map(TopicDistribution::label).collect();
        let series: Vec<(&str, Vec<Option<f64>>)> = dists
            .iter()
            .zip(&labels)
            .map(|(d, l)| (l.as_str(), d.shares.iter().map(|&s| Some(s)).collect()))
            .collect();
        let names: Vec<String> = topic_list.iter().map(|t| t.name.clone()).collect();
        self.sink.svg(
            "fig11_topics.svg",
            render::bar_chart("Topic distribution by candidate and source", &names, &series, "share of matched documents"),
        )
    }

    fn backend(&self) -> Result<Box<dyn Backend>> {
        let t = &self.cfg.toxicity;
        Ok(match t.backend {
            BackendKind::Constant => Box::new(ConstantBackend(t.constant)),
            BackendKind::Http => Box::new(HttpBackend::from_env(t.endpoint.clone())?),
            BackendKind::Lexicon => match &t.toxic_words {
                Some(p) => Box::new(LexiconBackend::load(p)?),
                None => Box::new(LexiconBackend::new(toxicity::DEFAULT_TOXIC_WORDS)),
            },
        })
    }

    fn toxicity(&mut self) -> Result<()> {
        let backend = self.backend()?;
        let t = &self.cfg.toxicity;
        let opts = ToxicityOptions {
            sample_size: t.sample_size,
            seed: self.cfg.seed,
            concurrency: t.concurrency,
            sampling: t.sampling,
            retry: t.retry,
        };
        let reports = self.per_candidate("toxicity", |run, c| {
            toxicity::candidate_toxicity(run.corpus, c, backend.as_ref(), &opts)
        })?;
        let rows: Vec<Vec<String>> = reports
            .iter()
            .map(|(_, r)| {
                vec![
                    r.candidate.clone(),
                    r.n_scored.to_string(),
                    r.mean_toxicity.to_string(),
                    r.sample_seed.to_string(),
                    r.n_sampled.to_string(),
                    r.skipped.to_string(),
                    r.retries.to_string(),
                ]
            })
            .collect();
        let header = ["candidate", "n_scored", "mean_toxicity", "sample_seed", "n_sampled", "skipped", "retries"];
        self.sink.file("fig13_toxicity.csv", csv_bytes(&header, &rows)?)?;
        let names: Vec<String> = reports.iter().map(|(c, _)| c.clone()).collect();
        let values = reports.iter().map(|(_, r)| Some(r.mean_toxicity)).collect();
        self.sink.svg(
            "fig13_toxicity.svg",
            render::bar_chart("Mean toxicity of tweets per candidate", &names, &[("toxicity", values)], "mean toxicity"),
        )
    }

    fn report(&mut self) -> Result<()> {
        for missing in [
            ("sentiment.lexicon", "--lexicon", &self.cfg.sentiment.lexicon),
            ("topics.topics", "--topics", &self.cfg.topics.topics),
            ("topics.embeddings", "--embeddings", &self.cfg.topics.embeddings),
        ] {
            RunConfig::require(missing.2, missing.0, missing.1)?;
        }
        self.summary()?;
        self.correlate()?;
        self.sentiment()?;
        self.cocorr()?;
        self.heatmap()?;
        self.topics()?;
        self.granger()?;
        self.toxicity()?;
        let mut text = String::new();
        for n in &self.notes {
            text.push_str(n);
            text.push('\n');
        }
        self.sink.file("notes.txt", text.into_bytes())
    }
}

/// Convenience for binaries: runs with the process arguments and standard streams.
pub fn main_with_env() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}
