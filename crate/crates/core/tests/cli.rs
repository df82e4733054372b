//! The command-line front end driven in-process.

mod common;

use std::fs;
use std::path::Path;

use crossmedia::cli;

use common::fixture_dir;

struct Output {
    code: i32,
    stdout: String,
    stderr: String,
}

fn run(args: &[&str]) -> Output {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let mut argv = vec!["crossmedia"];
    argv.extend_from_slice(args);
    let code = cli::run(argv, &mut out, &mut err);
    Output {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

fn config() -> String {
    fixture_dir().join("config.json").to_string_lossy().into_owned()
}

#[test]
fn summary_reports_fixture_rates() {
    let o = run(&["--config", &config(), "summary"]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let rows: Vec<&str> = o.stdout.lines().skip_while(|l| !l.starts_with("candidate,avg")).skip(1).take(3).collect();
    assert_eq!(rows, ["alice,24,4,6,24,4,6", "bob,12,3,4,12,3,4", "carol,6,2,3,6,2,3"]);
}

#[test]
fn single_table_goes_to_stdout_raw() {
    let o = run(&["--config", &config(), "ingest-check"]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    assert!(!o.stdout.starts_with('#'));
    let mut reader = csv::Reader::from_reader(o.stdout.as_bytes());
    assert!(reader.records().count() > 0);
}

#[test]
fn missing_corpus_is_a_usage_error() {
    let o = run(&["heatmap"]);
    assert_eq!(o.code, 1);
    assert!(o.stderr.contains("missing corpus"), "{}", o.stderr);
    assert!(o.stderr.contains("Usage: crossmedia heatmap"), "{}", o.stderr);
}

#[test]
fn unreadable_corpus_is_a_runtime_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["--corpus", dir.path().to_str().unwrap(), "summary"]);
    assert_eq!(o.code, 2, "{}", o.stderr);
    assert!(o.stderr.contains("manifest.json"));
}

#[test]
fn parse_errors_and_help() {
    assert_eq!(run(&["--no-such-flag", "summary"]).code, 1);
    assert_eq!(run(&["frobnicate"]).code, 1);
    let help = run(&["--help"]);
    assert_eq!(help.code, 0);
    assert!(help.stdout.contains("heatmap"));
    assert_eq!(run(&["--version"]).code, 0);
}

#[test]
fn unknown_candidate_is_rejected() {
    let o = run(&["--config", &config(), "--candidate", "zed", "sentiment"]);
    assert_eq!(o.code, 1, "{}", o.stderr);
    assert!(o.stderr.contains("zed"));
}

#[test]
fn report_requires_output_directory() {
    let o = run(&["--config", &config(), "report"]);
    assert_eq!(o.code, 1);
}

fn files(dir: &Path) -> Vec<String> {
    let mut v: Vec<String> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    v.sort();
    v
}

#[test]
fn report_writes_wellformed_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = run(&["--config", &config(), "--out", out.to_str().unwrap(), "report"]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let names = files(&out);
    for expected in [
        "table01_summary.csv",
        "table02_correlations.csv",
        "fig02_timeseries.csv",
        "fig02_timeseries_bob.svg",
        "fig07_cocorrelation.svg",
        "fig08_heatmap_alice.svg",
        "fig12_granger_summary.csv",
        "fig13_toxicity.csv",
        "fig11_topic_mismatch.csv",
        "sentiment_summary.csv",
    ] {
        assert!(names.iter().any(|n| n == expected), "{expected} missing from {names:?}");
    }
    for name in &names {
        let path = out.join(name);
        if name.ends_with(".svg") {
            let text = fs::read_to_string(&path).unwrap();
            let doc = roxmltree::Document::parse(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(doc.root_element().tag_name().name(), "svg");
        } else if name.ends_with(".csv") {
            let mut reader = csv::Reader::from_path(&path).unwrap();
            let width = reader.headers().unwrap().len();
            for rec in reader.records() {
                assert_eq!(rec.unwrap().len(), width, "{name}");
            }
        }
    }
}

#[test]
fn heatmap_peaks_at_fixture_lag() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = run(&["--config", &config(), "--out", out, "--candidate", "alice", "heatmap"]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let mut reader = csv::Reader::from_path(dir.path().join("fig08_heatmap_alice.csv")).unwrap();
    let headers: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    let mut peaks = Vec::new();
    for rec in reader.records() {
        let rec = rec.unwrap();
        let best = (1..rec.len())
            .filter_map(|j| rec[j].parse::<f64>().ok().map(|v| (j, v)))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(j, _)| headers[j].clone());
        peaks.extend(best);
    }
    assert!(!peaks.is_empty());
    let count = |label: &str| peaks.iter().filter(|p| *p == label).count();
    let mode = peaks.iter().max_by_key(|p| count(p)).unwrap();
    assert_eq!(mode, "+6h", "peaks {peaks:?}");
}
