use proptest::prelude::*;

use crossmedia::corpus::{format_grouped, EventSeries, SourceKind};
use crossmedia::granger::granger_test_values;
use crossmedia::hawkes::smooth_timestamps;
use crossmedia::influence::{lag_heatmap, HeatmapSpec};
use crossmedia::sentiment::{classify, score, Lexicon, Polarity, RuleConstants};
use crossmedia::stats::pearson;
use crossmedia::topics::{cosine, jensen_shannon, match_topic, Topic};
use crossmedia::toxicity::{sample_uniform, LexiconBackend};

fn series(len: std::ops::Range<usize>) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1e3..1e3f64, len)
}

fn sorted_times(max: usize) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(0i64..200_000, 1..max).prop_map(|mut v| {
        v.sort_unstable();
        v
    })
}

fn distribution(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0..1.0f64, n).prop_filter_map("all zero", |v| {
        let s: f64 = v.iter().sum();
        (s > 1e-6).then(|| v.iter().map(|x| x / s).collect())
    })
}

fn lexicon() -> Lexicon {
    let entries = [("good", 1.9), ("great", 3.1), ("bad", -2.5), ("awful", -3.0), ("fine", 0.8)];
    Lexicon::new(entries.iter().map(|(w, v)| (w.to_string(), *v)), RuleConstants::default()).unwrap()
}

proptest! {
    #[test]
    fn pearson_bounded_and_symmetric(x in series(3..60), y in series(3..60)) {
        let n = x.len().min(y.len());
        let (x, y) = (&x[..n], &y[..n]);
        if let (Some(a), Some(b)) = (pearson(x, y).unwrap(), pearson(y, x).unwrap()) {
            prop_assert!((-1.0..=1.0).contains(&a));
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn pearson_affine_invariant(x in series(3..60), noise in series(3..60), a in 0.01..50.0f64, b in -1e3..1e3f64, neg in any::<bool>()) {
        let n = x.len().min(noise.len());
        let y: Vec<f64> = x[..n].iter().zip(&noise[..n]).map(|(u, v)| u + v).collect();
        let a = if neg { -a } else { a };
        let xa: Vec<f64> = x[..n].iter().map(|v| a * v + b).collect();
        if let (Some(r), Some(ra)) = (pearson(&x[..n], &y).unwrap(), pearson(&xa, &y).unwrap()) {
            prop_assert!((ra - a.signum() * r).abs() < 1e-9);
        }
    }

    #[test]
    fn intensity_superposition(a in sorted_times(40), b in sorted_times(40), half in 60.0..20_000.0f64) {
        let mut both = [a.clone(), b.clone()].concat();
        both.sort_unstable();
        let sa = smooth_timestamps(&a, 0, 200_000, 900, half).unwrap();
        let sb = smooth_timestamps(&b, 0, 200_000, 900, half).unwrap();
        let s = smooth_timestamps(&both, 0, 200_000, 900, half).unwrap();
        for k in 0..s.len() {
            prop_assert!((s.values[k] - sa.values[k] - sb.values[k]).abs() < 1e-9);
        }
    }

    #[test]
    fn intensity_shift_equivariant(a in sorted_times(40), shift_steps in 0i64..50, half in 60.0..20_000.0f64) {
        let step = 600;
        let shift = shift_steps * step;
        let moved: Vec<i64> = a.iter().map(|t| t + shift).collect();
        let s = smooth_timestamps(&a, 0, 200_000, step, half).unwrap();
        let m = smooth_timestamps(&moved, shift, 200_000 + shift, step, half).unwrap();
        prop_assert_eq!(s.len(), m.len());
        for k in 0..s.len() {
            prop_assert!((s.values[k] - m.values[k]).abs() < 1e-9);
        }
    }

    #[test]
    fn intensity_nonnegative_and_bounded(a in sorted_times(60), half in 60.0..20_000.0f64) {
        let s = smooth_timestamps(&a, 0, 200_000, 300, half).unwrap();
        prop_assert!(s.values.iter().all(|&v| v >= 0.0 && v <= a.len() as f64 + 1e-9));
    }

    #[test]
    fn sentiment_bounded_and_negation_flips(words in prop::collection::vec(prop::sample::select(vec!["good", "great", "bad", "awful", "fine", "the", "very", "plan", "GREAT"]), 0..12)) {
        let lex = lexicon();
        let text = words.join(" ");
        let s = score(&text, &lex);
        prop_assert!(s > -1.0 && s < 1.0);
        for w in ["good", "great", "bad", "awful", "fine"] {
            let plain = score(w, &lex);
            let negated = score(&format!("not {w}"), &lex);
            prop_assert!(plain * negated < 0.0);
        }
    }

    #[test]
    fn classification_respects_thresholds(c in -1.0..1.0f64) {
        let p = classify(c);
        prop_assert_eq!(p == Polarity::Positive, c >= 0.05);
        prop_assert_eq!(p == Polarity::Negative, c <= -0.05);
    }

    #[test]
    fn match_topic_scale_invariant(v in prop::collection::vec(-1.0..1.0f64, 4), scale in 0.001..1e3f64, cutoff in -1.0..1.0f64, seed in 0u64..1000) {
        let topics: Vec<Topic> = (0..5)
            .map(|i| Topic {
                name: format!("t{i}"),
                description: String::new(),
                vector: (0..4).map(|j| (((seed + 7 * i + 3 * j) % 11) as f64) - 5.0).collect(),
            })
            .collect();
        let scaled: Vec<f64> = v.iter().map(|x| x * scale).collect();
        let a = match_topic(&v, &topics, cutoff).map(|m| m.0);
        let b = match_topic(&scaled, &topics, cutoff).map(|m| m.0);
        if cosine(&v, &v).is_some() {
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn raising_cutoff_only_drops_matches(v in prop::collection::vec(-1.0..1.0f64, 4), lo in -1.0..1.0f64, hi in -1.0..1.0f64) {
        let (lo, hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
        let topics: Vec<Topic> = (0..4)
            .map(|i| Topic {
                name: format!("t{i}"),
                description: String::new(),
                vector: (0..4).map(|j| if i == j { 1.0 } else { 0.1 }).collect(),
            })
            .collect();
        if let Some(m) = match_topic(&v, &topics, hi) {
            prop_assert_eq!(match_topic(&v, &topics, lo), Some(m));
        }
    }

    #[test]
    fn jsd_symmetric_and_bounded(p in distribution(6), q in distribution(6)) {
        let a = jensen_shannon(&p, &q).unwrap();
        let b = jensen_shannon(&q, &p).unwrap();
        prop_assert!((0.0..=1.0).contains(&a));
        prop_assert!((a - b).abs() < 1e-12);
        prop_assert!(jensen_shannon(&p, &p).unwrap().abs() < 1e-12);
    }

    #[test]
    fn toxicity_mock_bounded(words in prop::collection::vec("[a-z]{1,8}", 0..20)) {
        let backend = LexiconBackend::new(["bad", "vile"]);
        let text = words.join(" ");
        let s = backend.score(&text);
        prop_assert!((0.0..1.0).contains(&s));
    }

    #[test]
    fn uniform_sample_deterministic_and_distinct(n in 0usize..500, k in 0usize..600, seed in any::<u64>()) {
        let a = sample_uniform(n, k, seed);
        prop_assert_eq!(&a, &sample_uniform(n, k, seed));
        prop_assert_eq!(a.len(), k.min(n));
        prop_assert!(a.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(a.iter().all(|&i| i < n));
    }

    #[test]
    fn grouped_format_round_trips(v in 0.0..1e9f64, decimals in 0usize..4) {
        let s = format_grouped(v, decimals);
        let back: f64 = s.replace(',', "").parse().unwrap();
        let scale = 10f64.powi(decimals as i32);
        prop_assert!((back - (v * scale).round() / scale).abs() <= 1e-6 * v.max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn granger_invariant_to_affine_rescaling(seed in 0u64..10_000, a in 0.1..100.0f64, b in -50.0..50.0f64) {
        let n = 120;
        let cause: Vec<f64> = (0..n).map(|i| ((seed as usize * 31 + i * 17) % 23) as f64).collect();
        let effect: Vec<f64> = (0..n).map(|i| if i > 0 { cause[i - 1] } else { 0.0 } + ((i * 7 + seed as usize) % 5) as f64).collect();
        let base = granger_test_values(&effect, &cause, 3).unwrap();
        let scaled: Vec<f64> = cause.iter().map(|v| a * v + b).collect();
        let moved = granger_test_values(&effect, &scaled, 3).unwrap();
        for (x, y) in base.lags.iter().zip(&moved.lags) {
            prop_assert!((x.f - y.f).abs() <= 1e-6 * x.f.max(1.0));
        }
    }

    #[test]
    fn self_heatmap_peaks_at_zero(seed in 0u64..1000) {
        let ts: Vec<i64> = (0..600i64).map(|i| i * 1_800 + ((seed as i64 + i * 7919) % 1_500)).collect();
        let s = EventSeries::new("x", SourceKind::Twitter, ts.clone()).unwrap();
        let n = EventSeries::new("x", SourceKind::News, ts).unwrap();
        let spec = HeatmapSpec {
            window: 2 * 86_400,
            stride: 86_400,
            max_offset: 3 * 3_600,
            offset_step: 3_600,
            half_life: Some(1_800.0),
            grid_step: 300,
        };
        let h = lag_heatmap(&s, &n, &spec).unwrap();
        let zero = h.offsets.iter().position(|&o| o == 0).unwrap();
        for r in 0..h.rows() {
            if let Some(v) = h.get(r, zero) {
                prop_assert!((v - 1.0).abs() < 1e-9);
                prop_assert_eq!(h.argmax_offset(r), Some(0));
            }
        }
    }
}
