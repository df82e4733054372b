//! Independent reference implementations shared by the integration tests.
//! Nothing here calls into the library's numerics.

#![allow(dead_code)]

use std::f64::consts::PI;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Decayed event sum at each grid point, summing every event directly.
pub fn naive_intensity(events: &[i64], grid: &[i64], half_life: f64) -> Vec<f64> {
    let r = 2f64.ln() / half_life;
    grid.iter()
        .map(|&t| {
            events
                .iter()
                .filter(|&&e| e <= t)
                .map(|&e| (-r * (t - e) as f64).exp())
                .sum()
        })
        .collect()
}

/// Textbook two-pass Pearson correlation.
pub fn pearson_direct(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    sxy / (sxx * syy).sqrt()
}

/// Stirling series with upward shift; accurate to ~1e-15 for x > 0.
pub fn ln_gamma_stirling(x: f64) -> f64 {
    let mut x = x;
    let mut acc = 0.0;
    while x < 10.0 {
        acc -= x.ln();
        x += 1.0;
    }
    let x2 = x * x;
    let series = 1.0 / (12.0 * x) - 1.0 / (360.0 * x * x2) + 1.0 / (1260.0 * x2 * x2 * x)
        - 1.0 / (1680.0 * x2 * x2 * x2 * x)
        + 1.0 / (1188.0 * x2 * x2 * x2 * x2 * x);
    acc + (x - 0.5) * x.ln() - x + 0.5 * (2.0 * PI).ln() + series
}

fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
        return left + right + (left + right - whole) / 15.0;
    }
    simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}

/// Adaptive Simpson quadrature on `[a, b]`.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson(f, a, b, fa, fm, fb, whole, tol, 50)
}

pub fn t_density(x: f64, df: f64) -> f64 {
    let ln_c = ln_gamma_stirling((df + 1.0) / 2.0) - ln_gamma_stirling(df / 2.0) - 0.5 * (df * PI).ln();
    (ln_c - (df + 1.0) / 2.0 * (1.0 + x * x / df).ln()).exp()
}

/// Two-sided Student t p-value by quadrature of the density.
pub fn t_two_sided_oracle(t: f64, df: f64) -> f64 {
    let inner = integrate(&|x| t_density(x, df), 0.0, t.abs(), 1e-13);
    (1.0 - 2.0 * inner).max(0.0)
}

pub fn f_density(x: f64, d1: f64, d2: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let ln_b = ln_gamma_stirling(d1 / 2.0) + ln_gamma_stirling(d2 / 2.0) - ln_gamma_stirling((d1 + d2) / 2.0);
    let ln = 0.5 * d1 * (d1 / d2).ln() + (0.5 * d1 - 1.0) * x.ln()
        - 0.5 * (d1 + d2) * (1.0 + d1 * x / d2).ln()
        - ln_b;
    ln.exp()
}

/// Upper-tail F probability by quadrature; `x = s^2` removes the singularity at 0.
pub fn f_upper_oracle(f: f64, d1: f64, d2: f64) -> f64 {
    let ln_b = ln_gamma_stirling(d1 / 2.0) + ln_gamma_stirling(d2 / 2.0) - ln_gamma_stirling((d1 + d2) / 2.0);
    let at_zero = if d1 == 1.0 { 2.0 * (0.5 * (d1 / d2).ln() - ln_b).exp() } else { 0.0 };
    let g = |s: f64| if s == 0.0 { at_zero } else { 2.0 * s * f_density(s * s, d1, d2) };
    (1.0 - integrate(&g, 0.0, f.sqrt(), 1e-13)).max(0.0)
}

/// Welch t statistic and Welch-Satterthwaite degrees of freedom.
pub fn welch_oracle(a: &[f64], b: &[f64]) -> (f64, f64) {
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let var = |v: &[f64]| {
        let m = mean(v);
        v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() as f64 - 1.0)
    };
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (va, vb) = (var(a) / na, var(b) / nb);
    let t = (mean(a) - mean(b)) / (va + vb).sqrt();
    let df = (va + vb).powi(2) / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
    (t, df)
}

/// `effect_t = 0.5 effect_{t-1} + 0.8 cause_{t-3} + e_t` with white-noise cause.
pub fn var_pair(n: usize, seed: u64) -> (Vec<f64>, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let burn = 100;
    let mut cause = Vec::with_capacity(n + burn);
    let mut effect = Vec::with_capacity(n + burn);
    for t in 0..n + burn {
        cause.push(rng.sample::<f64, _>(StandardNormal));
        let prev = if t >= 1 { effect[t - 1] } else { 0.0 };
        let driven = if t >= 3 { cause[t - 3] } else { 0.0 };
        effect.push(0.5 * prev + 0.8 * driven + rng.sample::<f64, _>(StandardNormal));
    }
    (effect.split_off(burn), cause.split_off(burn))
}

pub fn white_noise_pair(n: usize, seed: u64) -> (Vec<f64>, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = (0..n).map(|_| rng.sample(StandardNormal)).collect();
    let b = (0..n).map(|_| rng.sample(StandardNormal)).collect();
    (a, b)
}

/// Cosine similarity by definition.
pub fn cosine_oracle(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    dot / (na * nb)
}

/// Hit fraction over whitespace words stripped to lowercase alphanumerics,
/// with one extra token in the denominator.
pub fn toxicity_oracle(text: &str, words: &[&str]) -> f64 {
    let tokens: Vec<String> = text
        .split_whitespace()
        .map(|w| w.chars().filter(|c| c.is_alphanumeric()).collect::<String>().to_lowercase())
        .filter(|t| !t.is_empty())
        .collect();
    let hits = tokens.iter().filter(|t| words.contains(&t.as_str())).count();
    hits as f64 / (tokens.len() as f64 + 1.0)
}

pub fn fixture_dir() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/synthetic")
}
