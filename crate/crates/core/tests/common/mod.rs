#![allow(dead_code)]

use std::path::Path;

use chrono::NaiveDate;
use pairsel::data::{InstrumentSource, SyntheticKind, SyntheticSpec};
use pairsel::models::{Matrix, ModelKind};
use pairsel::pipeline::RunConfig;
use pairsel::seeding::derive_seed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const PLANTED_KINDS: [ModelKind; 4] = [
    ModelKind::LogisticRegression,
    ModelKind::DecisionTree,
    ModelKind::KNeighbors,
    ModelKind::GaussianNB,
];

pub fn is_predictable(symbol: &str) -> bool {
    symbol.starts_with("PERS")
}

/// Three persistent-sign (p = 0.65) and three random-walk instruments.
pub fn planted_config(seed: u64, length: usize, out: &Path) -> RunConfig {
    let mut cfg = RunConfig {
        seed: Some(seed),
        ..RunConfig::default()
    };
    for i in 1..=3 {
        for (kind, prefix) in [(SyntheticKind::PersistentSign, "PERS"), (SyntheticKind::RandomWalk, "RW")] {
            let symbol = format!("{prefix}{i}");
            cfg.instruments.push(InstrumentSource::synthetic(
                &symbol,
                SyntheticSpec {
                    kind,
                    ..SyntheticSpec::persistent(length, 0.65, derive_seed(seed, "synthetic", &symbol))
                },
            ));
        }
    }
    cfg.pipeline.enabled_kinds = PLANTED_KINDS.to_vec();
    cfg.pipeline.out = Some(out.to_path_buf());
    cfg
}

pub fn date(y: i32, m: u32, d: u32) -> NaiveDate {
    NaiveDate::from_ymd_opt(y, m, d).unwrap()
}

/// Positive random-walk closes of length `n`.
pub fn random_prices(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let mut p = 100.0;
    (0..n)
        .map(|_| {
            p *= 1.0 + rng.random_range(-0.03..0.03);
            p
        })
        .collect()
}

/// 400 points in [-1, 1]^2 labeled by `x0 + 0.5 x1 > 0`, none closer than
/// `margin` to the boundary.
pub fn separable_2d(seed: u64, margin: f64) -> (Matrix<f64>, Vec<u8>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::new();
    let mut y = Vec::new();
    while rows.len() < 400 {
        let a: f64 = rng.random_range(-1.0..1.0);
        let b: f64 = rng.random_range(-1.0..1.0);
        let s = a + 0.5 * b;
        if s.abs() < margin {
            continue;
        }
        rows.push([a, b]);
        y.push(u8::from(s > 0.0));
    }
    (Matrix::from_rows(rows), y)
}

/// Every file under `dir`, as (relative path, bytes), sorted.
pub fn snapshot_dir(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in std::fs::read_dir(&d).unwrap() {
            let p = entry.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                let rel = p.strip_prefix(dir).unwrap().to_string_lossy().into_owned();
                out.push((rel, std::fs::read(&p).unwrap()));
            }
        }
    }
    out.sort();
    out
}
