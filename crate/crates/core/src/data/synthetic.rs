//! Seeded synthetic price series used as test data with a known signal.
//!
//! `PersistentSign` series repeat the sign of the previous day's open-to-close
//! return with probability `persistence`, which makes the next-day direction
//! predictable from today's return. `RandomWalk` series draw every sign from a
//! fair coin and carry no directional signal at all.

use chrono::{Datelike, Duration, NaiveDate, Weekday};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{InstrumentId, OhlcvBar, PriceSeries};
use crate::error::{Error, Result};
use crate::features::DEFAULT_WARMUP;
use crate::scalar::Scalar;

pub const MIN_SYNTHETIC_LENGTH: usize = DEFAULT_WARMUP + 100;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SyntheticKind {
    PersistentSign,
    RandomWalk,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub kind: SyntheticKind,
    pub length: usize,
    /// Probability that a day's return has the same sign as the previous one.
    /// Ignored for `RandomWalk`.
    #[serde(default = "default_persistence")]
    pub persistence: f64,
    /// Scale of the absolute daily return, in percent.
    #[serde(default = "default_volatility")]
    pub volatility_pct: f64,
    pub seed: u64,
    #[serde(default = "default_start")]
    pub start_date: NaiveDate,
}

fn default_persistence() -> f64 {
    0.5
}

fn default_volatility() -> f64 {
    1.0
}

fn default_start() -> NaiveDate {
    NaiveDate::from_ymd_opt(2010, 1, 4).expect("valid date")
}

impl SyntheticSpec {
    pub fn persistent(length: usize, persistence: f64, seed: u64) -> Self {
        SyntheticSpec {
            kind: SyntheticKind::PersistentSign,
            length,
            persistence,
            volatility_pct: default_volatility(),
            seed,
            start_date: default_start(),
        }
    }

    pub fn random_walk(length: usize, seed: u64) -> Self {
        SyntheticSpec {
            kind: SyntheticKind::RandomWalk,
            length,
            persistence: 0.5,
            volatility_pct: default_volatility(),
            seed,
            start_date: default_start(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.persistence) {
            return Err(Error::Config(format!(
                "persistence must lie in [0, 1], got {}",
                self.persistence
            )));
        }
        if !(self.volatility_pct > 0.0 && self.volatility_pct <= 10.0) {
            return Err(Error::Config(format!(
                "volatility_pct must lie in (0, 10], got {}",
                self.volatility_pct
            )));
        }
        if self.length < MIN_SYNTHETIC_LENGTH {
            return Err(Error::Config(format!(
                "synthetic length must be at least {MIN_SYNTHETIC_LENGTH}, got {}",
                self.length
            )));
        }
        Ok(())
    }
}

fn next_business_day(d: NaiveDate) -> NaiveDate {
    let mut next = d + Duration::days(1);
    while matches!(next.weekday(), Weekday::Sat | Weekday::Sun) {
        next += Duration::days(1);
    }
    next
}

/// Deterministic in `(spec, instrument)`: the seed alone drives the generator.
pub fn generate_synthetic_series<T: Scalar>(
    spec: &SyntheticSpec,
    instrument: InstrumentId,
) -> Result<PriceSeries<T>> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let mut date = spec.start_date;
    while matches!(date.weekday(), Weekday::Sat | Weekday::Sun) {
        date = next_business_day(date);
    }

    let vol = spec.volatility_pct;
    let mut sign_up: bool = rng.random_bool(0.5);
    let mut open = 100.0f64;
    let mut bars = Vec::with_capacity(spec.length);

    for day in 0..spec.length {
        if day > 0 {
            sign_up = match spec.kind {
                SyntheticKind::PersistentSign => {
                    if rng.random_bool(spec.persistence) {
                        sign_up
                    } else {
                        !sign_up
                    }
                }
                SyntheticKind::RandomWalk => rng.random_bool(0.5),
            };
        }
        let z: f64 = StandardNormal.sample(&mut rng);
        let magnitude = (vol * z.abs()).clamp(vol * 1e-3, (8.0 * vol).min(50.0));
        let ret = if sign_up { magnitude } else { -magnitude };
        let close = open * (1.0 + ret / 100.0);

        let wick = vol / 100.0 * (1e-2 + 0.5 * rng.random::<f64>());
        let high = open.max(close) * (1.0 + wick);
        let low = open.min(close) * (1.0 - wick);
        let volume = rng.random_range(10_000u64..1_000_000);

        bars.push(OhlcvBar {
            date,
            open: T::lit(open),
            high: T::lit(high),
            low: T::lit(low),
            close: T::lit(close),
            adj_close: T::lit(close),
            volume,
        });
        open = close;
        date = next_business_day(date);
    }
    PriceSeries::new(instrument, bars)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::serialize_ohlcv_csv;

    fn returns(s: &PriceSeries<f64>) -> Vec<f64> {
        s.bars().iter().map(|b| (b.close - b.open) / b.open * 100.0).collect()
    }

    fn measured_persistence(rets: &[f64]) -> f64 {
        let agree = rets.windows(2).filter(|w| (w[0] > 0.0) == (w[1] > 0.0)).count();
        agree as f64 / (rets.len() - 1) as f64
    }

    fn id() -> InstrumentId {
        InstrumentId::new("SYN").unwrap()
    }

    #[test]
    fn full_persistence_keeps_first_sign() {
        let s: PriceSeries<f64> =
            generate_synthetic_series(&SyntheticSpec::persistent(500, 1.0, 3), id()).unwrap();
        let rets = returns(&s);
        let first = rets[0] > 0.0;
        assert!(rets.iter().all(|r| (*r > 0.0) == first));
        assert!(rets.iter().all(|r| *r != 0.0));
    }

    #[test]
    fn persistence_converges_to_requested_probability() {
        for seed in 0..5 {
            let s: PriceSeries<f64> =
                generate_synthetic_series(&SyntheticSpec::persistent(5000, 0.65, seed), id())
                    .unwrap();
            let p = measured_persistence(&returns(&s));
            assert!((0.62..=0.68).contains(&p), "seed {seed}: {p}");
        }
        let rw: PriceSeries<f64> =
            generate_synthetic_series(&SyntheticSpec::random_walk(5000, 9), id()).unwrap();
        let p = measured_persistence(&returns(&rw));
        assert!((0.46..=0.54).contains(&p), "{p}");
    }

    #[test]
    fn same_seed_gives_identical_bytes() {
        let spec = SyntheticSpec::persistent(300, 0.7, 11);
        let a: PriceSeries<f64> = generate_synthetic_series(&spec, id()).unwrap();
        let b: PriceSeries<f64> = generate_synthetic_series(&spec, id()).unwrap();
        assert_eq!(serialize_ohlcv_csv(&a), serialize_ohlcv_csv(&b));
        let other: PriceSeries<f64> =
            generate_synthetic_series(&SyntheticSpec { seed: 12, ..spec }, id()).unwrap();
        assert_ne!(serialize_ohlcv_csv(&a), serialize_ohlcv_csv(&other));
    }

    #[test]
    fn bars_are_valid_and_on_business_days() {
        let s: PriceSeries<f32> =
            generate_synthetic_series(&SyntheticSpec::random_walk(400, 1), id()).unwrap();
        for b in s.bars() {
            b.validate().unwrap();
            assert!(!matches!(b.date.weekday(), Weekday::Sat | Weekday::Sun));
            assert!(b.high > b.open.max(b.close));
            assert!(b.low < b.open.min(b.close));
        }
    }

    #[test]
    fn invalid_specs_are_rejected() {
        let mut spec = SyntheticSpec::persistent(500, 1.2, 0);
        assert!(matches!(
            generate_synthetic_series::<f64>(&spec, id()),
            Err(Error::Config(_))
        ));
        spec.persistence = 0.6;
        spec.length = 50;
        assert!(generate_synthetic_series::<f64>(&spec, id()).is_err());
        spec.length = 500;
        spec.volatility_pct = 0.0;
        assert!(generate_synthetic_series::<f64>(&spec, id()).is_err());
    }
}
