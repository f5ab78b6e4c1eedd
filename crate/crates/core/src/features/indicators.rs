//! Technical indicators over close prices.
//!
//! Each function returns only the defined part of its output: for a window
//! of `n`, element `j` of the result belongs to input index `j + offset`,
//! where the offset is documented per function. Inputs too short for even
//! one value produce an empty vector.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Open-to-close return in percent.
pub fn compute_return<T: Scalar>(open: T, close: T) -> Result<T> {
    if !(open > T::zero()) || !open.is_finite() {
        return Err(Error::Domain(format!("open must be positive, got {open}")));
    }
    Ok((close - open) / open * T::hundred())
}

/// Simple moving average. Offset `n - 1`.
pub fn sma<T: Scalar>(values: &[T], n: usize) -> Vec<T> {
    if n == 0 || values.len() < n {
        return Vec::new();
    }
    let width = T::from_count(n);
    let mut out = Vec::with_capacity(values.len() - n + 1);
    let mut sum: T = values[..n].iter().copied().sum();
    out.push(sum / width);
    for t in n..values.len() {
        sum += values[t] - values[t - n];
        out.push(sum / width);
    }
    out
}

/// Exponential moving average with `alpha = 2 / (n + 1)`, seeded by the SMA of
/// the first `n` values. Offset `n - 1`.
pub fn ema<T: Scalar>(values: &[T], n: usize) -> Vec<T> {
    if n == 0 || values.len() < n {
        return Vec::new();
    }
    let alpha = T::lit(2.0) / T::from_count(n + 1);
    let keep = T::one() - alpha;
    let seed = values[..n].iter().copied().sum::<T>() / T::from_count(n);
    let mut out = Vec::with_capacity(values.len() - n + 1);
    out.push(seed);
    let mut prev = seed;
    for &x in &values[n..] {
        prev = alpha * x + keep * prev;
        out.push(prev);
    }
    out
}

/// Wilder's RSI. Offset `n` (the first value needs `n` price changes).
pub fn rsi<T: Scalar>(closes: &[T], n: usize) -> Vec<T> {
    if n == 0 || closes.len() < n + 1 {
        return Vec::new();
    }
    let width = T::from_count(n);
    let lag = T::from_count(n - 1);
    let mut gain = T::zero();
    let mut loss = T::zero();
    for w in closes[..=n].windows(2) {
        let change = w[1] - w[0];
        if change > T::zero() {
            gain += change;
        } else {
            loss -= change;
        }
    }
    gain /= width;
    loss /= width;

    let mut out = Vec::with_capacity(closes.len() - n);
    out.push(rsi_value(gain, loss));
    for w in closes[n..].windows(2) {
        let change = w[1] - w[0];
        let (up, down) = if change > T::zero() {
            (change, T::zero())
        } else {
            (T::zero(), -change)
        };
        gain = (gain * lag + up) / width;
        loss = (loss * lag + down) / width;
        out.push(rsi_value(gain, loss));
    }
    out
}

fn rsi_value<T: Scalar>(avg_gain: T, avg_loss: T) -> T {
    if avg_loss == T::zero() {
        // flat windows count as fully up
        T::hundred()
    } else if avg_gain == T::zero() {
        T::zero()
    } else {
        let rs = avg_gain / avg_loss;
        let v = T::hundred() - T::hundred() / (T::one() + rs);
        v.max(T::zero()).min(T::hundred())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MacdPeriods {
    pub fast: usize,
    pub slow: usize,
    pub signal: usize,
}

impl Default for MacdPeriods {
    fn default() -> Self {
        MacdPeriods {
            fast: 12,
            slow: 26,
            signal: 9,
        }
    }
}

impl MacdPeriods {
    /// Input index of the first element of every [`MacdSeries`] vector.
    pub fn offset(&self) -> usize {
        self.slow.max(self.fast) + self.signal - 2
    }
}

/// MACD line, signal line and histogram, all aligned on the signal's support.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct MacdSeries<T> {
    pub line: Vec<T>,
    pub signal: Vec<T>,
    pub histogram: Vec<T>,
}

/// Full MACD line (`ema(fast) - ema(slow)` on their common support).
/// Offset `max(fast, slow) - 1`.
pub fn macd_line<T: Scalar>(closes: &[T], periods: MacdPeriods) -> Vec<T> {
    if periods.fast == 0 || periods.slow == 0 {
        return Vec::new();
    }
    let fast = ema(closes, periods.fast);
    let slow = ema(closes, periods.slow);
    if fast.is_empty() || slow.is_empty() {
        return Vec::new();
    }
    let start = periods.fast.max(periods.slow) - 1;
    let fast_skip = start + 1 - periods.fast;
    let slow_skip = start + 1 - periods.slow;
    fast[fast_skip..]
        .iter()
        .zip(&slow[slow_skip..])
        .map(|(f, s)| *f - *s)
        .collect()
}

/// Offset [`MacdPeriods::offset`].
pub fn macd<T: Scalar>(closes: &[T], periods: MacdPeriods) -> MacdSeries<T> {
    let line = macd_line(closes, periods);
    let signal = ema(&line, periods.signal);
    if signal.is_empty() {
        return MacdSeries::default();
    }
    let line: Vec<T> = line[periods.signal - 1..].to_vec();
    let histogram = line.iter().zip(&signal).map(|(m, s)| *m - *s).collect();
    MacdSeries {
        line,
        signal,
        histogram,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn return_examples() {
        let r = compute_return(1199.800049f64, 1205.099976).unwrap();
        assert!((r - 0.44173418766046624).abs() < 1e-12);
        assert_eq!(compute_return(50.0f64, 50.0).unwrap(), 0.0);
        assert_eq!(compute_return(100.0f64, 90.0).unwrap(), -10.0);
        assert!(matches!(compute_return(0.0f64, 1.0), Err(Error::Domain(_))));
        assert!(compute_return(-2.0f64, 1.0).is_err());
    }

    #[test]
    fn sma_examples() {
        assert_eq!(sma(&[1.0f64, 2.0, 3.0, 4.0], 2), vec![1.5, 2.5, 3.5]);
        assert_eq!(sma(&[3.0f64; 6], 4), vec![3.0; 3]);
        assert_eq!(sma(&[1.0f64, 5.0, 2.0], 1), vec![1.0, 5.0, 2.0]);
        assert!(sma(&[1.0f64, 2.0], 3).is_empty());
        assert!(sma(&[1.0f64, 2.0], 0).is_empty());
    }

    #[test]
    fn ema_examples() {
        let e = ema(&[1.0f64, 2.0, 3.0], 2);
        assert_eq!(e.len(), 2);
        assert_eq!(e[0], 1.5);
        assert!((e[1] - 2.5).abs() < 1e-15);
        assert_eq!(ema(&[7.0f64; 10], 4), vec![7.0; 7]);
        assert_eq!(ema(&[1.0f64, -2.0, 9.0], 1), vec![1.0, -2.0, 9.0]);
        assert!(ema(&[1.0f64], 2).is_empty());
    }

    #[test]
    fn rsi_examples() {
        let up: Vec<f64> = (0..30).map(|i| 10.0 + i as f64).collect();
        assert!(rsi(&up, 14).iter().all(|v| *v == 100.0));
        let down: Vec<f64> = up.iter().rev().copied().collect();
        assert!(rsi(&down, 14).iter().all(|v| *v == 0.0));
        let closes = [
            44.0f64, 44.34, 44.09, 44.15, 43.61, 44.33, 44.83, 45.10, 45.42, 45.84, 46.08, 45.89,
            46.03, 45.61, 46.28,
        ];
        let r = rsi(&closes, 14);
        assert_eq!(r.len(), 1);
        // simple averages of the 14 changes, computed independently
        assert!((r[0] - 72.44094488188978).abs() < 1e-9, "{}", r[0]);
        assert!(rsi(&closes[..14], 14).is_empty());
    }

    #[test]
    fn macd_constant_and_ramp() {
        let flat = vec![42.0f64; 80];
        let m = macd(&flat, MacdPeriods::default());
        assert_eq!(m.line.len(), 80 - 33);
        assert!(m.line.iter().chain(&m.signal).chain(&m.histogram).all(|v| *v == 0.0));

        let ramp: Vec<f64> = (0..260).map(|t| t as f64).collect();
        let line = macd_line(&ramp, MacdPeriods::default());
        let last = *line.last().unwrap();
        assert!((last - 7.0).abs() < 1e-6, "{last}");
        assert!(macd(&ramp[..33], MacdPeriods::default()).line.is_empty());
    }

    #[test]
    fn macd_histogram_is_exact_difference() {
        let closes: Vec<f64> = (0..120).map(|t| 100.0 + (t as f64 * 0.37).sin() * 3.0).collect();
        let m = macd(&closes, MacdPeriods::default());
        assert_eq!(m.line.len(), m.signal.len());
        for i in 0..m.line.len() {
            assert_eq!(m.histogram[i], m.line[i] - m.signal[i]);
        }
    }
}
