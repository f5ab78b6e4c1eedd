use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// How a 0-prediction is traded.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DownPosition {
    /// Short the open-to-close move.
    Short,
    /// Stay out of the market.
    Flat,
}

impl DownPosition {
    pub fn from_short_flag(short_on_down: bool) -> Self {
        if short_on_down {
            DownPosition::Short
        } else {
            DownPosition::Flat
        }
    }
}

fn check_returns<T: Scalar>(returns: &[T]) -> Result<()> {
    for r in returns {
        if !r.is_finite() {
            return Err(Error::NonFinite);
        }
        if r.abs() >= T::hundred() {
            return Err(Error::Domain(format!("daily return of {r}% is impossible")));
        }
    }
    Ok(())
}

/// Per-day strategy returns in percent: `+r` when long, `-r` (or 0) otherwise.
pub fn strategy_returns<T: Scalar>(predictions: &[u8], returns: &[T], down: DownPosition) -> Result<Vec<T>> {
    if predictions.len() != returns.len() {
        return Err(Error::LengthMismatch {
            left: predictions.len(),
            right: returns.len(),
        });
    }
    check_returns(returns)?;
    Ok(predictions
        .iter()
        .zip(returns)
        .map(|(&p, &r)| match (p == 1, down) {
            (true, _) => r,
            (false, DownPosition::Short) => -r,
            (false, DownPosition::Flat) => T::zero(),
        })
        .collect())
}

/// Compounded total in percent: `(Π(1 + r/100) - 1) * 100`.
pub fn compound<T: Scalar>(daily_pct: &[T]) -> T {
    let growth = daily_pct
        .iter()
        .fold(T::one(), |acc, r| acc * (T::one() + *r / T::hundred()));
    (growth - T::one()) * T::hundred()
}

/// Running compounded return after each day, in percent.
pub fn cumulative<T: Scalar>(daily_pct: &[T]) -> Vec<T> {
    let mut growth = T::one();
    daily_pct
        .iter()
        .map(|r| {
            growth *= T::one() + *r / T::hundred();
            (growth - T::one()) * T::hundred()
        })
        .collect()
}

pub fn backtest<T: Scalar>(predictions: &[u8], returns: &[T], down: DownPosition) -> Result<T> {
    Ok(compound(&strategy_returns(predictions, returns, down)?))
}

/// Always-long baseline over the same returns.
pub fn nnp<T: Scalar>(returns: &[T]) -> Result<T> {
    if returns.is_empty() {
        return Err(Error::InsufficientLength {
            required: 1,
            actual: 0,
        });
    }
    check_returns(returns)?;
    Ok(compound(returns))
}
