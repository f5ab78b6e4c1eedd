//! Contiguous chronological learn / validation / test partitions.

use std::ops::Range;

use crate::error::{Error, Result};

pub const DEFAULT_TEST_FRAC: f64 = 0.05;
pub const DEFAULT_VAL_FRAC: f64 = 0.10;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitView {
    pub learn: Range<usize>,
    pub validation: Range<usize>,
    pub test: Range<usize>,
}

impl SplitView {
    pub fn len(&self) -> usize {
        self.test.end
    }

    pub fn is_empty(&self) -> bool {
        self.test.end == 0
    }
}

fn check_frac(name: &str, frac: f64) -> Result<()> {
    if !(frac > 0.0 && frac < 1.0) {
        return Err(Error::Config(format!("{name} must lie in (0, 1), got {frac}")));
    }
    Ok(())
}

/// Rounded (half away from zero) size of a fraction of `n`.
pub fn part_size(n: usize, frac: f64) -> usize {
    (n as f64 * frac).round() as usize
}

/// Splits `[0, n)` into learn | validation | test. The test part is the last
/// `round(test_frac * n)` samples, validation the last `round(val_frac * rest)`
/// of the remainder. No shuffling.
pub fn chronological_split(n: usize, test_frac: f64, val_frac: f64) -> Result<SplitView> {
    check_frac("test_frac", test_frac)?;
    check_frac("val_frac", val_frac)?;
    let test = part_size(n, test_frac);
    let rest = n - test.min(n);
    let validation = part_size(rest, val_frac);
    if test == 0 || validation == 0 || validation >= rest {
        return Err(Error::InsufficientLength {
            required: minimum_samples(test_frac, val_frac),
            actual: n,
        });
    }
    Ok(pre_test_split(rest, val_frac, rest..n).expect("sizes checked above"))
}

/// Learn / validation split of `[0, test.start)` followed by the given test range.
pub fn pre_test_split(pre: usize, val_frac: f64, test: Range<usize>) -> Option<SplitView> {
    let validation = part_size(pre, val_frac);
    if validation == 0 || validation >= pre || test.is_empty() || test.start != pre {
        return None;
    }
    let learn_end = pre - validation;
    Some(SplitView {
        learn: 0..learn_end,
        validation: learn_end..pre,
        test,
    })
}

/// Smallest `n` for which every part is non-empty.
pub fn minimum_samples(test_frac: f64, val_frac: f64) -> usize {
    (3..100_000)
        .find(|&n| {
            let test = part_size(n, test_frac);
            let rest = n.saturating_sub(test);
            let val = part_size(rest, val_frac);
            test > 0 && val > 0 && val < rest
        })
        .unwrap_or(usize::MAX)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thousand_samples() {
        let v = chronological_split(1000, 0.05, 0.10).unwrap();
        assert_eq!(v.learn, 0..855);
        assert_eq!(v.validation, 855..950);
        assert_eq!(v.test, 950..1000);
    }

    #[test]
    fn forty_samples_rounding() {
        let v = chronological_split(40, 0.05, 0.10).unwrap();
        assert_eq!(v.test.len(), 2);
        assert_eq!(v.validation.len(), 4);
        assert_eq!(v.learn.len(), 34);
    }

    #[test]
    fn too_small_reports_minimum() {
        let min = minimum_samples(0.05, 0.10);
        assert_eq!(min, 10);
        assert!(chronological_split(min, 0.05, 0.10).is_ok());
        match chronological_split(min - 1, 0.05, 0.10) {
            Err(Error::InsufficientLength { required, actual }) => {
                assert_eq!((required, actual), (min, min - 1))
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn bad_fractions() {
        assert!(chronological_split(100, 0.0, 0.1).is_err());
        assert!(chronological_split(100, 0.1, 1.0).is_err());
    }

    #[test]
    fn partition_property() {
        for n in 10..600 {
            let v = chronological_split(n, 0.05, 0.10).unwrap();
            assert_eq!(v.learn.start, 0);
            assert_eq!(v.learn.end, v.validation.start);
            assert_eq!(v.validation.end, v.test.start);
            assert_eq!(v.test.end, n);
            assert!(!v.learn.is_empty() && !v.validation.is_empty() && !v.test.is_empty());
            assert_eq!(chronological_split(n, 0.05, 0.10).unwrap(), v);
        }
    }
}
