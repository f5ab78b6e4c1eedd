use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ConfusionCounts {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    pub fn_: usize,
}

impl ConfusionCounts {
    pub fn from_predictions(predictions: &[u8], labels: &[u8]) -> Result<Self> {
        check_lengths(predictions.len(), labels.len())?;
        let mut c = ConfusionCounts::default();
        for (&p, &t) in predictions.iter().zip(labels) {
            match (p == 1, t == 1) {
                (true, true) => c.tp += 1,
                (true, false) => c.fp += 1,
                (false, false) => c.tn += 1,
                (false, true) => c.fn_ += 1,
            }
        }
        Ok(c)
    }

    pub fn total(&self) -> usize {
        self.tp + self.fp + self.tn + self.fn_
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConfusionMetrics<T> {
    pub accuracy: T,
    pub precision: T,
    pub recall: T,
    pub f1: T,
}

fn check_lengths(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::LengthMismatch { left: a, right: b });
    }
    if a == 0 {
        return Err(Error::InsufficientLength {
            required: 1,
            actual: 0,
        });
    }
    Ok(())
}

/// `num / den`, or zero when the denominator vanishes.
fn ratio<T: Scalar>(num: usize, den: usize) -> T {
    if den == 0 {
        T::zero()
    } else {
        T::from_count(num) / T::from_count(den)
    }
}

/// Accuracy, precision, recall and F1 with class 1 as the positive class.
/// Undefined ratios (0/0) are reported as 0.
pub fn confusion_metrics<T: Scalar>(predictions: &[u8], labels: &[u8]) -> Result<ConfusionMetrics<T>> {
    let c = ConfusionCounts::from_predictions(predictions, labels)?;
    let precision: T = ratio(c.tp, c.tp + c.fp);
    let recall: T = ratio(c.tp, c.tp + c.fn_);
    let f1 = if precision + recall > T::zero() {
        T::lit(2.0) * precision * recall / (precision + recall)
    } else {
        T::zero()
    };
    Ok(ConfusionMetrics {
        accuracy: ratio(c.tp + c.tn, c.total()),
        precision,
        recall,
        f1,
    })
}

fn require_both_classes(labels: &[u8]) -> Result<(usize, usize)> {
    let pos = labels.iter().filter(|&&l| l == 1).count();
    let neg = labels.len() - pos;
    if pos == 0 || neg == 0 {
        return Err(Error::DegenerateLabels(format!(
            "window of {} labels has a single class",
            labels.len()
        )));
    }
    Ok((pos, neg))
}

/// Balanced accuracy: the mean of the two per-class recalls. Any constant
/// predictor scores exactly 0.5.
pub fn normalized_acc<T: Scalar>(predictions: &[u8], labels: &[u8]) -> Result<T> {
    check_lengths(predictions.len(), labels.len())?;
    require_both_classes(labels)?;
    let c = ConfusionCounts::from_predictions(predictions, labels)?;
    let tpr: T = ratio(c.tp, c.tp + c.fn_);
    let tnr: T = ratio(c.tn, c.tn + c.fp);
    Ok((tpr + tnr) / T::lit(2.0))
}

/// Share of predictions equal to 1.
pub fn pred_pos_rate<T: Scalar>(predictions: &[u8]) -> T {
    ratio(predictions.iter().filter(|&&p| p == 1).count(), predictions.len())
}

/// Area under the ROC curve as the Mann-Whitney statistic: the probability
/// that a random positive outscores a random negative, ties counting one half.
pub fn auc<T: Scalar>(scores: &[T], labels: &[u8]) -> Result<T> {
    check_lengths(scores.len(), labels.len())?;
    let (pos, neg) = require_both_classes(labels)?;
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(Error::NonFinite);
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].partial_cmp(&scores[b]).unwrap_or(Ordering::Equal));

    // average 1-based ranks over tie groups, summed for positives (doubled to stay integral)
    let mut rank_sum_x2: u128 = 0;
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && scores[order[end]] == scores[order[start]] {
            end += 1;
        }
        let doubled_avg_rank = (start + 1 + end) as u128;
        let positives_in_group = order[start..end].iter().filter(|&&i| labels[i] == 1).count() as u128;
        rank_sum_x2 += doubled_avg_rank * positives_in_group;
        start = end;
    }
    let pos_u = pos as u128;
    // U = R_pos - pos(pos+1)/2, kept doubled
    let u_x2 = rank_sum_x2 - pos_u * (pos_u + 1);
    Ok(T::from_u128(u_x2).unwrap() / (T::lit(2.0) * T::from_count(pos) * T::from_count(neg)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_predictor() {
        let y = [1u8, 0, 1, 1, 0];
        let m: ConfusionMetrics<f64> = confusion_metrics(&y, &y).unwrap();
        assert_eq!((m.accuracy, m.precision, m.recall, m.f1), (1.0, 1.0, 1.0, 1.0));
        assert_eq!(normalized_acc::<f64>(&y, &y).unwrap(), 1.0);
    }

    #[test]
    fn all_zero_predictor() {
        let y = [1u8, 0, 1, 0];
        let m: ConfusionMetrics<f64> = confusion_metrics(&[0; 4], &y).unwrap();
        assert_eq!((m.accuracy, m.precision, m.recall, m.f1), (0.5, 0.0, 0.0, 0.0));
    }

    #[test]
    fn hand_confusion_matrix() {
        let m: ConfusionMetrics<f64> = confusion_metrics(&[1, 0, 1, 1], &[1, 0, 0, 1]).unwrap();
        assert_eq!(m.accuracy, 0.75);
        assert!((m.precision - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(m.recall, 1.0);
        assert!((m.f1 - 0.8).abs() < 1e-15);
    }

    #[test]
    fn length_mismatch_errors() {
        assert!(matches!(
            confusion_metrics::<f64>(&[1, 0], &[1]),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(confusion_metrics::<f64>(&[], &[]).is_err());
    }

    #[test]
    fn always_long_on_imbalanced_labels() {
        let labels: Vec<u8> = (0..100).map(|i| u8::from(i % 10 != 0)).collect();
        let preds = vec![1u8; 100];
        let m: ConfusionMetrics<f64> = confusion_metrics(&preds, &labels).unwrap();
        assert!((m.accuracy - 0.9).abs() < 1e-15);
        assert_eq!(normalized_acc::<f64>(&preds, &labels).unwrap(), 0.5);
        assert_eq!(pred_pos_rate::<f64>(&preds), 1.0);
    }

    #[test]
    fn normalized_acc_needs_both_classes() {
        assert!(matches!(
            normalized_acc::<f64>(&[1, 0], &[1, 1]),
            Err(Error::DegenerateLabels(_))
        ));
    }

    #[test]
    fn auc_examples() {
        assert_eq!(auc(&[0.1f64, 0.4, 0.35, 0.8], &[0, 0, 1, 1]).unwrap(), 0.75);
        assert_eq!(auc(&[0.1f64, 0.2, 0.7, 0.9], &[0, 0, 1, 1]).unwrap(), 1.0);
        assert_eq!(auc(&[0.3f64; 6], &[0, 1, 0, 1, 1, 0]).unwrap(), 0.5);
        assert!(auc(&[0.3f64, 0.2], &[1, 1]).is_err());
    }
}
