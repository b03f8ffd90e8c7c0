//! Precision, recall and F1 with outliers as the positive class.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default tolerance, in timesteps, for [`windowed_prf`].
pub const DEFAULT_WINDOW: u64 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    /// Set when precision or recall had a zero denominator and was taken as 0.
    pub degenerate: bool,
}

impl EvalResult {
    pub fn from_counts(tp: usize, fp: usize, fn_: usize) -> Self {
        let ratio = |num: usize, den: usize| if den == 0 { 0.0 } else { num as f64 / den as f64 };
        let precision = ratio(tp, tp + fp);
        let recall = ratio(tp, tp + fn_);
        let f1 = if precision + recall > 0.0 { 2.0 * precision * recall / (precision + recall) } else { 0.0 };
        Self { precision, recall, f1, tp, fp, fn_, degenerate: tp + fp == 0 || tp + fn_ == 0 }
    }
}

/// Pointwise comparison; `true` marks an outlier.
pub fn prf(pred: &[bool], truth: &[bool]) -> Result<EvalResult> {
    if pred.len() != truth.len() {
        return Err(Error::usage(format!("{} predictions for {} labels", pred.len(), truth.len())));
    }
    let (mut tp, mut fp, mut fn_) = (0, 0, 0);
    for (&p, &t) in pred.iter().zip(truth) {
        match (p, t) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fn_ += 1,
            (false, false) => {}
        }
    }
    Ok(EvalResult::from_counts(tp, fp, fn_))
}

fn check_sorted(name: &str, times: &[i64]) -> Result<()> {
    if times.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::usage(format!("{name} times are not sorted")));
    }
    Ok(())
}

/// One-to-one matching of alarm times to true anomaly times. Predictions are
/// taken in time order and each claims the earliest unmatched truth within
/// `window`. For equal-width windows this greedy matching is maximum, so
/// true positives never decrease as the window grows.
pub fn windowed_prf(pred_times: &[i64], truth_times: &[i64], window: u64) -> Result<EvalResult> {
    check_sorted("prediction", pred_times)?;
    check_sorted("truth", truth_times)?;
    let w = i128::from(window);
    let mut j = 0;
    let mut tp = 0;
    for &p in pred_times {
        let p = i128::from(p);
        while j < truth_times.len() && i128::from(truth_times[j]) < p - w {
            j += 1;
        }
        if j < truth_times.len() && i128::from(truth_times[j]) <= p + w {
            tp += 1;
            j += 1;
        }
    }
    Ok(EvalResult::from_counts(tp, pred_times.len() - tp, truth_times.len() - tp))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn prf_fixtures() {
        let truth = [true, false, true, false];
        let r = prf(&truth, &truth).unwrap();
        assert_eq!((r.precision, r.recall, r.f1, r.degenerate), (1.0, 1.0, 1.0, false));
        let r = prf(&[false; 4], &truth).unwrap();
        assert_eq!((r.precision, r.recall, r.f1, r.degenerate), (0.0, 0.0, 0.0, true));
        assert!(matches!(prf(&[true], &[]), Err(Error::Usage(_))));
    }

    #[test]
    fn hand_counts() {
        // tp=2, fp=1, fn=2
        let pred = [true, true, true, false, false];
        let truth = [true, true, false, true, true];
        let r = prf(&pred, &truth).unwrap();
        assert_eq!((r.tp, r.fp, r.fn_), (2, 1, 2));
        assert!((r.precision - 2.0 / 3.0).abs() < 1e-15);
        assert!((r.recall - 0.5).abs() < 1e-15);
        assert!((r.f1 - 4.0 / 7.0).abs() < 1e-15);
    }

    #[test]
    fn windowed_fixtures() {
        let r = windowed_prf(&[10], &[12], 2).unwrap();
        assert_eq!((r.tp, r.fp, r.fn_, r.f1), (1, 0, 0, 1.0));
        let r = windowed_prf(&[10, 11], &[12], 2).unwrap();
        assert_eq!((r.tp, r.fp, r.fn_), (1, 1, 0));
        assert!((r.precision - 0.5).abs() < 1e-15 && (r.f1 - 2.0 / 3.0).abs() < 1e-15);
        assert!(matches!(windowed_prf(&[3, 1], &[1], 0), Err(Error::Usage(_))));
        assert!(matches!(windowed_prf(&[1], &[3, 1], 0), Err(Error::Usage(_))));
    }

    fn times() -> impl Strategy<Value = Vec<i64>> {
        proptest::collection::btree_set(0i64..60, 0..20).prop_map(|s| s.into_iter().collect())
    }

    proptest! {
        #[test]
        fn zero_window_matches_pointwise(pred in times(), truth in times()) {
            let as_labels = |t: &[i64]| (0..60).map(|i| t.contains(&i)).collect::<Vec<_>>();
            let a = windowed_prf(&pred, &truth, 0).unwrap();
            let b = prf(&as_labels(&pred), &as_labels(&truth)).unwrap();
            prop_assert_eq!(a, b);
        }

        #[test]
        fn wider_window_never_loses_matches(pred in times(), truth in times(), w in 0u64..10, extra in 0u64..10) {
            let narrow = windowed_prf(&pred, &truth, w).unwrap();
            let wide = windowed_prf(&pred, &truth, w + extra).unwrap();
            prop_assert!(wide.tp >= narrow.tp);
        }

        #[test]
        fn f1_zero_iff_no_true_positive(tp in 0usize..20, fp in 0usize..20, fn_ in 0usize..20) {
            let r = EvalResult::from_counts(tp, fp, fn_);
            prop_assert_eq!(r.f1 == 0.0, tp == 0);
            let swapped = EvalResult::from_counts(tp, fn_, fp);
            prop_assert!((r.f1 - swapped.f1).abs() < 1e-15);
            prop_assert!((0.0..=1.0).contains(&r.f1));
        }
    }
}
