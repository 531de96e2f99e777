use serde::{Deserialize, Serialize};

use super::LearnError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: usize,
}

/// Support-weighted precision, recall and F1 with the per-class breakdown.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub per_class: [ClassMetrics; 2],
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

fn f1(p: f64, r: f64) -> f64 {
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

/// Labels outside {0, 1} are rejected. A class never predicted has precision 0.
pub fn evaluate(y_true: &[usize], y_pred: &[usize]) -> Result<Metrics, LearnError> {
    if y_true.len() != y_pred.len() {
        return Err(LearnError::LengthMismatch(y_true.len(), y_pred.len()));
    }
    if y_true.is_empty() {
        return Err(LearnError::EmptyInput);
    }
    // confusion[t][p]
    let mut confusion = [[0usize; 2]; 2];
    for (&t, &p) in y_true.iter().zip(y_pred) {
        if t > 1 {
            return Err(LearnError::InvalidLabel(t));
        }
        if p > 1 {
            return Err(LearnError::InvalidLabel(p));
        }
        confusion[t][p] += 1;
    }
    let per_class = [0, 1].map(|k| {
        let tp = confusion[k][k];
        let support = confusion[k][0] + confusion[k][1];
        let predicted = confusion[0][k] + confusion[1][k];
        let precision = ratio(tp, predicted);
        let recall = ratio(tp, support);
        ClassMetrics {
            precision,
            recall,
            f1: f1(precision, recall),
            support,
        }
    });
    let n = y_true.len() as f64;
    let weighted = |get: fn(&ClassMetrics) -> f64| per_class.iter().map(|c| c.support as f64 * get(c)).sum::<f64>() / n;
    Ok(Metrics {
        precision: weighted(|c| c.precision),
        recall: weighted(|c| c.recall),
        f1: weighted(|c| c.f1),
        per_class,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn from_confusion(tp: usize, fn_: usize, fp: usize, tn: usize) -> (Vec<usize>, Vec<usize>) {
        let mut t = Vec::new();
        let mut p = Vec::new();
        for (tv, pv, n) in [(1, 1, tp), (1, 0, fn_), (0, 1, fp), (0, 0, tn)] {
            t.extend(std::iter::repeat_n(tv, n));
            p.extend(std::iter::repeat_n(pv, n));
        }
        (t, p)
    }

    #[test]
    fn perfect() {
        let y = vec![0, 1, 1, 0];
        let m = evaluate(&y, &y).unwrap();
        assert_eq!((m.precision, m.recall, m.f1), (1.0, 1.0, 1.0));
    }

    #[test]
    fn confusion_example() {
        let (t, p) = from_confusion(8, 2, 1, 9);
        let m = evaluate(&t, &p).unwrap();
        let f_pos = 2.0 * (8.0 / 9.0) * 0.8 / (8.0 / 9.0 + 0.8);
        let f_neg = 2.0 * (9.0 / 11.0) * 0.9 / (9.0 / 11.0 + 0.9);
        assert!((m.per_class[1].f1 - f_pos).abs() < 1e-12);
        assert!((m.per_class[0].f1 - f_neg).abs() < 1e-12);
        assert_eq!(format!("{:.4} {:.4} {:.4}", f_pos, f_neg, m.f1), "0.8421 0.8571 0.8496");
    }

    #[test]
    fn constant_prediction_on_balanced_data() {
        let m = evaluate(&[0, 0, 1, 1], &[1, 1, 1, 1]).unwrap();
        assert_eq!(m.recall, 0.5);
        assert_eq!(m.per_class[0].precision, 0.0);
        assert_eq!(m.per_class[0].f1, 0.0);
    }

    #[test]
    fn errors() {
        assert_eq!(evaluate(&[0], &[]), Err(LearnError::LengthMismatch(1, 0)));
        assert_eq!(evaluate(&[], &[]), Err(LearnError::EmptyInput));
    }
}
