use super::LearnError;

/// Feature rows with binary labels and per-class sample weights.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    rows: Vec<Vec<f64>>,
    labels: Vec<usize>,
    feature_names: Vec<String>,
    class_weights: [f64; 2],
}

impl Dataset {
    /// Validates shape and finiteness. Class weights default to balanced
    /// inverse frequency, or 1.0 each if only one class is present.
    pub fn new(rows: Vec<Vec<f64>>, labels: Vec<usize>, feature_names: Vec<String>) -> Result<Self, LearnError> {
        if rows.len() != labels.len() {
            return Err(LearnError::LengthMismatch(rows.len(), labels.len()));
        }
        if rows.is_empty() {
            return Err(LearnError::EmptyInput);
        }
        let d = feature_names.len();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != d {
                return Err(LearnError::DimensionMismatch {
                    expected: d,
                    got: row.len(),
                });
            }
            if let Some(j) = row.iter().position(|v| !v.is_finite()) {
                return Err(LearnError::NonFinite { row: i, feature: j });
            }
        }
        if let Some(&bad) = labels.iter().find(|&&l| l > 1) {
            return Err(LearnError::InvalidLabel(bad));
        }
        let class_weights = class_weights(&labels).unwrap_or([1.0, 1.0]);
        Ok(Dataset {
            rows,
            labels,
            feature_names,
            class_weights,
        })
    }

    pub fn with_class_weights(mut self, weights: [f64; 2]) -> Self {
        self.class_weights = weights;
        self
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn class_weights(&self) -> [f64; 2] {
        self.class_weights
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn sample_weight(&self, i: usize) -> f64 {
        self.class_weights[self.labels[i]]
    }

    pub fn class_counts(&self) -> [usize; 2] {
        let mut c = [0; 2];
        for &l in &self.labels {
            c[l] += 1;
        }
        c
    }

    /// Rows at `indices`, with balanced weights recomputed for the subset.
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        let labels: Vec<usize> = indices.iter().map(|&i| self.labels[i]).collect();
        Dataset {
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
            class_weights: class_weights(&labels).unwrap_or([1.0, 1.0]),
            labels,
            feature_names: self.feature_names.clone(),
        }
    }

    /// Same features with replacement labels.
    pub fn with_labels(&self, labels: Vec<usize>) -> Result<Dataset, LearnError> {
        Dataset::new(self.rows.clone(), labels, self.feature_names.clone())
    }
}

/// Balanced weights `n / (2 * count_k)`.
pub fn class_weights(labels: &[usize]) -> Result<[f64; 2], LearnError> {
    let mut counts = [0usize; 2];
    for &l in labels {
        if l > 1 {
            return Err(LearnError::InvalidLabel(l));
        }
        counts[l] += 1;
    }
    if counts[0] == 0 || counts[1] == 0 {
        return Err(LearnError::SingleClass);
    }
    let n = labels.len() as f64;
    Ok([n / (2.0 * counts[0] as f64), n / (2.0 * counts[1] as f64)])
}
