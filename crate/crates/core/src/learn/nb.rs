use serde::{Deserialize, Serialize};

use super::{Dataset, LearnError};

pub const VARIANCE_FLOOR: f64 = 1e-9;

/// Gaussian naive Bayes with sample-weighted priors, means and variances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianNb {
    pub log_prior: [f64; 2],
    pub mean: [Vec<f64>; 2],
    pub var: [Vec<f64>; 2],
}

impl GaussianNb {
    pub fn fit(data: &Dataset) -> Result<Self, LearnError> {
        let counts = data.class_counts();
        if counts[0] == 0 || counts[1] == 0 {
            return Err(LearnError::SingleClass);
        }
        let d = data.n_features();
        let mut wsum = [0.0f64; 2];
        let mut mean = [vec![0.0; d], vec![0.0; d]];
        for (i, row) in data.rows().iter().enumerate() {
            let k = data.labels()[i];
            let w = data.sample_weight(i);
            wsum[k] += w;
            for (m, &x) in mean[k].iter_mut().zip(row) {
                *m += w * x;
            }
        }
        for k in 0..2 {
            mean[k].iter_mut().for_each(|m| *m /= wsum[k]);
        }
        let mut var = [vec![0.0; d], vec![0.0; d]];
        for (i, row) in data.rows().iter().enumerate() {
            let k = data.labels()[i];
            let w = data.sample_weight(i);
            for j in 0..d {
                let dx = row[j] - mean[k][j];
                var[k][j] += w * dx * dx;
            }
        }
        for k in 0..2 {
            var[k].iter_mut().for_each(|v| *v = (*v / wsum[k]).max(VARIANCE_FLOOR));
        }
        let total = wsum[0] + wsum[1];
        Ok(GaussianNb {
            log_prior: [(wsum[0] / total).ln(), (wsum[1] / total).ln()],
            mean,
            var,
        })
    }

    fn joint_log_likelihood(&self, x: &[f64]) -> [f64; 2] {
        [0, 1].map(|k| {
            self.log_prior[k]
                + x.iter()
                    .zip(&self.mean[k])
                    .zip(&self.var[k])
                    .map(|((&xi, &m), &v)| -0.5 * ((2.0 * std::f64::consts::PI * v).ln() + (xi - m) * (xi - m) / v))
                    .sum::<f64>()
        })
    }

    /// Probability of class 1.
    pub fn predict_proba(&self, x: &[f64]) -> f64 {
        let [a, b] = self.joint_log_likelihood(x);
        1.0 / (1.0 + (a - b).exp())
    }

    /// Ties go to class 0.
    pub fn predict_one(&self, x: &[f64]) -> usize {
        let [a, b] = self.joint_log_likelihood(x);
        usize::from(b > a)
    }

    pub fn predict(&self, rows: &[Vec<f64>]) -> Vec<usize> {
        rows.iter().map(|x| self.predict_one(x)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn separates_clusters_and_floors_constant_features() {
        let rows: Vec<Vec<f64>> = (0..40)
            .map(|i| {
                let c = if i < 20 { 0.0 } else { 10.0 };
                vec![c + (i % 5) as f64 * 0.1, 3.0]
            })
            .collect();
        let labels: Vec<usize> = (0..40).map(|i| usize::from(i >= 20)).collect();
        let ds = Dataset::new(rows, labels.clone(), vec!["x".into(), "c".into()]).unwrap();
        let nb = GaussianNb::fit(&ds).unwrap();
        assert_eq!(nb.var[0][1], VARIANCE_FLOOR);
        assert_eq!(nb.predict(ds.rows()), labels);
        assert!(nb.predict_proba(&[10.0, 3.0]) > 0.99);
    }

    #[test]
    fn single_class_rejected() {
        let ds = Dataset::new(vec![vec![1.0], vec![2.0]], vec![1, 1], vec!["x".into()]).unwrap();
        assert_eq!(GaussianNb::fit(&ds), Err(LearnError::SingleClass));
    }
}
