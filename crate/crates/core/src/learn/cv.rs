use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{evaluate, Dataset, ForestParams, GaussianNb, LearnError, Metrics, Model, RandomForest};
use crate::parallel;

/// Splits indices into `k` folds, stratified by label.
///
/// Each class's indices are shuffled and dealt round-robin; the starting fold
/// for a class continues where the previous class stopped, so fold sizes
/// differ by at most one. Every fold is returned in ascending order.
pub fn stratified_kfold(labels: &[usize], k: usize, seed: u64) -> Result<Vec<Vec<usize>>, LearnError> {
    if k < 2 {
        return Err(LearnError::InvalidK(k));
    }
    if labels.is_empty() {
        return Err(LearnError::EmptyInput);
    }
    let n_classes = labels.iter().max().map_or(0, |&m| m + 1);
    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); n_classes];
    for (i, &l) in labels.iter().enumerate() {
        by_class[l].push(i);
    }
    for (class, members) in by_class.iter().enumerate() {
        if !members.is_empty() && members.len() < k {
            return Err(LearnError::TooFewSamplesPerClass {
                class,
                count: members.len(),
                k,
            });
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut folds = vec![Vec::new(); k];
    let mut offset = 0;
    for mut members in by_class {
        members.shuffle(&mut rng);
        for (j, idx) in members.iter().enumerate() {
            folds[(offset + j) % k].push(*idx);
        }
        offset = (offset + members.len()) % k;
    }
    folds.iter_mut().for_each(|f| f.sort_unstable());
    Ok(folds)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "classifier", rename_all = "snake_case")]
pub enum ModelSpec {
    NaiveBayes,
    Forest(ForestParams),
}

impl ModelSpec {
    pub fn name(&self) -> &'static str {
        match self {
            ModelSpec::NaiveBayes => "naive_bayes",
            ModelSpec::Forest(_) => "random_forest",
        }
    }

    pub fn fit(&self, data: &Dataset) -> Result<Model, LearnError> {
        Ok(match self {
            ModelSpec::NaiveBayes => Model::NaiveBayes(GaussianNb::fit(data)?),
            ModelSpec::Forest(p) => Model::Forest(RandomForest::fit(data, p)?),
        })
    }

    /// The spec used for fold `fold`: forests get a per-fold seed.
    fn for_fold(&self, fold: usize) -> ModelSpec {
        match *self {
            ModelSpec::NaiveBayes => ModelSpec::NaiveBayes,
            ModelSpec::Forest(p) => ModelSpec::Forest(ForestParams {
                seed: p.seed.wrapping_add(fold as u64),
                ..p
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvReport {
    pub classifier: String,
    pub folds: Vec<Metrics>,
    pub mean: Summary,
    /// Population standard deviation over folds.
    pub std: Summary,
}

impl CvReport {
    fn from_folds(classifier: &str, folds: Vec<Metrics>) -> Self {
        let n = folds.len() as f64;
        let stat = |get: fn(&Metrics) -> f64| {
            let mean = folds.iter().map(get).sum::<f64>() / n;
            let var = folds.iter().map(|m| (get(m) - mean).powi(2)).sum::<f64>() / n;
            (mean, var.sqrt())
        };
        let (p, sp) = stat(|m| m.precision);
        let (r, sr) = stat(|m| m.recall);
        let (f, sf) = stat(|m| m.f1);
        CvReport {
            classifier: classifier.to_string(),
            folds,
            mean: Summary {
                precision: p,
                recall: r,
                f1: f,
            },
            std: Summary {
                precision: sp,
                recall: sr,
                f1: sf,
            },
        }
    }

    /// `classifier,fold,precision,recall,f1` rows, then `mean` and `std` rows.
    pub fn csv_rows(&self) -> Vec<[String; 5]> {
        let fmt = |x: f64| format!("{x:.6}");
        let mut rows: Vec<[String; 5]> = self
            .folds
            .iter()
            .enumerate()
            .map(|(i, m)| {
                [
                    self.classifier.clone(),
                    i.to_string(),
                    fmt(m.precision),
                    fmt(m.recall),
                    fmt(m.f1),
                ]
            })
            .collect();
        for (tag, s) in [("mean", self.mean), ("std", self.std)] {
            rows.push([
                self.classifier.clone(),
                tag.to_string(),
                fmt(s.precision),
                fmt(s.recall),
                fmt(s.f1),
            ]);
        }
        rows
    }
}

pub const EVAL_HEADER: [&str; 5] = ["classifier", "fold", "precision", "recall", "f1"];

/// Trains on `k - 1` folds and evaluates on the held-out one, for each fold.
/// Training subsets get their own balanced class weights.
pub fn cross_validate(data: &Dataset, spec: &ModelSpec, k: usize, seed: u64) -> Result<CvReport, LearnError> {
    let folds = stratified_kfold(data.labels(), k, seed)?;
    let results = parallel::map_range(k, |i| {
        let train: Vec<usize> = folds
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .flat_map(|(_, f)| f.iter().copied())
            .collect();
        let mut train_sorted = train;
        train_sorted.sort_unstable();
        let model = spec.for_fold(i).fit(&data.subset(&train_sorted))?;
        let test = data.subset(&folds[i]);
        evaluate(test.labels(), &model.predict(test.rows()))
    });
    let metrics = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    Ok(CvReport::from_folds(spec.name(), metrics))
}
