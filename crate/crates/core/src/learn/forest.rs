use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Dataset, LearnError};
use crate::parallel;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForestParams {
    pub n_trees: usize,
    /// `None` grows until leaves are pure or `min_leaf` blocks a split.
    pub max_depth: Option<usize>,
    /// Minimum distinct training rows per leaf.
    pub min_leaf: usize,
    /// Share of features examined per split; `None` means `sqrt(d)`.
    pub feature_fraction: Option<f64>,
    pub bootstrap: bool,
    pub seed: u64,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams {
            n_trees: 100,
            max_depth: None,
            min_leaf: 1,
            feature_fraction: None,
            bootstrap: true,
            seed: 0,
        }
    }
}

impl ForestParams {
    pub fn validate(&self) -> Result<(), LearnError> {
        if self.n_trees == 0 {
            return Err(LearnError::InvalidParam("n_trees must be at least 1".into()));
        }
        if self.min_leaf == 0 {
            return Err(LearnError::InvalidParam("min_leaf must be at least 1".into()));
        }
        if let Some(f) = self.feature_fraction {
            if !(f > 0.0 && f <= 1.0) {
                return Err(LearnError::InvalidParam(format!(
                    "feature_fraction must be in (0, 1], got {f}"
                )));
            }
        }
        Ok(())
    }

    /// Features examined per split for `d` features, at least 1.
    pub fn features_per_split(&self, d: usize) -> usize {
        let m = match self.feature_fraction {
            Some(f) => (f * d as f64).round() as usize,
            None => (d as f64).sqrt().round() as usize,
        };
        m.clamp(1, d.max(1))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum Node {
    Leaf {
        weights: [f64; 2],
    },
    /// `x[feature] <= threshold` goes left.
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub nodes: Vec<Node>,
}

#[derive(Clone, Copy)]
struct Sample {
    row: usize,
    label: usize,
    weight: f64,
}

struct Candidate {
    feature: usize,
    threshold: f64,
    cost: f64,
}

fn class_totals(samples: &[Sample]) -> [f64; 2] {
    let mut w = [0.0; 2];
    for s in samples {
        w[s.label] += s.weight;
    }
    w
}

/// `W * gini`, i.e. `W - (w0^2 + w1^2) / W`.
fn weighted_gini(w: [f64; 2]) -> f64 {
    let total = w[0] + w[1];
    if total <= 0.0 {
        0.0
    } else {
        total - (w[0] * w[0] + w[1] * w[1]) / total
    }
}

fn midpoint(a: f64, b: f64) -> f64 {
    let m = a + (b - a) / 2.0;
    if m < b {
        m
    } else {
        a
    }
}

struct Builder<'a> {
    data: &'a Dataset,
    params: &'a ForestParams,
    per_split: usize,
    rng: ChaCha8Rng,
    nodes: Vec<Node>,
    order: Vec<usize>,
}

impl Builder<'_> {
    fn is_constant(&self, samples: &[Sample], feature: usize) -> bool {
        let rows = self.data.rows();
        let first = rows[samples[0].row][feature];
        samples.iter().all(|s| rows[s.row][feature] == first)
    }

    /// Best split on one feature; ties keep the lowest threshold.
    fn best_on_feature(&self, samples: &[Sample], feature: usize, total: [f64; 2]) -> Option<Candidate> {
        let rows = self.data.rows();
        let mut sorted: Vec<(f64, Sample)> = samples.iter().map(|s| (rows[s.row][feature], *s)).collect();
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.row.cmp(&b.1.row)));
        let min_leaf = self.params.min_leaf;
        let mut left = [0.0; 2];
        let mut best: Option<Candidate> = None;
        for i in 0..sorted.len() - 1 {
            let (v, s) = sorted[i];
            left[s.label] += s.weight;
            let next = sorted[i + 1].0;
            if v == next || i + 1 < min_leaf || sorted.len() - (i + 1) < min_leaf {
                continue;
            }
            let right = [total[0] - left[0], total[1] - left[1]];
            let cost = weighted_gini(left) + weighted_gini(right);
            if best.as_ref().is_none_or(|b| cost < b.cost) {
                best = Some(Candidate {
                    feature,
                    threshold: midpoint(v, next),
                    cost,
                });
            }
        }
        best
    }

    /// Draws features in random order until `per_split` non-constant ones
    /// are found, then searches them in index order.
    fn choose_split(&mut self, samples: &[Sample], total: [f64; 2]) -> Option<Candidate> {
        let mut order = std::mem::take(&mut self.order);
        order.shuffle(&mut self.rng);
        let mut chosen: Vec<usize> = Vec::with_capacity(self.per_split);
        for &f in &order {
            if chosen.len() == self.per_split {
                break;
            }
            if !self.is_constant(samples, f) {
                chosen.push(f);
            }
        }
        self.order = order;
        chosen.sort_unstable();
        let mut best: Option<Candidate> = None;
        for f in chosen {
            if let Some(c) = self.best_on_feature(samples, f, total) {
                if best.as_ref().is_none_or(|b| c.cost < b.cost) {
                    best = Some(c);
                }
            }
        }
        best
    }

    /// Returns the index of the subtree root.
    fn grow(&mut self, samples: Vec<Sample>, depth: usize) -> usize {
        let total = class_totals(&samples);
        let pure = total[0] == 0.0 || total[1] == 0.0;
        let depth_capped = self.params.max_depth.is_some_and(|m| depth >= m);
        let split = if pure || depth_capped || samples.len() < 2 * self.params.min_leaf {
            None
        } else {
            self.choose_split(&samples, total)
        };
        let idx = self.nodes.len();
        let Some(c) = split else {
            self.nodes.push(Node::Leaf { weights: total });
            return idx;
        };
        let rows = self.data.rows();
        let (l, r): (Vec<Sample>, Vec<Sample>) =
            samples.into_iter().partition(|s| rows[s.row][c.feature] <= c.threshold);
        self.nodes.push(Node::Leaf { weights: total });
        let left = self.grow(l, depth + 1);
        let right = self.grow(r, depth + 1);
        self.nodes[idx] = Node::Split {
            feature: c.feature,
            threshold: c.threshold,
            left,
            right,
        };
        idx
    }
}

impl DecisionTree {
    /// Fits one tree; `tree_index` selects the RNG stream under `params.seed`.
    pub fn fit(data: &Dataset, params: &ForestParams, tree_index: u64) -> Result<Self, LearnError> {
        params.validate()?;
        let counts = data.class_counts();
        if counts[0] == 0 || counts[1] == 0 {
            return Err(LearnError::SingleClass);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        rng.set_stream(tree_index);
        let n = data.len();
        let samples: Vec<Sample> = if params.bootstrap {
            let mut draws = vec![0u32; n];
            for _ in 0..n {
                draws[rng.gen_range(0..n)] += 1;
            }
            draws
                .iter()
                .enumerate()
                .filter(|(_, &c)| c > 0)
                .map(|(i, &c)| Sample {
                    row: i,
                    label: data.labels()[i],
                    weight: f64::from(c) * data.sample_weight(i),
                })
                .collect()
        } else {
            (0..n)
                .map(|i| Sample {
                    row: i,
                    label: data.labels()[i],
                    weight: data.sample_weight(i),
                })
                .collect()
        };
        let mut builder = Builder {
            data,
            params,
            per_split: params.features_per_split(data.n_features()),
            rng,
            nodes: Vec::new(),
            order: (0..data.n_features()).collect(),
        };
        builder.grow(samples, 0);
        Ok(DecisionTree { nodes: builder.nodes })
    }

    /// Weighted class totals of the leaf reached by `x`.
    pub fn leaf_weights(&self, x: &[f64]) -> [f64; 2] {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                Node::Leaf { weights } => return *weights,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => i = if x[*feature] <= *threshold { *left } else { *right },
            }
        }
    }

    /// Probability of class 1 at the reached leaf.
    pub fn predict_proba(&self, x: &[f64]) -> f64 {
        let w = self.leaf_weights(x);
        w[1] / (w[0] + w[1])
    }

    /// Weighted majority at the leaf; ties go to class 0.
    pub fn predict_one(&self, x: &[f64]) -> usize {
        let w = self.leaf_weights(x);
        usize::from(w[1] > w[0])
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], i: usize) -> usize {
            match &nodes[i] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, *left).max(walk(nodes, *right)),
            }
        }
        walk(&self.nodes, 0)
    }
}

/// Bagged decision trees with weighted Gini splits and hard voting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomForest {
    pub params: ForestParams,
    pub n_features: usize,
    pub trees: Vec<DecisionTree>,
}

impl RandomForest {
    /// Trees are trained independently, each from its own RNG stream, so
    /// the result does not depend on the worker count.
    pub fn fit(data: &Dataset, params: &ForestParams) -> Result<Self, LearnError> {
        params.validate()?;
        let trees = parallel::map_range(params.n_trees, |t| DecisionTree::fit(data, params, t as u64));
        Ok(RandomForest {
            params: *params,
            n_features: data.n_features(),
            trees: trees.into_iter().collect::<Result<_, _>>()?,
        })
    }

    /// Mean of per-tree leaf probabilities for class 1.
    pub fn predict_proba(&self, x: &[f64]) -> f64 {
        self.trees.iter().map(|t| t.predict_proba(x)).sum::<f64>() / self.trees.len() as f64
    }

    /// Majority of tree votes; a tied vote falls back to the mean
    /// probability, and an exact 0.5 goes to class 0.
    pub fn predict_one(&self, x: &[f64]) -> usize {
        let ones = self.trees.iter().filter(|t| t.predict_one(x) == 1).count();
        let zeros = self.trees.len() - ones;
        match ones.cmp(&zeros) {
            std::cmp::Ordering::Greater => 1,
            std::cmp::Ordering::Less => 0,
            std::cmp::Ordering::Equal => usize::from(self.predict_proba(x) > 0.5),
        }
    }

    pub fn predict(&self, rows: &[Vec<f64>]) -> Vec<usize> {
        rows.iter().map(|x| self.predict_one(x)).collect()
    }
}
