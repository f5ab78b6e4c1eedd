//! CART trees: Gini splits for classification, squared-error splits for the
//! boosting stages. Trees are stored as a flat node arena.

use rand::seq::index::sample;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::Matrix;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Criterion {
    Gini,
    SquaredError,
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct GrowParams {
    pub max_depth: usize,
    pub min_samples_split: usize,
    pub min_samples_leaf: usize,
    /// Features examined per split; `None` means all.
    pub max_features: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Node<T> {
    Leaf {
        value: T,
    },
    Split {
        feature: usize,
        threshold: T,
        left: usize,
        right: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tree<T> {
    nodes: Vec<Node<T>>,
}

impl<T: Scalar> Tree<T> {
    /// Leaf value reached by `x` (`x[feature] <= threshold` goes left).
    pub fn evaluate(&self, x: &[T]) -> T {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                Node::Leaf { value } => return *value,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => at = if x[*feature] <= *threshold { *left } else { *right },
            }
        }
    }

    pub fn nodes(&self) -> &[Node<T>] {
        &self.nodes
    }

    pub fn depth(&self) -> usize {
        fn walk<T>(nodes: &[Node<T>], at: usize) -> usize {
            match &nodes[at] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, *left).max(walk(nodes, *right)),
            }
        }
        walk(&self.nodes, 0)
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, Node::Leaf { .. }))
            .count()
    }
}

/// Sums sufficient for both criteria: count, Σy, Σy².
#[derive(Clone, Copy)]
struct Moments<T> {
    n: T,
    sum: T,
    sum_sq: T,
}

impl<T: Scalar> Moments<T> {
    fn zero() -> Self {
        Moments {
            n: T::zero(),
            sum: T::zero(),
            sum_sq: T::zero(),
        }
    }

    fn add(&mut self, y: T) {
        self.n += T::one();
        self.sum += y;
        self.sum_sq += y * y;
    }

    fn minus(&self, other: &Self) -> Self {
        Moments {
            n: self.n - other.n,
            sum: self.sum - other.sum,
            sum_sq: self.sum_sq - other.sum_sq,
        }
    }

    /// Node impurity weighted by sample count.
    fn weighted_impurity(&self, criterion: Criterion) -> T {
        if self.n == T::zero() {
            return T::zero();
        }
        match criterion {
            // n * (1 - p^2 - (1-p)^2) for 0/1 targets
            Criterion::Gini => T::lit(2.0) * self.sum * (self.n - self.sum) / self.n,
            Criterion::SquaredError => (self.sum_sq - self.sum * self.sum / self.n).max(T::zero()),
        }
    }
}

struct Grower<'a, T, F> {
    x: &'a Matrix<T>,
    targets: &'a [T],
    params: GrowParams,
    criterion: Criterion,
    leaf_value: F,
    rng: Option<&'a mut ChaCha8Rng>,
    nodes: Vec<Node<T>>,
    sort_buf: Vec<(T, usize)>,
}

struct BestSplit<T> {
    feature: usize,
    threshold: T,
    impurity: T,
}

impl<T: Scalar, F: Fn(&[usize]) -> T> Grower<'_, T, F> {
    fn grow(&mut self, idx: &mut [usize], depth: usize) -> usize {
        let slot = self.nodes.len();
        self.nodes.push(Node::Leaf { value: T::zero() });

        let mut total = Moments::zero();
        for &i in idx.iter() {
            total.add(self.targets[i]);
        }
        let parent = total.weighted_impurity(self.criterion);
        let n = idx.len();
        let splittable = depth < self.params.max_depth
            && n >= self.params.min_samples_split
            && n >= 2 * self.params.min_samples_leaf
            && parent > T::epsilon() * total.n;

        let best = if splittable { self.best_split(idx, parent) } else { None };
        match best {
            None => {
                self.nodes[slot] = Node::Leaf {
                    value: (self.leaf_value)(idx),
                };
            }
            Some(split) => {
                let mid = partition(idx, |&i| self.x.get(i, split.feature) <= split.threshold);
                let (left_idx, right_idx) = idx.split_at_mut(mid);
                let left = self.grow(left_idx, depth + 1);
                let right = self.grow(right_idx, depth + 1);
                self.nodes[slot] = Node::Split {
                    feature: split.feature,
                    threshold: split.threshold,
                    left,
                    right,
                };
            }
        }
        slot
    }

    fn candidate_features(&mut self) -> Vec<usize> {
        let d = self.x.n_cols();
        match (self.params.max_features, self.rng.as_deref_mut()) {
            (Some(m), Some(rng)) if m < d => {
                let mut f = sample(rng, d, m).into_vec();
                f.sort_unstable();
                f
            }
            _ => (0..d).collect(),
        }
    }

    fn best_split(&mut self, idx: &[usize], parent: T) -> Option<BestSplit<T>> {
        let min_leaf = self.params.min_samples_leaf;
        let n = idx.len();
        let mut best: Option<BestSplit<T>> = None;
        let mut total = Moments::zero();
        for &i in idx {
            total.add(self.targets[i]);
        }

        for feature in self.candidate_features() {
            self.sort_buf.clear();
            self.sort_buf
                .extend(idx.iter().map(|&i| (self.x.get(i, feature), i)));
            self.sort_buf.sort_unstable_by(|a, b| {
                a.0.partial_cmp(&b.0)
                    .unwrap_or(std::cmp::Ordering::Equal)
                    .then(a.1.cmp(&b.1))
            });

            let mut left = Moments::zero();
            for k in 0..n - 1 {
                let (value, i) = self.sort_buf[k];
                left.add(self.targets[i]);
                let next = self.sort_buf[k + 1].0;
                let n_left = k + 1;
                if n_left < min_leaf || n - n_left < min_leaf || !(value < next) {
                    continue;
                }
                let right = total.minus(&left);
                let impurity =
                    left.weighted_impurity(self.criterion) + right.weighted_impurity(self.criterion);
                if best.as_ref().is_none_or(|b| impurity < b.impurity) {
                    let mut threshold = (value + next) / T::lit(2.0);
                    if !(threshold >= value && threshold < next) {
                        threshold = value;
                    }
                    best = Some(BestSplit {
                        feature,
                        threshold,
                        impurity,
                    });
                }
            }
        }
        let tolerance = T::epsilon() * T::lit(64.0) * (parent.abs() + T::one());
        best.filter(|b| b.impurity < parent - tolerance)
    }
}

/// Stable-enough in-place partition; returns the count satisfying `pred`.
fn partition<F: Fn(&usize) -> bool>(idx: &mut [usize], pred: F) -> usize {
    let mut left: Vec<usize> = Vec::with_capacity(idx.len());
    let mut right: Vec<usize> = Vec::with_capacity(idx.len());
    for &i in idx.iter() {
        if pred(&i) {
            left.push(i);
        } else {
            right.push(i);
        }
    }
    let mid = left.len();
    idx[..mid].copy_from_slice(&left);
    idx[mid..].copy_from_slice(&right);
    mid
}

pub(crate) fn grow_tree<T: Scalar>(
    x: &Matrix<T>,
    targets: &[T],
    mut idx: Vec<usize>,
    params: GrowParams,
    criterion: Criterion,
    leaf_value: impl Fn(&[usize]) -> T,
    rng: Option<&mut ChaCha8Rng>,
) -> Tree<T> {
    let mut grower = Grower {
        x,
        targets,
        params,
        criterion,
        leaf_value,
        rng,
        nodes: Vec::new(),
        sort_buf: Vec::with_capacity(idx.len()),
    };
    grower.grow(&mut idx, 0);
    Tree {
        nodes: grower.nodes,
    }
}

pub(crate) fn mean_of<T: Scalar>(targets: &[T], idx: &[usize]) -> T {
    if idx.is_empty() {
        return T::zero();
    }
    idx.iter().map(|&i| targets[i]).sum::<T>() / T::from_count(idx.len())
}

/// Single CART classifier; its score is the class-1 fraction of the leaf.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree<T> {
    pub(crate) tree: Tree<T>,
}

impl<T: Scalar> DecisionTree<T> {
    pub(crate) fn fit(x: &Matrix<T>, y: &[u8], params: GrowParams) -> Self {
        let targets: Vec<T> = y.iter().map(|&v| T::from_u8(v).unwrap()).collect();
        let tree = grow_tree(
            x,
            &targets,
            (0..y.len()).collect(),
            params,
            Criterion::Gini,
            |idx| mean_of(&targets, idx),
            None,
        );
        DecisionTree { tree }
    }

    pub fn score(&self, x: &[T]) -> T {
        self.tree.evaluate(x)
    }

    pub fn tree(&self) -> &Tree<T> {
        &self.tree
    }
}
