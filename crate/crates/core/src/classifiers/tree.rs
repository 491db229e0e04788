//! Information-gain decision tree with binary threshold splits on numeric
//! features.
//!
//! At each node every candidate feature is sorted and every midpoint between
//! consecutive distinct values is tried as a threshold (`x <= t` goes left).
//! The split with the highest gain `H(parent) - sum_side w_side/w * H(side)`
//! wins; class entropy is measured in bits over instance weights, so the
//! same code grows unit-weight trees and AdaBoost's weighted stumps.
//!
//! Growth stops at a pure node, at `max_depth`, when a split would leave a
//! side with fewer than `min_leaf` instances, or when no split gains more
//! than [`MIN_GAIN`]. Nodes are stored in pre-order; when a random feature
//! subset is in use it is drawn per node, in that same pre-order, right
//! before the node's split search.

use super::ClassifierError;
use crate::rng::SplitMix64;
use crate::vectorize::{FeatureMatrix, SparseVector};

/// Smallest information gain that justifies a split.
pub const MIN_GAIN: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TreeParams {
    /// `None` grows until another stopping rule applies.
    pub max_depth: Option<usize>,
    pub min_leaf: usize,
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams {
            max_depth: None,
            min_leaf: 1,
        }
    }
}

impl TreeParams {
    pub fn stump() -> Self {
        TreeParams {
            max_depth: Some(1),
            min_leaf: 1,
        }
    }

    pub fn validate(&self) -> Result<(), ClassifierError> {
        if self.min_leaf == 0 {
            return Err(ClassifierError::Hyperparameter("min_leaf must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Leaf {
        /// Weighted class proportions of the training instances that reached the leaf.
        distribution: Vec<f64>,
    },
    Split {
        feature: usize,
        threshold: f64,
        gain: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecisionTree {
    pub(crate) params: TreeParams,
    pub(crate) nodes: Vec<Node>,
}

/// Entropy in bits of a vector of (weighted) class counts.
pub fn entropy(class_weights: &[f64]) -> f64 {
    let total: f64 = class_weights.iter().sum();
    if total <= 0.0 {
        return 0.0;
    }
    class_weights
        .iter()
        .filter(|&&w| w > 0.0)
        .map(|&w| {
            let p = w / total;
            -p * libm::log2(p)
        })
        .sum()
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Sample {
    pub row: usize,
    pub weight: f64,
}

pub(crate) struct TreeData<'a> {
    pub rows: &'a [SparseVector],
    pub labels: &'a [usize],
    pub num_classes: usize,
    pub width: usize,
}

impl<'a> TreeData<'a> {
    pub fn from_matrix(matrix: &'a FeatureMatrix) -> Self {
        TreeData {
            rows: matrix.rows(),
            labels: matrix.labels(),
            num_classes: matrix.num_classes(),
            width: matrix.width(),
        }
    }
}

pub(crate) struct FeatureSampler<'r> {
    pub rng: &'r mut SplitMix64,
    pub per_split: usize,
}

struct Candidate {
    feature: usize,
    threshold: f64,
    gain: f64,
}

struct Group {
    value: f64,
    weights: Vec<f64>,
    count: usize,
}

impl DecisionTree {
    /// Unit-weight tree over all rows of `matrix`.
    pub fn fit_matrix(matrix: &FeatureMatrix, params: &TreeParams) -> Self {
        let samples = (0..matrix.len()).map(|row| Sample { row, weight: 1.0 }).collect();
        DecisionTree::fit_samples(&TreeData::from_matrix(matrix), samples, params, None)
    }

    /// Tree over `matrix` with per-instance weights.
    pub fn fit_weighted(matrix: &FeatureMatrix, weights: &[f64], params: &TreeParams) -> Self {
        let samples = weights
            .iter()
            .enumerate()
            .map(|(row, &weight)| Sample { row, weight })
            .collect();
        DecisionTree::fit_samples(&TreeData::from_matrix(matrix), samples, params, None)
    }

    pub(crate) fn fit_samples(
        data: &TreeData<'_>,
        samples: Vec<Sample>,
        params: &TreeParams,
        mut sampler: Option<FeatureSampler<'_>>,
    ) -> Self {
        let mut tree = DecisionTree {
            params: *params,
            nodes: Vec::new(),
        };
        tree.grow(data, samples, 0, &mut sampler);
        tree
    }

    fn grow(
        &mut self,
        data: &TreeData<'_>,
        samples: Vec<Sample>,
        depth: usize,
        sampler: &mut Option<FeatureSampler<'_>>,
    ) -> usize {
        let slot = self.nodes.len();
        let mut class_weights = vec![0.0; data.num_classes];
        for s in &samples {
            class_weights[data.labels[s.row]] += s.weight;
        }
        let leaf = |cw: &[f64]| {
            let total: f64 = cw.iter().sum();
            Node::Leaf {
                distribution: cw.iter().map(|w| w / total).collect(),
            }
        };
        let pure = class_weights.iter().filter(|&&w| w > 0.0).count() <= 1;
        let depth_reached = self.params.max_depth.is_some_and(|d| depth >= d);
        if pure || depth_reached || samples.len() < 2 * self.params.min_leaf {
            self.nodes.push(leaf(&class_weights));
            return slot;
        }
        let allowed = sampler.as_mut().and_then(|s| {
            (s.per_split < data.width).then(|| {
                let mut mask = vec![false; data.width];
                for f in s.rng.sample_indices(data.width, s.per_split) {
                    mask[f] = true;
                }
                mask
            })
        });
        let Some(best) = best_split(data, &samples, &class_weights, allowed.as_deref(), self.params.min_leaf)
        else {
            self.nodes.push(leaf(&class_weights));
            return slot;
        };
        self.nodes.push(Node::Split {
            feature: best.feature,
            threshold: best.threshold,
            gain: best.gain,
            left: 0,
            right: 0,
        });
        let (left, right): (Vec<Sample>, Vec<Sample>) = samples
            .into_iter()
            .partition(|s| data.rows[s.row].get(best.feature) <= best.threshold);
        let l = self.grow(data, left, depth + 1, sampler);
        let r = self.grow(data, right, depth + 1, sampler);
        if let Node::Split { left, right, .. } = &mut self.nodes[slot] {
            *left = l;
            *right = r;
        }
        slot
    }

    pub fn params(&self) -> &TreeParams {
        &self.params
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn distribution(&self, x: &[f64]) -> &[f64] {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                Node::Leaf { distribution } => return distribution,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                    ..
                } => i = if x[*feature] <= *threshold { *left } else { *right },
            }
        }
    }

    pub fn predict(&self, x: &[f64]) -> usize {
        super::argmax(self.distribution(x))
    }

    /// Number of split levels on the longest root-to-leaf path.
    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], i: usize) -> usize {
            match &nodes[i] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, *left).max(walk(nodes, *right)),
            }
        }
        walk(&self.nodes, 0)
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::Leaf { .. })).count()
    }
}

fn midpoint(a: f64, b: f64) -> f64 {
    let m = a + (b - a) / 2.0;
    if m >= b {
        a
    } else {
        m
    }
}

fn best_split(
    data: &TreeData<'_>,
    samples: &[Sample],
    parent: &[f64],
    allowed: Option<&[bool]>,
    min_leaf: usize,
) -> Option<Candidate> {
    let k = data.num_classes;
    let total_weight: f64 = parent.iter().sum();
    let parent_entropy = entropy(parent);

    // (feature, value, class, weight) for every stored non-zero value
    let mut entries: Vec<(usize, f64, usize, f64)> = Vec::new();
    for s in samples {
        let label = data.labels[s.row];
        for (f, v) in data.rows[s.row].iter() {
            if allowed.is_none_or(|mask| mask[f]) {
                entries.push((f, v, label, s.weight));
            }
        }
    }
    entries.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));

    let mut best: Option<Candidate> = None;
    let mut start = 0;
    while start < entries.len() {
        let feature = entries[start].0;
        let end = start + entries[start..].iter().take_while(|e| e.0 == feature).count();
        let groups = value_groups(&entries[start..end], parent, samples.len(), k);
        start = end;
        if groups.len() < 2 {
            continue;
        }
        let mut left = vec![0.0; k];
        let mut left_count = 0;
        for pair in groups.windows(2) {
            for (l, w) in left.iter_mut().zip(&pair[0].weights) {
                *l += w;
            }
            left_count += pair[0].count;
            let right_count = samples.len() - left_count;
            if left_count < min_leaf || right_count < min_leaf {
                continue;
            }
            let right: Vec<f64> = parent.iter().zip(&left).map(|(p, l)| (p - l).max(0.0)).collect();
            let wl: f64 = left.iter().sum();
            let wr: f64 = right.iter().sum();
            let gain = parent_entropy - (wl / total_weight) * entropy(&left) - (wr / total_weight) * entropy(&right);
            if gain > MIN_GAIN && best.as_ref().is_none_or(|b| gain > b.gain) {
                best = Some(Candidate {
                    feature,
                    threshold: midpoint(pair[0].value, pair[1].value),
                    gain,
                });
            }
        }
    }
    best
}

/// Distinct values of one feature in ascending order with their class
/// weights; the implicit zeros form one group.
fn value_groups(entries: &[(usize, f64, usize, f64)], parent: &[f64], n: usize, k: usize) -> Vec<Group> {
    let mut groups: Vec<Group> = Vec::new();
    let mut nz_weights = vec![0.0; k];
    for &(_, v, c, w) in entries {
        match groups.last_mut() {
            Some(g) if g.value == v => {
                g.weights[c] += w;
                g.count += 1;
            }
            _ => {
                let mut weights = vec![0.0; k];
                weights[c] = w;
                groups.push(Group {
                    value: v,
                    weights,
                    count: 1,
                });
            }
        }
        nz_weights[c] += w;
    }
    let zero_count = n - entries.len();
    if zero_count > 0 {
        let weights = parent.iter().zip(&nz_weights).map(|(p, z)| (p - z).max(0.0)).collect();
        let at = groups.partition_point(|g| g.value < 0.0);
        groups.insert(
            at,
            Group {
                value: 0.0,
                weights,
                count: zero_count,
            },
        );
    }
    groups
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matrix(rows: &[Vec<f64>], labels: Vec<usize>) -> FeatureMatrix {
        FeatureMatrix::from_dense(rows, labels, ["neg", "pos"]).unwrap()
    }

    #[test]
    fn entropy_values() {
        assert_eq!(entropy(&[1.0, 1.0]), 1.0);
        assert_eq!(entropy(&[4.0, 0.0]), 0.0);
        assert!((entropy(&[9.0, 5.0]) - 0.940_285_958_670_631).abs() < 1e-12);
    }

    #[test]
    fn separating_feature_gives_depth_one() {
        let m = matrix(&[vec![1.0, 7.0], vec![2.0, 3.0], vec![8.0, 7.0], vec![9.0, 3.0]], vec![0, 0, 1, 1]);
        let t = DecisionTree::fit_matrix(&m, &TreeParams::default());
        assert_eq!(t.depth(), 1);
        match &t.nodes()[0] {
            Node::Split { feature, threshold, gain, .. } => {
                assert_eq!(*feature, 0);
                assert_eq!(*threshold, 5.0);
                assert_eq!(*gain, 1.0);
            }
            _ => panic!("root should split"),
        }
        for i in 0..4 {
            assert_eq!(t.predict(&m.dense_row(i)), m.labels()[i]);
        }
    }

    #[test]
    fn negative_values_and_zero_group() {
        let m = matrix(&[vec![-2.0], vec![-1.0], vec![0.0], vec![3.0]], vec![1, 1, 0, 0]);
        let t = DecisionTree::fit_matrix(&m, &TreeParams::default());
        assert_eq!(t.depth(), 1);
        assert!(matches!(t.nodes()[0], Node::Split { threshold, .. } if threshold == -0.5));
    }

    #[test]
    fn max_depth_and_min_leaf() {
        // XOR needs depth two
        let rows = [vec![0.0, 0.0], vec![0.0, 1.0], vec![1.0, 0.0], vec![1.0, 1.0]];
        let m = matrix(&rows, vec![0, 1, 1, 0]);
        let stump = DecisionTree::fit_matrix(&m, &TreeParams::stump());
        assert_eq!(stump.depth(), 0, "no single split has positive gain");
        let mut rows2 = rows.to_vec();
        rows2.push(vec![0.0, 0.0]);
        let m2 = matrix(&rows2, vec![0, 1, 1, 0, 0]);
        let full = DecisionTree::fit_matrix(&m2, &TreeParams::default());
        assert_eq!(full.depth(), 2);
        let limited = DecisionTree::fit_matrix(
            &m2,
            &TreeParams {
                max_depth: None,
                min_leaf: 3,
            },
        );
        assert!(limited.depth() <= 1);
    }

    #[test]
    fn weighted_fit_follows_weights() {
        let m = matrix(&[vec![0.0], vec![1.0], vec![2.0]], vec![0, 1, 1]);
        let t = DecisionTree::fit_weighted(&m, &[0.98, 0.01, 0.01], &TreeParams { max_depth: Some(0), min_leaf: 1 });
        assert_eq!(t.predict(&[2.0]), 0);
        let d = t.distribution(&[2.0]);
        assert!((d[0] - 0.98).abs() < 1e-12);
    }

    #[test]
    fn midpoint_stays_below_upper() {
        let a = 1.0f64;
        let b = f64::from_bits(a.to_bits() + 1);
        let m = midpoint(a, b);
        assert!(a <= m && m < b);
        assert_eq!(midpoint(1.0, 2.0), 1.5);
    }
}
