//! Independent reference computations and fixed problem instances used by
//! the classifier tests and the acceptance run.
#![allow(dead_code)]

use sentikit_core::arff::{Dataset, Document};
use sentikit_core::classifiers::{Activation, Distance, Mlp, MlpParams, Model};
use sentikit_core::rng::SplitMix64;
use sentikit_core::vectorize::{FeatureMatrix, VectorSpace, VectorizerConfig, Weighting};
use sentikit_core::StopWordList;

// ---- multinomial naive Bayes, worked by hand ----

/// Vocabulary of the hand corpus in feature order.
pub const HAND_TERMS: [&str; 3] = ["achi", "gari", "kharab"];
/// Smoothed P(term | class) with alpha = 1, |V| = 3; rows are neg, pos.
pub const HAND_LIKELIHOOD: [[f64; 3]; 2] = [[1.0 / 6.0, 1.0 / 3.0, 0.5], [0.5, 1.0 / 3.0, 1.0 / 6.0]];
/// P(neg | "achi gari"), P(pos | "achi gari"): 1/36 and 1/12 normalized.
pub const HAND_POSTERIOR: [f64; 2] = [0.25, 0.75];

pub fn hand_corpus() -> (VectorSpace, FeatureMatrix, Vec<f64>) {
    let docs = [("achi gari", "pos"), ("achi", "pos"), ("kharab gari", "neg"), ("kharab", "neg")]
        .map(|(t, l)| Document {
            text: t.into(),
            label: l.into(),
        });
    let ds = Dataset::from_documents("hand", vec!["neg".into(), "pos".into()], &docs).unwrap();
    let cfg = VectorizerConfig {
        stopwords: StopWordList::empty(),
        ..VectorizerConfig::default()
    };
    let space = VectorSpace::fit(&ds, Weighting::Count, &cfg).unwrap();
    let m = space.transform(&ds).unwrap();
    let query = space.vectorize_text("achi gari").to_dense(space.len());
    (space, m, query)
}

/// Whitespace-separated floats stored under `key` in a model file.
pub fn persisted_floats(model_text: &str, key: &str) -> Vec<f64> {
    let prefix = format!("{key} = ");
    let line = model_text
        .lines()
        .find(|l| l.starts_with(&prefix))
        .unwrap_or_else(|| panic!("no '{key}' in model"));
    line[prefix.len()..].split_whitespace().map(|v| v.parse().unwrap()).collect()
}

// ---- entropy ----

pub fn entropy_bits(counts: &[f64]) -> f64 {
    let n: f64 = counts.iter().sum();
    counts
        .iter()
        .filter(|&&c| c > 0.0)
        .map(|&c| {
            let p = c / n;
            -p * p.log2()
        })
        .sum()
}

// ---- k-NN by exhaustive sorting ----

/// Monotone stand-in for the distance: the sum before any root is taken, so
/// ties and ordering are exact for integer-valued data.
pub fn distance_key(d: Distance, a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let t = (x - y).abs();
            match d {
                Distance::Euclidean => t * t,
                Distance::Manhattan => t,
                Distance::Minkowski(p) => t.powf(p),
            }
        })
        .sum()
}

pub fn knn_brute_force(rows: &[Vec<f64>], labels: &[usize], classes: usize, q: &[f64], k: usize, d: Distance) -> usize {
    let mut all: Vec<(f64, usize)> = rows.iter().enumerate().map(|(i, r)| (distance_key(d, q, r), i)).collect();
    all.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
    let mut votes = vec![0usize; classes];
    for &(_, i) in &all[..k] {
        votes[labels[i]] += 1;
    }
    let best = *votes.iter().max().unwrap();
    votes.iter().position(|&v| v == best).unwrap()
}

/// `n` rows of `width` small integer features and random labels, plus as many queries.
pub fn knn_problem(seed: u64, n: usize, width: usize) -> (Vec<Vec<f64>>, Vec<usize>, Vec<Vec<f64>>) {
    let mut rng = SplitMix64::new(seed);
    let row = |rng: &mut SplitMix64| (0..width).map(|_| rng.below(4) as f64).collect::<Vec<f64>>();
    let rows: Vec<Vec<f64>> = (0..n).map(|_| row(&mut rng)).collect();
    let labels: Vec<usize> = (0..n).map(|_| rng.below(2)).collect();
    let queries: Vec<Vec<f64>> = (0..n).map(|_| row(&mut rng)).collect();
    (rows, labels, queries)
}

// ---- boosting ----

/// Eight points on a line: neg neg pos pos pos neg neg pos. The best single
/// threshold still misclassifies two of them.
pub fn boost_line() -> FeatureMatrix {
    let xs = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0];
    let labels = vec![0, 0, 1, 1, 1, 0, 0, 1];
    FeatureMatrix::from_dense(&xs.map(|x| vec![x]), labels, ["neg", "pos"]).unwrap()
}

/// Fewest training errors of any one-threshold rule on any single feature,
/// trying every midpoint, both orientations and the constant rules.
pub fn best_stump_errors(m: &FeatureMatrix) -> usize {
    let dense = m.to_dense();
    let labels = m.labels();
    let mut best = usize::MAX;
    for f in 0..m.width() {
        let mut values: Vec<f64> = dense.iter().map(|r| r[f]).collect();
        values.sort_by(f64::total_cmp);
        values.dedup();
        let mut thresholds = vec![f64::NEG_INFINITY];
        thresholds.extend(values.windows(2).map(|w| (w[0] + w[1]) / 2.0));
        for t in thresholds {
            for left in 0..2 {
                let errors = dense
                    .iter()
                    .zip(labels)
                    .filter(|(r, &l)| (if r[f] <= t { left } else { 1 - left }) != l)
                    .count();
                best = best.min(errors);
            }
        }
    }
    best
}

pub fn training_errors(model: &Model, m: &FeatureMatrix) -> usize {
    let p = model.predict_matrix(m).unwrap();
    p.iter().zip(m.labels()).filter(|(a, b)| a != b).count()
}

// ---- multilayer perceptron ----

pub fn mlp_probe() -> FeatureMatrix {
    FeatureMatrix::from_dense(&[vec![0.5, -1.0], vec![1.5, 0.25], vec![-0.75, 2.0]], vec![0, 1, 1], ["neg", "pos"])
        .unwrap()
}

/// Largest relative gap between backprop and central differences (step
/// `h`) over all parameters of a [3]-hidden network on the probe set.
pub fn gradient_check(seed: u64, activation: Activation, h: f64) -> f64 {
    let m = mlp_probe();
    let params = MlpParams {
        hidden: vec![3],
        activation,
        ..MlpParams::default()
    };
    let mut net = Mlp::init(m.width(), 2, &params, &mut SplitMix64::new(seed)).unwrap();
    let (_, grad) = net.loss_and_gradient(&m);
    let theta = net.parameters();
    let mut worst = 0.0f64;
    for i in 0..theta.len() {
        let mut t = theta.clone();
        t[i] = theta[i] + h;
        net.set_parameters(&t);
        let up = net.loss(&m);
        t[i] = theta[i] - h;
        net.set_parameters(&t);
        let down = net.loss(&m);
        let numeric = (up - down) / (2.0 * h);
        let scale = grad[i].abs().max(numeric.abs()).max(1e-8);
        worst = worst.max((grad[i] - numeric).abs() / scale);
    }
    net.set_parameters(&theta);
    worst
}

pub fn xor() -> FeatureMatrix {
    FeatureMatrix::from_dense(
        &[vec![0.0, 0.0], vec![0.0, 1.0], vec![1.0, 0.0], vec![1.0, 1.0]],
        vec![0, 1, 1, 0],
        ["neg", "pos"],
    )
    .unwrap()
}

// ---- linear SVM ----

/// 20 points around (2, 2) labelled pos and 20 around (-2, -2) labelled
/// neg, each coordinate offset uniformly within 1.5; separable by x + y = 0.
pub fn blobs(seed: u64) -> FeatureMatrix {
    let mut rng = SplitMix64::new(seed);
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for i in 0..40 {
        let (c, l) = if i % 2 == 0 { (2.0, 1) } else { (-2.0, 0) };
        rows.push(vec![c + rng.uniform(-1.5, 1.5), c + rng.uniform(-1.5, 1.5)]);
        labels.push(l);
    }
    FeatureMatrix::from_dense(&rows, labels, ["neg", "pos"]).unwrap()
}

/// `lambda/2 |w|^2 + mean hinge`, bias unpenalized.
pub fn svm_objective(m: &FeatureMatrix, lambda: f64, w: &[f64], b: f64) -> f64 {
    objective_dense(&m.to_dense(), m.labels(), lambda, w, b)
}

fn objective_dense(dense: &[Vec<f64>], labels: &[usize], lambda: f64, w: &[f64], b: f64) -> f64 {
    let hinge: f64 = dense
        .iter()
        .zip(labels)
        .map(|(x, &l)| {
            let y = if l == 1 { 1.0 } else { -1.0 };
            let f: f64 = x.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() + b;
            (1.0 - y * f).max(0.0)
        })
        .sum();
    0.5 * lambda * w.iter().map(|v| v * v).sum::<f64>() + hinge / dense.len() as f64
}

/// Minimum of the objective over a 2-D weight plus bias grid, refined
/// around the incumbent until the cell is below 1e-4.
pub fn svm_grid_optimum(m: &FeatureMatrix, lambda: f64) -> (f64, [f64; 3]) {
    let dense = m.to_dense();
    let mut center = [0.0; 3];
    let mut half = 4.0;
    let steps = 20i32;
    let mut best = (f64::INFINITY, center);
    while half > 1e-4 {
        let cell = half / f64::from(steps);
        for i in -steps..=steps {
            for j in -steps..=steps {
                for k in -steps..=steps {
                    let p = [
                        center[0] + f64::from(i) * cell,
                        center[1] + f64::from(j) * cell,
                        center[2] + f64::from(k) * cell,
                    ];
                    let v = objective_dense(&dense, m.labels(), lambda, &p[..2], p[2]);
                    if v < best.0 {
                        best = (v, p);
                    }
                }
            }
        }
        center = best.1;
        half = 2.0 * half / f64::from(steps);
    }
    best
}
