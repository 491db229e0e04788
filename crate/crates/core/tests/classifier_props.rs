mod oracles;

use proptest::prelude::*;
use sentikit_core::classifiers::{
    argmax, entropy, train, Activation, Algorithm, Distance, KnnParams, Model, ModelKind, Node, SvmParams,
    TrainConfig,
};
use sentikit_core::classifiers::mnb::MultinomialNb;
use sentikit_core::classifiers::svm::LinearSvm;
use sentikit_core::classifiers::{MlpParams, MnbParams};
use sentikit_core::vectorize::FeatureMatrix;

/// Small labelled matrices with both classes present.
fn matrix(max_value: u32) -> impl Strategy<Value = FeatureMatrix> {
    (2usize..25, 1usize..6).prop_flat_map(move |(n, w)| {
        (
            prop::collection::vec(prop::collection::vec(0..=max_value, w), n),
            prop::collection::vec(0usize..2, n),
        )
            .prop_filter_map("both classes", |(rows, mut labels)| {
                labels[0] = 0;
                labels[1] = 1;
                let rows: Vec<Vec<f64>> = rows.into_iter().map(|r| r.into_iter().map(f64::from).collect()).collect();
                FeatureMatrix::from_dense(&rows, labels, ["neg", "pos"]).ok()
            })
    })
}

fn fast_config(seed: u64) -> TrainConfig {
    let mut cfg = TrainConfig {
        seed,
        ..TrainConfig::default()
    };
    cfg.mlp = MlpParams {
        hidden: vec![4],
        epochs: 20,
        ..MlpParams::default()
    };
    cfg.svm.epochs = 20;
    cfg
}

/// Instance indices reaching each node, found by routing the training rows.
fn node_members(tree_nodes: &[Node], dense: &[Vec<f64>]) -> Vec<Vec<usize>> {
    let mut members = vec![Vec::new(); tree_nodes.len()];
    for (i, x) in dense.iter().enumerate() {
        let mut at = 0;
        loop {
            members[at].push(i);
            match &tree_nodes[at] {
                Node::Leaf { .. } => break,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                    ..
                } => at = if x[*feature] <= *threshold { *left } else { *right },
            }
        }
    }
    members
}

fn class_counts(idx: &[usize], labels: &[usize]) -> Vec<f64> {
    let mut c = vec![0.0; 2];
    for &i in idx {
        c[labels[i]] += 1.0;
    }
    c
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn training_is_deterministic(m in matrix(4), seed in any::<u64>()) {
        for alg in Algorithm::ALL {
            let cfg = fast_config(seed);
            let a = train(alg, &m, &cfg);
            let b = train(alg, &m, &cfg);
            match (a, b) {
                (Ok(a), Ok(b)) => {
                    let text = a.to_text();
                    prop_assert_eq!(&text, &b.to_text(), "{}", alg);
                    let back = Model::from_text(&text).unwrap();
                    prop_assert_eq!(back.to_text(), text);
                    prop_assert_eq!(back.predict_matrix(&m).unwrap(), a.predict_matrix(&m).unwrap());
                }
                (Err(a), Err(b)) => prop_assert_eq!(a.to_string(), b.to_string()),
                _ => prop_assert!(false, "{} succeeded only once", alg),
            }
        }
    }

    #[test]
    fn mnb_log_space_matches_direct_product(m in matrix(3), q in prop::collection::vec(0u32..4, 5)) {
        let mnb = MultinomialNb::fit(&m, &MnbParams { alpha: 1.0 }).unwrap();
        let x: Vec<f64> = q.iter().take(m.width()).map(|&v| f64::from(v)).collect();
        let direct: Vec<f64> = mnb
            .log_prior()
            .iter()
            .zip(mnb.log_likelihood())
            .map(|(lp, ll)| {
                let mut p = lp.exp();
                for (xi, l) in x.iter().zip(ll) {
                    p *= l.exp().powf(*xi);
                }
                p
            })
            .collect();
        let logged = mnb.joint_log_likelihood(&x);
        // Ignore exact ties, where rounding picks either side.
        if (direct[0] - direct[1]).abs() > 1e-12 * direct[0].max(direct[1]) {
            prop_assert_eq!(argmax(&logged), argmax(&direct));
        }
        let post = mnb.probabilities(&x);
        prop_assert!((post.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tree_splits_reduce_entropy(m in matrix(5)) {
        let model = train(Algorithm::Dtree, &m, &TrainConfig::default()).unwrap();
        let ModelKind::Dtree(tree) = model.kind() else { unreachable!() };
        let dense = m.to_dense();
        let members = node_members(tree.nodes(), &dense);
        for (i, node) in tree.nodes().iter().enumerate() {
            if let Node::Split { gain, left, right, .. } = node {
                prop_assert!(*gain > 0.0);
                let n = members[i].len() as f64;
                let parent = entropy(&class_counts(&members[i], m.labels()));
                let children: f64 = [left, right]
                    .iter()
                    .map(|&&c| members[c].len() as f64 / n * entropy(&class_counts(&members[c], m.labels())))
                    .sum();
                prop_assert!(children <= parent + 1e-12);
                prop_assert!((parent - children - gain).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn one_nn_recalls_distinct_training_rows(m in matrix(6)) {
        let dense = m.to_dense();
        let distinct = (0..dense.len()).all(|i| (0..i).all(|j| dense[i] != dense[j]));
        prop_assume!(distinct);
        let model = train(Algorithm::Knn, &m, &TrainConfig::default()).unwrap();
        prop_assert_eq!(model.predict_matrix(&m).unwrap(), m.labels().to_vec());
    }

    #[test]
    fn svm_objective_decreases(m in matrix(4), seed in any::<u64>()) {
        // lambda * T >= 20 here; with lambda * T below 1 the early 1/(lambda t)
        // steps overshoot and the last iterate carries no guarantee.
        let params = SvmParams { lambda: 0.1, epochs: 100 };
        let (svm, trace) = LinearSvm::fit_traced(&m, &params, seed).unwrap();
        let initial = 1.0; // w = 0, b = 0: every hinge term is 1.
        let last = svm.objective(&m);
        // Data such as duplicated rows with opposite labels make the start
        // point optimal; the last stochastic iterate may then sit slightly above it.
        prop_assert!(last <= initial + 1e-3, "{} -> {}", initial, last);
        prop_assert_eq!(trace.len(), params.epochs + 1);
        prop_assert_eq!(trace[0], initial);
    }

    #[test]
    fn svm_objective_strictly_drops_on_separable_data(seed in any::<u64>(), run_seed in any::<u64>()) {
        let m = oracles::blobs(seed);
        let (svm, trace) = LinearSvm::fit_traced(&m, &SvmParams { lambda: 0.1, epochs: 100 }, run_seed).unwrap();
        prop_assert!(svm.objective(&m) < trace[0]);
    }

    #[test]
    fn mlp_outputs_are_distributions(m in matrix(3), seed in any::<u64>(), tanh in any::<bool>()) {
        let mut cfg = fast_config(seed);
        cfg.mlp.activation = if tanh { Activation::Tanh } else { Activation::Logistic };
        let model = train(Algorithm::Mlp, &m, &cfg).unwrap();
        for x in m.to_dense() {
            let p = model.predict_scores(&x).unwrap();
            prop_assert!(p.iter().all(|v| (0.0..=1.0).contains(v)));
            prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn scaling_leaves_knn_and_tree_unchanged(m in matrix(5), factor in prop_oneof![Just(0.5), Just(2.0), Just(8.0), Just(0.125)], k in 1usize..4) {
        prop_assume!(k <= m.len());
        let scaled = m.scaled(factor);
        for distance in [Distance::Euclidean, Distance::Manhattan] {
            let cfg = TrainConfig { knn: KnnParams { k, distance }, ..TrainConfig::default() };
            let a = train(Algorithm::Knn, &m, &cfg).unwrap();
            let b = train(Algorithm::Knn, &scaled, &cfg).unwrap();
            prop_assert_eq!(a.predict_matrix(&m).unwrap(), b.predict_matrix(&scaled).unwrap());
        }
        let a = train(Algorithm::Dtree, &m, &TrainConfig::default()).unwrap();
        let b = train(Algorithm::Dtree, &scaled, &TrainConfig::default()).unwrap();
        prop_assert_eq!(a.predict_matrix(&m).unwrap(), b.predict_matrix(&scaled).unwrap());
    }
}

#[test]
fn probe_gradient_is_tight_for_more_seeds() {
    for seed in 0..20 {
        let err = oracles::gradient_check(seed, Activation::Logistic, 1e-5);
        assert!(err < 1e-4, "seed {seed}: {err}");
    }
}
