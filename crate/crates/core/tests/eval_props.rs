use proptest::prelude::*;
use sentikit_core::classifiers::{train, Algorithm, TrainConfig};
use sentikit_core::eval::{compare, evaluate, f_measure, ConfusionMatrix, EvalReport};
use sentikit_core::vectorize::FeatureMatrix;

proptest! {
    #[test]
    fn report_counts_are_consistent(tp in 0u64..500, fn_ in 0u64..500, fp in 0u64..500, tn in 0u64..500) {
        let total = tp + fn_ + fp + tn;
        prop_assume!(total > 0);
        let m = ConfusionMatrix::from_counts("pos", tp, fn_, fp, tn);
        let r = EvalReport::from_counts("x", tp + tn, total, m);
        prop_assert_eq!(r.correct, r.matrix.tp() + r.matrix.tn());
        prop_assert_eq!(r.incorrect, r.matrix.fp() + r.matrix.fn_());
        prop_assert_eq!(r.accuracy, (tp + tn) as f64 / total as f64);
        prop_assert_eq!(r.accuracy_percent(), ((tp + tn) * 100) as f64 / total as f64);
        prop_assert!((0.0..=1.0).contains(&r.f_measure));
    }

    #[test]
    fn swapping_positive_class_swaps_roles(tp in 0u64..50, fn_ in 0u64..50, fp in 0u64..50, tn in 0u64..50) {
        let m = ConfusionMatrix::from_counts("pos", tp, fn_, fp, tn);
        let s = m.swapped("neg");
        prop_assert_eq!((s.tp(), s.fn_(), s.fp(), s.tn()), (tn, fp, fn_, tp));
        let total = tp + fn_ + fp + tn;
        prop_assume!(total > 0 && tn + fn_ > 0);
        let r = EvalReport::from_counts("x", tp + tn, total, s);
        prop_assert_eq!(r.precision, tn as f64 / (tn + fn_) as f64);
    }

    #[test]
    fn f_measure_is_harmonic_mean(p in 0.0f64..=1.0, r in 0.0f64..=1.0) {
        let f = f_measure(p, r);
        if p + r == 0.0 {
            prop_assert_eq!(f, 0.0);
        } else {
            prop_assert!((f - 2.0 * p * r / (p + r)).abs() < 1e-15);
            prop_assert!(f <= p.max(r) + 1e-15 && f >= p.min(r) - 1e-15);
        }
    }
}

#[test]
fn reported_accuracy_and_f_measure() {
    let m = ConfusionMatrix::from_counts("pos", 192, 8, 33, 167);
    let r = EvalReport::from_counts("mnb", 359, 400, m);
    assert_eq!(r.accuracy_percent(), 89.75);
    assert!((f_measure(0.93, 0.96) - 0.9448).abs() < 1e-4);
    assert!((f_measure(0.93, 0.96) - 2.0 * 0.93 * 0.96 / (0.93 + 0.96)).abs() < 1e-9);
}

#[test]
fn compare_ranks_and_matches_single_evaluations() {
    let rows: Vec<Vec<f64>> = (0..40).map(|i| vec![f64::from(i % 10), f64::from((i * 7) % 5)]).collect();
    let labels: Vec<usize> = rows.iter().map(|r| usize::from(r[0] >= 5.0)).collect();
    let m = FeatureMatrix::from_dense(&rows, labels, ["neg", "pos"]).unwrap();
    let models: Vec<_> = [Algorithm::Mnb, Algorithm::Dtree, Algorithm::Knn]
        .into_iter()
        .map(|a| train(a, &m, &TrainConfig::default()).unwrap())
        .collect();
    let reports = compare(&models, &m, "pos").unwrap();
    assert_eq!(reports.len(), 3);
    for w in reports.windows(2) {
        assert!(w[0].rank_cmp(&w[1]).is_le());
    }
    for model in &models {
        let single = evaluate(model, &m, "pos").unwrap();
        assert!(reports.contains(&single));
        // Accuracy recomputed from the emitted matrix.
        let mx = &single.matrix;
        assert_eq!(single.accuracy, (mx.tp() + mx.tn()) as f64 / mx.total() as f64);
    }
}
