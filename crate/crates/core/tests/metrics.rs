use std::collections::BTreeMap;

use gistvis::eval::{classification_report, classification_report_labels, ClassificationReport};
use gistvis::InsightType;
use num_rational::Ratio;
use proptest::prelude::*;
use serde::Deserialize;

type Q = Ratio<i64>;

#[derive(Deserialize)]
struct Fixture {
    gold: Vec<String>,
    pred: Vec<String>,
    expected: Expected,
}

#[derive(Deserialize)]
struct Expected {
    accuracy: String,
    weighted_precision: String,
    weighted_recall: String,
    weighted_f1: String,
    confusion: Vec<Vec<usize>>,
    normalized: Vec<Vec<String>>,
    per_class: BTreeMap<String, PerClass>,
    zero_prediction_flags: Vec<String>,
}

#[derive(Deserialize)]
struct PerClass {
    precision: String,
    recall: String,
    f1: String,
    support: usize,
    predicted: usize,
}

fn q(s: &str) -> Q {
    s.parse().unwrap_or_else(|_| panic!("bad fraction {s}"))
}

fn fixture() -> Fixture {
    serde_json::from_str(include_str!("data/metrics_20.json")).unwrap()
}

#[test]
fn twenty_item_fixture_matches_every_cell() {
    let f = fixture();
    assert_eq!(f.gold.len(), 20);
    let pred: Vec<&str> = f.pred.iter().map(String::as_str).collect();
    let gold: Vec<&str> = f.gold.iter().map(String::as_str).collect();
    let r: ClassificationReport<Q> = classification_report_labels(&pred, &gold).unwrap();
    let e = f.expected;

    assert_eq!(r.total, 20);
    assert_eq!(r.accuracy, q(&e.accuracy));
    assert_eq!(r.weighted_precision, q(&e.weighted_precision));
    assert_eq!(r.weighted_recall, q(&e.weighted_recall));
    assert_eq!(r.weighted_f1, q(&e.weighted_f1));

    for (i, row) in e.confusion.iter().enumerate() {
        assert_eq!(&r.confusion[i][..], &row[..], "confusion row {i}");
    }
    for (i, row) in e.normalized.iter().enumerate() {
        let want: Vec<Q> = row.iter().map(|s| q(s)).collect();
        assert_eq!(r.normalized[i], want, "normalized row {i}");
    }
    assert_eq!(r.per_class.len(), 7);
    for c in &r.per_class {
        let want = &e.per_class[c.label.as_str()];
        assert_eq!(c.precision, q(&want.precision), "{} precision", c.label);
        assert_eq!(c.recall, q(&want.recall), "{} recall", c.label);
        assert_eq!(c.f1, q(&want.f1), "{} f1", c.label);
        assert_eq!(c.support, want.support, "{} support", c.label);
        assert_eq!(c.predicted, want.predicted, "{} predicted", c.label);
    }
    assert_eq!(r.flags.len(), e.zero_prediction_flags.len());
    for (flag, label) in r.flags.iter().zip(&e.zero_prediction_flags) {
        assert!(flag.starts_with(label.as_str()), "{flag}");
    }
}

#[test]
fn float_report_agrees_with_exact_one() {
    let f = fixture();
    let pred: Vec<&str> = f.pred.iter().map(String::as_str).collect();
    let gold: Vec<&str> = f.gold.iter().map(String::as_str).collect();
    let r: ClassificationReport<f64> = classification_report_labels(&pred, &gold).unwrap();
    assert!((r.weighted_f1 - 514.0 / 825.0).abs() < 1e-12);
    assert!((r.accuracy - 0.65).abs() < 1e-12);
}

fn labels(n: std::ops::Range<usize>) -> impl Strategy<Value = Vec<InsightType>> {
    prop::collection::vec(prop::sample::select(InsightType::ALL.to_vec()), n)
}

fn paired() -> impl Strategy<Value = (Vec<InsightType>, Vec<InsightType>)> {
    (1usize..60).prop_flat_map(|n| (labels(n..n + 1), labels(n..n + 1)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn identity_scores_one(gold in labels(1..60)) {
        let r: ClassificationReport<Q> = classification_report(&gold, &gold).unwrap();
        let one = Q::from_integer(1);
        prop_assert_eq!(r.accuracy, one);
        prop_assert_eq!(r.weighted_precision, one);
        prop_assert_eq!(r.weighted_recall, one);
        prop_assert_eq!(r.weighted_f1, one);
        for i in 0..7 {
            for j in 0..7 {
                if i != j {
                    prop_assert_eq!(r.confusion[i][j], 0);
                }
            }
        }
        prop_assert!(r.flags.is_empty());
    }

    #[test]
    fn permutation_does_not_change_the_report(
        (pred, gold) in paired(),
        seed in any::<u64>(),
    ) {
        let mut idx: Vec<usize> = (0..gold.len()).collect();
        // Fisher-Yates driven by a small LCG so the shuffle is part of the case.
        let mut s = seed;
        for i in (1..idx.len()).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            idx.swap(i, (s >> 33) as usize % (i + 1));
        }
        let p2: Vec<_> = idx.iter().map(|&i| pred[i]).collect();
        let g2: Vec<_> = idx.iter().map(|&i| gold[i]).collect();
        let a: ClassificationReport<Q> = classification_report(&pred, &gold).unwrap();
        let b: ClassificationReport<Q> = classification_report(&p2, &g2).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn confusion_marginals_match_counts((pred, gold) in paired()) {
        let r: ClassificationReport<Q> = classification_report(&pred, &gold).unwrap();
        let total: usize = r.confusion.iter().flatten().sum();
        prop_assert_eq!(total, gold.len());
        for (i, c) in r.per_class.iter().enumerate() {
            let t = InsightType::ALL[i];
            prop_assert_eq!(c.support, gold.iter().filter(|g| **g == t).count());
            prop_assert_eq!(c.predicted, pred.iter().filter(|p| **p == t).count());
        }
        let zero = Q::from_integer(0);
        let one = Q::from_integer(1);
        prop_assert!(r.accuracy >= zero && r.accuracy <= one);
        prop_assert_eq!(r.weighted_recall, r.accuracy);
    }
}

#[test]
fn mismatched_lengths_are_an_error() {
    assert!(classification_report::<f64>(&[InsightType::Value], &[]).is_err());
    assert!(classification_report_labels::<f64>(&["value"], &["histogram"]).is_err());
}
