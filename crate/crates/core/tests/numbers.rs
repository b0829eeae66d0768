//! Number normalization checked against a hand-computed expression table and
//! round-trip properties.

use gistvis::numbers::parse_number;
use proptest::prelude::*;

fn table() -> Vec<(String, f64)> {
    include_str!("data/number_table.tsv")
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty() || l.starts_with('\t'))
        .map(|l| {
            let (expr, val) = l.split_once('\t').expect("tab-separated row");
            (expr.to_string(), val.trim().parse::<f64>().expect("expected value"))
        })
        .collect()
}

#[test]
fn matches_hand_computed_table() {
    let rows = table();
    assert!(rows.len() >= 54, "table has {} rows", rows.len());
    let mut bad = Vec::new();
    for (expr, want) in &rows {
        let got: f64 = parse_number(expr);
        let ok = if want.is_nan() { got.is_nan() } else { got == *want };
        if !ok {
            bad.push(format!("{expr:?}: got {got}, want {want}"));
        }
    }
    assert!(bad.is_empty(), "{}", bad.join("\n"));
}

proptest! {
    #[test]
    fn integers_round_trip(n in -1_000_000_000_000i64..=1_000_000_000_000i64) {
        prop_assert_eq!(parse_number::<f64>(&n.to_string()), n as f64);
    }

    #[test]
    fn grouped_integers_round_trip(n in 0u64..=1_000_000_000_000u64) {
        let digits = n.to_string();
        let mut grouped = String::new();
        for (i, c) in digits.chars().enumerate() {
            if i > 0 && (digits.len() - i) % 3 == 0 {
                grouped.push(',');
            }
            grouped.push(c);
        }
        prop_assert_eq!(parse_number::<f64>(&grouped), n as f64);
    }

    #[test]
    fn idempotent_on_rendered_output(s in "[a-z0-9 ,.%-]{0,24}") {
        let once: f64 = parse_number(&s);
        let twice: f64 = parse_number(&once.to_string());
        prop_assert!((once.is_nan() && twice.is_nan()) || once == twice, "{} -> {} -> {}", s, once, twice);
    }

    #[test]
    fn total_on_arbitrary_text(s in "\\PC{0,40}") {
        let _ = parse_number::<f64>(&s);
    }
}
