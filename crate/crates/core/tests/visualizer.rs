mod support {
    pub mod gen;
}

use gistvis::visualizer::{build_tooltip, select_visualization, visualize, RenderConfig, VariantId};
use gistvis::{BreakdownKind, DataFact, DataSpecEntry, InsightType, SemanticAttribute, UnitSegmentSpec};
use proptest::prelude::*;

use support::gen::{arb_fact, build_fact, fact_seed};

fn fact(t: InsightType, context: &str, rows: &[(&str, f64)], attribute: Option<SemanticAttribute>) -> DataFact {
    let kind = if t == InsightType::Trend { BreakdownKind::Temporal } else { BreakdownKind::Categorical };
    let mut seg = UnitSegmentSpec::typed(t, context);
    seg.attribute = attribute;
    let feature = match t {
        InsightType::Trend => "EV sales",
        InsightType::Proportion => "sales percentage",
        _ => "value",
    };
    DataFact::new(seg, rows.iter().map(|(b, v)| DataSpecEntry::new("space", *b, kind, feature, *v)).collect())
}

#[test]
fn tooltip_templates_are_byte_exact() {
    use InsightType::{Comparison, Extreme, Proportion, Rank, Trend, Value};
    use SemanticAttribute::*;
    let cases: Vec<(DataFact, Vec<&str>)> = vec![
        (
            fact(Proportion, "Brand A holds half the market.", &[("Brand A", 0.5)], None),
            vec!["The proportion of Brand A is 0.5."],
        ),
        (
            fact(Proportion, "Brand A has 50% and Brand B 30%.", &[("Brand A", 0.5), ("Brand B", 0.3), ("other", 0.2)], None),
            vec!["The proportion of Brand A is 0.5.", "The proportion of Brand B is 0.3.", "The proportion of other is 0.2."],
        ),
        (fact(Value, "Germany sold 1,200 cars.", &[("Germany", 1200.0)], None), vec!["The value of Germany is 1200."]),
        (
            fact(Comparison, "EV vs gas-powered vehicles.", &[("EV", 3932.0), ("gas-powered vehicles", 11435.0)], None),
            vec!["The difference between EV and gas-powered vehicles is 7503."],
        ),
        (
            fact(Comparison, "A, B and C.", &[("A", 1.0), ("B", 4.5), ("C", 2.0)], None),
            vec![
                "The difference between A and B is 3.5.",
                "The difference between A and C is 1.",
                "The difference between B and C is 2.5.",
            ],
        ),
        (
            fact(Extreme, "Everest is the highest mountain.", &[("Everest", 8849.0), ("K2", 8611.0)], Some(Maximum)),
            vec!["The maximum of Everest."],
        ),
        (
            fact(Extreme, "K2 is lower.", &[("Everest", 8849.0), ("K2", 8611.0)], Some(Minimum)),
            vec!["The minimum of K2."],
        ),
        (
            fact(Trend, "EV sales rose from 2021 to 2023.", &[("2021", 100.0), ("2022", 120.0), ("2023", 160.0)], None),
            vec!["increasing", "EV sales of 2023 is 160.", "The increasing is 60"],
        ),
        (
            fact(Trend, "Sales fell.", &[("2022", 80.0), ("2023", 60.5)], Some(Decreasing)),
            vec!["decreasing", "EV sales of 2023 is 60.5.", "The decreasing is 19.5"],
        ),
        (fact(Rank, "France ranks second.", &[("France", 2.0)], None), vec!["Rank 2: France"]),
        (DataFact::degraded(Rank, "Somewhere in the ranking."), vec!["May contain data insight of rank."]),
        (DataFact::degraded(Proportion, "Some share."), vec!["May contain data insight of proportion."]),
    ];
    let cfg = RenderConfig::default();
    for (f, want) in cases {
        assert_eq!(build_tooltip(&f, &cfg), want, "{f:?}");
    }
}

#[test]
fn rank_above_ten_falls_back() {
    let cfg = RenderConfig::default();
    let ok = fact(InsightType::Rank, "x", &[("A", 1.0), ("B", 10.0)], None);
    assert_eq!(select_visualization(&ok, &cfg), Some(VariantId::RankVbarOrdered));
    let over = fact(InsightType::Rank, "x", &[("A", 1.0), ("B", 11.0)], None);
    assert_eq!(select_visualization(&over, &cfg), Some(VariantId::FallbackIcon));
    assert_eq!(build_tooltip(&over, &cfg), ["May contain data insight of rank."]);
}

#[test]
fn all_nan_trend_is_an_arrow() {
    let cfg = RenderConfig::default();
    let up = fact(InsightType::Trend, "Sales kept rising in 2023.", &[("2023", f64::NAN)], Some(SemanticAttribute::Increasing));
    assert_eq!(select_visualization(&up, &cfg), Some(VariantId::TrendIconArrowUp));
    let down = fact(
        InsightType::Trend,
        "It fell.",
        &[("2022", f64::NAN), ("2023", f64::NAN)],
        Some(SemanticAttribute::Decreasing),
    );
    assert_eq!(select_visualization(&down, &cfg), Some(VariantId::TrendIconArrowDown));
    assert_eq!(build_tooltip(&down, &cfg), ["decreasing"]);
}

#[test]
fn proportion_example_spec() {
    let cfg = RenderConfig::default();
    let f = fact(
        InsightType::Proportion,
        "Brand A holds 50% of the market, Brand B 30%.",
        &[("Brand A", 0.5), ("Brand B", 0.3), ("other", 0.2)],
        None,
    );
    let (spec, flags) = visualize(&f, 0, &cfg).unwrap();
    assert!(flags.is_empty(), "{flags:?}");
    assert_eq!(spec.variant, VariantId::ProportionHbarStacked);
    assert_eq!(spec.highlight_spans.len(), 2);
    assert_eq!((spec.highlight_spans[0].start, spec.highlight_spans[0].end), (0, 7));
    assert_eq!(spec.svg.matches("<rect id=\"mark-0-").count(), 3);
    for s in &spec.highlight_spans {
        assert_eq!(s.color, spec.marks[s.row].color);
    }
}

/// Scales every non-rank value; rank values are ordinal.
fn scaled(f: &DataFact, c: f64) -> DataFact {
    let mut g = f.clone();
    if g.insight_type() != InsightType::Rank {
        if let Some(rows) = g.data_spec.as_mut() {
            for r in rows {
                r.value *= c;
            }
        }
    }
    g
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn selection_is_scale_invariant(f in arb_fact(), c in 1e-3..1e3f64, prefer_icons in any::<bool>()) {
        let cfg = RenderConfig { prefer_icons, ..RenderConfig::default() };
        prop_assert_eq!(select_visualization(&f, &cfg), select_visualization(&scaled(&f, c), &cfg));
    }

    #[test]
    fn every_fact_renders_within_the_glyph_box(seed in fact_seed()) {
        let cfg = RenderConfig::default();
        let f = build_fact(&seed);
        match visualize(&f, 3, &cfg) {
            None => prop_assert_eq!(f.insight_type(), InsightType::None),
            Some((spec, _)) => {
                prop_assert!(spec.height <= cfg.glyph_height);
                prop_assert!(!spec.tooltip_lines.is_empty());
                prop_assert!(spec.svg.starts_with("<svg"));
                prop_assert!(spec.svg.ends_with("</svg>"));
                for s in &spec.highlight_spans {
                    prop_assert_eq!(&s.color, &spec.marks[s.row].color);
                }
            }
        }
    }
}
