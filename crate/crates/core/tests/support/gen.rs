//! Proptest strategies shared by the integration tests and the acceptance
//! target. Every generated fact passes `validate`.
#![allow(dead_code)]

use gistvis::diag::{Flag, FlagCode};
use gistvis::document::AugmentedSegment;
use gistvis::pipeline::attach_visualizations;
use gistvis::visualizer::RenderConfig;
use gistvis::{AugmentedDocument, BreakdownKind, DataFact, DataSpecEntry, InsightType, SemanticAttribute, UnitSegmentSpec};
use proptest::prelude::*;
use proptest::sample::select;

pub const CATEGORIES: [&str; 8] =
    ["Brand A", "Brand B", "EV", "gas-powered vehicles", "Germany", "France", "urban areas", "rural areas"];
pub const YEARS: [&str; 8] = ["2016", "2017", "2018", "2019", "2020", "2021", "2022", "2023"];
const FILLER: [&str; 6] = ["sales", "market share", "revenue", "emissions", "visitors", "output"];

fn value() -> impl Strategy<Value = f64> {
    prop_oneof![
        -1.0e6..1.0e6f64,
        (0i64..100_000).prop_map(|x| x as f64),
        (0u32..10_000).prop_map(|x| f64::from(x) / 100.0),
    ]
}

/// Raw material for one fact; `build_fact` turns it into a valid fact.
#[derive(Debug, Clone)]
pub struct FactSeed {
    pub type_idx: usize,
    pub rows: usize,
    pub values: Vec<f64>,
    pub nan_mask: Vec<bool>,
    pub attr: u8,
    pub with_position: bool,
    pub filler: usize,
    pub offset: usize,
}

pub fn fact_seed() -> impl Strategy<Value = FactSeed> {
    (
        0usize..7,
        0usize..6,
        prop::collection::vec(value(), 6),
        prop::collection::vec(any::<bool>(), 6),
        0u8..3,
        any::<bool>(),
        0usize..FILLER.len(),
        0usize..8,
    )
        .prop_map(|(type_idx, rows, values, nan_mask, attr, with_position, filler, offset)| FactSeed {
            type_idx,
            rows,
            values,
            nan_mask,
            attr,
            with_position,
            filler,
            offset,
        })
}

pub fn build_fact(s: &FactSeed) -> DataFact {
    let t = InsightType::ALL[s.type_idx];
    let temporal = t == InsightType::Trend;
    let names: Vec<&str> = (0..s.rows)
        .map(|i| {
            let pool = if temporal { &YEARS } else { &CATEGORIES };
            pool[(s.offset + i) % pool.len()]
        })
        .collect();
    let feature = FILLER[s.filler];
    let context = if names.is_empty() {
        format!("The {feature} figures were reported without details.")
    } else {
        format!("The {feature} of {} were reported.", names.join(" and "))
    };
    if t == InsightType::None {
        return DataFact::plain(context);
    }
    if names.is_empty() {
        return DataFact::degraded(t, context);
    }
    let mut seg = UnitSegmentSpec::typed(t, context);
    seg.attribute = match (t, s.attr) {
        (InsightType::Trend, 1) => Some(SemanticAttribute::Increasing),
        (InsightType::Trend, 2) => Some(SemanticAttribute::Decreasing),
        (InsightType::Extreme, 1) => Some(SemanticAttribute::Maximum),
        (InsightType::Extreme, 2) => Some(SemanticAttribute::Minimum),
        _ => None,
    };
    let nan_ok = match t {
        InsightType::Trend | InsightType::Extreme => seg.attribute.is_some(),
        InsightType::Comparison => true,
        _ => false,
    };
    let kind = if temporal { BreakdownKind::Temporal } else { BreakdownKind::Categorical };
    let rows = names
        .iter()
        .enumerate()
        .map(|(i, b)| {
            let raw = s.values[i];
            let v = match t {
                InsightType::Proportion => (raw.abs() % 100.0).round() / 100.0,
                InsightType::Rank => ((raw.abs() as u64) % 15 + 1) as f64,
                _ if nan_ok && s.nan_mask[i] => f64::NAN,
                _ => raw,
            };
            DataSpecEntry::new("space", *b, kind, feature, v)
        })
        .collect();
    if s.with_position {
        seg.position = match t {
            InsightType::Extreme => Some(vec![names[0].to_string()]),
            InsightType::Value => Some(names.iter().map(|n| n.to_string()).collect()),
            _ => None,
        };
    }
    DataFact::new(seg, rows)
}

pub fn arb_fact() -> impl Strategy<Value = DataFact> {
    fact_seed().prop_map(|s| build_fact(&s))
}

fn flag() -> impl Strategy<Value = Flag> {
    (select(vec![FlagCode::RowDropped, FlagCode::AttributeInferred, FlagCode::EntityNotFound]), "[a-z ]{0,12}")
        .prop_map(|(c, d)| Flag::new(c, d))
}

fn segment() -> impl Strategy<Value = AugmentedSegment<f64>> {
    (arb_fact(), prop::collection::vec(flag(), 0..2)).prop_map(|(fact, flags)| {
        let mut s = AugmentedSegment::new(fact);
        s.flags = flags;
        s
    })
}

/// Documents with visualizations attached, as the pipeline writes them.
pub fn arb_document() -> impl Strategy<Value = AugmentedDocument> {
    (
        prop::option::of("[A-Z][a-z]{2,10}( [a-z]{2,8}){0,3}"),
        prop::collection::vec(prop::collection::vec(segment(), 1..4), 0..4),
        any::<bool>(),
    )
        .prop_map(|(title, paragraphs, prefer_icons)| {
            let mut doc = AugmentedDocument { title, paragraphs };
            let cfg = RenderConfig { prefer_icons, ..RenderConfig::default() };
            attach_visualizations(&mut doc, &cfg);
            doc
        })
}

const OPENERS: [&str; 10] =
    ["Sales", "The market", "Revenue", "Prices", "Overall", "Germany", "Brand A", "Dr. Smith", "Most firms", "In 2021 the index"];
const MIDDLES: [&str; 12] = [
    "rose by 40%",
    "fell sharply",
    "was flat compared with last year",
    "reached 3,932 units",
    "grew 2.5 percent",
    "doubled in the U.S. market",
    "stayed ahead of rivals, e.g. France",
    "said \"we expect more\"",
    "ranked third among peers",
    "hit a record high",
    "declined for the fourth year",
    "made up half of the total",
];
const ENDS: [&str; 5] = [".", ".", ".", "!", "?"];
const GAPS: [&str; 4] = [" ", "  ", "\n", " \n "];

/// A paragraph of 1..=7 synthetic sentences joined by assorted whitespace.
pub fn arb_paragraph() -> impl Strategy<Value = String> {
    prop::collection::vec((select(&OPENERS[..]), select(&MIDDLES[..]), select(&ENDS[..]), select(&GAPS[..])), 1..8)
        .prop_map(|parts| {
            let mut p = String::new();
            for (i, (o, m, e, g)) in parts.iter().enumerate() {
                if i > 0 {
                    p.push_str(g);
                }
                p.push_str(o);
                p.push(' ');
                p.push_str(m);
                p.push_str(e);
            }
            p
        })
}

/// How a scripted model garbles one candidate segment.
#[derive(Debug, Clone, Copy)]
pub enum Perturb {
    Exact,
    CollapseWs,
    Lowercase,
    DropTerminator,
    ReplaceWord,
}

pub fn perturb() -> impl Strategy<Value = Perturb> {
    prop_oneof![
        4 => Just(Perturb::Exact),
        1 => Just(Perturb::CollapseWs),
        1 => Just(Perturb::Lowercase),
        1 => Just(Perturb::DropTerminator),
        1 => Just(Perturb::ReplaceWord),
    ]
}

pub fn apply(p: Perturb, s: &str) -> String {
    match p {
        Perturb::Exact => s.to_string(),
        Perturb::CollapseWs => s.split_whitespace().collect::<Vec<_>>().join(" "),
        Perturb::Lowercase => s.to_lowercase(),
        Perturb::DropTerminator => s.trim_end_matches(['.', '!', '?']).to_string(),
        Perturb::ReplaceWord => {
            let mut words: Vec<&str> = s.split_whitespace().collect();
            let mid = words.len() / 2;
            words[mid] = "zzzz";
            words.join(" ")
        }
    }
}
