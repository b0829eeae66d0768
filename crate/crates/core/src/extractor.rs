//! Data extraction for typed segments: one model call yields a draft table,
//! then [`coerce_rows`] turns it into a valid [`DataFact`] deterministically.

use crate::diag::{Flag, FlagCode};
use crate::fact::{validate, BreakdownKind, DataFact, DataSpecEntry, InsightType, SemanticAttribute, UnitSegmentSpec};
use crate::llm::{DraftRow, ExtractionDraft, Gateway, Shape, Structured};
use crate::numbers::{parse_magnitude, parse_ordinal};
use crate::prompts::PromptLibrary;
use crate::scalar::Scalar;
use crate::text::find_chars;
use crate::visualizer::infer_trend;

/// Breakdown of the synthetic row that closes a proportion to 1.
pub const COMPLEMENT_BREAKDOWN: &str = "other";
/// Shares may overshoot 1 by this much before the fact is flagged.
pub const PROPORTION_TOLERANCE: f64 = 0.01;

#[derive(Debug, Clone, PartialEq)]
pub struct Extraction<S: Scalar> {
    pub fact: DataFact<S>,
    pub flags: Vec<Flag>,
    pub exhausted: bool,
}

const MONTHS: &[&str] = &[
    "january", "february", "march", "april", "may", "june", "july", "august", "september", "october", "november",
    "december", "jan", "feb", "mar", "apr", "jun", "jul", "aug", "sep", "sept", "oct", "nov", "dec",
];

/// Year, quarter or month tokens mark a breakdown as temporal.
pub fn looks_temporal(breakdown: &str) -> bool {
    let lower = breakdown.to_lowercase();
    lower.split(|c: char| !c.is_alphanumeric()).filter(|t| !t.is_empty()).any(|tok| {
        let is_year = tok.len() == 4 && tok.chars().all(|c| c.is_ascii_digit()) && matches!(&tok[..1], "1" | "2");
        let decade = tok.len() == 5 && tok.ends_with('s') && tok[..4].chars().all(|c| c.is_ascii_digit());
        let fiscal = tok.len() == 6 && tok.starts_with("fy") && tok[2..].chars().all(|c| c.is_ascii_digit());
        let quarter = tok.len() == 2 && tok.starts_with('q') && matches!(&tok[1..], "1" | "2" | "3" | "4");
        is_year || decade || fiscal || quarter || tok == "quarter" || MONTHS.contains(&tok)
    })
}

fn round9(x: f64) -> f64 {
    (x * 1e9).round() / 1e9
}

fn drop_row(flags: &mut Vec<Flag>, row: &DraftRow, why: &str) {
    flags.push(Flag::new(FlagCode::RowDropped, format!("`{}` = `{}`: {why}", row.breakdown, row.value_text)));
}

/// Applies number parsing and the per-type constraints to a draft.
/// Returns a degraded fact (empty data spec) when no usable row remains.
pub fn coerce_rows<S: Scalar>(draft: &ExtractionDraft, t: InsightType, segment: &str) -> (DataFact<S>, Vec<Flag>) {
    assert!(t.is_data(), "coerce_rows needs a data insight type");
    let mut flags = Vec::new();
    let mut rows: Vec<DataSpecEntry<S>> = Vec::new();

    for d in &draft.rows {
        if [&d.space, &d.breakdown, &d.feature].iter().any(|s| s.trim().is_empty()) {
            drop_row(&mut flags, d, "empty field");
            continue;
        }
        let kind = d.breakdown_kind.unwrap_or_else(|| {
            if looks_temporal(&d.breakdown) {
                BreakdownKind::Temporal
            } else {
                BreakdownKind::Categorical
            }
        });
        match (t, kind) {
            (InsightType::Rank, BreakdownKind::Temporal) => {
                drop_row(&mut flags, d, "rank needs a categorical breakdown");
                continue;
            }
            (InsightType::Trend, BreakdownKind::Categorical) => {
                drop_row(&mut flags, d, "trend needs a temporal breakdown");
                continue;
            }
            _ => {}
        }

        let value: S = match t {
            InsightType::Rank => {
                let (n, _) = parse_magnitude::<S>(&d.value_text);
                match parse_ordinal(&d.value_text) {
                    Some(r) => S::from_f64_lossy(r as f64),
                    None if n >= S::one() && n.fract() == S::zero() => n,
                    None => {
                        drop_row(&mut flags, d, "not a rank");
                        continue;
                    }
                }
            }
            InsightType::Proportion => {
                let (m, pct) = parse_magnitude::<S>(&d.value_text);
                let m = m.to_f64_lossy();
                let share = if m.is_nan() || m < 0.0 {
                    None
                } else if pct {
                    Some(m / 100.0)
                } else if m <= 1.0 {
                    Some(m)
                } else if m <= 100.0 {
                    flags.push(Flag::new(FlagCode::ProportionRescaled, format!("`{}` read as a percentage", d.value_text)));
                    Some(m / 100.0)
                } else {
                    None
                };
                match share.filter(|s| *s <= 1.0) {
                    Some(s) => S::from_f64_lossy(round9(s)),
                    None => {
                        drop_row(&mut flags, d, "not a share");
                        continue;
                    }
                }
            }
            _ => parse_magnitude::<S>(&d.value_text).0,
        };
        if value.is_nan() && matches!(t, InsightType::Value | InsightType::Proportion) {
            drop_row(&mut flags, d, "no number");
            continue;
        }
        rows.push(DataSpecEntry::new(d.space.trim(), d.breakdown.trim(), kind, d.feature.trim(), value));
    }

    let mut spec = UnitSegmentSpec::typed(t, segment);
    let attribute = draft.attribute_text.as_deref().and_then(|a| {
        let parsed = SemanticAttribute::from_loose(a);
        match parsed {
            Some(p) if p.owner() == t => Some(p),
            _ => {
                flags.push(Flag::new(FlagCode::AttributeDropped, format!("`{a}` does not apply to {t}")));
                None
            }
        }
    });

    let numeric = rows.iter().filter(|r| !r.value.is_nan()).count();
    match t {
        InsightType::Trend => {
            if numeric >= 2 {
                let before = rows.len();
                rows.retain(|r| !r.value.is_nan());
                if rows.len() < before {
                    flags.push(Flag::new(FlagCode::RowDropped, "points without a number"));
                }
                spec.attribute = attribute.or_else(|| {
                    let a = infer_trend(&rows);
                    if let Some(a) = a {
                        flags.push(Flag::new(FlagCode::AttributeInferred, a.as_str()));
                    }
                    a
                });
            } else if let (Some(a), false) = (attribute, rows.is_empty()) {
                if numeric == 1 {
                    flags.push(Flag::new(FlagCode::TrendSinglePoint, "one point kept as a direction only"));
                }
                rows.truncate(1);
                rows[0].value = S::nan();
                spec.attribute = Some(a);
            } else {
                rows.clear();
            }
        }
        InsightType::Extreme => {
            let a = attribute.or_else(|| segment.split_whitespace().find_map(SemanticAttribute::from_loose).filter(|a| a.owner() == t));
            spec.attribute = Some(a.unwrap_or_else(|| {
                flags.push(Flag::new(FlagCode::AttributeInferred, "maximum"));
                SemanticAttribute::Maximum
            }));
        }
        InsightType::Comparison if rows.len() < 2 || numeric == 0 => rows.clear(),
        InsightType::Proportion if !rows.is_empty() => {
            let sum: f64 = rows.iter().map(|r| r.value.to_f64_lossy()).sum();
            if sum > 1.0 + PROPORTION_TOLERANCE {
                flags.push(Flag::new(FlagCode::ProportionOverflow, format!("shares sum to {}", round9(sum))));
            } else if round9(1.0 - sum) > 0.0 {
                let first = &rows[0];
                rows.push(DataSpecEntry::new(
                    first.space.clone(),
                    COMPLEMENT_BREAKDOWN,
                    BreakdownKind::Categorical,
                    first.feature.clone(),
                    S::from_f64_lossy(round9(1.0 - sum)),
                ));
            }
        }
        _ => {}
    }

    let verbatim: Vec<String> = draft
        .position_texts
        .iter()
        .filter(|p| {
            let ok = find_chars(segment, p.trim()).is_some();
            if !ok {
                flags.push(Flag::new(FlagCode::PositionDropped, format!("`{p}` is not in the segment")));
            }
            ok
        })
        .map(|p| p.trim().to_string())
        .collect();
    match t {
        InsightType::Extreme if !verbatim.is_empty() => spec.position = Some(verbatim[..1].to_vec()),
        InsightType::Value if !verbatim.is_empty() => spec.position = Some(verbatim),
        InsightType::Extreme | InsightType::Value => {}
        _ if !verbatim.is_empty() => flags.push(Flag::new(FlagCode::PositionDropped, format!("position does not apply to {t}"))),
        _ => {}
    }

    if rows.is_empty() {
        flags.push(Flag::new(FlagCode::ExtractionFailed, "no usable rows"));
        return (DataFact::degraded(t, segment), flags);
    }
    let fact = DataFact::new(spec, rows);
    let report = validate(&fact);
    if !report.is_valid() {
        flags.push(Flag::new(FlagCode::ExtractionFailed, format!("{:?}", report.violations)));
        return (DataFact::degraded(t, segment), flags);
    }
    (fact, flags)
}

/// One extraction call plus coercion. Gateway errors degrade the fact.
pub fn extract<S: Scalar>(segment: &str, t: InsightType, gateway: &Gateway, prompts: &PromptLibrary) -> Extraction<S> {
    match gateway.complete_structured(&prompts.extractor(t, segment), &Shape::ExtractionTable) {
        Ok(Structured::Table(draft)) => {
            let (fact, flags) = coerce_rows(&draft, t, segment);
            Extraction { fact, flags, exhausted: false }
        }
        Ok(_) => unreachable!("table shape yields a table"),
        Err(e) => Extraction {
            fact: DataFact::degraded(t, segment),
            flags: vec![Flag::new(FlagCode::ExtractionFailed, e.to_string())],
            exhausted: e.is_exhaustion(),
        },
    }
}
