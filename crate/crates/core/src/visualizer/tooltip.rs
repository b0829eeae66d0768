use crate::fact::{DataFact, DataSpecEntry, InsightType, SemanticAttribute};
use crate::scalar::{format_value, Scalar};

use super::{select_visualization, RenderConfig, VariantId};

pub fn fallback_line(t: InsightType) -> String {
    format!("May contain data insight of {t}.")
}

/// Row holding the maximum (or minimum) numeric value; the first row when no
/// value is numeric.
pub fn extreme_row<S: Scalar>(fact: &DataFact<S>) -> Option<usize> {
    let rows = fact.rows();
    if rows.is_empty() {
        return None;
    }
    let want_min = fact.unit_segment.attribute == Some(SemanticAttribute::Minimum);
    let mut best: Option<(usize, S)> = None;
    for (i, r) in rows.iter().enumerate() {
        if r.value.is_nan() {
            continue;
        }
        let better = match best {
            None => true,
            Some((_, b)) => (want_min && r.value < b) || (!want_min && r.value > b),
        };
        if better {
            best = Some((i, r.value));
        }
    }
    Some(best.map_or(0, |(i, _)| i))
}

/// Direction implied by the first and last numeric points of a series.
pub fn infer_trend<S: Scalar>(rows: &[DataSpecEntry<S>]) -> Option<SemanticAttribute> {
    let mut pts = rows.iter().filter(|r| !r.value.is_nan());
    let first = pts.next()?;
    let last = pts.last()?;
    Some(if last.value >= first.value { SemanticAttribute::Increasing } else { SemanticAttribute::Decreasing })
}

/// Tooltip text for a fact. Empty for plain text.
pub fn build_tooltip<S: Scalar>(fact: &DataFact<S>, cfg: &RenderConfig) -> Vec<String> {
    let t = fact.insight_type();
    let Some(variant) = select_visualization(fact, cfg) else {
        return Vec::new();
    };
    if variant == VariantId::FallbackIcon {
        return vec![fallback_line(t)];
    }
    let rows = fact.rows();
    let v = |x: S| format_value(x);
    let lines: Vec<String> = match t {
        InsightType::Proportion => {
            rows.iter().map(|r| format!("The proportion of {} is {}.", r.breakdown, v(r.value))).collect()
        }
        InsightType::Value => rows.iter().map(|r| format!("The value of {} is {}.", r.breakdown, v(r.value))).collect(),
        InsightType::Rank => rows.iter().map(|r| format!("Rank {}: {}", v(r.value), r.breakdown)).collect(),
        InsightType::Comparison => {
            let mut out = Vec::new();
            for i in 0..rows.len() {
                for j in i + 1..rows.len() {
                    let (a, b) = (&rows[i], &rows[j]);
                    if a.value.is_nan() || b.value.is_nan() {
                        continue;
                    }
                    out.push(format!(
                        "The difference between {} and {} is {}.",
                        a.breakdown,
                        b.breakdown,
                        v((a.value - b.value).abs())
                    ));
                }
            }
            out
        }
        InsightType::Extreme => {
            let a = fact.unit_segment.attribute.unwrap_or(SemanticAttribute::Maximum);
            extreme_row(fact)
                .map(|i| vec![format!("The {} of {}.", a, rows[i].breakdown)])
                .unwrap_or_default()
        }
        InsightType::Trend => {
            let Some(a) = fact.unit_segment.attribute.or_else(|| infer_trend(rows)) else {
                return vec![fallback_line(t)];
            };
            let numeric: Vec<_> = rows.iter().filter(|r| !r.value.is_nan()).collect();
            let mut out = vec![a.to_string()];
            if let Some(last) = numeric.last() {
                out.push(format!("{} of {} is {}.", last.feature, last.breakdown, v(last.value)));
            }
            if numeric.len() >= 2 {
                let first = numeric[0];
                let last = numeric[numeric.len() - 1];
                out.push(format!("The {} is {}", a, v((last.value - first.value).abs())));
            }
            out
        }
        InsightType::None => Vec::new(),
    };
    if lines.is_empty() {
        vec![fallback_line(t)]
    } else {
        lines
    }
}
