use crate::fact::{DataFact, InsightType, SemanticAttribute};
use crate::scalar::Scalar;

use super::{RenderConfig, VariantId};

/// Picks the chart variant for a fact. Returns `None` only for plain text.
///
/// Selection looks at the insight type, row counts, NaN-ness, the trend/extreme
/// attribute and (for rank) the ordinal magnitudes; never at value magnitudes.
pub fn select_visualization<S: Scalar>(fact: &DataFact<S>, cfg: &RenderConfig) -> Option<VariantId> {
    use VariantId::*;

    let t = fact.insight_type();
    if t == InsightType::None {
        return None;
    }
    let rows = fact.rows();
    if rows.is_empty() {
        return Some(FallbackIcon);
    }
    let n = rows.len();
    let nan = rows.iter().filter(|r| r.value.is_nan()).count();
    let numeric = nan == 0;
    let attribute = fact.unit_segment.attribute;

    let v = match t {
        InsightType::Proportion if numeric => {
            if cfg.prefer_icons {
                ProportionIconUnit
            } else {
                ProportionHbarStacked
            }
        }
        InsightType::Value if numeric => {
            if n >= 2 {
                ValueHbarSingle
            } else if cfg.prefer_icons {
                ValueIconNumeric
            } else {
                ValueBadge
            }
        }
        InsightType::Trend => {
            let points = n - nan;
            if points >= 4 {
                TrendLineArea
            } else if points >= 2 {
                TrendLine
            } else {
                match attribute {
                    Some(SemanticAttribute::Increasing) => TrendIconArrowUp,
                    Some(SemanticAttribute::Decreasing) => TrendIconArrowDown,
                    _ => FallbackIcon,
                }
            }
        }
        InsightType::Comparison if n >= 2 => {
            if !numeric || (n == 2 && cfg.prefer_icons) {
                ComparisonIconVs
            } else if n == 2 {
                ComparisonHbarPair
            } else {
                ComparisonVbarGroup
            }
        }
        InsightType::Extreme => {
            if numeric && n >= 2 {
                ExtremeVbarHighlight
            } else {
                ExtremeIconExtremum
            }
        }
        InsightType::Rank if numeric => {
            let max_rank = S::from_u32(cfg.max_rank).unwrap_or_else(S::max_value);
            let ordinal = |v: S| v >= S::one() && v.fract().is_zero();
            let ok = rows.iter().all(|r| ordinal(r.value) && r.value <= max_rank);
            if ok {
                RankVbarOrdered
            } else {
                FallbackIcon
            }
        }
        _ => FallbackIcon,
    };
    Some(v)
}
