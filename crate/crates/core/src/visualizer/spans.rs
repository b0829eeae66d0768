use crate::diag::{Flag, FlagCode};
use crate::extractor::COMPLEMENT_BREAKDOWN;
use crate::fact::{DataFact, InsightType};
use crate::scalar::Scalar;
use crate::text::{find_chars, find_word_ci};

use super::{extreme_row, HighlightSpan, RenderConfig};

fn locate(context: &str, phrase: &str) -> Option<(usize, usize)> {
    find_chars(context, phrase).or_else(|| find_word_ci(context, phrase))
}

/// Entity highlight spans linking segment text to chart marks.
///
/// Each breakdown is matched at its first case-insensitive, word-bounded
/// occurrence. Position phrases (extreme, value) replace breakdown matching.
/// Overlaps are resolved longest-first, then earliest.
pub fn compute_entity_spans<S: Scalar>(fact: &DataFact<S>, cfg: &RenderConfig) -> (Vec<HighlightSpan>, Vec<Flag>) {
    let ctx = fact.context();
    let rows = fact.rows();
    let mut flags = Vec::new();
    let mut candidates: Vec<(usize, usize, usize)> = Vec::new();

    let positions = fact.unit_segment.position.as_deref().filter(|p| !p.is_empty() && !rows.is_empty());
    match (fact.insight_type(), positions) {
        (InsightType::Extreme, Some(pos)) => {
            let row = extreme_row(fact).unwrap_or(0);
            match locate(ctx, &pos[0]) {
                Some((s, e)) => candidates.push((s, e, row)),
                None => flags.push(Flag::new(FlagCode::EntityNotFound, format!("position `{}`", pos[0]))),
            }
        }
        (InsightType::Value, Some(pos)) => {
            for (k, p) in pos.iter().enumerate() {
                match locate(ctx, p) {
                    Some((s, e)) => candidates.push((s, e, k.min(rows.len() - 1))),
                    None => flags.push(Flag::new(FlagCode::EntityNotFound, format!("position `{p}`"))),
                }
            }
        }
        _ => {
            for (i, r) in rows.iter().enumerate() {
                if fact.insight_type() == InsightType::Proportion && r.breakdown == COMPLEMENT_BREAKDOWN {
                    continue;
                }
                match find_word_ci(ctx, &r.breakdown) {
                    Some((s, e)) => candidates.push((s, e, i)),
                    None => flags.push(Flag::new(FlagCode::EntityNotFound, format!("breakdown `{}`", r.breakdown))),
                }
            }
        }
    }

    candidates.sort_by(|a, b| (b.1 - b.0).cmp(&(a.1 - a.0)).then(a.0.cmp(&b.0)).then(a.2.cmp(&b.2)));
    let mut accepted: Vec<(usize, usize, usize)> = Vec::new();
    for c in candidates {
        if accepted.iter().any(|a| c.0 < a.1 && a.0 < c.1) {
            flags.push(Flag::new(FlagCode::EntityOverlap, format!("row {} span [{}, {}) overlaps", c.2, c.0, c.1)));
        } else {
            accepted.push(c);
        }
    }
    accepted.sort_by_key(|c| (c.0, c.2));
    let spans = accepted
        .into_iter()
        .map(|(start, end, row)| HighlightSpan {
            start,
            end,
            row,
            color_index: cfg.color_index(row),
            color: cfg.color(row).to_string(),
        })
        .collect();
    (spans, flags)
}
