//! Deterministic mapping from data facts to word-scale visualizations:
//! variant selection, tooltip text, entity highlight spans and SVG markup.

mod select;
mod spans;
mod svg;
mod tooltip;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::diag::Flag;
use crate::fact::{DataFact, InsightType, SemanticAttribute};
use crate::scalar::{same_value, serde_value, Scalar};

pub use select::select_visualization;
pub use spans::compute_entity_spans;
pub use svg::{render_svg, xml_escape};
pub use tooltip::{build_tooltip, extreme_row, infer_trend};

/// The catalog of word-scale chart variants plus the question-mark fallback.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VariantId {
    ProportionHbarStacked,
    ProportionIconUnit,
    ValueBadge,
    ValueIconNumeric,
    ValueHbarSingle,
    ComparisonVbarGroup,
    ComparisonHbarPair,
    ComparisonIconVs,
    TrendLine,
    TrendLineArea,
    TrendIconArrowUp,
    TrendIconArrowDown,
    ExtremeVbarHighlight,
    ExtremeIconExtremum,
    RankVbarOrdered,
    FallbackIcon,
}

impl VariantId {
    pub const ALL: [VariantId; 16] = [
        VariantId::ProportionHbarStacked,
        VariantId::ProportionIconUnit,
        VariantId::ValueBadge,
        VariantId::ValueIconNumeric,
        VariantId::ValueHbarSingle,
        VariantId::ComparisonVbarGroup,
        VariantId::ComparisonHbarPair,
        VariantId::ComparisonIconVs,
        VariantId::TrendLine,
        VariantId::TrendLineArea,
        VariantId::TrendIconArrowUp,
        VariantId::TrendIconArrowDown,
        VariantId::ExtremeVbarHighlight,
        VariantId::ExtremeIconExtremum,
        VariantId::RankVbarOrdered,
        VariantId::FallbackIcon,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            VariantId::ProportionHbarStacked => "proportion.hbar_stacked",
            VariantId::ProportionIconUnit => "proportion.icon_unit",
            VariantId::ValueBadge => "value.badge",
            VariantId::ValueIconNumeric => "value.icon_numeric",
            VariantId::ValueHbarSingle => "value.hbar_single",
            VariantId::ComparisonVbarGroup => "comparison.vbar_group",
            VariantId::ComparisonHbarPair => "comparison.hbar_pair",
            VariantId::ComparisonIconVs => "comparison.icon_vs",
            VariantId::TrendLine => "trend.line",
            VariantId::TrendLineArea => "trend.line_area",
            VariantId::TrendIconArrowUp => "trend.icon_arrow_up",
            VariantId::TrendIconArrowDown => "trend.icon_arrow_down",
            VariantId::ExtremeVbarHighlight => "extreme.vbar_highlight",
            VariantId::ExtremeIconExtremum => "extreme.icon_extremum",
            VariantId::RankVbarOrdered => "rank.vbar_ordered",
            VariantId::FallbackIcon => "fallback_icon",
        }
    }

    /// The insight type a variant draws, `None` for the fallback icon.
    pub fn insight_type(self) -> Option<InsightType> {
        let prefix = self.as_str().split('.').next()?;
        prefix.parse().ok().filter(|t: &InsightType| t.is_data())
    }
}

impl fmt::Display for VariantId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for VariantId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        VariantId::ALL
            .iter()
            .copied()
            .find(|v| v.as_str() == s)
            .ok_or_else(|| format!("unknown visualization variant `{s}`"))
    }
}

impl Serialize for VariantId {
    fn serialize<Ser: serde::Serializer>(&self, ser: Ser) -> Result<Ser::Ok, Ser::Error> {
        ser.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for VariantId {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let s = String::deserialize(de)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

pub const DEFAULT_PALETTE: [&str; 10] = [
    "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RenderConfig {
    /// Height of the glyph box every visualization must fit in.
    pub glyph_height: u32,
    /// Width of one vertical bar / one chart step.
    pub mark_width: u32,
    /// Full length of horizontal bar charts.
    pub bar_length: u32,
    pub palette: Vec<String>,
    pub max_rank: u32,
    /// Prefer icon variants where the catalog offers one for the same data.
    pub prefer_icons: bool,
}

impl Default for RenderConfig {
    fn default() -> Self {
        RenderConfig {
            glyph_height: 14,
            mark_width: 6,
            bar_length: 60,
            palette: DEFAULT_PALETTE.iter().map(|s| s.to_string()).collect(),
            max_rank: 10,
            prefer_icons: false,
        }
    }
}

impl RenderConfig {
    pub fn color(&self, idx: usize) -> &str {
        if self.palette.is_empty() {
            "#888888"
        } else {
            &self.palette[idx % self.palette.len()]
        }
    }

    pub fn color_index(&self, row: usize) -> usize {
        row % self.palette.len().max(1)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields, bound = "S: Scalar")]
pub struct Mark<S: Scalar> {
    pub id: String,
    pub row: usize,
    pub label: String,
    #[serde(with = "serde_value")]
    pub value: S,
    pub color_index: usize,
    pub color: String,
}

impl<S: Scalar> PartialEq for Mark<S> {
    fn eq(&self, o: &Self) -> bool {
        self.id == o.id
            && self.row == o.row
            && self.label == o.label
            && same_value(self.value, o.value)
            && self.color_index == o.color_index
            && self.color == o.color
    }
}

/// A character range of the segment text bound to one data row.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct HighlightSpan {
    pub start: usize,
    pub end: usize,
    pub row: usize,
    pub color_index: usize,
    pub color: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields, bound = "S: Scalar")]
pub struct VisualizationSpec<S: Scalar> {
    pub variant: VariantId,
    pub fact_index: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub attribute: Option<SemanticAttribute>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub emphasis: Option<usize>,
    pub marks: Vec<Mark<S>>,
    pub tooltip_lines: Vec<String>,
    pub highlight_spans: Vec<HighlightSpan>,
    pub height: u32,
    pub max_width: u32,
    pub svg: String,
}

/// Builds the complete visualization for a fact; `None` for plain text.
pub fn visualize<S: Scalar>(
    fact: &DataFact<S>,
    fact_index: usize,
    cfg: &RenderConfig,
) -> Option<(VisualizationSpec<S>, Vec<Flag>)> {
    let variant = select_visualization(fact, cfg)?;
    let fallback = variant == VariantId::FallbackIcon;
    let attribute = match fact.insight_type() {
        InsightType::Trend => fact.unit_segment.attribute.or_else(|| tooltip::infer_trend(fact.rows())),
        InsightType::Extreme => Some(fact.unit_segment.attribute.unwrap_or(SemanticAttribute::Maximum)),
        _ => None,
    };
    let emphasis = if fact.insight_type() == InsightType::Extreme && !fallback {
        extreme_row(fact)
    } else {
        None
    };
    let marks = if fallback {
        Vec::new()
    } else {
        fact.rows()
            .iter()
            .enumerate()
            .map(|(i, r)| Mark {
                id: format!("mark-{fact_index}-{i}"),
                row: i,
                label: r.breakdown.clone(),
                value: r.value,
                color_index: cfg.color_index(i),
                color: cfg.color(i).to_string(),
            })
            .collect()
    };
    let (highlight_spans, flags) = if fallback {
        (Vec::new(), Vec::new())
    } else {
        compute_entity_spans(fact, cfg)
    };
    let mut spec = VisualizationSpec {
        variant,
        fact_index,
        attribute,
        emphasis,
        marks,
        tooltip_lines: build_tooltip(fact, cfg),
        highlight_spans,
        height: cfg.glyph_height,
        max_width: 0,
        svg: String::new(),
    };
    spec.max_width = svg::layout_width(&spec, cfg);
    spec.svg = render_svg(&spec, cfg);
    Some((spec, flags))
}
