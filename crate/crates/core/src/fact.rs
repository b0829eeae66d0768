//! The data-fact schema: one record per unit segment, carrying the segment's
//! insight type, its verbatim text, optional semantic attribute and position
//! phrases, and the reconstructed rows of data.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::scalar::{same_value, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InsightType {
    Value,
    Trend,
    Comparison,
    Proportion,
    Extreme,
    Rank,
    None,
}

impl InsightType {
    /// All seven labels; `None` last.
    pub const ALL: [InsightType; 7] = [
        InsightType::Value,
        InsightType::Trend,
        InsightType::Comparison,
        InsightType::Proportion,
        InsightType::Extreme,
        InsightType::Rank,
        InsightType::None,
    ];

    /// The six data-insight types (everything except `None`).
    pub const DATA: [InsightType; 6] = [
        InsightType::Value,
        InsightType::Trend,
        InsightType::Comparison,
        InsightType::Proportion,
        InsightType::Extreme,
        InsightType::Rank,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            InsightType::Value => "value",
            InsightType::Trend => "trend",
            InsightType::Comparison => "comparison",
            InsightType::Proportion => "proportion",
            InsightType::Extreme => "extreme",
            InsightType::Rank => "rank",
            InsightType::None => "none",
        }
    }

    /// Dense index into [`InsightType::ALL`].
    pub fn index(self) -> usize {
        Self::ALL.iter().position(|t| *t == self).unwrap_or(6)
    }

    pub fn is_data(self) -> bool {
        self != InsightType::None
    }
}

impl fmt::Display for InsightType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown insight type `{0}`")]
pub struct UnknownLabel(pub String);

impl FromStr for InsightType {
    type Err = UnknownLabel;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim().to_ascii_lowercase();
        match s.as_str() {
            "no type" | "no_type" | "notype" | "none" => Ok(InsightType::None),
            other => InsightType::DATA
                .iter()
                .copied()
                .find(|t| t.as_str() == other)
                .ok_or(UnknownLabel(s)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SemanticAttribute {
    Increasing,
    Decreasing,
    Maximum,
    Minimum,
}

impl SemanticAttribute {
    pub fn as_str(self) -> &'static str {
        match self {
            SemanticAttribute::Increasing => "increasing",
            SemanticAttribute::Decreasing => "decreasing",
            SemanticAttribute::Maximum => "maximum",
            SemanticAttribute::Minimum => "minimum",
        }
    }

    /// The insight type this attribute belongs to.
    pub fn owner(self) -> InsightType {
        match self {
            SemanticAttribute::Increasing | SemanticAttribute::Decreasing => InsightType::Trend,
            SemanticAttribute::Maximum | SemanticAttribute::Minimum => InsightType::Extreme,
        }
    }

    /// Maps loose wording ("up", "rose", "highest", "positive", ...) onto an attribute.
    pub fn from_loose(text: &str) -> Option<Self> {
        let t = text.trim().trim_matches(|c: char| !c.is_alphanumeric()).to_lowercase();
        let first = t.split_whitespace().next().unwrap_or("");
        let hit = |words: &[&str]| words.contains(&t.as_str()) || words.contains(&first);
        if hit(&["increasing", "increase", "increased", "up", "rise", "rising", "rose", "grew", "growth", "growing", "positive", "upward", "higher", "gain"]) {
            Some(SemanticAttribute::Increasing)
        } else if hit(&["decreasing", "decrease", "decreased", "down", "fall", "falling", "fell", "decline", "declining", "declined", "drop", "dropped", "negative", "downward", "lower", "loss"]) {
            Some(SemanticAttribute::Decreasing)
        } else if hit(&["maximum", "max", "highest", "largest", "biggest", "most", "top", "greatest", "peak"]) {
            Some(SemanticAttribute::Maximum)
        } else if hit(&["minimum", "min", "lowest", "smallest", "least", "fewest", "bottom"]) {
            Some(SemanticAttribute::Minimum)
        } else {
            None
        }
    }
}

impl fmt::Display for SemanticAttribute {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BreakdownKind {
    Categorical,
    Temporal,
}

impl BreakdownKind {
    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "c" | "cat" | "categorical" | "category" => Some(BreakdownKind::Categorical),
            "t" | "time" | "temporal" | "date" => Some(BreakdownKind::Temporal),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitSegmentSpec {
    pub insight_type: InsightType,
    pub context: String,
    pub attribute: Option<SemanticAttribute>,
    pub position: Option<Vec<String>>,
}

impl UnitSegmentSpec {
    pub fn plain(context: impl Into<String>) -> Self {
        Self::typed(InsightType::None, context)
    }

    pub fn typed(insight_type: InsightType, context: impl Into<String>) -> Self {
        UnitSegmentSpec { insight_type, context: context.into(), attribute: None, position: None }
    }
}

/// One row of reconstructed data: the tabular analog of a text statement.
#[derive(Debug, Clone)]
pub struct DataSpecEntry<S> {
    pub space: String,
    pub breakdown: String,
    pub breakdown_kind: BreakdownKind,
    pub feature: String,
    pub value: S,
}

impl<S: Scalar> DataSpecEntry<S> {
    pub fn new(
        space: impl Into<String>,
        breakdown: impl Into<String>,
        breakdown_kind: BreakdownKind,
        feature: impl Into<String>,
        value: S,
    ) -> Self {
        DataSpecEntry {
            space: space.into(),
            breakdown: breakdown.into(),
            breakdown_kind,
            feature: feature.into(),
            value,
        }
    }
}

impl<S: Scalar> PartialEq for DataSpecEntry<S> {
    fn eq(&self, other: &Self) -> bool {
        self.space == other.space
            && self.breakdown == other.breakdown
            && self.breakdown_kind == other.breakdown_kind
            && self.feature == other.feature
            && same_value(self.value, other.value)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DataFact<S: Scalar> {
    pub unit_segment: UnitSegmentSpec,
    pub data_spec: Option<Vec<DataSpecEntry<S>>>,
}

impl<S: Scalar> DataFact<S> {
    pub fn plain(context: impl Into<String>) -> Self {
        DataFact { unit_segment: UnitSegmentSpec::plain(context), data_spec: None }
    }

    pub fn new(unit_segment: UnitSegmentSpec, data_spec: Vec<DataSpecEntry<S>>) -> Self {
        DataFact { unit_segment, data_spec: Some(data_spec) }
    }

    /// A typed fact whose data could not be recovered. Renders as the fallback icon.
    pub fn degraded(insight_type: InsightType, context: impl Into<String>) -> Self {
        DataFact { unit_segment: UnitSegmentSpec::typed(insight_type, context), data_spec: Some(Vec::new()) }
    }

    pub fn insight_type(&self) -> InsightType {
        self.unit_segment.insight_type
    }

    pub fn context(&self) -> &str {
        &self.unit_segment.context
    }

    pub fn rows(&self) -> &[DataSpecEntry<S>] {
        self.data_spec.as_deref().unwrap_or(&[])
    }

    pub fn is_degraded(&self) -> bool {
        self.insight_type().is_data() && self.rows().is_empty()
    }
}

/// A broken schema invariant. Violations are data, not errors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    EmptyContext,
    DataSpecForbiddenForNone,
    DataSpecRequired(InsightType),
    AttributeTypeMismatch { attribute: SemanticAttribute, insight_type: InsightType },
    PositionForbidden(InsightType),
    PositionArity { insight_type: InsightType, len: usize },
    EmptyField { row: usize, field: &'static str },
    NanNotAllowed { row: usize },
    NonFiniteValue { row: usize },
    BreakdownKind { row: usize, insight_type: InsightType, expected: BreakdownKind },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyContext => write!(f, "context must be non-empty"),
            Violation::DataSpecForbiddenForNone => write!(f, "data_spec forbidden for none"),
            Violation::DataSpecRequired(t) => write!(f, "data_spec required for {t}"),
            Violation::AttributeTypeMismatch { attribute, insight_type } => {
                write!(f, "attribute/type mismatch: {attribute} is not allowed for {insight_type}")
            }
            Violation::PositionForbidden(t) => write!(f, "position forbidden for {t}"),
            Violation::PositionArity { insight_type, len } => {
                write!(f, "position arity {len} not allowed for {insight_type}")
            }
            Violation::EmptyField { row, field } => write!(f, "dataSpec[{row}].{field} must be non-empty"),
            Violation::NanNotAllowed { row } => {
                write!(f, "dataSpec[{row}].value is NaN but the segment is not a semantic insight")
            }
            Violation::NonFiniteValue { row } => write!(f, "dataSpec[{row}].value must be finite or NaN"),
            Violation::BreakdownKind { row, insight_type, expected } => {
                write!(f, "dataSpec[{row}].breakdownKind must be {expected:?} for {insight_type}")
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    /// True when any violation message contains `needle`.
    pub fn mentions(&self, needle: &str) -> bool {
        self.violations.iter().any(|v| v.to_string().contains(needle))
    }
}

/// NaN is allowed for insights that can be stated without numbers: a trend
/// or extreme carrying its attribute, or a comparison.
fn nan_allowed(seg: &UnitSegmentSpec) -> bool {
    match seg.insight_type {
        InsightType::Trend | InsightType::Extreme => seg.attribute.is_some(),
        InsightType::Comparison => true,
        _ => false,
    }
}

pub fn validate<S: Scalar>(fact: &DataFact<S>) -> ValidationReport {
    let mut out = Vec::new();
    let seg = &fact.unit_segment;
    let t = seg.insight_type;

    if seg.context.trim().is_empty() {
        out.push(Violation::EmptyContext);
    }
    if let Some(a) = seg.attribute {
        if a.owner() != t {
            out.push(Violation::AttributeTypeMismatch { attribute: a, insight_type: t });
        }
    }
    if let Some(pos) = &seg.position {
        match t {
            InsightType::Extreme if pos.len() != 1 => {
                out.push(Violation::PositionArity { insight_type: t, len: pos.len() })
            }
            InsightType::Value if pos.is_empty() => {
                out.push(Violation::PositionArity { insight_type: t, len: 0 })
            }
            InsightType::Extreme | InsightType::Value => {}
            _ => out.push(Violation::PositionForbidden(t)),
        }
    }
    match (&fact.data_spec, t) {
        (Some(_), InsightType::None) => out.push(Violation::DataSpecForbiddenForNone),
        (None, t) if t.is_data() => out.push(Violation::DataSpecRequired(t)),
        _ => {}
    }

    let required_kind = match t {
        InsightType::Rank => Some(BreakdownKind::Categorical),
        InsightType::Trend => Some(BreakdownKind::Temporal),
        _ => None,
    };
    for (row, e) in fact.rows().iter().enumerate() {
        for (field, val) in [("space", &e.space), ("breakdown", &e.breakdown), ("feature", &e.feature)] {
            if val.trim().is_empty() {
                out.push(Violation::EmptyField { row, field });
            }
        }
        if e.value.is_nan() {
            if !nan_allowed(seg) {
                out.push(Violation::NanNotAllowed { row });
            }
        } else if e.value.is_infinite() {
            out.push(Violation::NonFiniteValue { row });
        }
        if let Some(expected) = required_kind {
            if e.breakdown_kind != expected {
                out.push(Violation::BreakdownKind { row, insight_type: t, expected });
            }
        }
    }
    ValidationReport { violations: out }
}
