//! The augmented document and its `.gist.json` interchange format.

use serde::{Deserialize, Serialize};

use crate::diag::Flag;
use crate::fact::{validate, BreakdownKind, DataFact, DataSpecEntry, InsightType, SemanticAttribute, UnitSegmentSpec, Violation};
use crate::scalar::{serde_value, Scalar};
use crate::text::normalize_ws;
use crate::visualizer::VisualizationSpec;

pub const SCHEMA_VERSION: u32 = 1;
pub const ARTIFACT_EXTENSION: &str = "gist.json";

/// One unit segment of a paragraph: its data fact plus the rendered visualization.
#[derive(Debug, Clone, PartialEq)]
pub struct AugmentedSegment<S: Scalar> {
    pub fact: DataFact<S>,
    pub visualization: Option<VisualizationSpec<S>>,
    pub flags: Vec<Flag>,
}

impl<S: Scalar> AugmentedSegment<S> {
    pub fn new(fact: DataFact<S>) -> Self {
        AugmentedSegment { fact, visualization: None, flags: Vec::new() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AugmentedDocument<S: Scalar> {
    pub title: Option<String>,
    pub paragraphs: Vec<Vec<AugmentedSegment<S>>>,
}

impl<S: Scalar> Default for AugmentedDocument<S> {
    fn default() -> Self {
        AugmentedDocument { title: None, paragraphs: Vec::new() }
    }
}

impl<S: Scalar> AugmentedDocument<S> {
    pub fn segments(&self) -> impl Iterator<Item = &AugmentedSegment<S>> {
        self.paragraphs.iter().flatten()
    }

    /// Paragraph text rebuilt from its segment contexts.
    pub fn paragraph_text(&self, idx: usize) -> String {
        self.paragraphs[idx].iter().map(|s| s.fact.context()).collect::<Vec<_>>().join(" ")
    }
}

#[derive(Debug, thiserror::Error)]
pub enum InterchangeError {
    #[error("parse error at `{path}`: {message}")]
    Parse { path: String, message: String },
    #[error("unsupported schema_version {0} (expected {SCHEMA_VERSION})")]
    Version(u32),
    #[error("invalid fact at `{path}`: {violations}")]
    Invalid { path: String, violations: String },
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound = "S: Scalar")]
struct DocWire<S: Scalar> {
    schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    title: Option<String>,
    paragraphs: Vec<Vec<SegmentWire<S>>>,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields, bound = "S: Scalar")]
struct SegmentWire<S: Scalar> {
    insight_type: InsightType,
    context: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    attribute: Option<SemanticAttribute>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    position: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    data_spec: Option<Vec<EntryWire<S>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    visualization: Option<VisualizationSpec<S>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    flags: Vec<Flag>,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields, bound = "S: Scalar")]
struct EntryWire<S: Scalar> {
    space: String,
    breakdown: String,
    breakdown_kind: BreakdownKind,
    feature: String,
    #[serde(with = "serde_value")]
    value: S,
}

impl<S: Scalar> From<&AugmentedSegment<S>> for SegmentWire<S> {
    fn from(seg: &AugmentedSegment<S>) -> Self {
        let u = &seg.fact.unit_segment;
        SegmentWire {
            insight_type: u.insight_type,
            context: u.context.clone(),
            attribute: u.attribute,
            position: u.position.clone(),
            data_spec: seg.fact.data_spec.as_ref().map(|rows| {
                rows.iter()
                    .map(|e| EntryWire {
                        space: e.space.clone(),
                        breakdown: e.breakdown.clone(),
                        breakdown_kind: e.breakdown_kind,
                        feature: e.feature.clone(),
                        value: e.value,
                    })
                    .collect()
            }),
            visualization: seg.visualization.clone(),
            flags: seg.flags.clone(),
        }
    }
}

impl<S: Scalar> From<SegmentWire<S>> for AugmentedSegment<S> {
    fn from(w: SegmentWire<S>) -> Self {
        let fact = DataFact {
            unit_segment: UnitSegmentSpec {
                insight_type: w.insight_type,
                context: w.context,
                attribute: w.attribute,
                position: w.position,
            },
            data_spec: w.data_spec.map(|rows| {
                rows.into_iter()
                    .map(|e| DataSpecEntry {
                        space: e.space,
                        breakdown: e.breakdown,
                        breakdown_kind: e.breakdown_kind,
                        feature: e.feature,
                        value: e.value,
                    })
                    .collect()
            }),
        };
        AugmentedSegment { fact, visualization: w.visualization, flags: w.flags }
    }
}

/// Violations across every fact, keyed by `paragraphs[i][j]`.
pub fn validate_document<S: Scalar>(doc: &AugmentedDocument<S>) -> Vec<(String, Violation)> {
    let mut out = Vec::new();
    for (i, para) in doc.paragraphs.iter().enumerate() {
        for (j, seg) in para.iter().enumerate() {
            for v in validate(&seg.fact).violations {
                out.push((format!("paragraphs[{i}][{j}]"), v));
            }
        }
    }
    out
}

fn invalid_error<S: Scalar>(doc: &AugmentedDocument<S>) -> Option<InterchangeError> {
    let violations = validate_document(doc);
    let (path, _) = violations.first()?;
    let path = path.clone();
    let joined = violations
        .iter()
        .filter(|(p, _)| *p == path)
        .map(|(_, v)| v.to_string())
        .collect::<Vec<_>>()
        .join("; ");
    Some(InterchangeError::Invalid { path, violations: joined })
}

/// Canonical pretty-printed JSON with a trailing newline.
pub fn to_interchange<S: Scalar>(doc: &AugmentedDocument<S>) -> Result<String, InterchangeError> {
    if let Some(e) = invalid_error(doc) {
        return Err(e);
    }
    let wire = DocWire {
        schema_version: SCHEMA_VERSION,
        title: doc.title.clone(),
        paragraphs: doc.paragraphs.iter().map(|p| p.iter().map(SegmentWire::from).collect()).collect(),
    };
    let mut s = serde_json::to_string_pretty(&wire).map_err(|e| InterchangeError::Parse {
        path: ".".into(),
        message: e.to_string(),
    })?;
    s.push('\n');
    Ok(s)
}

pub fn from_interchange<S: Scalar>(text: &str) -> Result<AugmentedDocument<S>, InterchangeError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let wire: DocWire<S> = serde_path_to_error::deserialize(de).map_err(|e| InterchangeError::Parse {
        path: e.path().to_string(),
        message: e.inner().to_string(),
    })?;
    if wire.schema_version != SCHEMA_VERSION {
        return Err(InterchangeError::Version(wire.schema_version));
    }
    let doc = AugmentedDocument {
        title: wire.title,
        paragraphs: wire.paragraphs.into_iter().map(|p| p.into_iter().map(AugmentedSegment::from).collect()).collect(),
    };
    match invalid_error(&doc) {
        Some(e) => Err(e),
        None => Ok(doc),
    }
}

/// Checks that segment contexts appear in order, without overlap, and cover
/// the paragraph up to whitespace normalization.
pub fn check_partition(paragraph: &str, contexts: &[&str]) -> Result<(), String> {
    let mut cursor = 0usize;
    for (i, c) in contexts.iter().enumerate() {
        let c = c.trim();
        if c.is_empty() {
            return Err(format!("segment {i} is empty"));
        }
        match paragraph[cursor..].find(c) {
            Some(off) => {
                if !paragraph[cursor..cursor + off].trim().is_empty() {
                    return Err(format!("text before segment {i} is not covered"));
                }
                cursor += off + c.len();
            }
            None => return Err(format!("segment {i} is not a verbatim in-order slice")),
        }
    }
    if !paragraph[cursor..].trim().is_empty() {
        return Err("paragraph tail is not covered".into());
    }
    if normalize_ws(&contexts.join(" ")) != normalize_ws(paragraph) {
        return Err("concatenation differs from paragraph".into());
    }
    Ok(())
}
