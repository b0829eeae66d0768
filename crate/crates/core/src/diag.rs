use std::fmt;

use serde::{Deserialize, Serialize};

/// Non-fatal conditions recorded while processing a segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlagCode {
    AlignmentFallback,
    CheckerFailed,
    ModeratorFallback,
    AnnotationFailed,
    ExtractionFailed,
    RowDropped,
    PositionDropped,
    AttributeInferred,
    AttributeDropped,
    ProportionRescaled,
    ProportionOverflow,
    TrendSinglePoint,
    EntityNotFound,
    EntityOverlap,
    StageError,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Flag {
    pub code: FlagCode,
    pub detail: String,
}

impl Flag {
    pub fn new(code: FlagCode, detail: impl Into<String>) -> Self {
        Flag { code, detail: detail.into() }
    }
}

impl fmt::Display for Flag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}: {}", self.code, self.detail)
    }
}

pub fn has_flag(flags: &[Flag], code: FlagCode) -> bool {
    flags.iter().any(|f| f.code == code)
}
