//! Turns data-rich prose into documents augmented with word-scale charts.
//!
//! The pipeline has four stages, each usable on its own:
//! [`discoverer`] splits paragraphs into unit segments, [`annotator`] labels
//! each segment with an insight type, [`extractor`] rebuilds the data behind
//! typed segments, and [`visualizer`] maps every fact to an inline SVG with
//! tooltips and entity highlights. [`pipeline`] chains them and [`eval`]
//! scores the first two stages against a gold corpus.
//!
//! Numeric types are generic over [`scalar::Scalar`]; the aliases below fix
//! them to `f64` (and `f32` with a `32` suffix).

pub mod annotator;
pub mod diag;
pub mod discoverer;
pub mod document;
pub mod eval;
pub mod extractor;
pub mod fact;
pub mod llm;
pub mod numbers;
pub mod pipeline;
pub mod prompts;
pub mod scalar;
pub mod text;
pub mod visualizer;

pub use fact::{validate, BreakdownKind, InsightType, SemanticAttribute, UnitSegmentSpec, ValidationReport, Violation};
pub use scalar::Scalar;

pub type DataFact = fact::DataFact<f64>;
pub type DataSpecEntry = fact::DataSpecEntry<f64>;
pub type AugmentedDocument = document::AugmentedDocument<f64>;
pub type AugmentedSegment = document::AugmentedSegment<f64>;
pub type VisualizationSpec = visualizer::VisualizationSpec<f64>;
pub type Mark = visualizer::Mark<f64>;

pub type DataFact32 = fact::DataFact<f32>;
pub type DataSpecEntry32 = fact::DataSpecEntry<f32>;
pub type AugmentedDocument32 = document::AugmentedDocument<f32>;
pub type AugmentedSegment32 = document::AugmentedSegment<f32>;
pub type VisualizationSpec32 = visualizer::VisualizationSpec<f32>;
pub type Mark32 = visualizer::Mark<f32>;

/// Parses a number expression as `f64` (percentages become fractions).
pub fn parse_number(expr: &str) -> f64 {
    numbers::parse_number(expr)
}
