//! End-to-end orchestration: paragraphs in, augmented document out.

mod config;
mod html;
mod ingest;

pub use config::{build_gateway, BackendConfig, BackendKind, ConfigError, FileConfig};
pub use html::{emit_html, emit_plain_html};
pub use ingest::{parse_source, Block, BlockKind, InputFormat, SourceDocument};

use rayon::prelude::*;

use crate::annotator::{annotate, AnnotationMode};
use crate::diag::{Flag, FlagCode};
use crate::discoverer::{segment_llm, split_sentences, SegmentSpan};
use crate::document::{AugmentedDocument, AugmentedSegment};
use crate::extractor::extract;
use crate::fact::DataFact;
use crate::llm::Gateway;
use crate::prompts::PromptLibrary;
use crate::scalar::Scalar;
use crate::visualizer::{visualize, RenderConfig, VariantId};

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub mode: AnnotationMode,
    /// Paragraphs processed at once. At least 1.
    pub concurrency: usize,
    pub render: RenderConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig { mode: AnnotationMode::TwoStep, concurrency: 4, render: RenderConfig::default() }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error("concurrency must be at least 1")]
    ZeroConcurrency,
    #[error("could not start worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

/// Counters for one run. `exhausted` is set when any stage ran out of
/// retries; the affected facts were degraded but the document is complete.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunSummary {
    pub paragraphs: usize,
    pub segments: usize,
    pub data_facts: usize,
    pub fallbacks: usize,
    pub flagged_segments: usize,
    pub exhausted: bool,
}

struct ParagraphOutput<S: Scalar> {
    segments: Vec<AugmentedSegment<S>>,
    exhausted: bool,
}

pub struct Pipeline<'a> {
    gateway: &'a Gateway,
    prompts: &'a PromptLibrary,
    config: PipelineConfig,
}

impl<'a> Pipeline<'a> {
    pub fn new(gateway: &'a Gateway, prompts: &'a PromptLibrary, config: PipelineConfig) -> Result<Self, PipelineError> {
        if config.concurrency == 0 {
            return Err(PipelineError::ZeroConcurrency);
        }
        Ok(Pipeline { gateway, prompts, config })
    }

    pub fn config(&self) -> &PipelineConfig {
        &self.config
    }

    fn paragraph<S: Scalar>(&self, text: &str) -> ParagraphOutput<S> {
        let mut exhausted = false;
        let mut para_flags = Vec::new();
        let spans: Vec<SegmentSpan> = match segment_llm(text, self.gateway, self.prompts) {
            Ok(seg) => {
                para_flags = seg.flags;
                seg.spans
            }
            Err(e) => {
                exhausted |= e.is_exhaustion();
                para_flags.push(Flag::new(FlagCode::StageError, format!("segmentation: {e}")));
                split_sentences(text)
            }
        };

        let mut segments = Vec::with_capacity(spans.len());
        for (i, span) in spans.iter().enumerate() {
            let ann = annotate(&span.text, self.config.mode, self.gateway, self.prompts);
            exhausted |= ann.exhausted;
            let mut flags = if i == 0 { std::mem::take(&mut para_flags) } else { Vec::new() };
            flags.extend(ann.flags);
            let fact = if ann.final_type.is_data() {
                let ex = extract::<S>(&span.text, ann.final_type, self.gateway, self.prompts);
                exhausted |= ex.exhausted;
                flags.extend(ex.flags);
                ex.fact
            } else {
                DataFact::plain(span.text.clone())
            };
            segments.push(AugmentedSegment { fact, visualization: None, flags });
        }
        ParagraphOutput { segments, exhausted }
    }

    /// Segmentation, annotation and extraction only: the returned document
    /// has no visualizations yet. Stage failures degrade single facts.
    pub fn extract_document<S: Scalar>(&self, source: &SourceDocument) -> Result<(AugmentedDocument<S>, bool), PipelineError> {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(self.config.concurrency).build()?;
        let outputs: Vec<ParagraphOutput<S>> = pool.install(|| {
            source
                .blocks
                .par_iter()
                .map(|b| match b.kind {
                    BlockKind::Paragraph => self.paragraph(&b.text),
                    BlockKind::Verbatim => ParagraphOutput {
                        segments: vec![AugmentedSegment::new(DataFact::plain(b.text.clone()))],
                        exhausted: false,
                    },
                })
                .collect()
        });
        let exhausted = outputs.iter().any(|o| o.exhausted);
        let paragraphs = outputs.into_iter().map(|o| o.segments).collect();
        Ok((AugmentedDocument { title: source.title.clone(), paragraphs }, exhausted))
    }

    /// Runs every stage over `source`. The document always completes.
    pub fn augment<S: Scalar>(&self, source: &SourceDocument) -> Result<(AugmentedDocument<S>, RunSummary), PipelineError> {
        let (mut doc, exhausted) = self.extract_document(source)?;
        attach_visualizations(&mut doc, &self.config.render);
        let mut summary = RunSummary { paragraphs: doc.paragraphs.len(), exhausted, ..RunSummary::default() };
        summarize(&doc, &mut summary);
        Ok((doc, summary))
    }
}

/// Numbers facts in document order and renders each one.
pub fn attach_visualizations<S: Scalar>(doc: &mut AugmentedDocument<S>, render: &RenderConfig) {
    for (fact_index, seg) in doc.paragraphs.iter_mut().flatten().enumerate() {
        seg.visualization = None;
        if let Some((vis, flags)) = visualize(&seg.fact, fact_index, render) {
            seg.flags.extend(flags);
            seg.visualization = Some(vis);
        }
    }
}

fn summarize<S: Scalar>(doc: &AugmentedDocument<S>, summary: &mut RunSummary) {
    for seg in doc.segments() {
        summary.segments += 1;
        if seg.fact.insight_type().is_data() {
            summary.data_facts += 1;
        }
        if seg.visualization.as_ref().is_some_and(|v| v.variant == VariantId::FallbackIcon) {
            summary.fallbacks += 1;
        }
        if !seg.flags.is_empty() {
            summary.flagged_segments += 1;
        }
    }
}
