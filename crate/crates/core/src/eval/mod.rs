//! Evaluation of the segmentation and annotation stages against a gold corpus.

mod corpus;
mod metrics;

pub use corpus::{AnnotatedCorpus, CorpusEntry, CorpusFile, GoldParagraph, GoldSegment};
pub use metrics::{classification_report, classification_report_labels, segmentation_accuracy, ClassStats, ClassificationReport};

use std::fmt::Write;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;

use crate::annotator::{annotate, AnnotationMode};
use crate::discoverer::{boundary_set, segment_llm, split_sentences, SegmentSpan};
use crate::fact::InsightType;
use crate::llm::Gateway;
use crate::prompts::PromptLibrary;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("prediction/gold length mismatch: {pred} vs {gold}")]
    LengthMismatch { pred: usize, gold: usize },
    #[error("nothing to evaluate")]
    Empty,
    #[error("label `{0}` is not one of the seven insight types")]
    UnknownLabel(String),
    #[error("corpus: {0}")]
    Corpus(String),
    #[error("{0}")]
    Io(String),
}

/// A segmentation strategy under evaluation. Embedding-based segmenters can
/// be added by implementing this.
pub trait Segmenter: Sync {
    fn name(&self) -> &str;
    fn segment(&self, paragraph: &str) -> Result<Vec<SegmentSpan>, String>;
}

/// One span per sentence.
pub struct RegexSegmenter;

impl Segmenter for RegexSegmenter {
    fn name(&self) -> &str {
        "regex"
    }
    fn segment(&self, paragraph: &str) -> Result<Vec<SegmentSpan>, String> {
        Ok(split_sentences(paragraph))
    }
}

pub struct LlmSegmenter<'a> {
    pub gateway: &'a Gateway,
    pub prompts: &'a PromptLibrary,
}

impl Segmenter for LlmSegmenter<'_> {
    fn name(&self) -> &str {
        "llm"
    }
    fn segment(&self, paragraph: &str) -> Result<Vec<SegmentSpan>, String> {
        segment_llm(paragraph, self.gateway, self.prompts).map(|s| s.spans).map_err(|e| e.to_string())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct Timing {
    pub mean_secs: f64,
    pub sd_secs: f64,
    pub count: usize,
}

impl Timing {
    /// Mean and sample standard deviation.
    pub fn from_durations(ds: &[Duration]) -> Self {
        let n = ds.len();
        if n == 0 {
            return Timing::default();
        }
        let xs: Vec<f64> = ds.iter().map(Duration::as_secs_f64).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let sd = if n > 1 { (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt() } else { 0.0 };
        Timing { mean_secs: mean, sd_secs: sd, count: n }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrategyResult {
    pub strategy: String,
    pub accuracy: Option<f64>,
    pub matched: usize,
    pub paragraphs: usize,
    pub error: Option<String>,
    pub timing: Timing,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscovererReport {
    pub results: Vec<StrategyResult>,
}

impl DiscovererReport {
    pub fn to_table(&self) -> String {
        let mut out = String::from("strategy  accuracy  matched  mean_s    sd_s\n");
        for r in &self.results {
            match (&r.error, r.accuracy) {
                (None, Some(a)) => {
                    let _ = writeln!(
                        out,
                        "{:<8}  {:<8.3}  {:>3}/{:<3}  {:<8.3}  {:.3}",
                        r.strategy, a, r.matched, r.paragraphs, r.timing.mean_secs, r.timing.sd_secs
                    );
                }
                (err, _) => {
                    let _ = writeln!(out, "{:<8}  failed: {}", r.strategy, err.as_deref().unwrap_or("no paragraphs"));
                }
            }
        }
        out
    }
}

pub fn run_discoverer_eval(corpus: &AnnotatedCorpus, strategies: &[&dyn Segmenter]) -> DiscovererReport {
    let gold: Vec<Vec<usize>> = corpus.entries.iter().map(|e| boundary_set(&e.paragraph, &e.spans)).collect();
    let results = strategies
        .iter()
        .map(|s| {
            let runs: Vec<(Result<Vec<SegmentSpan>, String>, Duration)> = corpus
                .entries
                .par_iter()
                .map(|e| {
                    let t = Instant::now();
                    let r = s.segment(&e.paragraph);
                    (r, t.elapsed())
                })
                .collect();
            let timing = Timing::from_durations(&runs.iter().map(|r| r.1).collect::<Vec<_>>());
            let mut pred = Vec::with_capacity(runs.len());
            for ((r, _), e) in runs.into_iter().zip(&corpus.entries) {
                match r {
                    Ok(spans) => pred.push(boundary_set(&e.paragraph, &spans)),
                    Err(err) => {
                        return StrategyResult {
                            strategy: s.name().to_string(),
                            accuracy: None,
                            matched: 0,
                            paragraphs: corpus.entries.len(),
                            error: Some(err),
                            timing,
                        }
                    }
                }
            }
            let matched = pred.iter().zip(&gold).filter(|(p, g)| p == g).count();
            let accuracy = segmentation_accuracy::<f64>(&pred, &gold);
            StrategyResult {
                strategy: s.name().to_string(),
                accuracy: accuracy.as_ref().ok().copied(),
                matched,
                paragraphs: gold.len(),
                error: accuracy.err().map(|e| e.to_string()),
                timing,
            }
        })
        .collect();
    DiscovererReport { results }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnnotatorReport {
    pub mode: AnnotationMode,
    pub report: ClassificationReport<f64>,
    pub timing: Timing,
    pub predictions: Vec<InsightType>,
}

impl AnnotatorReport {
    pub fn to_table(&self) -> String {
        let r = &self.report;
        let mut out = String::new();
        let mode = match self.mode {
            AnnotationMode::TwoStep => "two_step",
            AnnotationMode::OneStep => "one_step",
        };
        let _ = writeln!(out, "mode {mode}, {} segments", r.total);
        let _ = writeln!(
            out,
            "accuracy {:.3}  precision {:.3}  recall {:.3}  f1 {:.3}",
            r.accuracy, r.weighted_precision, r.weighted_recall, r.weighted_f1
        );
        let _ = writeln!(out, "mean {:.3}s  sd {:.3}s per segment", self.timing.mean_secs, self.timing.sd_secs);
        out.push_str("\nlabel       precision  recall  f1     support\n");
        for c in &r.per_class {
            let _ = writeln!(out, "{:<10}  {:<9.3}  {:<6.3}  {:<5.3}  {}", c.label.as_str(), c.precision, c.recall, c.f1, c.support);
        }
        out.push_str("\nconfusion (rows gold, columns predicted, row-normalized)\n          ");
        for t in InsightType::ALL {
            let _ = write!(out, " {:>6.6}", t.as_str());
        }
        out.push('\n');
        for (t, row) in InsightType::ALL.iter().zip(&r.normalized) {
            let _ = write!(out, "{:<10}", t.as_str());
            for v in row {
                let _ = write!(out, " {v:>6.2}");
            }
            out.push('\n');
        }
        for f in &r.flags {
            let _ = writeln!(out, "note: {f}");
        }
        out
    }
}

/// Annotates the gold segments directly, so segmentation errors do not leak in.
pub fn run_annotator_eval(
    corpus: &AnnotatedCorpus,
    mode: AnnotationMode,
    gateway: &Gateway,
    prompts: &PromptLibrary,
) -> Result<AnnotatorReport, EvalError> {
    let segments: Vec<(&str, InsightType)> = corpus
        .entries
        .iter()
        .flat_map(|e| e.spans.iter().map(|s| s.text.as_str()).zip(e.types.iter().copied()))
        .collect();
    let runs: Vec<(InsightType, Duration)> = segments
        .par_iter()
        .map(|(text, _)| {
            let t = Instant::now();
            let r = annotate(text, mode, gateway, prompts);
            (r.final_type, t.elapsed())
        })
        .collect();
    let predictions: Vec<InsightType> = runs.iter().map(|r| r.0).collect();
    let gold: Vec<InsightType> = segments.iter().map(|s| s.1).collect();
    let report = classification_report(&predictions, &gold)?;
    let timing = Timing::from_durations(&runs.iter().map(|r| r.1).collect::<Vec<_>>());
    Ok(AnnotatorReport { mode, report, timing, predictions })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn timing_statistics() {
        let t = Timing::from_durations(&[Duration::from_secs(1), Duration::from_secs(3)]);
        assert_eq!((t.mean_secs, t.count), (2.0, 2));
        assert!((t.sd_secs - 2f64.sqrt()).abs() < 1e-12);
        assert_eq!(Timing::from_durations(&[]).count, 0);
    }

    struct Broken;
    impl Segmenter for Broken {
        fn name(&self) -> &str {
            "broken"
        }
        fn segment(&self, _: &str) -> Result<Vec<SegmentSpan>, String> {
            Err("backend down".into())
        }
    }

    #[test]
    fn failed_strategy_does_not_hide_others() {
        let file = CorpusFile {
            id: "d".into(),
            paragraphs: vec![GoldParagraph {
                text: "A rose 5%. B fell.".into(),
                segments: vec![
                    GoldSegment { start: 0, end: 10, label: "trend".into() },
                    GoldSegment { start: 11, end: 18, label: "none".into() },
                ],
            }],
        };
        let corpus = AnnotatedCorpus::from_files(vec![file]).unwrap();
        let r = run_discoverer_eval(&corpus, &[&Broken, &RegexSegmenter]);
        assert!(r.results[0].error.is_some());
        assert_eq!(r.results[1].accuracy, Some(1.0));
        assert!(r.to_table().contains("broken    failed: backend down"));
    }
}
