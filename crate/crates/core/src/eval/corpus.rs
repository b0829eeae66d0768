//! Annotated corpus files: one JSON document per file, gold segments given as
//! character offsets into their paragraph.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::discoverer::{is_partition, SegmentSpan};
use crate::fact::InsightType;
use crate::text::char_len;

use super::EvalError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GoldSegment {
    pub start: usize,
    pub end: usize,
    #[serde(rename = "type")]
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GoldParagraph {
    pub text: String,
    pub segments: Vec<GoldSegment>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusFile {
    pub id: String,
    pub paragraphs: Vec<GoldParagraph>,
}

/// A checked paragraph: spans are trimmed and form a partition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusEntry {
    pub doc_id: String,
    pub paragraph: String,
    pub spans: Vec<SegmentSpan>,
    pub types: Vec<InsightType>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AnnotatedCorpus {
    pub entries: Vec<CorpusEntry>,
}

fn trimmed(paragraph: &str, start: usize, end: usize) -> SegmentSpan {
    let chars: Vec<char> = paragraph.chars().collect();
    let (mut s, mut e) = (start, end);
    while s < e && chars[s].is_whitespace() {
        s += 1;
    }
    while e > s && chars[e - 1].is_whitespace() {
        e -= 1;
    }
    SegmentSpan::from_offsets(paragraph, s, e)
}

impl AnnotatedCorpus {
    pub fn from_files(files: Vec<CorpusFile>) -> Result<Self, EvalError> {
        let mut entries = Vec::new();
        for f in files {
            for (pi, p) in f.paragraphs.into_iter().enumerate() {
                let at = format!("{}#{pi}", f.id);
                let len = char_len(&p.text);
                let mut spans = Vec::with_capacity(p.segments.len());
                let mut types = Vec::with_capacity(p.segments.len());
                for g in &p.segments {
                    if g.start >= g.end || g.end > len {
                        return Err(EvalError::Corpus(format!("{at}: span [{}, {}) out of range", g.start, g.end)));
                    }
                    spans.push(trimmed(&p.text, g.start, g.end));
                    types.push(g.label.parse().map_err(|_| EvalError::UnknownLabel(g.label.clone()))?);
                }
                if spans.is_empty() || !is_partition(&p.text, &spans) {
                    return Err(EvalError::Corpus(format!("{at}: gold spans do not partition the paragraph")));
                }
                entries.push(CorpusEntry { doc_id: f.id.clone(), paragraph: p.text, spans, types });
            }
        }
        Ok(AnnotatedCorpus { entries })
    }

    /// Every `*.json` file in `dir`, in file-name order.
    pub fn load_dir(dir: &Path) -> Result<Self, EvalError> {
        let io = |e: std::io::Error| EvalError::Io(format!("{}: {e}", dir.display()));
        let mut paths: Vec<_> = fs::read_dir(dir)
            .map_err(io)?
            .filter_map(Result::ok)
            .map(|e| e.path())
            .filter(|p| p.extension().is_some_and(|x| x == "json"))
            .collect();
        paths.sort();
        let mut files = Vec::with_capacity(paths.len());
        for p in paths {
            let text = fs::read_to_string(&p).map_err(|e| EvalError::Io(format!("{}: {e}", p.display())))?;
            let file: CorpusFile =
                serde_json::from_str(&text).map_err(|e| EvalError::Corpus(format!("{}: {e}", p.display())))?;
            files.push(file);
        }
        Self::from_files(files)
    }

    pub fn segment_count(&self) -> usize {
        self.entries.iter().map(|e| e.spans.len()).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn file(text: &str, segs: &[(usize, usize, &str)]) -> CorpusFile {
        CorpusFile {
            id: "d".into(),
            paragraphs: vec![GoldParagraph {
                text: text.into(),
                segments: segs.iter().map(|(s, e, l)| GoldSegment { start: *s, end: *e, label: l.to_string() }).collect(),
            }],
        }
    }

    #[test]
    fn spans_are_trimmed_and_checked() {
        let c = AnnotatedCorpus::from_files(vec![file("Up 5%. Calm day.", &[(0, 7, "trend"), (7, 16, "no type")])]).unwrap();
        assert_eq!(c.entries[0].spans[0].text, "Up 5%.");
        assert_eq!(c.entries[0].types, [InsightType::Trend, InsightType::None]);
        assert!(AnnotatedCorpus::from_files(vec![file("Up 5%. Calm day.", &[(0, 7, "trend")])]).is_err());
        assert!(AnnotatedCorpus::from_files(vec![file("Up 5%.", &[(0, 6, "distribution")])]).is_err());
        assert!(AnnotatedCorpus::from_files(vec![file("Up 5%.", &[(0, 60, "trend")])]).is_err());
    }
}
