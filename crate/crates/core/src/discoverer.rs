//! Paragraph segmentation: a rule-based sentence tokenizer, the regex
//! baseline built on it, and the LLM segmenter whose output is re-anchored
//! onto the original paragraph text.

use serde::{Deserialize, Serialize};

use crate::diag::{Flag, FlagCode};
use crate::llm::{Gateway, GatewayError, Shape, Structured};
use crate::prompts::PromptLibrary;
use crate::text::{char_slice, non_ws_count, normalize_ws};

/// `[start, end)` in characters, trimmed to non-whitespace on both ends.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SegmentSpan {
    pub start: usize,
    pub end: usize,
    pub text: String,
}

impl SegmentSpan {
    pub fn from_offsets(paragraph: &str, start: usize, end: usize) -> Self {
        SegmentSpan { start, end, text: char_slice(paragraph, start, end).to_string() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaselineSpan {
    pub span: SegmentSpan,
    pub has_number: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AlignError {
    #[error("no candidate segments")]
    Empty,
    #[error("candidate {index} matched only {matched} of {len} characters (out of order or not from this paragraph)")]
    Unanchored { index: usize, matched: usize, len: usize },
    #[error("anchors cover {covered} of {total} paragraph characters")]
    LowCoverage { covered: usize, total: usize },
}

/// Minimum share of characters that must anchor, per candidate and overall.
pub const ALIGN_THRESHOLD: f64 = 0.6;
const MIN_BLOCK: usize = 4;

// Case-sensitive on purpose: "No. 3" is an abbreviation, "said no. Then" is not.
const ABBREVIATIONS: &[&str] = &[
    "Dr.", "Mr.", "Mrs.", "Ms.", "Prof.", "St.", "Jr.", "Sr.", "Inc.", "Ltd.", "Co.", "Corp.", "vs.", "etc.",
    "e.g.", "i.e.", "U.S.", "U.K.", "Jan.", "Feb.", "Mar.", "Apr.", "Aug.", "Sept.", "Oct.", "Nov.", "Dec.",
    "No.", "Fig.", "Mt.", "Gov.", "Gen.", "Rep.", "Sen.", "approx.",
];

fn is_closer(c: char) -> bool {
    matches!(c, '"' | '\'' | ')' | ']' | '\u{201D}' | '\u{2019}')
}

fn is_opener(c: char) -> bool {
    matches!(c, '"' | '\'' | '(' | '[' | '\u{201C}' | '\u{2018}')
}

fn is_abbreviation(chars: &[char], dot: usize) -> bool {
    let mut s = dot;
    while s > 0 && !chars[s - 1].is_whitespace() && !is_opener(chars[s - 1]) {
        s -= 1;
    }
    let token: String = chars[s..=dot].iter().collect();
    if ABBREVIATIONS.contains(&token.as_str()) {
        return true;
    }
    // Single-letter initials such as "J. Smith".
    let body: Vec<char> = chars[s..dot].to_vec();
    body.len() == 1 && body[0].is_alphabetic() && body[0].is_uppercase()
}

/// Sentence spans: split after `.`, `!` or `?` (plus closing quotes and
/// brackets) when followed by whitespace and an uppercase letter.
pub fn split_sentences(paragraph: &str) -> Vec<SegmentSpan> {
    let chars: Vec<char> = paragraph.chars().collect();
    let n = chars.len();
    let mut ends = Vec::new();
    let mut i = 0;
    while i < n {
        let c = chars[i];
        if !matches!(c, '.' | '!' | '?') {
            i += 1;
            continue;
        }
        let mut j = i + 1;
        while j < n && (matches!(chars[j], '.' | '!' | '?') || is_closer(chars[j])) {
            j += 1;
        }
        let mut k = j;
        while k < n && chars[k].is_whitespace() {
            k += 1;
        }
        let mut first = k;
        while first < n && is_opener(chars[first]) {
            first += 1;
        }
        let splits = k > j && first < n && chars[first].is_uppercase() && !(c == '.' && j == i + 1 && is_abbreviation(&chars, i));
        if splits {
            ends.push(j);
        }
        i = j;
    }
    spans_from_ends(paragraph, &chars, &ends)
}

fn spans_from_ends(paragraph: &str, chars: &[char], ends: &[usize]) -> Vec<SegmentSpan> {
    let n = chars.len();
    let mut out = Vec::new();
    let mut start = 0;
    for &e in ends.iter().chain(std::iter::once(&n)) {
        let mut s = start;
        while s < e && chars[s].is_whitespace() {
            s += 1;
        }
        let mut t = e;
        while t > s && chars[t - 1].is_whitespace() {
            t -= 1;
        }
        if t > s {
            out.push(SegmentSpan::from_offsets(paragraph, s, t));
        }
        start = e;
    }
    out
}

/// One span per sentence; `has_number` when the sentence contains a digit.
pub fn segment_regex_baseline(paragraph: &str) -> Vec<BaselineSpan> {
    split_sentences(paragraph)
        .into_iter()
        .map(|span| {
            let has_number = span.text.chars().any(|c| c.is_ascii_digit());
            BaselineSpan { span, has_number }
        })
        .collect()
}

fn fold(c: char) -> char {
    if c.is_whitespace() {
        ' '
    } else {
        c.to_lowercase().next().unwrap_or(c)
    }
}

/// Longest common substring of `a[alo..ahi]` and `b[blo..bhi]`, leftmost in `a`.
fn longest_match(a: &[char], b: &[char], (alo, ahi): (usize, usize), (blo, bhi): (usize, usize)) -> (usize, usize, usize) {
    let mut best = (alo, blo, 0);
    let mut prev = vec![0usize; bhi - blo + 1];
    let mut cur = vec![0usize; bhi - blo + 1];
    for i in alo..ahi {
        for j in blo..bhi {
            let k = j - blo + 1;
            cur[k] = if a[i] == b[j] { prev[k - 1] + 1 } else { 0 };
            if cur[k] > best.2 {
                best = (i + 1 - cur[k], j + 1 - cur[k], cur[k]);
            }
        }
        std::mem::swap(&mut prev, &mut cur);
        cur.iter_mut().for_each(|v| *v = 0);
    }
    best
}

/// Non-crossing common blocks of at least `min_len`, ordered by position.
fn matching_blocks(a: &[char], b: &[char], min_len: usize) -> Vec<(usize, usize, usize)> {
    let mut stack = vec![((0, a.len()), (0, b.len()))];
    let mut out = Vec::new();
    while let Some((ar, br)) = stack.pop() {
        if ar.0 >= ar.1 || br.0 >= br.1 {
            continue;
        }
        let (i, j, k) = longest_match(a, b, ar, br);
        if k < min_len || k == 0 {
            continue;
        }
        out.push((i, j, k));
        stack.push(((ar.0, i), (br.0, j)));
        stack.push(((i + k, ar.1), (j + k, br.1)));
    }
    out.sort_unstable();
    out
}

/// Maps candidate segment texts back onto `paragraph`. Each candidate is
/// anchored left to right; its estimated end is snapped to the nearest
/// sentence boundary and the last span absorbs any unmatched tail.
pub fn align_segments(paragraph: &str, candidates: &[String]) -> Result<Vec<SegmentSpan>, AlignError> {
    let cands: Vec<&String> = candidates.iter().filter(|c| !c.trim().is_empty()).collect();
    if cands.is_empty() {
        return Err(AlignError::Empty);
    }
    // Match against the paragraph with whitespace runs collapsed, the same
    // normalization applied to candidates; `orig[i]` is the source char index.
    let mut p: Vec<char> = Vec::new();
    let mut orig: Vec<usize> = Vec::new();
    for (i, ch) in paragraph.chars().enumerate() {
        let f = fold(ch);
        if f == ' ' && p.last() == Some(&' ') {
            continue;
        }
        p.push(f);
        orig.push(i);
    }
    let n = p.len();
    let mut cursor = 0usize;
    let mut covered = 0usize;
    let mut raw_ends = Vec::with_capacity(cands.len());
    for (index, cand) in cands.iter().enumerate() {
        let c: Vec<char> = normalize_ws(cand).chars().map(fold).collect();
        let lo = cursor.saturating_sub(8);
        let hi = n.min(cursor + 2 * c.len() + 64);
        let blocks = matching_blocks(&c, &p[lo..hi], MIN_BLOCK.min(c.len()));
        let matched: usize = blocks.iter().map(|b| b.2).sum();
        if (matched as f64) < ALIGN_THRESHOLD * c.len() as f64 {
            return Err(AlignError::Unanchored { index, matched, len: c.len() });
        }
        covered += matched;
        let (ci, pj, k) = *blocks.last().expect("matched > 0");
        let tail = c.len() - (ci + k);
        let end = (lo + pj + k + tail).min(n).max(cursor);
        raw_ends.push(if end == 0 { 0 } else { orig[end - 1] + 1 });
        cursor = end;
    }
    let total = normalize_ws(paragraph).chars().count();
    if (covered as f64) < ALIGN_THRESHOLD * total as f64 {
        return Err(AlignError::LowCoverage { covered, total });
    }

    let sentences = split_sentences(paragraph);
    let boundaries: Vec<usize> = sentences.iter().map(|s| s.end).collect();
    let mut ends: Vec<usize> = Vec::new();
    for (i, raw) in raw_ends.iter().enumerate() {
        if i + 1 == raw_ends.len() {
            break;
        }
        let snapped = boundaries
            .iter()
            .copied()
            .min_by_key(|b| (b.abs_diff(*raw), *b))
            .expect("a non-empty paragraph has a sentence");
        if ends.last().is_none_or(|l| snapped > *l) {
            ends.push(snapped);
        }
    }
    // Boundaries are sentence ends; the final span always runs to the paragraph end.
    let chars: Vec<char> = paragraph.chars().collect();
    let spans = spans_from_ends(paragraph, &chars, &ends);
    Ok(spans)
}

/// True when `spans` are sorted, disjoint, verbatim and leave only
/// whitespace uncovered.
pub fn is_partition(paragraph: &str, spans: &[SegmentSpan]) -> bool {
    let chars: Vec<char> = paragraph.chars().collect();
    let mut pos = 0;
    for s in spans {
        if s.start < pos || s.end <= s.start || s.end > chars.len() {
            return false;
        }
        if chars[pos..s.start].iter().any(|c| !c.is_whitespace()) {
            return false;
        }
        if char_slice(paragraph, s.start, s.end) != s.text {
            return false;
        }
        pos = s.end;
    }
    chars[pos..].iter().all(|c| c.is_whitespace())
}

/// Boundary positions keyed by the number of non-whitespace characters
/// before each span end, so spacing differences do not matter.
pub fn boundary_set(paragraph: &str, spans: &[SegmentSpan]) -> Vec<usize> {
    spans.iter().map(|s| non_ws_count(char_slice(paragraph, 0, s.end))).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segmentation {
    pub spans: Vec<SegmentSpan>,
    pub flags: Vec<Flag>,
    /// LLM calls spent (0 when the paragraph was a single sentence).
    pub calls: u32,
}

/// Segments a paragraph with the model. Single-sentence paragraphs are
/// returned as-is without a call. An alignment failure falls back to one
/// span per sentence and flags the paragraph; gateway errors propagate.
pub fn segment_llm(paragraph: &str, gateway: &Gateway, prompts: &PromptLibrary) -> Result<Segmentation, GatewayError> {
    let sentences = split_sentences(paragraph);
    if sentences.len() <= 1 {
        return Ok(Segmentation { spans: sentences, flags: vec![], calls: 0 });
    }
    let req = prompts.discoverer(paragraph);
    let Structured::Segments(cands) = gateway.complete_structured(&req, &Shape::SegmentList)? else {
        unreachable!("segment list shape yields segments")
    };
    match align_segments(paragraph, &cands) {
        Ok(spans) => Ok(Segmentation { spans, flags: vec![], calls: 1 }),
        Err(e) => {
            log::warn!("alignment failed, using sentence spans: {e}");
            Ok(Segmentation {
                spans: sentences,
                flags: vec![Flag::new(FlagCode::AlignmentFallback, e.to_string())],
                calls: 1,
            })
        }
    }
}
