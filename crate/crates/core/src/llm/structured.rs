//! Parsers turning free model text into the shapes the stages expect.

use crate::fact::BreakdownKind;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Shape {
    BooleanVerdict,
    SingleChoice(Vec<String>),
    SegmentList,
    ExtractionTable,
}

impl Shape {
    /// Appended to the user prompt when the previous answer did not parse.
    pub fn corrective_suffix(&self) -> String {
        let what = match self {
            Shape::BooleanVerdict => "Answer with exactly one word: true or false.".to_string(),
            Shape::SingleChoice(opts) => format!("Answer with exactly one of: {}.", opts.join(", ")),
            Shape::SegmentList => "Return the segments one per line, copied verbatim, and nothing else.".to_string(),
            Shape::ExtractionTable => {
                "Return a fenced table with the columns space | breakdown | breakdownKind | feature | value.".to_string()
            }
        };
        format!("\n\nYour previous answer could not be used. {what}")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Structured {
    Verdict(bool),
    /// Index into the option list.
    Choice(usize),
    Segments(Vec<String>),
    Table(ExtractionDraft),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DraftRow {
    pub space: String,
    pub breakdown: String,
    pub breakdown_kind: Option<BreakdownKind>,
    pub feature: String,
    pub value_text: String,
}

/// Raw extraction output before number normalization and constraint checks.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ExtractionDraft {
    pub rows: Vec<DraftRow>,
    pub attribute_text: Option<String>,
    pub position_texts: Vec<String>,
}

fn strip_fences(text: &str) -> String {
    text.lines().filter(|l| !l.trim_start().starts_with("```")).collect::<Vec<_>>().join("\n")
}

fn words(text: &str) -> Vec<String> {
    text.to_lowercase()
        .split(|c: char| !c.is_alphanumeric())
        .filter(|w| !w.is_empty())
        .map(str::to_string)
        .collect()
}

pub fn parse_boolean(text: &str) -> Option<bool> {
    words(text).iter().find_map(|w| match w.as_str() {
        "true" | "yes" => Some(true),
        "false" | "no" => Some(false),
        _ => None,
    })
}

/// Index of the chosen option. An exact (normalized) answer wins; otherwise
/// the answer must mention exactly one option as whole words.
pub fn parse_choice(text: &str, options: &[String]) -> Option<usize> {
    let norm = |s: &str| words(s).join(" ");
    let mut answer = norm(&strip_fences(text));
    for prefix in ["answer ", "the answer is ", "type ", "label "] {
        if let Some(rest) = answer.strip_prefix(prefix) {
            answer = rest.to_string();
        }
    }
    if let Some(i) = options.iter().position(|o| norm(o) == answer) {
        return Some(i);
    }
    let padded = format!(" {answer} ");
    let hits: Vec<usize> = options
        .iter()
        .enumerate()
        .filter(|(_, o)| {
            let o = norm(o);
            !o.is_empty() && padded.contains(&format!(" {o} "))
        })
        .map(|(i, _)| i)
        .collect();
    // "no type" also contains "type"-free options; prefer the longest when one contains another.
    match hits.as_slice() {
        [one] => Some(*one),
        many if !many.is_empty() => {
            let longest = *many.iter().max_by_key(|i| norm(&options[**i]).len())?;
            let lo = norm(&options[longest]);
            many.iter().all(|i| lo.contains(&norm(&options[*i]))).then_some(longest)
        }
        _ => None,
    }
}

fn strip_list_marker(line: &str) -> &str {
    let l = line.trim();
    for m in ["- ", "* ", "• "] {
        if let Some(rest) = l.strip_prefix(m) {
            return rest.trim();
        }
    }
    let digits = l.chars().take_while(|c| c.is_ascii_digit()).count();
    if digits > 0 {
        let rest = &l[digits..];
        for m in [". ", ") ", ": "] {
            if let Some(r) = rest.strip_prefix(m) {
                return r.trim();
            }
        }
    }
    if let Some(rest) = l.strip_prefix('[') {
        if let Some((num, r)) = rest.split_once(']') {
            if num.chars().all(|c| c.is_ascii_digit()) {
                return r.trim();
            }
        }
    }
    l
}

fn strip_quotes(s: &str) -> &str {
    let s = s.trim();
    for (a, b) in [('"', '"'), ('“', '”')] {
        if s.len() >= 2 && s.starts_with(a) && s.ends_with(b) {
            return s[a.len_utf8()..s.len() - b.len_utf8()].trim();
        }
    }
    s
}

/// One segment per non-empty line (list markers and quotes removed), or a
/// JSON array of strings.
pub fn parse_segments(text: &str) -> Option<Vec<String>> {
    let body = strip_fences(text);
    if let Ok(list) = serde_json::from_str::<Vec<String>>(body.trim()) {
        let list: Vec<String> = list.into_iter().map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
        return (!list.is_empty()).then_some(list);
    }
    let out: Vec<String> = body
        .lines()
        .map(|l| strip_quotes(strip_list_marker(l)).to_string())
        .filter(|l| !l.is_empty())
        .collect();
    (!out.is_empty()).then_some(out)
}

fn cells(line: &str) -> Vec<String> {
    let l = line.trim().trim_start_matches('|').trim_end_matches('|');
    l.split('|').map(|c| c.trim().to_string()).collect()
}

fn is_separator(line: &str) -> bool {
    let t = line.trim();
    !t.is_empty() && t.chars().all(|c| matches!(c, '-' | '|' | ':' | ' ' | '='))
}

/// Parses the extraction table: `space | breakdown | breakdownKind | feature | value`
/// rows (the kind column may be omitted), plus `attribute:` and `position:` lines.
pub fn parse_table(text: &str) -> Option<ExtractionDraft> {
    let mut draft = ExtractionDraft::default();
    for line in text.lines() {
        let t = line.trim();
        if t.is_empty() || t.starts_with("```") || is_separator(t) {
            continue;
        }
        let lower = t.to_lowercase();
        if let Some(rest) = lower.strip_prefix("attribute:") {
            let v = t[t.len() - rest.len()..].trim();
            if !v.is_empty() && !v.eq_ignore_ascii_case("none") {
                draft.attribute_text = Some(v.to_string());
            }
            continue;
        }
        if let Some(rest) = lower.strip_prefix("position:") {
            let v = strip_quotes(t[t.len() - rest.len()..].trim());
            if !v.is_empty() && !v.eq_ignore_ascii_case("none") {
                draft.position_texts.push(v.to_string());
            }
            continue;
        }
        if !t.contains('|') {
            continue;
        }
        let c = cells(t);
        if c.first().is_some_and(|h| h.eq_ignore_ascii_case("space")) {
            continue;
        }
        let row = match c.as_slice() {
            [space, breakdown, kind, feature, value] => DraftRow {
                space: space.clone(),
                breakdown: breakdown.clone(),
                breakdown_kind: BreakdownKind::parse(kind),
                feature: feature.clone(),
                value_text: value.clone(),
            },
            [space, breakdown, feature, value] => DraftRow {
                space: space.clone(),
                breakdown: breakdown.clone(),
                breakdown_kind: None,
                feature: feature.clone(),
                value_text: value.clone(),
            },
            _ => continue,
        };
        draft.rows.push(row);
    }
    (!draft.rows.is_empty()).then_some(draft)
}

pub(crate) fn parse_shape(text: &str, shape: &Shape) -> Option<Structured> {
    match shape {
        Shape::BooleanVerdict => parse_boolean(text).map(Structured::Verdict),
        Shape::SingleChoice(opts) => parse_choice(text, opts).map(Structured::Choice),
        Shape::SegmentList => parse_segments(text).map(Structured::Segments),
        Shape::ExtractionTable => parse_table(text).map(Structured::Table),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn booleans() {
        assert_eq!(parse_boolean("True."), Some(true));
        assert_eq!(parse_boolean("  false"), Some(false));
        assert_eq!(parse_boolean("Answer: yes"), Some(true));
        assert_eq!(parse_boolean("unsure"), None);
    }

    #[test]
    fn single_choice_membership() {
        let o = opts(&["trend", "comparison"]);
        assert_eq!(parse_choice("comparison", &o), Some(1));
        assert_eq!(parse_choice("Comparison.", &o), Some(1));
        assert_eq!(parse_choice("distribution", &o), None);
        assert_eq!(parse_choice("trend or comparison", &o), None);
        let seven = opts(&["value", "trend", "comparison", "proportion", "extreme", "rank", "no type"]);
        assert_eq!(parse_choice("No type", &seven), Some(6));
        assert_eq!(parse_choice("The answer is: proportion", &seven), Some(3));
    }

    #[test]
    fn segment_lines() {
        let s = parse_segments("```\n1. Sales rose.\n2) \"Profit fell.\"\n\n- Costs held.\n```").unwrap();
        assert_eq!(s, vec!["Sales rose.", "Profit fell.", "Costs held."]);
        assert_eq!(parse_segments(r#"["a", "b"]"#).unwrap(), vec!["a", "b"]);
        assert_eq!(parse_segments("  \n"), None);
    }

    #[test]
    fn extraction_table_two_rows() {
        let text = "Here you go:\n```\nspace | breakdown | breakdownKind | feature | value\n--- | --- | --- | --- | ---\nvehicle emissions | EV | categorical | carbon per year | 3,932\nvehicle emissions | gas-powered vehicles | categorical | carbon per year | 11,435\n```\n";
        let d = parse_table(text).unwrap();
        assert_eq!(d.rows.len(), 2);
        assert_eq!(d.rows[1].breakdown, "gas-powered vehicles");
        assert_eq!(d.rows[0].breakdown_kind, Some(BreakdownKind::Categorical));
        assert_eq!(d.rows[1].value_text, "11,435");
    }

    #[test]
    fn extraction_attribute_and_position() {
        let text = "attribute: maximum\nposition: \"The highest peak\"\n```\nmountains | Everest | height | 8848\n```";
        let d = parse_table(text).unwrap();
        assert_eq!(d.attribute_text.as_deref(), Some("maximum"));
        assert_eq!(d.position_texts, vec!["The highest peak"]);
        assert_eq!(d.rows[0].breakdown_kind, None);
        assert_eq!(parse_table("nothing here"), None);
    }
}
