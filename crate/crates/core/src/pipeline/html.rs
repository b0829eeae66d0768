//! Static HTML rendering of an augmented document.

use std::fmt::Write;

use crate::document::AugmentedDocument;
use crate::scalar::Scalar;
use crate::text::char_slice;
use crate::visualizer::{xml_escape, VisualizationSpec};

const STYLE: &str = "body{font:16px/1.6 Georgia,serif;max-width:42em;margin:2em auto;padding:0 1em;color:#222}\
.gv-vis{display:inline-block;vertical-align:-2px;margin:0 .25em}\
.gv-entity{border-radius:2px;padding:0 1px}";

/// Collapses each whitespace run to one space (ends are kept).
fn text(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut in_ws = false;
    for c in s.chars() {
        if c.is_whitespace() {
            if !in_ws {
                out.push(' ');
            }
            in_ws = true;
        } else {
            out.push(c);
            in_ws = false;
        }
    }
    xml_escape(&out)
}

fn page(title: Option<&str>, body: &str) -> String {
    let mut out = String::new();
    out.push_str("<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n");
    let _ = writeln!(out, "<title>{}</title>", xml_escape(title.unwrap_or("Document")));
    let _ = writeln!(out, "<style>{STYLE}</style>");
    out.push_str("</head>\n<body>\n<article class=\"gv-doc\">\n");
    if let Some(t) = title {
        let _ = writeln!(out, "<h1>{}</h1>", xml_escape(t));
    }
    out.push_str(body);
    out.push_str("</article>\n</body>\n</html>\n");
    out
}

/// Markdown headings and code fences pass through the pipeline as plain
/// paragraphs; they are rendered as such here.
fn verbatim_block(p: &str) -> Option<String> {
    let t = p.trim();
    if t.starts_with("```") {
        return Some(format!("<pre>{}</pre>\n", xml_escape(t)));
    }
    let level = t.chars().take_while(|c| *c == '#').count();
    let rest = &t[level..];
    if (1..=6).contains(&level) && rest.starts_with(' ') && !rest.contains('\n') {
        return Some(format!("<h{level}>{}</h{level}>\n", text(rest.trim())));
    }
    None
}

fn plain_paragraph(p: &str) -> String {
    verbatim_block(p).unwrap_or_else(|| format!("<p>{}</p>\n", text(p.trim())))
}

/// The document text alone, with the same page shell as [`emit_html`].
pub fn emit_plain_html(title: Option<&str>, paragraphs: &[String]) -> String {
    let body: String = paragraphs.iter().map(|p| plain_paragraph(p)).collect();
    page(title, &body)
}

fn segment_html<S: Scalar>(context: &str, vis: &VisualizationSpec<S>) -> String {
    let mut out = String::new();
    let tip = xml_escape(&vis.tooltip_lines.join("\n")).replace('\n', "&#10;");
    let _ = write!(out, "<span class=\"gv-seg\" data-fact=\"{}\" title=\"{tip}\">", vis.fact_index);
    let mut pos = 0;
    for s in &vis.highlight_spans {
        out.push_str(&text(char_slice(context, pos, s.start)));
        let _ = write!(
            out,
            "<mark class=\"gv-entity\" data-fact=\"{}\" data-row=\"{}\" style=\"background-color:{}40\">{}</mark>",
            vis.fact_index,
            s.row,
            s.color,
            text(char_slice(context, s.start, s.end))
        );
        pos = s.end;
    }
    out.push_str(&text(char_slice(context, pos, usize::MAX)));
    out.push_str("</span>");
    out.push_str(&vis.svg);
    out
}

/// One standalone page. Each segment is followed by its inline SVG; entity
/// spans get a static background tint in the mark's color.
pub fn emit_html<S: Scalar>(doc: &AugmentedDocument<S>) -> String {
    let mut body = String::new();
    for para in &doc.paragraphs {
        if let [seg] = para.as_slice() {
            if seg.visualization.is_none() {
                body.push_str(&plain_paragraph(seg.fact.context()));
                continue;
            }
        }
        let parts: Vec<String> = para
            .iter()
            .map(|seg| match &seg.visualization {
                Some(vis) => segment_html(seg.fact.context(), vis),
                None => text(seg.fact.context()),
            })
            .collect();
        let _ = writeln!(body, "<p>{}</p>", parts.join(" "));
    }
    page(doc.title.as_deref(), &body)
}
