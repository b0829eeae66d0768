//! Turning input files into paragraphs.

use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputFormat {
    Text,
    Markdown,
}

impl InputFormat {
    /// `.md`/`.markdown` are markdown; everything else is plain text.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref() {
            Some("md" | "markdown") => InputFormat::Markdown,
            _ => InputFormat::Text,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockKind {
    /// Prose that goes through the pipeline.
    Paragraph,
    /// Headings and code: kept as plain text, never sent to the model.
    Verbatim,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub kind: BlockKind,
    pub text: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SourceDocument {
    pub title: Option<String>,
    pub blocks: Vec<Block>,
}

fn push_paragraph(blocks: &mut Vec<Block>, lines: &mut Vec<&str>) {
    let text = lines.join("\n").trim().to_string();
    if !text.is_empty() {
        blocks.push(Block { kind: BlockKind::Paragraph, text });
    }
    lines.clear();
}

fn heading_level(line: &str) -> Option<usize> {
    let t = line.trim_start();
    let hashes = t.chars().take_while(|c| *c == '#').count();
    let rest = &t[hashes..];
    ((1..=6).contains(&hashes) && (rest.is_empty() || rest.starts_with(' '))).then_some(hashes)
}

pub fn parse_source(text: &str, format: InputFormat) -> SourceDocument {
    let text = text.replace("\r\n", "\n");
    let mut doc = SourceDocument::default();
    let mut lines: Vec<&str> = Vec::new();
    let mut fence: Option<Vec<&str>> = None;

    for line in text.lines() {
        if format == InputFormat::Markdown {
            if let Some(code) = fence.as_mut() {
                code.push(line);
                if line.trim_start().starts_with("```") || line.trim_start().starts_with("~~~") {
                    let block = fence.take().expect("inside a fence").join("\n");
                    doc.blocks.push(Block { kind: BlockKind::Verbatim, text: block });
                }
                continue;
            }
            if line.trim_start().starts_with("```") || line.trim_start().starts_with("~~~") {
                push_paragraph(&mut doc.blocks, &mut lines);
                fence = Some(vec![line]);
                continue;
            }
            if let Some(level) = heading_level(line) {
                push_paragraph(&mut doc.blocks, &mut lines);
                let heading = line.trim();
                if level == 1 && doc.title.is_none() {
                    doc.title = Some(heading.trim_start_matches('#').trim().to_string());
                } else if !heading.trim_start_matches('#').trim().is_empty() {
                    doc.blocks.push(Block { kind: BlockKind::Verbatim, text: heading.to_string() });
                }
                continue;
            }
        }
        if line.trim().is_empty() {
            push_paragraph(&mut doc.blocks, &mut lines);
        } else {
            lines.push(line);
        }
    }
    if let Some(code) = fence {
        // Unterminated fence: keep what we have.
        doc.blocks.push(Block { kind: BlockKind::Verbatim, text: code.join("\n") });
    }
    push_paragraph(&mut doc.blocks, &mut lines);
    doc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_paragraphs_split_on_blank_lines() {
        let d = parse_source("One.\nStill one.\n\n  \nTwo.\r\n\r\nThree.", InputFormat::Text);
        let t: Vec<&str> = d.blocks.iter().map(|b| b.text.as_str()).collect();
        assert_eq!(t, ["One.\nStill one.", "Two.", "Three."]);
        assert_eq!(d.title, None);
        assert!(parse_source("\n\n", InputFormat::Text).blocks.is_empty());
    }

    #[test]
    fn markdown_title_headings_and_code() {
        let md = "# Title\n\nIntro text.\n## Section\nBody 5%.\n\n```\nlet x = 1;\n\nlet y = 2;\n```\nAfter.";
        let d = parse_source(md, InputFormat::Markdown);
        assert_eq!(d.title.as_deref(), Some("Title"));
        let kinds: Vec<(BlockKind, &str)> = d.blocks.iter().map(|b| (b.kind, b.text.as_str())).collect();
        assert_eq!(
            kinds,
            [
                (BlockKind::Paragraph, "Intro text."),
                (BlockKind::Verbatim, "## Section"),
                (BlockKind::Paragraph, "Body 5%."),
                (BlockKind::Verbatim, "```\nlet x = 1;\n\nlet y = 2;\n```"),
                (BlockKind::Paragraph, "After."),
            ]
        );
        assert_eq!(InputFormat::from_path(Path::new("a/b.MD")), InputFormat::Markdown);
        assert_eq!(InputFormat::from_path(Path::new("a/b.txt")), InputFormat::Text);
    }

    #[test]
    fn hashtags_are_not_headings() {
        let d = parse_source("#trending topic here", InputFormat::Markdown);
        assert_eq!(d.blocks[0].kind, BlockKind::Paragraph);
    }
}
