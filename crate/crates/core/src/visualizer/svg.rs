use std::fmt::Write;

use crate::fact::SemanticAttribute;
use crate::scalar::{format_value, Scalar};

use super::{Mark, RenderConfig, VariantId, VisualizationSpec};

const TRACK: &str = "#e0e0e0";
const INK: &str = "#555555";

pub(crate) fn px(x: f64) -> String {
    let r = (x * 100.0).round() / 100.0;
    format_value(if r == 0.0 { 0.0 } else { r })
}

pub fn xml_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&#39;"),
            c => out.push(c),
        }
    }
    out
}

fn value<S: Scalar>(m: &Mark<S>) -> f64 {
    let v = m.value.to_f64_lossy();
    if v.is_finite() {
        v
    } else {
        0.0
    }
}

fn max_abs<S: Scalar>(marks: &[Mark<S>]) -> f64 {
    marks.iter().map(|m| value(m).abs()).fold(0.0, f64::max)
}

fn ratio(v: f64, denom: f64) -> f64 {
    if denom > 0.0 {
        v / denom
    } else {
        0.0
    }
}

fn rect(out: &mut String, id: Option<&str>, x: f64, y: f64, w: f64, h: f64, fill: &str, extra: &str) {
    let id_attr = id.map(|i| format!(" id=\"{i}\"")).unwrap_or_default();
    let _ = write!(
        out,
        "<rect{id_attr} x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{fill}\"{extra}/>",
        px(x),
        px(y),
        px(w),
        px(h)
    );
}

fn text(out: &mut String, x: f64, y: f64, fill: &str, anchor: &str, content: &str) {
    let _ = write!(
        out,
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"10\" fill=\"{fill}\" text-anchor=\"{anchor}\">{}</text>",
        px(x),
        px(y),
        xml_escape(content)
    );
}

fn text_width(s: &str) -> f64 {
    s.chars().count() as f64 * 6.0
}

/// Horizontal bars, one per mark, stacked top to bottom within the glyph box.
fn hbars<S: Scalar>(out: &mut String, marks: &[Mark<S>], h: f64, len: f64) {
    let n = marks.len().max(1) as f64;
    let gap = if marks.len() <= 5 { 1.0 } else { 0.0 };
    let t = (h - gap * (n - 1.0)) / n;
    let m = max_abs(marks);
    for (i, mk) in marks.iter().enumerate() {
        let w = ratio(value(mk).abs(), m) * len;
        rect(out, Some(&mk.id), 0.0, i as f64 * (t + gap), w, t, &mk.color, "");
    }
}

fn vbars<S: Scalar>(out: &mut String, marks: &[Mark<S>], h: f64, mw: f64, emphasis: Option<usize>) {
    let m = max_abs(marks);
    for (i, mk) in marks.iter().enumerate() {
        let bh = ratio(value(mk).abs(), m) * h;
        let extra = match emphasis {
            Some(e) if e != mk.row => " opacity=\"0.35\"",
            _ => "",
        };
        rect(out, Some(&mk.id), i as f64 * (mw + 1.0), h - bh, mw, bh, &mk.color, extra);
    }
}

fn bars_width(n: usize, mw: f64) -> f64 {
    if n == 0 {
        0.0
    } else {
        n as f64 * (mw + 1.0) - 1.0
    }
}

fn body<S: Scalar>(spec: &VisualizationSpec<S>, cfg: &RenderConfig) -> (f64, String) {
    use VariantId::*;

    let h = cfg.glyph_height as f64;
    let mw = cfg.mark_width as f64;
    let len = cfg.bar_length as f64;
    let marks = &spec.marks;
    let mut out = String::new();
    let first = marks.first();

    let width = match spec.variant {
        ProportionHbarStacked => {
            let vals: Vec<f64> = marks.iter().map(|m| value(m).max(0.0)).collect();
            let denom = vals.iter().sum::<f64>().max(1.0);
            let mut x = 0.0;
            for (mk, v) in marks.iter().zip(&vals) {
                let w = v / denom * len;
                rect(&mut out, Some(&mk.id), x, 1.0, w, h - 2.0, &mk.color, "");
                x += w;
            }
            len
        }
        ProportionIconUnit => {
            let cells = 10usize;
            let s = (h - 4.0).max(1.0);
            let vals: Vec<f64> = marks.iter().map(|m| value(m).max(0.0)).collect();
            let denom = vals.iter().sum::<f64>().max(1.0);
            let mut cum = 0.0;
            let mut next = 0usize;
            for (mk, v) in marks.iter().zip(&vals) {
                cum += v / denom;
                let upto = ((cum * cells as f64).round() as usize).min(cells);
                let _ = write!(out, "<g id=\"{}\" fill=\"{}\">", mk.id, mk.color);
                for c in next..upto {
                    let _ = write!(
                        out,
                        "<rect x=\"{}\" y=\"2\" width=\"{}\" height=\"{}\"/>",
                        px(c as f64 * (s + 1.0)),
                        px(s),
                        px(s)
                    );
                }
                out.push_str("</g>");
                next = next.max(upto);
            }
            for c in next..cells {
                rect(&mut out, None, c as f64 * (s + 1.0), 2.0, s, s, TRACK, "");
            }
            cells as f64 * (s + 1.0) - 1.0
        }
        ValueBadge => {
            let mk = first.expect("badge has a mark");
            let label = format_value(mk.value);
            let w = text_width(&label) + 8.0;
            rect(&mut out, Some(&mk.id), 0.0, 0.0, w, h, &mk.color, " rx=\"3\"");
            text(&mut out, w / 2.0, h - 3.5, "#ffffff", "middle", &label);
            w
        }
        ValueIconNumeric => {
            let mk = first.expect("icon has a mark");
            let label = format_value(mk.value);
            let _ = write!(
                out,
                "<circle id=\"{}\" cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"{}\"/>",
                mk.id,
                px(h / 2.0),
                px(h / 2.0),
                px(h / 2.0 - 1.0),
                mk.color
            );
            text(&mut out, h + 2.0, h - 3.5, INK, "start", &label);
            h + 2.0 + text_width(&label)
        }
        ValueHbarSingle | ComparisonHbarPair => {
            hbars(&mut out, marks, h, len);
            len
        }
        ComparisonVbarGroup => {
            vbars(&mut out, marks, h, mw, None);
            bars_width(marks.len(), mw)
        }
        ExtremeVbarHighlight => {
            vbars(&mut out, marks, h, mw, spec.emphasis);
            bars_width(marks.len(), mw)
        }
        RankVbarOrdered => {
            let mut order: Vec<&Mark<S>> = marks.iter().collect();
            order.sort_by(|a, b| value(a).total_cmp(&value(b)));
            let top = order.iter().map(|m| value(m)).fold(1.0, f64::max);
            for (slot, mk) in order.iter().enumerate() {
                let bh = (top - value(mk) + 1.0) / top * h;
                rect(&mut out, Some(&mk.id), slot as f64 * (mw + 1.0), h - bh, mw, bh, &mk.color, "");
            }
            bars_width(marks.len(), mw)
        }
        TrendLine | TrendLineArea => {
            let pts: Vec<&Mark<S>> = marks.iter().filter(|m| !m.value.is_nan()).collect();
            let step = 2.0 * mw;
            let pad = 2.0;
            let lo = pts.iter().map(|m| value(m)).fold(f64::INFINITY, f64::min);
            let hi = pts.iter().map(|m| value(m)).fold(f64::NEG_INFINITY, f64::max);
            let coords: Vec<(f64, f64)> = pts
                .iter()
                .enumerate()
                .map(|(i, m)| {
                    let y = if hi > lo { (h - 2.0) - (value(m) - lo) / (hi - lo) * (h - 4.0) } else { h / 2.0 };
                    (pad + i as f64 * step, y)
                })
                .collect();
            let joined: Vec<String> = coords.iter().map(|(x, y)| format!("{},{}", px(*x), px(*y))).collect();
            if spec.variant == TrendLineArea {
                if let (Some(a), Some(b)) = (coords.first(), coords.last()) {
                    let _ = write!(
                        out,
                        "<polygon points=\"{} {},{} {},{}\" fill=\"{}\" opacity=\"0.25\"/>",
                        joined.join(" "),
                        px(b.0),
                        px(h),
                        px(a.0),
                        px(h),
                        cfg.color(0)
                    );
                }
            }
            let _ = write!(
                out,
                "<polyline points=\"{}\" fill=\"none\" stroke=\"{INK}\" stroke-width=\"1.2\"/>",
                joined.join(" ")
            );
            for (m, (x, y)) in pts.iter().zip(&coords) {
                let _ = write!(
                    out,
                    "<circle id=\"{}\" cx=\"{}\" cy=\"{}\" r=\"1.6\" fill=\"{}\"/>",
                    m.id,
                    px(*x),
                    px(*y),
                    m.color
                );
            }
            2.0 * pad + (pts.len().max(1) - 1) as f64 * step
        }
        TrendIconArrowUp | TrendIconArrowDown => {
            let up = spec.variant == TrendIconArrowUp;
            let fy = |y: f64| if up { y } else { h - y };
            let c = h / 2.0;
            let pts = [(c, 1.0), (h - 2.0, c), (c + 2.0, c), (c + 2.0, h - 1.0), (c - 2.0, h - 1.0), (c - 2.0, c), (2.0, c)];
            let d: Vec<String> = pts.iter().map(|(x, y)| format!("{},{}", px(*x), px(fy(*y)))).collect();
            let (id, color) = first.map_or(("".to_string(), cfg.color(0).to_string()), |m| (m.id.clone(), m.color.clone()));
            let _ = write!(out, "<polygon id=\"{id}\" points=\"{}\" fill=\"{color}\"/>", d.join(" "));
            h
        }
        ExtremeIconExtremum => {
            let max = spec.attribute != Some(SemanticAttribute::Minimum);
            let row = spec.emphasis.unwrap_or(0);
            let mk = marks.iter().find(|m| m.row == row).or(first);
            let (id, color) = mk.map_or(("".to_string(), cfg.color(0).to_string()), |m| (m.id.clone(), m.color.clone()));
            let (tip, base, bar) = if max { (1.0, h - 4.0, h - 2.0) } else { (h - 1.0, 4.0, 0.0) };
            let _ = write!(
                out,
                "<polygon id=\"{id}\" points=\"{},{} {},{} {},{}\" fill=\"{color}\"/>",
                px(h / 2.0),
                px(tip),
                px(h - 1.0),
                px(base),
                px(1.0),
                px(base)
            );
            rect(&mut out, None, 1.0, bar, h - 2.0, 2.0, INK, "");
            h
        }
        ComparisonIconVs => {
            let r = h / 2.0 - 1.0;
            let mut x = 0.0;
            for (i, mk) in marks.iter().take(2).enumerate() {
                if i == 1 {
                    text(&mut out, x + 7.0, h - 3.5, INK, "middle", "vs");
                    x += 14.0;
                }
                let _ = write!(
                    out,
                    "<circle id=\"{}\" cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"{}\"/>",
                    mk.id,
                    px(x + h / 2.0),
                    px(h / 2.0),
                    px(r),
                    mk.color
                );
                x += h;
            }
            x
        }
        FallbackIcon => {
            let _ = write!(
                out,
                "<circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"none\" stroke=\"#999999\"/>",
                px(h / 2.0),
                px(h / 2.0),
                px(h / 2.0 - 1.0)
            );
            text(&mut out, h / 2.0, h - 3.5, "#999999", "middle", "?");
            h
        }
    };
    (width, out)
}

pub(crate) fn layout_width<S: Scalar>(spec: &VisualizationSpec<S>, cfg: &RenderConfig) -> u32 {
    body(spec, cfg).0.ceil().max(1.0) as u32
}

/// Static SVG 1.1 markup for a visualization. Marks carry `mark-<fact>-<row>` ids.
pub fn render_svg<S: Scalar>(spec: &VisualizationSpec<S>, cfg: &RenderConfig) -> String {
    let (w, inner) = body(spec, cfg);
    let w = w.ceil().max(1.0) as u32;
    let h = cfg.glyph_height;
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\" class=\"gv-vis\" data-variant=\"{}\" data-fact=\"{}\">{inner}</svg>",
        spec.variant, spec.fact_index
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fact::{BreakdownKind, DataFact, DataSpecEntry, InsightType, UnitSegmentSpec};
    use crate::visualizer::visualize;

    fn attr(svg: &str, id: &str, name: &str) -> f64 {
        let at = svg.find(&format!("id=\"{id}\"")).unwrap_or_else(|| panic!("{id} missing in {svg}"));
        let rest = &svg[at..];
        let key = format!(" {name}=\"");
        let s = rest.find(&key).unwrap() + key.len();
        let e = rest[s..].find('"').unwrap();
        rest[s..s + e].parse().unwrap()
    }

    fn spec_for(t: InsightType, values: &[f64]) -> VisualizationSpec<f64> {
        let rows = values
            .iter()
            .enumerate()
            .map(|(i, v)| DataSpecEntry::new("s", format!("b{i}"), BreakdownKind::Categorical, "f", *v))
            .collect();
        let fact = DataFact::new(UnitSegmentSpec::typed(t, "ctx"), rows);
        visualize(&fact, 0, &RenderConfig::default()).unwrap().0
    }

    #[test]
    fn fallback_is_single_question_mark() {
        let fact = DataFact::<f64>::degraded(InsightType::Value, "x");
        let (spec, _) = visualize(&fact, 3, &RenderConfig::default()).unwrap();
        assert!(spec.svg.contains(">?</text>"));
        assert!(spec.svg.contains("height=\"14\""));
        assert!(!spec.svg.contains("mark-"));
    }

    #[test]
    fn stacked_bar_widths_follow_shares() {
        let spec = spec_for(InsightType::Proportion, &[0.5, 0.3, 0.2]);
        let w: Vec<f64> = (0..3).map(|i| attr(&spec.svg, &format!("mark-0-{i}"), "width")).collect();
        assert_eq!(w, vec![30.0, 18.0, 12.0]);
        assert_eq!(spec.svg.matches("<rect").count(), 3);
    }

    #[test]
    fn rank_bars_shrink_with_rank() {
        let spec = spec_for(InsightType::Rank, &[3.0, 1.0, 4.0, 2.0]);
        let heights: Vec<f64> = [1usize, 3, 0, 2].iter().map(|i| attr(&spec.svg, &format!("mark-0-{i}"), "height")).collect();
        assert!(heights.windows(2).all(|w| w[0] > w[1]), "{heights:?}");
        assert_eq!(spec.svg.matches("<rect").count(), 4);
    }

    #[test]
    fn every_variant_fits_the_glyph_box() {
        for t in InsightType::DATA {
            let spec = spec_for(t, &[1.0, 2.0, 3.0]);
            assert_eq!(spec.height, 14);
            assert!(spec.svg.starts_with("<svg") && spec.svg.ends_with("</svg>"));
        }
    }
}
