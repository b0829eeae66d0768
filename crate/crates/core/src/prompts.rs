//! Prompt templates. The built-in set is compiled in; a directory of files
//! with the same names can override any subset of them.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use crate::fact::InsightType;
use crate::llm::PromptRequest;

#[derive(Debug, thiserror::Error)]
pub enum TemplateError {
    #[error("template {name}: missing section `### {section}`")]
    MissingSection { name: String, section: &'static str },
    #[error("unknown template {0}")]
    Unknown(String),
    #[error("reading {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Template {
    pub system: String,
    pub user: String,
    pub definition: Option<String>,
}

impl Template {
    pub fn parse(name: &str, text: &str) -> Result<Self, TemplateError> {
        let mut sections: BTreeMap<String, String> = BTreeMap::new();
        let mut current: Option<String> = None;
        for line in text.lines() {
            if let Some(h) = line.strip_prefix("### ") {
                current = Some(h.trim().to_ascii_uppercase());
                sections.entry(h.trim().to_ascii_uppercase()).or_default();
                continue;
            }
            if let Some(c) = &current {
                let s = sections.get_mut(c).expect("section exists");
                s.push_str(line);
                s.push('\n');
            }
        }
        let take = |k: &'static str| -> Result<String, TemplateError> {
            sections
                .get(k)
                .map(|s| s.trim().to_string())
                .ok_or(TemplateError::MissingSection { name: name.to_string(), section: k })
        };
        Ok(Template {
            system: take("SYSTEM")?,
            user: take("USER")?,
            definition: sections.get("DEFINITION").map(|s| s.trim().to_string()),
        })
    }
}

/// Replaces `{key}` placeholders in one pass. Substituted text is never
/// rescanned, so braces inside a paragraph are left alone.
pub fn fill(template: &str, vars: &[(&str, &str)]) -> String {
    let mut out = String::with_capacity(template.len());
    let mut rest = template;
    while let Some(open) = rest.find('{') {
        out.push_str(&rest[..open]);
        let after = &rest[open + 1..];
        let hit = after.find('}').and_then(|close| {
            let key = &after[..close];
            vars.iter().find(|(k, _)| *k == key).map(|(_, v)| (close, *v))
        });
        match hit {
            Some((close, v)) => {
                out.push_str(v);
                rest = &after[close + 1..];
            }
            None => {
                out.push('{');
                rest = after;
            }
        }
    }
    out.push_str(rest);
    out
}

const BUILTIN: &[(&str, &str)] = &[
    ("discoverer", include_str!("../prompts/discoverer.txt")),
    ("checker_value", include_str!("../prompts/checker_value.txt")),
    ("checker_trend", include_str!("../prompts/checker_trend.txt")),
    ("checker_comparison", include_str!("../prompts/checker_comparison.txt")),
    ("checker_proportion", include_str!("../prompts/checker_proportion.txt")),
    ("checker_extreme", include_str!("../prompts/checker_extreme.txt")),
    ("checker_rank", include_str!("../prompts/checker_rank.txt")),
    ("moderator", include_str!("../prompts/moderator.txt")),
    ("moderator_onestep", include_str!("../prompts/moderator_onestep.txt")),
    ("extractor_value", include_str!("../prompts/extractor_value.txt")),
    ("extractor_trend", include_str!("../prompts/extractor_trend.txt")),
    ("extractor_comparison", include_str!("../prompts/extractor_comparison.txt")),
    ("extractor_proportion", include_str!("../prompts/extractor_proportion.txt")),
    ("extractor_extreme", include_str!("../prompts/extractor_extreme.txt")),
    ("extractor_rank", include_str!("../prompts/extractor_rank.txt")),
];

/// Label shown to the model for the plain-text class.
pub const NO_TYPE_LABEL: &str = "no type";

#[derive(Debug, Clone)]
pub struct PromptLibrary {
    templates: BTreeMap<String, Template>,
}

impl Default for PromptLibrary {
    fn default() -> Self {
        Self::builtin()
    }
}

impl PromptLibrary {
    pub fn builtin() -> Self {
        let templates = BUILTIN
            .iter()
            .map(|(n, t)| (n.to_string(), Template::parse(n, t).expect("built-in template is well formed")))
            .collect();
        PromptLibrary { templates }
    }

    /// Built-in templates, with any `<name>.txt` found in `dir` taking precedence.
    pub fn with_overrides(dir: &Path) -> Result<Self, TemplateError> {
        let mut lib = Self::builtin();
        for (name, _) in BUILTIN {
            let path = dir.join(format!("{name}.txt"));
            if !path.exists() {
                continue;
            }
            let text = fs::read_to_string(&path)
                .map_err(|source| TemplateError::Io { path: path.display().to_string(), source })?;
            lib.templates.insert(name.to_string(), Template::parse(name, &text)?);
        }
        Ok(lib)
    }

    pub fn get(&self, name: &str) -> Result<&Template, TemplateError> {
        self.templates.get(name).ok_or_else(|| TemplateError::Unknown(name.to_string()))
    }

    fn typed(prefix: &str, t: InsightType) -> String {
        format!("{prefix}_{}", t.as_str())
    }

    pub fn definition(&self, t: InsightType) -> &str {
        self.templates
            .get(&Self::typed("checker", t))
            .and_then(|tpl| tpl.definition.as_deref())
            .unwrap_or("")
    }

    fn request(&self, name: &str, tag: String, subject: &str, vars: &[(&str, &str)]) -> PromptRequest {
        let tpl = self.get(name).expect("all template names are built in");
        PromptRequest::new(tag, subject, fill(&tpl.system, vars), fill(&tpl.user, vars))
    }

    pub fn discoverer(&self, paragraph: &str) -> PromptRequest {
        self.request("discoverer", "discoverer".into(), paragraph, &[("paragraph", paragraph)])
    }

    pub fn checker(&self, t: InsightType, segment: &str) -> PromptRequest {
        let def = self.definition(t).to_string();
        self.request(
            &Self::typed("checker", t),
            format!("checker:{}", t.as_str()),
            segment,
            &[("segment", segment), ("definition", &def)],
        )
    }

    /// Multiple choice over `candidates`; only their definitions are shown.
    pub fn moderator(&self, candidates: &[InsightType], segment: &str) -> PromptRequest {
        let defs = candidates
            .iter()
            .map(|t| format!("- {}: {}", t.as_str(), self.definition(*t)))
            .collect::<Vec<_>>()
            .join("\n");
        let opts = candidates.iter().map(|t| t.as_str()).collect::<Vec<_>>().join(", ");
        self.request(
            "moderator",
            "moderator".into(),
            segment,
            &[("segment", segment), ("definitions", &defs), ("options", &opts)],
        )
    }

    pub fn moderator_onestep(&self, segment: &str) -> PromptRequest {
        let defs = InsightType::DATA
            .iter()
            .map(|t| format!("- {}: {}", t.as_str(), self.definition(*t)))
            .collect::<Vec<_>>()
            .join("\n");
        let mut opts: Vec<&str> = InsightType::DATA.iter().map(|t| t.as_str()).collect();
        opts.push(NO_TYPE_LABEL);
        self.request(
            "moderator_onestep",
            "moderator_onestep".into(),
            segment,
            &[("segment", segment), ("definitions", &defs), ("options", &opts.join(", "))],
        )
    }

    pub fn extractor(&self, t: InsightType, segment: &str) -> PromptRequest {
        self.request(&Self::typed("extractor", t), format!("extractor:{}", t.as_str()), segment, &[("segment", segment)])
    }
}
