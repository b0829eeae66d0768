//! Insight-type annotation. Two-step mode asks six per-type checkers for a
//! verdict and lets a moderator choose among the positives; one-step mode
//! asks a single seven-way question.

use std::thread;

use serde::{Deserialize, Serialize};

use crate::diag::{Flag, FlagCode};
use crate::fact::InsightType;
use crate::llm::{Gateway, GatewayError, Shape, Structured};
use crate::prompts::{PromptLibrary, NO_TYPE_LABEL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnnotationMode {
    #[default]
    TwoStep,
    OneStep,
}

impl std::str::FromStr for AnnotationMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "two_step" | "twostep" => Ok(AnnotationMode::TwoStep),
            "one_step" | "onestep" => Ok(AnnotationMode::OneStep),
            other => Err(format!("unknown annotation mode `{other}` (expected two_step or one_step)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckerVerdict {
    pub insight_type: InsightType,
    pub verdict: bool,
    pub raw_response: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnnotationResult {
    pub final_type: InsightType,
    pub candidates: Vec<InsightType>,
    pub mode: AnnotationMode,
    pub flags: Vec<Flag>,
    /// Logical gateway calls issued (re-prompts and retries not counted).
    pub calls: u32,
    /// Set when the backend ran out of retries somewhere in this segment.
    pub exhausted: bool,
}

/// Used when moderation cannot produce a usable answer.
pub const FALLBACK_PRIORITY: [InsightType; 6] = [
    InsightType::Proportion,
    InsightType::Trend,
    InsightType::Comparison,
    InsightType::Rank,
    InsightType::Extreme,
    InsightType::Value,
];

pub fn by_priority(candidates: &[InsightType]) -> Option<InsightType> {
    FALLBACK_PRIORITY.iter().copied().find(|t| candidates.contains(t))
}

/// One checker call. Errors are returned so the caller can decide; the
/// annotator treats them as a negative verdict.
pub fn check_type(segment: &str, t: InsightType, gateway: &Gateway, prompts: &PromptLibrary) -> Result<CheckerVerdict, GatewayError> {
    match gateway.complete_structured_raw(&prompts.checker(t, segment), &Shape::BooleanVerdict)? {
        (Structured::Verdict(verdict), raw_response) => Ok(CheckerVerdict { insight_type: t, verdict, raw_response }),
        _ => unreachable!("boolean shape yields a verdict"),
    }
}

/// Picks one of `candidates`. A single candidate is returned without a call.
pub fn moderate(
    segment: &str,
    candidates: &[InsightType],
    gateway: &Gateway,
    prompts: &PromptLibrary,
) -> Result<InsightType, GatewayError> {
    assert!(!candidates.is_empty(), "moderate needs at least one candidate");
    if let [only] = candidates {
        return Ok(*only);
    }
    let opts: Vec<String> = candidates.iter().map(|t| t.as_str().to_string()).collect();
    match gateway.complete_structured(&prompts.moderator(candidates, segment), &Shape::SingleChoice(opts))? {
        Structured::Choice(i) => Ok(candidates[i]),
        _ => unreachable!("choice shape yields a choice"),
    }
}

pub fn annotate(segment: &str, mode: AnnotationMode, gateway: &Gateway, prompts: &PromptLibrary) -> AnnotationResult {
    match mode {
        AnnotationMode::TwoStep => annotate_two_step(segment, gateway, prompts),
        AnnotationMode::OneStep => annotate_one_step(segment, gateway, prompts),
    }
}

fn annotate_two_step(segment: &str, gateway: &Gateway, prompts: &PromptLibrary) -> AnnotationResult {
    let results: Vec<(InsightType, Result<CheckerVerdict, GatewayError>)> = thread::scope(|s| {
        let handles: Vec<_> = InsightType::DATA
            .iter()
            .map(|&t| (t, s.spawn(move || check_type(segment, t, gateway, prompts))))
            .collect();
        handles.into_iter().map(|(t, h)| (t, h.join().expect("checker thread panicked"))).collect()
    });

    let mut flags = Vec::new();
    let mut exhausted = false;
    let mut candidates = Vec::new();
    for (t, r) in results {
        match r {
            Ok(v) if v.verdict => candidates.push(t),
            Ok(_) => {}
            Err(e) => {
                exhausted |= e.is_exhaustion();
                flags.push(Flag::new(FlagCode::CheckerFailed, e.to_string()));
            }
        }
    }

    let mut calls = InsightType::DATA.len() as u32;
    let final_type = match candidates.as_slice() {
        [] => InsightType::None,
        [only] => *only,
        _ => {
            calls += 1;
            moderate(segment, &candidates, gateway, prompts).unwrap_or_else(|e| {
                exhausted |= e.is_exhaustion();
                let t = by_priority(&candidates).expect("candidates are data types");
                flags.push(Flag::new(FlagCode::ModeratorFallback, format!("{e}; using {}", t.as_str())));
                t
            })
        }
    };
    if flags.len() == InsightType::DATA.len() {
        flags.push(Flag::new(FlagCode::AnnotationFailed, "every checker failed"));
    }
    AnnotationResult { final_type, candidates, mode: AnnotationMode::TwoStep, flags, calls, exhausted }
}

fn annotate_one_step(segment: &str, gateway: &Gateway, prompts: &PromptLibrary) -> AnnotationResult {
    let mut opts: Vec<String> = InsightType::DATA.iter().map(|t| t.as_str().to_string()).collect();
    opts.push(NO_TYPE_LABEL.to_string());
    let mut flags = Vec::new();
    let mut exhausted = false;
    let final_type = match gateway.complete_structured(&prompts.moderator_onestep(segment), &Shape::SingleChoice(opts)) {
        Ok(Structured::Choice(i)) => InsightType::DATA.get(i).copied().unwrap_or(InsightType::None),
        Ok(_) => unreachable!("choice shape yields a choice"),
        Err(e) => {
            exhausted = e.is_exhaustion();
            flags.push(Flag::new(FlagCode::AnnotationFailed, e.to_string()));
            InsightType::None
        }
    };
    let candidates = if final_type.is_data() { vec![final_type] } else { vec![] };
    AnnotationResult { final_type, candidates, mode: AnnotationMode::OneStep, flags, calls: 1, exhausted }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diag::has_flag;
    use crate::llm::{RetryPolicy, Script, ScriptEntry, ScriptedResponse, ScriptedTransport};

    const DROUGHT: &str = "Around 60% of Mexico is experiencing moderate to exceptional drought.";

    fn gateway(entries: Vec<ScriptEntry>) -> Gateway {
        Gateway::new(ScriptedTransport::new(Script::new(entries))).with_retry(RetryPolicy::immediate())
    }

    fn checkers(yes: &[InsightType]) -> Vec<ScriptEntry> {
        InsightType::DATA
            .iter()
            .map(|t| ScriptEntry::for_tag(&format!("checker:{}", t.as_str()), &[if yes.contains(t) { "true" } else { "false" }]))
            .collect()
    }

    #[test]
    fn all_false_is_plain_text_with_six_calls() {
        let g = gateway(checkers(&[]));
        let r = annotate("The weather was pleasant.", AnnotationMode::TwoStep, &g, &PromptLibrary::builtin());
        assert_eq!((r.final_type, r.calls), (InsightType::None, 6));
        assert_eq!(g.stats().requests, 6);
    }

    #[test]
    fn single_positive_skips_moderation() {
        let g = gateway(checkers(&[InsightType::Trend]));
        let r = annotate("x", AnnotationMode::TwoStep, &g, &PromptLibrary::builtin());
        assert_eq!((r.final_type, r.calls), (InsightType::Trend, 6));
    }

    #[test]
    fn several_positives_are_moderated() {
        let mut e = checkers(&[InsightType::Value, InsightType::Extreme]);
        e.push(ScriptEntry::for_tag("moderator", &["extreme"]));
        let g = gateway(e);
        let r = annotate("x", AnnotationMode::TwoStep, &g, &PromptLibrary::builtin());
        assert_eq!((r.final_type, r.calls), (InsightType::Extreme, 7));
        assert_eq!(g.stats().requests, 7);
        assert_eq!(r.candidates, [InsightType::Value, InsightType::Extreme]);
    }

    #[test]
    fn moderator_scripted_choice() {
        let g = gateway(vec![ScriptEntry::for_tag("moderator", &["proportion"])]);
        let t = moderate(DROUGHT, &[InsightType::Value, InsightType::Proportion], &g, &PromptLibrary::builtin()).unwrap();
        assert_eq!(t, InsightType::Proportion);
        assert_eq!(moderate(DROUGHT, &[InsightType::Trend], &gateway(vec![]), &PromptLibrary::builtin()).unwrap(), InsightType::Trend);
    }

    #[test]
    fn invalid_moderation_falls_back_by_priority() {
        let mut e = checkers(&[InsightType::Value, InsightType::Rank]);
        e.push(ScriptEntry::for_tag("moderator", &["distribution"]));
        let r = annotate("x", AnnotationMode::TwoStep, &gateway(e), &PromptLibrary::builtin());
        assert_eq!(r.final_type, InsightType::Rank);
        assert!(has_flag(&r.flags, FlagCode::ModeratorFallback));
    }

    #[test]
    fn checker_failure_counts_as_false() {
        let mut e = checkers(&[InsightType::Comparison]);
        e[0] = ScriptEntry::for_tag("checker:value", &[]).with_responses(vec![ScriptedResponse::Fail { fail: "down".into() }]);
        let r = annotate("x", AnnotationMode::TwoStep, &gateway(e), &PromptLibrary::builtin());
        assert_eq!(r.final_type, InsightType::Comparison);
        assert!(r.exhausted);
        assert!(has_flag(&r.flags, FlagCode::CheckerFailed));
    }

    #[test]
    fn total_failure_is_none() {
        let r = annotate("x", AnnotationMode::TwoStep, &gateway(vec![]), &PromptLibrary::builtin());
        assert_eq!(r.final_type, InsightType::None);
        assert!(has_flag(&r.flags, FlagCode::AnnotationFailed));
    }

    #[test]
    fn one_step_uses_a_single_call() {
        let g = gateway(vec![ScriptEntry::for_tag("moderator_onestep", &["no type"])]);
        let r = annotate("The weather was pleasant.", AnnotationMode::OneStep, &g, &PromptLibrary::builtin());
        assert_eq!((r.final_type, r.calls), (InsightType::None, 1));
        let g = gateway(vec![ScriptEntry::for_tag("moderator_onestep", &["Proportion"])]);
        assert_eq!(annotate(DROUGHT, AnnotationMode::OneStep, &g, &PromptLibrary::builtin()).final_type, InsightType::Proportion);
    }
}
