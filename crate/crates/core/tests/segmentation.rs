mod support {
    pub mod gen;
}

use gistvis::discoverer::{align_segments, boundary_set, is_partition, segment_llm, segment_regex_baseline, split_sentences, SegmentSpan};
use gistvis::document::check_partition;
use gistvis::llm::{Gateway, RetryPolicy, Script, ScriptEntry, ScriptedTransport};
use gistvis::prompts::PromptLibrary;
use gistvis::text::char_slice;
use proptest::prelude::*;

use support::gen::{apply, arb_paragraph, perturb, Perturb};

fn verbatim(p: &str, spans: &[SegmentSpan]) -> bool {
    spans.iter().all(|s| char_slice(p, s.start, s.end) == s.text)
}

fn contexts(spans: &[SegmentSpan]) -> Vec<&str> {
    spans.iter().map(|s| s.text.as_str()).collect()
}

/// Groups consecutive sentences; `cuts[i]` ends a group after sentence `i`.
fn group(p: &str, sentences: &[SegmentSpan], cuts: &[bool]) -> Vec<String> {
    let mut out = Vec::new();
    let mut start = 0;
    for (i, s) in sentences.iter().enumerate() {
        if i + 1 == sentences.len() || cuts[i % cuts.len()] {
            out.push(char_slice(p, sentences[start].start, s.end).to_string());
            start = i + 1;
        }
    }
    out
}

fn scripted(response: &str) -> Gateway {
    Gateway::new(ScriptedTransport::new(Script::new(vec![ScriptEntry::for_tag("discoverer", &[response])])))
        .with_retry(RetryPolicy::immediate())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn regex_baseline_partitions(p in arb_paragraph()) {
        let spans: Vec<SegmentSpan> = segment_regex_baseline(&p).into_iter().map(|b| b.span).collect();
        prop_assert!(is_partition(&p, &spans));
        prop_assert!(verbatim(&p, &spans));
        prop_assert_eq!(check_partition(&p, &contexts(&spans)), Ok(()));
    }

    #[test]
    fn llm_segmenter_partitions(
        p in arb_paragraph(),
        cuts in prop::collection::vec(any::<bool>(), 8),
        noise in prop::collection::vec(perturb(), 8),
        bogus in prop::bool::weighted(0.1),
    ) {
        let sentences = split_sentences(&p);
        let response = if bogus {
            "Completely unrelated text.\nNothing from the paragraph.".to_string()
        } else {
            group(&p, &sentences, &cuts)
                .iter()
                .enumerate()
                .map(|(i, g)| apply(noise[i % noise.len()], g).replace('\n', " "))
                .collect::<Vec<_>>()
                .join("\n")
        };
        let gw = scripted(&response);
        let seg = segment_llm(&p, &gw, &PromptLibrary::builtin()).unwrap();
        prop_assert!(is_partition(&p, &seg.spans), "{:?}", seg.spans);
        prop_assert!(verbatim(&p, &seg.spans));
        prop_assert_eq!(check_partition(&p, &contexts(&seg.spans)), Ok(()));
        prop_assert!(seg.calls <= 1);
    }

    #[test]
    fn alignment_is_idempotent(
        p in arb_paragraph(),
        cuts in prop::collection::vec(any::<bool>(), 8),
        noise in prop::collection::vec(perturb(), 8),
    ) {
        let sentences = split_sentences(&p);
        let cands: Vec<String> = group(&p, &sentences, &cuts)
            .iter()
            .enumerate()
            .map(|(i, g)| apply(noise[i % noise.len()], g))
            .collect();
        if let Ok(first) = align_segments(&p, &cands) {
            let again = align_segments(&p, &contexts(&first).iter().map(|s| s.to_string()).collect::<Vec<_>>()).unwrap();
            prop_assert_eq!(again, first);
        }
    }

    #[test]
    fn exact_groups_align_to_their_own_boundaries(
        p in arb_paragraph(),
        cuts in prop::collection::vec(any::<bool>(), 8),
    ) {
        let sentences = split_sentences(&p);
        let groups = group(&p, &sentences, &cuts);
        let spans = align_segments(&p, &groups).unwrap();
        prop_assert_eq!(contexts(&spans), groups.iter().map(|g| g.as_str()).collect::<Vec<_>>());
    }
}

#[test]
fn perturbed_candidates_keep_sentence_boundaries() {
    let p = "Sales rose by 40%. Prices fell sharply!  Revenue hit a record high.";
    let cands: Vec<String> = ["Sales rose by 40%.", "Prices fell sharply! Revenue hit a record high."]
        .iter()
        .map(|c| apply(Perturb::Lowercase, c))
        .collect();
    let spans = align_segments(p, &cands).unwrap();
    assert_eq!(contexts(&spans), ["Sales rose by 40%.", "Prices fell sharply!  Revenue hit a record high."]);
    assert_eq!(boundary_set(p, &spans), [15, 55]);
}
