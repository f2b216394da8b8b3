//! Admission control: partition raw history into control state, data
//! state, and the final query before any budget competition.
//!
//! Oracle mode copies scenario labels; autonomous mode routes on an
//! explicit `[cK]` marker or a frozen heuristic score. The classifier
//! is deliberately a documented weight table, not a model: false
//! negatives are permitted in autonomous mode and are part of what the
//! harness measures. There is never a silent fallback to oracle labels.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constraint::marker_regex;
use crate::segment::{RawHistory, RoutingMode, Segment};

/// Deontic-modal lexicon used by the classifier and by rule-line
/// ranking in structured compaction.
pub const DEONTIC_LEXICON: [&str; 6] = ["do not", "never", "must", "only if", "require", "forbid"];

const IMPERATIVE_STARTS: [&str; 15] = [
    "do", "never", "always", "avoid", "use", "proceed", "ensure", "confirm", "verify", "wait",
    "stop", "keep", "apply", "share", "prefer",
];

/// Routing decision for one segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Route {
    Policy,
    Data,
}

/// Frozen feature weights for the directive-likelihood score. Shipped
/// defaults are compiled in; a configuration file may override them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LpcWeights {
    /// Explicit `[cK]` marker; saturating.
    pub marker: f64,
    /// Per distinct deontic-modal lexicon hit.
    pub deontic: f64,
    /// Sentence starts with an imperative verb.
    pub imperative: f64,
    /// Second-person address ("you", "your").
    pub second_person: f64,
    pub threshold: f64,
}

impl Default for LpcWeights {
    fn default() -> Self {
        Self { marker: 1.0, deontic: 0.5, imperative: 0.2, second_person: 0.15, threshold: 0.5 }
    }
}

/// Deterministic directive-likelihood score in [0, 1].
pub fn score_directive_likelihood(seg: &Segment, weights: &LpcWeights) -> f64 {
    let text = seg.text.trim();
    if text.is_empty() {
        return 0.0;
    }
    if marker_regex().is_match(text) {
        return weights.marker.clamp(0.0, 1.0);
    }
    let lower = text.to_lowercase();
    let mut score = 0.0;
    for phrase in DEONTIC_LEXICON {
        if lower.contains(phrase) {
            score += weights.deontic;
        }
    }
    if let Some(first) = lower.split_whitespace().next() {
        let word = first.trim_matches(|c: char| !c.is_alphanumeric());
        if IMPERATIVE_STARTS.contains(&word) {
            score += weights.imperative;
        }
    }
    if lower.contains("you ") || lower.contains("your ") || lower.ends_with("you") {
        score += weights.second_person;
    }
    score.clamp(0.0, 1.0)
}

/// Result of admission: the partition plus the per-segment routing map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdmissionResult {
    pub control: Vec<Segment>,
    pub data: Vec<Segment>,
    pub query: Segment,
    pub per_segment_route: BTreeMap<String, Route>,
    pub mode: RoutingMode,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AdmissionError {
    #[error("oracle routing requested but segment {id} has no POLICY/DATA label")]
    MissingOracleLabel { id: String },
}

/// Partition history into control and data. Ordering within each
/// partition preserves history order; the query joins neither side.
pub fn admit_control(
    h: &RawHistory,
    mode: RoutingMode,
    weights: &LpcWeights,
) -> Result<AdmissionResult, AdmissionError> {
    let mut control = Vec::new();
    let mut data = Vec::new();
    let mut per_segment_route = BTreeMap::new();
    for seg in &h.segments {
        let route = match mode {
            RoutingMode::Oracle => seg
                .oracle_label()
                .ok_or_else(|| AdmissionError::MissingOracleLabel { id: seg.id.clone() })?,
            RoutingMode::Autonomous => {
                let has_marker = marker_regex().is_match(&seg.text);
                if has_marker || score_directive_likelihood(seg, weights) >= weights.threshold {
                    Route::Policy
                } else {
                    Route::Data
                }
            }
        };
        per_segment_route.insert(seg.id.clone(), route);
        match route {
            Route::Policy => control.push(seg.clone()),
            Route::Data => data.push(seg.clone()),
        }
    }
    Ok(AdmissionResult { control, data, query: h.final_query.clone(), per_segment_route, mode })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::segment::{SegmentKind, LABEL_DATA, LABEL_POLICY};
    use crate::tokenize::WhitespaceTokenizer;
    use proptest::prelude::*;

    fn seg(id: &str, text: &str, turn: usize) -> Segment {
        Segment::new(id, SegmentKind::Filler, text, turn, &WhitespaceTokenizer)
    }

    fn history(segments: Vec<Segment>) -> RawHistory {
        RawHistory {
            segments,
            final_query: Segment::new(
                "q",
                SegmentKind::User,
                "Summarize the archive status.",
                99,
                &WhitespaceTokenizer,
            ),
        }
    }

    #[test]
    fn oracle_mode_copies_labels_exactly() {
        let segments = vec![
            seg("s0", "[c1] Do not use external tools.", 0).with_label(LABEL_POLICY),
            seg("s1", "[c2] Never delete data.", 1).with_label(LABEL_POLICY),
            seg("s2", "The shipment arrived on schedule.", 2).with_label(LABEL_DATA),
            seg("s3", "Inventory counts were steady.", 3).with_label(LABEL_DATA),
            seg("s4", "Weekly sync notes archived.", 4).with_label(LABEL_DATA),
        ];
        let h = history(segments);
        let r = admit_control(&h, RoutingMode::Oracle, &LpcWeights::default()).unwrap();
        assert_eq!(r.control.iter().map(|s| s.id.as_str()).collect::<Vec<_>>(), ["s0", "s1"]);
        assert_eq!(r.data.len(), 3);
        for seg in &h.segments {
            assert_eq!(r.per_segment_route[&seg.id], seg.oracle_label().unwrap());
        }
    }

    #[test]
    fn missing_oracle_label_is_configuration_error() {
        let h = history(vec![seg("s0", "unlabeled text", 0)]);
        let err = admit_control(&h, RoutingMode::Oracle, &LpcWeights::default()).unwrap_err();
        assert_eq!(err, AdmissionError::MissingOracleLabel { id: "s0".into() });
    }

    #[test]
    fn marker_routes_policy_in_autonomous_mode() {
        let h = history(vec![seg("s0", "[c2] Never delete data.", 0)]);
        let r = admit_control(&h, RoutingMode::Autonomous, &LpcWeights::default()).unwrap();
        assert_eq!(r.per_segment_route["s0"], Route::Policy);
    }

    #[test]
    fn benign_text_routes_data_in_autonomous_mode() {
        let h = history(vec![seg("s0", "the weather was mild that week", 0)]);
        let r = admit_control(&h, RoutingMode::Autonomous, &LpcWeights::default()).unwrap();
        assert_eq!(r.per_segment_route["s0"], Route::Data);
    }

    #[test]
    fn marker_saturates_score() {
        let s = seg("s", "[c1] Do not use external tools.", 0);
        assert_eq!(score_directive_likelihood(&s, &LpcWeights::default()), 1.0);
    }

    #[test]
    fn empty_text_scores_zero() {
        let s = seg("s", "", 0);
        assert_eq!(score_directive_likelihood(&s, &LpcWeights::default()), 0.0);
    }

    #[test]
    fn deontic_hit_clears_threshold() {
        let w = LpcWeights::default();
        let s = seg("s", "Proceed only if condition Z is true.", 0);
        assert!(score_directive_likelihood(&s, &w) >= w.threshold);
    }

    proptest! {
        // Partition totality: every segment lands on exactly one side.
        #[test]
        fn partition_is_total(texts in proptest::collection::vec("[a-z ]{0,40}", 0..12)) {
            let segments: Vec<Segment> = texts
                .iter()
                .enumerate()
                .map(|(i, t)| seg(&format!("s{i}"), t, i))
                .collect();
            let n = segments.len();
            let h = history(segments);
            let r = admit_control(&h, RoutingMode::Autonomous, &LpcWeights::default()).unwrap();
            prop_assert_eq!(r.control.len() + r.data.len(), n);
            prop_assert!(!r.control.iter().any(|s| s.id == "q"));
        }

        // Autonomous recall on markers: a well-formed [cK] marker always
        // routes POLICY.
        #[test]
        fn marker_recall(k in 1usize..40, tail in "[a-z ]{0,30}") {
            let text = format!("[c{k}] {tail}");
            let h = history(vec![seg("s0", &text, 0)]);
            let r = admit_control(&h, RoutingMode::Autonomous, &LpcWeights::default()).unwrap();
            prop_assert_eq!(r.per_segment_route["s0"], Route::Policy);
        }
    }
}
