//! Typed history segments and raw-history validation.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::constraint::marker_regex;
use crate::tokenize::Tokenizer;

/// Kind of a history span. `Summary` and `IceReminder` are produced by
/// the pipeline only; scenario input must never carry them, so that
/// provenance audits can tell pipeline text from scenario text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SegmentKind {
    System,
    User,
    Assistant,
    ToolOutput,
    PlannerNote,
    RetrievedSnippet,
    ExecutionLog,
    Filler,
    Directive,
    Summary,
    IceReminder,
}

impl SegmentKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::System => "system",
            Self::User => "user",
            Self::Assistant => "assistant",
            Self::ToolOutput => "tool_output",
            Self::PlannerNote => "planner_note",
            Self::RetrievedSnippet => "retrieved_snippet",
            Self::ExecutionLog => "execution_log",
            Self::Filler => "filler",
            Self::Directive => "directive",
            Self::Summary => "summary",
            Self::IceReminder => "ice_reminder",
        }
    }

    /// Kinds that may appear in scenario input.
    pub fn scenario_admissible(self) -> bool {
        !matches!(self, Self::Summary | Self::IceReminder)
    }
}

/// Admission routing mode: scenario ground-truth labels vs the
/// heuristic classifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RoutingMode {
    Oracle,
    Autonomous,
}

impl RoutingMode {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Oracle => "oracle",
            Self::Autonomous => "autonomous",
        }
    }
}

/// Oracle label tag carried in `Segment::labels` when the scenario
/// supplies ground-truth routing.
pub const LABEL_POLICY: &str = "POLICY";
/// See [`LABEL_POLICY`].
pub const LABEL_DATA: &str = "DATA";

/// One typed span of turn-local history.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    pub id: String,
    pub kind: SegmentKind,
    pub text: String,
    pub turn_index: usize,
    /// Token count of `text` under the configured tokenizer, fixed at
    /// construction so later composition never recounts.
    pub token_count: usize,
    pub labels: BTreeSet<String>,
}

impl Segment {
    pub fn new(
        id: impl Into<String>,
        kind: SegmentKind,
        text: impl Into<String>,
        turn_index: usize,
        tokenizer: &dyn Tokenizer,
    ) -> Self {
        let text = text.into();
        let token_count = tokenizer.count(&text);
        Self {
            id: id.into(),
            kind,
            text,
            turn_index,
            token_count,
            labels: BTreeSet::new(),
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.labels.insert(label.into());
        self
    }

    pub fn oracle_label(&self) -> Option<Route> {
        if self.labels.contains(LABEL_POLICY) {
            Some(Route::Policy)
        } else if self.labels.contains(LABEL_DATA) {
            Some(Route::Data)
        } else {
            None
        }
    }
}

pub use crate::admission::Route;

/// Ordered turn-local history plus the final query that triggers the
/// decision.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawHistory {
    pub segments: Vec<Segment>,
    pub final_query: Segment,
}

impl RawHistory {
    pub fn total_tokens(&self) -> usize {
        self.segments.iter().map(|s| s.token_count).sum::<usize>() + self.final_query.token_count
    }
}

/// One invariant violation found by [`validate_history`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Violation {
    QueryEmbeddedInSegments { id: String },
    QueryNotUserKind { kind: SegmentKind },
    TurnIndexOutOfOrder { id: String, turn_index: usize, previous: usize },
    DuplicateMarker { marker: String, first_id: String, second_id: String },
    PipelineKindInInput { id: String, kind: SegmentKind },
    DuplicateSegmentId { id: String },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::QueryEmbeddedInSegments { id } => {
                write!(f, "final query {id} also appears in segments")
            }
            Self::QueryNotUserKind { kind } => {
                write!(f, "final query must be kind user, got {}", kind.as_str())
            }
            Self::TurnIndexOutOfOrder { id, turn_index, previous } => write!(
                f,
                "segment {id} has turn_index {turn_index} after {previous}"
            ),
            Self::DuplicateMarker { marker, first_id, second_id } => write!(
                f,
                "marker {marker} declared by both {first_id} and {second_id}"
            ),
            Self::PipelineKindInInput { id, kind } => write!(
                f,
                "segment {id} has pipeline-only kind {}",
                kind.as_str()
            ),
            Self::DuplicateSegmentId { id } => write!(f, "segment id {id} is not unique"),
        }
    }
}

/// Report-style validation: returns every invariant violation found,
/// empty means the history is well-formed.
pub fn validate_history(h: &RawHistory) -> Vec<Violation> {
    let mut out = Vec::new();
    if h.final_query.kind != SegmentKind::User {
        out.push(Violation::QueryNotUserKind { kind: h.final_query.kind });
    }

    let mut seen_ids = BTreeSet::new();
    let mut prev_turn: Option<usize> = None;
    // marker -> id of the directive-bearing segment that declared it
    let mut declared: std::collections::BTreeMap<String, String> = Default::default();
    let re = marker_regex();

    for seg in &h.segments {
        if seg.id == h.final_query.id {
            out.push(Violation::QueryEmbeddedInSegments { id: seg.id.clone() });
        }
        if !seen_ids.insert(seg.id.clone()) {
            out.push(Violation::DuplicateSegmentId { id: seg.id.clone() });
        }
        if !seg.kind.scenario_admissible() {
            out.push(Violation::PipelineKindInInput { id: seg.id.clone(), kind: seg.kind });
        }
        if let Some(p) = prev_turn {
            if seg.turn_index < p {
                out.push(Violation::TurnIndexOutOfOrder {
                    id: seg.id.clone(),
                    turn_index: seg.turn_index,
                    previous: p,
                });
            }
        }
        prev_turn = Some(seg.turn_index);

        // Only directive segments *declare* a marker; recaps and binding
        // notes may mention markers without owning them.
        if seg.kind == SegmentKind::Directive {
            for cap in re.captures_iter(&seg.text) {
                let marker = cap[0].trim_matches(['[', ']']).to_string();
                if let Some(first) = declared.get(&marker) {
                    out.push(Violation::DuplicateMarker {
                        marker,
                        first_id: first.clone(),
                        second_id: seg.id.clone(),
                    });
                } else {
                    declared.insert(marker, seg.id.clone());
                }
            }
        }
    }
    out
}
