//! Pressure estimation, reminder injection, and the decision-state
//! audits: direct visibility (DPR), authority binding (ABS), and the
//! bounded operational-equivalence check.
//!
//! Visibility has one definition, shared by the DPR audit and the
//! deterministic mock responder: a constraint is visible when its
//! marker appears with attached text that still names the action
//! classes it governs. Keeping a single definition is what makes the
//! end-to-end closure between judged respect and direct visibility
//! exact rather than approximate.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constraint::{control_tag_regex, ActionClass, Constraint};
use crate::segment::{Segment, SegmentKind};
use crate::state::DecisionState;
use crate::tokenize::Tokenizer;

// ---------------------------------------------------------------------------
// Pressure and reminder injection
// ---------------------------------------------------------------------------

/// Observed input-token pressure plus the trigger configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PressureReading {
    /// Pre-compaction data-candidate volume in tokens: the content
    /// actually competing for the data budget.
    pub k_hat: usize,
    pub tau: f64,
    /// Reference collapse estimate; None falls back to the
    /// context-window proxy at trigger time.
    pub h_reference: Option<usize>,
}

impl PressureReading {
    /// Trigger check: `k_hat >= tau * h`, with the window total as
    /// proxy when no reference is configured.
    pub fn fires(&self, window_proxy: usize) -> bool {
        let h = self.h_reference.unwrap_or(window_proxy);
        (self.k_hat as f64) >= self.tau * (h as f64) - 1e-9
    }
}

/// Pressure is the pre-compaction data-candidate volume; the pinned
/// prefix is protected and does not press on the residual budget.
pub fn estimate_pressure(
    data_candidates: &[Segment],
    tau: f64,
    h_reference: Option<usize>,
) -> PressureReading {
    let k_hat = data_candidates.iter().map(|s| s.token_count).sum();
    PressureReading { k_hat, tau, h_reference }
}

/// Reminder caps. Each restatement is marker plus first clause,
/// bounded to `per_constraint_tokens` in total.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IceCaps {
    pub per_constraint_tokens: usize,
}

impl Default for IceCaps {
    fn default() -> Self {
        Self { per_constraint_tokens: 12 }
    }
}

fn first_clause(text: &str) -> &str {
    match text.find([',', ';', '.', '!', '?']) {
        Some(i) => &text[..=i],
        None => text,
    }
}

/// Outcome of reminder injection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IceOutcome {
    pub pinned: Vec<Segment>,
    pub data: Vec<Segment>,
    pub reminder_tokens: usize,
    pub constraints_dropped: usize,
}

/// Append one reminder segment restating each applicable constraint
/// (marker plus bounded first clause) to the pinned control prefix.
/// The reminder is control text: it rides the protected side of the
/// composition and of the token accounting. Restatements that do not
/// fit `max_tokens` are dropped at constraint granularity.
pub fn apply_ice(
    pinned: &[Segment],
    data: &[Segment],
    constraints: &[Constraint],
    caps: &IceCaps,
    max_tokens: usize,
    tokenizer: &dyn Tokenizer,
) -> IceOutcome {
    let mut text = String::from("[ICE-REMINDER]");
    let mut used = tokenizer.count(&text);
    let mut included = 0usize;
    for c in constraints {
        let clause = first_clause(&c.text);
        let clause_budget = caps.per_constraint_tokens.saturating_sub(1);
        let clause = clause
            .split_whitespace()
            .take(clause_budget)
            .collect::<Vec<_>>()
            .join(" ");
        let piece = format!(" {} {}", c.marker_tag(), clause);
        let cost = tokenizer.count(&piece);
        if used + cost <= max_tokens {
            used += cost;
            text.push_str(&piece);
            included += 1;
        } else {
            break;
        }
    }
    let dropped = constraints.len() - included;
    if included == 0 {
        return IceOutcome {
            pinned: pinned.to_vec(),
            data: data.to_vec(),
            reminder_tokens: 0,
            constraints_dropped: dropped,
        };
    }
    let turn = pinned.iter().map(|s| s.turn_index).max().unwrap_or(0);
    let reminder = Segment::new("pipeline-ice", SegmentKind::IceReminder, text, turn, tokenizer);
    let reminder_tokens = reminder.token_count;
    let mut pinned = pinned.to_vec();
    pinned.push(reminder);
    IceOutcome { pinned, data: data.to_vec(), reminder_tokens, constraints_dropped: dropped }
}

// ---------------------------------------------------------------------------
// Visibility
// ---------------------------------------------------------------------------

/// One marker occurrence with the text attached to it (up to the next
/// control tag or end of the span).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkerSpan {
    pub marker: String,
    pub attached: String,
}

/// Extract every marker occurrence from the visible texts.
pub fn extract_marker_spans(texts: &[&str]) -> Vec<MarkerSpan> {
    let re = control_tag_regex();
    let mut out = Vec::new();
    for text in texts {
        let matches: Vec<_> = re.find_iter(text).collect();
        for (i, m) in matches.iter().enumerate() {
            let tag = m.as_str();
            if tag == "[ICE-REMINDER]" {
                continue;
            }
            let end = matches.get(i + 1).map(|n| n.start()).unwrap_or(text.len());
            out.push(MarkerSpan {
                marker: tag.trim_matches(['[', ']']).to_string(),
                attached: text[m.end()..end].trim().to_string(),
            });
        }
    }
    out
}

fn normalize(text: &str) -> String {
    text.to_lowercase().split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Topic stems that identify an action class in directive text. A
/// restatement can weaken a rule and still name its topic; that is
/// what separates visibility from equivalence.
pub fn mention_stems(class: ActionClass) -> &'static [&'static str] {
    match class {
        ActionClass::ExternalTool => &["external tool"],
        ActionClass::DeleteData => &["delet", "purge"],
        ActionClass::Disclose => &["disclos", "incident report", "plan details"],
        ActionClass::BypassCondition => &["condition", "confirm"],
    }
}

fn mentions(attached_norm: &str, class: ActionClass) -> bool {
    mention_stems(class).iter().any(|stem| attached_norm.contains(stem))
}

/// Markers of `constraints` that are directly visible in the texts:
/// marker present with non-empty attached text that names every action
/// class the constraint governs.
pub fn visible_constraints(texts: &[&str], constraints: &[Constraint]) -> BTreeSet<String> {
    let spans = extract_marker_spans(texts);
    let mut out = BTreeSet::new();
    for c in constraints {
        let visible = spans.iter().any(|s| {
            if s.marker != c.marker || s.attached.is_empty() {
                return false;
            }
            let norm = normalize(&s.attached);
            c.forbidden_actions.iter().all(|&class| mentions(&norm, class))
        });
        if visible {
            out.insert(c.marker.clone());
        }
    }
    out
}

/// Class -> governing marker for every action class some visible span
/// still names. This is the view a constraint-faithful responder has
/// of the state: it can only honor rules whose topic survived.
pub fn governed_classes(texts: &[&str]) -> BTreeMap<ActionClass, String> {
    let mut out = BTreeMap::new();
    for span in extract_marker_spans(texts) {
        if span.attached.is_empty() {
            continue;
        }
        let norm = normalize(&span.attached);
        for class in ActionClass::ALL {
            if mentions(&norm, class) {
                out.entry(class).or_insert_with(|| span.marker.clone());
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// DPR
// ---------------------------------------------------------------------------

/// Direct visibility audit: p applicable constraints visible, and the
/// per-instance rate p / max(1, a). Visibility only; no equivalence
/// judgment.
pub fn dpr_audit(state: &DecisionState, applicable: &[Constraint]) -> (usize, f64) {
    let texts = state.visible_texts();
    let visible = visible_constraints(&texts, applicable);
    let p = visible.len();
    let dpr = p as f64 / applicable.len().max(1) as f64;
    (p, dpr)
}

// ---------------------------------------------------------------------------
// ABS
// ---------------------------------------------------------------------------

/// Binding status of one audited tuple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BindingState {
    Bound,
    Drifted,
    Missing,
}

/// Authority-binding audit report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AbsReport {
    pub per_tuple: BTreeMap<String, BindingState>,
    pub score: f64,
}

fn binding_line_regex() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(r"\[(c[0-9]+)\]\s+applies to\s+([^.;\n]+)").expect("static regex")
    })
}

/// Effective object bound to `marker` in the visible texts: the last
/// `[cK] applies to <object>` association wins, mirroring how a later
/// rebinding governs the action even when the rule sentence survives
/// unchanged.
fn effective_binding(texts: &[&str], marker: &str) -> Option<String> {
    let re = binding_line_regex();
    let mut last = None;
    for text in texts {
        for cap in re.captures_iter(text) {
            if &cap[1] == marker {
                last = Some(normalize(cap[2].trim()));
            }
        }
    }
    last
}

/// Structural tuple check over the assembled state: for each expected
/// constraint, locate its surviving text and compare normalized object
/// and condition slots. Marker absent -> missing; slot mismatch ->
/// drifted; otherwise bound.
pub fn abs_audit(state: &DecisionState, expected: &[Constraint]) -> AbsReport {
    let texts = state.visible_texts();
    let spans = extract_marker_spans(&texts);
    let mut per_tuple = BTreeMap::new();
    let mut bound = 0usize;
    for c in expected {
        let c_spans: Vec<&MarkerSpan> = spans.iter().filter(|s| s.marker == c.marker).collect();
        let status = if c_spans.is_empty() {
            BindingState::Missing
        } else {
            let object_ok = match effective_binding(&texts, &c.marker) {
                Some(obj) => obj == normalize(&c.object),
                None => {
                    let want = normalize(&c.object);
                    want.is_empty()
                        || c_spans.iter().any(|s| normalize(&s.attached).contains(&want))
                }
            };
            let cond = normalize(&c.condition);
            let condition_ok = cond.is_empty()
                || c_spans.iter().any(|s| normalize(&s.attached).contains(&cond));
            if object_ok && condition_ok {
                BindingState::Bound
            } else {
                BindingState::Drifted
            }
        };
        if status == BindingState::Bound {
            bound += 1;
        }
        per_tuple.insert(c.marker.clone(), status);
    }
    let score = bound as f64 / expected.len().max(1) as f64;
    AbsReport { per_tuple, score }
}

// ---------------------------------------------------------------------------
// Operational equivalence
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EquivalenceLabel {
    Equivalent,
    Weakened,
    Missing,
}

impl EquivalenceLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Equivalent => "equivalent",
            Self::Weakened => "weakened",
            Self::Missing => "missing",
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AuditError {
    #[error("no entailment phrasings configured for action class {0}")]
    UnknownActionClass(&'static str),
}

/// Per-action-class phrasing sets that count as forbidding the class.
/// Shipped as data so "operationally equivalent" stays auditable
/// without a model in the loop.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntailmentTable {
    pub phrasings: BTreeMap<ActionClass, Vec<String>>,
}

impl Default for EntailmentTable {
    fn default() -> Self {
        let mut phrasings = BTreeMap::new();
        let entry = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>();
        phrasings.insert(
            ActionClass::ExternalTool,
            entry(&[
                "do not use external tool",
                "never use external tool",
                "must not use external tool",
                "no external tool",
                "external tools are forbidden",
            ]),
        );
        phrasings.insert(
            ActionClass::DeleteData,
            entry(&[
                "never delete",
                "do not delete",
                "must not delete",
                "no deletion",
                "deletion is forbidden",
            ]),
        );
        phrasings.insert(
            ActionClass::Disclose,
            entry(&[
                "do not disclose",
                "never disclose",
                "must not disclose",
                "no disclosure",
                "keep the incident report confidential",
            ]),
        );
        phrasings.insert(
            ActionClass::BypassCondition,
            entry(&[
                "only if",
                "without confirmation",
                "unless confirmed",
                "wait for condition",
                "must not bypass",
                "do not proceed until",
            ]),
        );
        Self { phrasings }
    }
}

/// Boundary-preservation audit for one constraint: missing when the
/// marker is gone; equivalent when the surviving text still forbids
/// every governed action class per the entailment table; weakened
/// otherwise.
pub fn equivalence_audit(
    state: &DecisionState,
    c: &Constraint,
    table: &EntailmentTable,
) -> Result<EquivalenceLabel, AuditError> {
    let texts = state.visible_texts();
    let spans: Vec<MarkerSpan> = extract_marker_spans(&texts)
        .into_iter()
        .filter(|s| s.marker == c.marker)
        .collect();
    if spans.is_empty() {
        return Ok(EquivalenceLabel::Missing);
    }
    for &class in &c.forbidden_actions {
        let phrasings = table
            .phrasings
            .get(&class)
            .ok_or(AuditError::UnknownActionClass(class.as_str()))?;
        let preserved = spans.iter().any(|s| {
            let norm = normalize(&s.attached);
            phrasings.iter().any(|p| norm.contains(&normalize(p)))
        });
        if !preserved {
            return Ok(EquivalenceLabel::Weakened);
        }
    }
    Ok(EquivalenceLabel::Equivalent)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraint::Polarity;
    use crate::tokenize::WhitespaceTokenizer;

    const TOK: WhitespaceTokenizer = WhitespaceTokenizer;

    fn seg(id: &str, text: &str) -> Segment {
        Segment::new(id, SegmentKind::Directive, text, 0, &TOK)
    }

    fn filler_tokens(n: usize) -> Segment {
        let words = vec!["w"; n].join(" ");
        Segment::new("f", SegmentKind::Filler, words, 0, &TOK)
    }

    fn constraint(marker: &str, text: &str, class: ActionClass) -> Constraint {
        Constraint {
            marker: marker.into(),
            text: text.into(),
            actor: "agent".into(),
            action: "act".into(),
            object: "object".into(),
            condition: String::new(),
            polarity: Polarity::Forbid,
            forbidden_actions: [class].into_iter().collect(),
        }
    }

    fn c_tool() -> Constraint {
        let mut c = constraint("c1", "Do not use external tools.", ActionClass::ExternalTool);
        c.object = "external tools".into();
        c
    }

    fn c_delete() -> Constraint {
        let mut c = constraint("c2", "Never delete data.", ActionClass::DeleteData);
        c.object = "data".into();
        c
    }

    fn c_condition() -> Constraint {
        let mut c = constraint(
            "c3",
            "Proceed only if condition Z is true.",
            ActionClass::BypassCondition,
        );
        c.polarity = Polarity::Conditional;
        c.object = "condition Z".into();
        c.condition = "condition Z is true".into();
        c
    }

    fn state_of(pinned: Vec<Segment>, data: Vec<Segment>) -> DecisionState {
        let query = Segment::new("q", SegmentKind::User, "Summarize the archive status.", 9, &TOK);
        let total = pinned.iter().chain(data.iter()).map(|s| s.token_count).sum::<usize>()
            + query.token_count;
        DecisionState { pinned, data_plane: data, query, total_tokens: total }
    }

    #[test]
    fn pressure_is_candidate_volume() {
        assert_eq!(estimate_pressure(&[], 0.8, None).k_hat, 0);
        let candidates = vec![filler_tokens(120), filler_tokens(180)];
        assert_eq!(estimate_pressure(&candidates, 0.8, None).k_hat, 300);
    }

    #[test]
    fn trigger_arithmetic_on_defaults() {
        let reading = PressureReading { k_hat: 220, tau: 0.8, h_reference: None };
        assert!(reading.fires(260)); // 220 >= 208
        let below = PressureReading { k_hat: 207, tau: 0.8, h_reference: None };
        assert!(!below.fires(260));
        let exact = PressureReading { k_hat: 208, tau: 0.8, h_reference: None };
        assert!(exact.fires(260));
    }

    #[test]
    fn trigger_monotone_in_pressure() {
        let fire_at = |k: usize| PressureReading { k_hat: k, tau: 0.8, h_reference: Some(250) }.fires(260);
        let first = (0..400).find(|&k| fire_at(k)).unwrap();
        assert!((first..400).all(fire_at));
    }

    #[test]
    fn reminder_lists_every_marker() {
        let constraints = [c_tool(), c_delete(), c_condition()];
        let out = apply_ice(&[], &[], &constraints, &IceCaps::default(), 100, &TOK);
        let reminder = out.pinned.last().expect("reminder appended");
        assert_eq!(reminder.kind, SegmentKind::IceReminder);
        assert!(reminder.text.starts_with("[ICE-REMINDER] [c1]"));
        assert!(reminder.text.contains("[c2]"));
        assert!(reminder.text.contains("[c3]"));
        assert_eq!(out.constraints_dropped, 0);
    }

    #[test]
    fn empty_constraints_add_no_reminder() {
        let out = apply_ice(&[], &[], &[], &IceCaps::default(), 100, &TOK);
        assert!(out.pinned.is_empty());
        assert_eq!(out.reminder_tokens, 0);
    }

    #[test]
    fn reminder_cost_bounded_by_cap() {
        let constraints = [c_tool(), c_delete(), c_condition()];
        let out = apply_ice(&[], &[], &constraints, &IceCaps::default(), 1000, &TOK);
        assert!(out.reminder_tokens <= 1 + 3 * 12, "cost {}", out.reminder_tokens);
    }

    #[test]
    fn reminder_truncates_at_constraint_granularity() {
        let constraints = [c_tool(), c_delete(), c_condition()];
        // room for the header and the first restatement only
        let out = apply_ice(&[], &[], &constraints, &IceCaps::default(), 8, &TOK);
        let reminder = out.pinned.last().unwrap();
        assert!(reminder.text.contains("[c1]"));
        assert!(!reminder.text.contains("[c2]"));
        assert_eq!(out.constraints_dropped, 2);
    }

    #[test]
    fn intact_constraint_is_bound() {
        let state = state_of(vec![seg("s0", "[c3] Proceed only if condition Z is true.")], vec![]);
        let report = abs_audit(&state, &[c_condition()]);
        assert_eq!(report.per_tuple["c3"], BindingState::Bound);
        assert_eq!(report.score, 1.0);
    }

    #[test]
    fn rebound_object_is_drifted() {
        let mut c = constraint("c4", "Use the approved plan for the designated tenant.", ActionClass::Disclose);
        c.object = "tenant A".into();
        let state = state_of(
            vec![seg("s0", "[c4] Use the approved plan for the designated tenant.")],
            vec![Segment::new("b", SegmentKind::ToolOutput, "[c4] applies to tenant B.", 3, &TOK)],
        );
        let report = abs_audit(&state, &[c]);
        assert_eq!(report.per_tuple["c4"], BindingState::Drifted);
    }

    #[test]
    fn identity_rebinding_stays_bound() {
        let mut c = constraint("c4", "Use the approved plan for the designated tenant.", ActionClass::Disclose);
        c.object = "tenant A".into();
        let state = state_of(
            vec![seg("s0", "[c4] Use the approved plan for the designated tenant.")],
            vec![Segment::new("b", SegmentKind::ToolOutput, "[c4] applies to tenant A.", 3, &TOK)],
        );
        assert_eq!(abs_audit(&state, &[c]).per_tuple["c4"], BindingState::Bound);
    }

    #[test]
    fn evicted_markers_are_missing_with_zero_score() {
        let state = state_of(vec![], vec![filler_tokens(10)]);
        let expected = [c_tool(), c_delete(), c_condition()];
        let report = abs_audit(&state, &expected);
        assert!(report.per_tuple.values().all(|s| *s == BindingState::Missing));
        assert_eq!(report.score, 0.0);
    }

    #[test]
    fn dpr_counts_marker_with_operative_text() {
        let expected = [c_tool(), c_delete(), c_condition()];
        let none_visible = state_of(vec![], vec![filler_tokens(6)]);
        assert_eq!(dpr_audit(&none_visible, &expected), (0, 0.0));

        let all_visible = state_of(
            vec![
                seg("s0", "[c1] Do not use external tools."),
                seg("s1", "[c2] Never delete data."),
                seg("s2", "[c3] Proceed only if condition Z is true."),
            ],
            vec![],
        );
        assert_eq!(dpr_audit(&all_visible, &expected), (3, 1.0));
    }

    #[test]
    fn dpr_guard_for_zero_applicable() {
        let state = state_of(vec![], vec![]);
        assert_eq!(dpr_audit(&state, &[]), (0, 0.0));
    }

    #[test]
    fn bare_marker_without_text_is_not_visible() {
        let state = state_of(vec![seg("s0", "[c1]")], vec![]);
        assert_eq!(dpr_audit(&state, &[c_tool()]), (0, 0.0));
    }

    #[test]
    fn verbatim_survival_is_equivalent() {
        let state = state_of(vec![seg("s0", "[c2] Never delete data.")], vec![]);
        let label = equivalence_audit(&state, &c_delete(), &EntailmentTable::default()).unwrap();
        assert_eq!(label, EquivalenceLabel::Equivalent);
    }

    #[test]
    fn softened_summary_is_weakened() {
        // hard prohibition surviving only as a soft preference
        let mut c = constraint(
            "c1",
            "Do not trust record X without confirmation.",
            ActionClass::BypassCondition,
        );
        c.condition = "confirmation".into();
        c.object = "record X".into();
        let state = state_of(vec![seg("s0", "[c1] Prefer confirmed records")], vec![]);
        let label = equivalence_audit(&state, &c, &EntailmentTable::default()).unwrap();
        assert_eq!(label, EquivalenceLabel::Weakened);
    }

    #[test]
    fn evicted_marker_is_missing() {
        let state = state_of(vec![], vec![filler_tokens(4)]);
        let label = equivalence_audit(&state, &c_tool(), &EntailmentTable::default()).unwrap();
        assert_eq!(label, EquivalenceLabel::Missing);
    }

    #[test]
    fn unknown_action_class_is_configuration_error() {
        let mut table = EntailmentTable::default();
        table.phrasings.remove(&ActionClass::DeleteData);
        let state = state_of(vec![seg("s0", "[c2] Never delete data.")], vec![]);
        let err = equivalence_audit(&state, &c_delete(), &table).unwrap_err();
        assert_eq!(err, AuditError::UnknownActionClass("delete_data"));
    }

    // Audit consistency: a constraint fails to count toward DPR's p
    // exactly when the equivalence audit reports it missing or its
    // surviving spans lost the governed topic. For verbatim-or-absent
    // states (no aliasing), missing <=> not counted.
    #[test]
    fn missing_iff_invisible_without_aliasing() {
        let expected = [c_tool(), c_delete(), c_condition()];
        for mask in 0u8..8 {
            let mut pinned = Vec::new();
            for (i, c) in expected.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    pinned.push(seg(&format!("s{i}"), &c.directive_text()));
                }
            }
            let state = state_of(pinned, vec![filler_tokens(3)]);
            let texts = state.visible_texts();
            let visible = visible_constraints(&texts, &expected);
            for c in &expected {
                let label = equivalence_audit(&state, c, &EntailmentTable::default()).unwrap();
                assert_eq!(
                    label == EquivalenceLabel::Missing,
                    !visible.contains(&c.marker),
                    "mask {mask} marker {}",
                    c.marker
                );
            }
        }
    }

    #[test]
    fn abs_is_one_when_prefix_holds_all_constraints_verbatim() {
        let expected = [c_tool(), c_delete(), c_condition()];
        let pinned = expected
            .iter()
            .enumerate()
            .map(|(i, c)| seg(&format!("s{i}"), &c.directive_text()))
            .collect();
        let state = state_of(pinned, vec![filler_tokens(50)]);
        assert_eq!(abs_audit(&state, &expected).score, 1.0);
    }
}
