//! Reference context policies, control pinning, cache-aware prefix
//! reuse, and the recency-replay ablation arm.
//!
//! Eviction is always segment-atomic: a span survives whole or not at
//! all, so downstream marker/text audits see directives either intact
//! or gone. All policies are deterministic and never emit more than
//! their data budget.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::admission::DEONTIC_LEXICON;
use crate::budget::floor_frac;
use crate::constraint::control_tag_regex;
use crate::hashutil::sha256_hex;
use crate::segment::{Segment, SegmentKind};
use crate::tokenize::Tokenizer;

/// Reference assembly policy under test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyId {
    B1Truncation,
    B2RollingSummary,
    B3Hybrid,
    B2plusStructured,
}

impl PolicyId {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::B1Truncation => "b1_truncation",
            Self::B2RollingSummary => "b2_rolling_summary",
            Self::B3Hybrid => "b3_hybrid",
            Self::B2plusStructured => "b2plus_structured",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "b1_truncation" | "b1" => Some(Self::B1Truncation),
            "b2_rolling_summary" | "b2" => Some(Self::B2RollingSummary),
            "b3_hybrid" | "b3" => Some(Self::B3Hybrid),
            "b2plus_structured" | "b2plus" | "b2+" => Some(Self::B2plusStructured),
            _ => None,
        }
    }
}

/// Typed compaction shares for the structured policy, as fractions of
/// the summary budget, plus the share of the data budget reserved for
/// the summary itself. Defaults are configuration and are echoed into
/// the freeze manifest.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CompactionQuotas {
    pub summary_share: f64,
    pub tool_output: f64,
    pub retrieved_snippet: f64,
    pub planner_note: f64,
    pub execution_log: f64,
    pub other: f64,
}

impl Default for CompactionQuotas {
    fn default() -> Self {
        Self {
            summary_share: 0.5,
            tool_output: 0.30,
            retrieved_snippet: 0.25,
            planner_note: 0.20,
            execution_log: 0.15,
            other: 0.10,
        }
    }
}

/// Session-scoped cache of the retained control prefix. A hit requires
/// exact content-hash equality; extending a previously retained prefix
/// only serializes the newly added control text.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ControlCache {
    entries: BTreeMap<String, CacheEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct CacheEntry {
    prefix_hash: String,
    pinned_texts: Vec<String>,
    pinned_tokens: usize,
    tokens_already_serialized: usize,
}

impl ControlCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

fn prefix_hash(texts: &[String]) -> String {
    sha256_hex(texts.join("\u{1f}").as_bytes())
}

/// Result of [`pin_control`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PinOutcome {
    pub pinned: Vec<Segment>,
    pub tokens_serialized: usize,
    pub tokens_reused: usize,
    /// Control segments that did not fit under the floor.
    pub segments_dropped: usize,
}

/// Pin control segments oldest-first until the control budget is
/// exhausted. Pinning stops at the first segment that does not fit, so
/// the pinned set is always a stable prefix of the admitted control
/// list (which is what makes cross-turn prefix reuse well defined).
/// Pinned segments are immune to data-plane eviction downstream.
pub fn pin_control(
    control: &[Segment],
    b_ctrl: usize,
    mut cache: Option<(&mut ControlCache, &str)>,
) -> PinOutcome {
    let mut pinned = Vec::new();
    let mut used = 0usize;
    let mut dropped = 0usize;
    for seg in control {
        if used + seg.token_count <= b_ctrl {
            used += seg.token_count;
            pinned.push(seg.clone());
        } else {
            dropped = control.len() - pinned.len();
            break;
        }
    }

    let texts: Vec<String> = pinned.iter().map(|s| s.text.clone()).collect();
    let total: usize = pinned.iter().map(|s| s.token_count).sum();
    let hash = prefix_hash(&texts);

    let (serialized, reused) = match cache.as_mut() {
        None => (total, 0),
        Some((cache, session)) => {
            let (serialized, reused) = match cache.entries.get(*session) {
                Some(entry) if entry.prefix_hash == hash => (0, total),
                Some(entry)
                    if entry.pinned_texts.len() < texts.len()
                        && texts.starts_with(&entry.pinned_texts) =>
                {
                    (total - entry.pinned_tokens, entry.pinned_tokens)
                }
                _ => (total, 0),
            };
            let already = cache
                .entries
                .get(*session)
                .map(|e| e.tokens_already_serialized)
                .unwrap_or(0);
            cache.entries.insert(
                session.to_string(),
                CacheEntry {
                    prefix_hash: hash,
                    pinned_texts: texts,
                    pinned_tokens: total,
                    tokens_already_serialized: already + serialized,
                },
            );
            (serialized, reused)
        }
    };

    PinOutcome { pinned, tokens_serialized: serialized, tokens_reused: reused, segments_dropped: dropped }
}

/// Keep the most recent segments whole, dropping oldest-first until the
/// total fits the budget.
fn truncate_oldest(data: &[Segment], b_data: usize) -> Vec<Segment> {
    let mut total: usize = data.iter().map(|s| s.token_count).sum();
    let mut start = 0;
    while total > b_data && start < data.len() {
        total -= data[start].token_count;
        start += 1;
    }
    if total > b_data {
        return Vec::new();
    }
    data[start..].to_vec()
}

/// First sentence of a span, terminator included.
fn first_sentence(text: &str) -> &str {
    match text.find(['.', '!', '?']) {
        Some(i) => &text[..=i],
        None => text,
    }
}

/// Compacted line for one segment: kind tag plus the first sentence
/// with control tags stripped. Compaction rewrites content into the
/// summarizer's own anchor format; bracketed markers do not survive it.
fn compacted_line(seg: &Segment) -> String {
    let sentence = first_sentence(&seg.text);
    let stripped = control_tag_regex().replace_all(sentence, " ");
    let body = stripped.split_whitespace().collect::<Vec<_>>().join(" ");
    format!("[{}] {}", seg.kind.as_str(), body)
}

fn is_rule_like(text: &str) -> bool {
    let lower = text.to_lowercase();
    DEONTIC_LEXICON.iter().any(|p| lower.contains(p))
}

fn summary_segment(lines: &[String], turn_index: usize, tokenizer: &dyn Tokenizer) -> Segment {
    let text = format!("summary: {}", lines.join(" "));
    Segment::new("pipeline-summary", SegmentKind::Summary, text, turn_index, tokenizer)
}

/// Plain rolling summary over a compacted prefix: one line per
/// compacted segment, oldest first, filled until the cap.
fn rolling_summary(
    compacted: &[Segment],
    cap: usize,
    tokenizer: &dyn Tokenizer,
) -> Option<Segment> {
    if compacted.is_empty() || cap == 0 {
        return None;
    }
    let mut lines = Vec::new();
    let mut used = tokenizer.count("summary:");
    for seg in compacted {
        let line = compacted_line(seg);
        let cost = tokenizer.count(&line);
        if used + cost <= cap {
            used += cost;
            lines.push(line);
        }
    }
    if lines.is_empty() {
        return None;
    }
    let turn = compacted.iter().map(|s| s.turn_index).min().unwrap_or(0);
    Some(summary_segment(&lines, turn, tokenizer))
}

/// Bucket used by the structured policy.
fn quota_bucket(kind: SegmentKind) -> usize {
    match kind {
        SegmentKind::PlannerNote => 0,
        SegmentKind::RetrievedSnippet => 1,
        SegmentKind::ToolOutput => 2,
        SegmentKind::ExecutionLog => 3,
        _ => 4,
    }
}

/// Typed compaction: per-kind quotas with rule-like lines ranked first
/// within each quota.
fn structured_summary(
    compacted: &[Segment],
    cap: usize,
    quotas: &CompactionQuotas,
    tokenizer: &dyn Tokenizer,
) -> Option<Segment> {
    if compacted.is_empty() || cap == 0 {
        return None;
    }
    let shares = [
        quotas.planner_note,
        quotas.retrieved_snippet,
        quotas.tool_output,
        quotas.execution_log,
        quotas.other,
    ];
    let mut buckets: [Vec<&Segment>; 5] = Default::default();
    for seg in compacted {
        buckets[quota_bucket(seg.kind)].push(seg);
    }
    let mut lines = Vec::new();
    let mut total = tokenizer.count("summary:");
    for (bucket, share) in buckets.iter().zip(shares) {
        let quota = floor_frac(cap, share);
        let mut used = 0usize;
        // stable rank: rule-like first, history order inside each class
        let mut ranked: Vec<&&Segment> = bucket.iter().collect();
        ranked.sort_by_key(|s| if is_rule_like(&s.text) { 0 } else { 1 });
        for seg in ranked {
            let line = compacted_line(seg);
            let cost = tokenizer.count(&line);
            if used + cost <= quota && total + cost <= cap {
                used += cost;
                total += cost;
                lines.push(line);
            }
        }
    }
    if lines.is_empty() {
        return None;
    }
    let turn = compacted.iter().map(|s| s.turn_index).min().unwrap_or(0);
    Some(summary_segment(&lines, turn, tokenizer))
}

/// Shared skeleton for the summarizing policies: reserve a summary cap,
/// keep the most recent whole segments in the remainder, compact the
/// rest into a single summary segment.
fn summarize_then_keep(
    data: &[Segment],
    b_data: usize,
    cap: usize,
    structured: Option<&CompactionQuotas>,
    tokenizer: &dyn Tokenizer,
) -> Vec<Segment> {
    let recent = truncate_oldest(data, b_data.saturating_sub(cap));
    let compacted = &data[..data.len() - recent.len()];
    let summary = match structured {
        Some(q) => structured_summary(compacted, cap, q, tokenizer),
        None => rolling_summary(compacted, cap, tokenizer),
    };
    let mut out = Vec::new();
    if let Some(s) = summary {
        out.push(s);
    }
    out.extend(recent);
    out
}

/// Apply the configured reference policy to the data plane. Output
/// total never exceeds `b_data`.
pub fn apply_reference_policy(
    policy: PolicyId,
    data: &[Segment],
    b_data: usize,
    quotas: &CompactionQuotas,
    tokenizer: &dyn Tokenizer,
) -> Vec<Segment> {
    if b_data == 0 {
        return Vec::new();
    }
    let total: usize = data.iter().map(|s| s.token_count).sum();
    if total <= b_data {
        return data.to_vec();
    }
    match policy {
        PolicyId::B1Truncation => truncate_oldest(data, b_data),
        PolicyId::B2RollingSummary => {
            let cap = floor_frac(b_data, quotas.summary_share);
            summarize_then_keep(data, b_data, cap, None, tokenizer)
        }
        PolicyId::B2plusStructured => {
            let cap = floor_frac(b_data, quotas.summary_share);
            summarize_then_keep(data, b_data, cap, Some(quotas), tokenizer)
        }
        PolicyId::B3Hybrid => {
            // Older half (by turn-index lower median) is summarized,
            // the rest is truncated into whatever budget remains.
            let mut turns: Vec<usize> = data.iter().map(|s| s.turn_index).collect();
            turns.sort_unstable();
            let median = turns[(turns.len().saturating_sub(1)) / 2];
            let split = data.partition_point(|s| s.turn_index <= median);
            let older = &data[..split];
            let newer = &data[split..];
            let cap = floor_frac(b_data, quotas.summary_share);
            let summary = rolling_summary(older, cap, tokenizer);
            let used = summary.as_ref().map(|s| s.token_count).unwrap_or(0);
            let mut out = Vec::new();
            if let Some(s) = summary {
                out.push(s);
            }
            out.extend(truncate_oldest(newer, b_data - used));
            out
        }
    }
}

/// Recency-replay ablation arm: verbatim copies of the control
/// segments for placement immediately before the final query, with no
/// pinning, floor protection, or reinforcement. The copies compete in
/// the data budget and can be squeezed out entirely under pressure.
pub fn replay_recency(control: &[Segment]) -> Vec<Segment> {
    control
        .iter()
        .map(|s| {
            let mut copy = s.clone();
            copy.id = format!("replay-{}", s.id);
            copy
        })
        .collect()
}
