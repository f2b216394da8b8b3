//! The composed decision state and per-turn telemetry.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::segment::{RoutingMode, Segment};

/// The model-visible prompt: pinned control prefix, compacted data
/// plane, final query. Immutable after composition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecisionState {
    pub pinned: Vec<Segment>,
    pub data_plane: Vec<Segment>,
    pub query: Segment,
    pub total_tokens: usize,
}

impl DecisionState {
    /// Every visible text in composition order: pinned, data, query.
    pub fn visible_texts(&self) -> Vec<&str> {
        self.pinned
            .iter()
            .chain(self.data_plane.iter())
            .map(|s| s.text.as_str())
            .chain(std::iter::once(self.query.text.as_str()))
            .collect()
    }

    /// Full rendered prompt, one segment per line.
    pub fn render(&self) -> String {
        self.visible_texts().join("\n")
    }
}

/// Per-turn pipeline telemetry. Stage timings are wall-clock and are
/// never included in hashed artifacts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Telemetry {
    pub routing_mode: RoutingMode,
    pub b_ctrl: usize,
    pub b_data: usize,
    /// Pre-compaction data-candidate volume in tokens.
    pub pressure_estimate: usize,
    pub tau: f64,
    /// None means the context-window proxy was used.
    pub shl_reference: Option<usize>,
    pub ice_fired: bool,
    /// Stage name -> duration in microseconds.
    pub stage_timings: BTreeMap<String, u64>,
    /// Tokens actually serialized into the prompt this turn
    /// (cache-reused control text excluded).
    pub tokens_serialized: usize,
    /// Control-prefix tokens reused from the session cache.
    pub tokens_reused: usize,
    /// Control segments dropped at the floor, at segment granularity.
    pub control_segments_dropped: usize,
    /// Reminder restatements dropped because they could not fit.
    pub ice_constraints_dropped: usize,
    /// Replay copies dropped by data-budget competition.
    pub replay_copies_dropped: usize,
}

impl Telemetry {
    pub fn new(routing_mode: RoutingMode, tau: f64, shl_reference: Option<usize>) -> Self {
        Self {
            routing_mode,
            b_ctrl: 0,
            b_data: 0,
            pressure_estimate: 0,
            tau,
            shl_reference,
            ice_fired: false,
            stage_timings: BTreeMap::new(),
            tokens_serialized: 0,
            tokens_reused: 0,
            control_segments_dropped: 0,
            ice_constraints_dropped: 0,
            replay_copies_dropped: 0,
        }
    }
}
