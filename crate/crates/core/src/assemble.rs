//! Per-turn assembly: admission, budget split, pinning, reference
//! policy, pressure check, optional reminder injection, composition,
//! and audits, in that order.

use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::admission::{admit_control, AdmissionError, LpcWeights};
use crate::audit::{abs_audit, apply_ice, estimate_pressure, AbsReport, IceCaps};
use crate::budget::{budget_split, BudgetError, TokenBudget};
use crate::constraint::Constraint;
use crate::policy::{
    apply_reference_policy, pin_control, replay_recency, CompactionQuotas, ControlCache,
    PinOutcome, PolicyId,
};
use crate::segment::{validate_history, RawHistory, RoutingMode, Segment, Violation};
use crate::state::{DecisionState, Telemetry};
use crate::tokenize::Tokenizer;

/// Mitigation arm applied on top of the reference policy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mitigation {
    /// Unmitigated: the whole history runs through the reference
    /// policy with no admission, floor, or reinforcement.
    None,
    Scp,
    ScpIce,
    ScpCache,
    ScpCacheIce,
    /// Ablation arm: control copies restated before the query with no
    /// pinning or floor; they compete in the data budget.
    RecencyReplay,
}

impl Mitigation {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::None => "none",
            Self::Scp => "scp",
            Self::ScpIce => "scp_ice",
            Self::ScpCache => "scp_cache",
            Self::ScpCacheIce => "scp_cache_ice",
            Self::RecencyReplay => "recency_replay",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "none" => Some(Self::None),
            "scp" => Some(Self::Scp),
            "scp_ice" => Some(Self::ScpIce),
            "scp_cache" => Some(Self::ScpCache),
            "scp_cache_ice" => Some(Self::ScpCacheIce),
            "recency_replay" => Some(Self::RecencyReplay),
            _ => None,
        }
    }

    pub fn pins_control(self) -> bool {
        matches!(self, Self::Scp | Self::ScpIce | Self::ScpCache | Self::ScpCacheIce)
    }

    pub fn uses_ice(self) -> bool {
        matches!(self, Self::ScpIce | Self::ScpCacheIce)
    }

    pub fn uses_cache(self) -> bool {
        matches!(self, Self::ScpCache | Self::ScpCacheIce)
    }
}

/// Full configuration for one assembly arm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssemblyConfig {
    pub policy: PolicyId,
    pub mitigation: Mitigation,
    pub routing: RoutingMode,
    pub budget: TokenBudget,
    pub tau: f64,
    pub shl_reference: Option<usize>,
    pub lpc: LpcWeights,
    pub ice: IceCaps,
    pub quotas: CompactionQuotas,
}

impl Default for AssemblyConfig {
    fn default() -> Self {
        Self {
            policy: PolicyId::B1Truncation,
            mitigation: Mitigation::None,
            routing: RoutingMode::Oracle,
            budget: TokenBudget::default(),
            tau: 0.8,
            shl_reference: None,
            lpc: LpcWeights::default(),
            ice: IceCaps::default(),
            quotas: CompactionQuotas::default(),
        }
    }
}

#[derive(Debug, Error)]
pub enum AssemblyError {
    #[error("history fails validation: {0:?}")]
    InvalidHistory(Vec<Violation>),
    #[error(transparent)]
    Admission(#[from] AdmissionError),
    #[error(transparent)]
    Budget(#[from] BudgetError),
    #[error("composed state has {total} tokens, over the {cap}-token cap")]
    BudgetOverflow { total: usize, cap: usize },
}

/// Compose the decision state: pinned control prefix first, then the
/// data plane, then the final query. No reordering within partitions,
/// no token recount.
pub fn compose(pinned: Vec<Segment>, data: Vec<Segment>, query: Segment) -> DecisionState {
    let total = pinned.iter().chain(data.iter()).map(|s| s.token_count).sum::<usize>()
        + query.token_count;
    DecisionState { pinned, data_plane: data, query, total_tokens: total }
}

/// Run one full turn of the assembly pipeline and return the decision
/// state plus the binding audit and telemetry. Deterministic for fixed
/// inputs; the only mutable state is the per-session control cache.
pub fn assemble_turn(
    h: &RawHistory,
    cfg: &AssemblyConfig,
    constraints: &[Constraint],
    mut cache: Option<(&mut ControlCache, &str)>,
    tokenizer: &dyn Tokenizer,
) -> Result<(DecisionState, AbsReport, Telemetry), AssemblyError> {
    let violations = validate_history(h);
    if !violations.is_empty() {
        return Err(AssemblyError::InvalidHistory(violations));
    }

    let mut telem = Telemetry::new(cfg.routing, cfg.tau, cfg.shl_reference);
    let mut clock = Instant::now();
    let mut stage = |telem: &mut Telemetry, name: &str| {
        telem.stage_timings.insert(name.to_string(), clock.elapsed().as_micros() as u64);
        clock = Instant::now();
    };

    // Admission. The unmitigated arm bypasses it entirely so the
    // reference path is untouched by classification side effects; the
    // replay arm identifies control but leaves it competing in place.
    let (control, data_candidates) = match cfg.mitigation {
        Mitigation::None => (Vec::new(), h.segments.clone()),
        Mitigation::RecencyReplay => {
            let admitted = admit_control(h, cfg.routing, &cfg.lpc)?;
            (admitted.control, h.segments.clone())
        }
        _ => {
            let admitted = admit_control(h, cfg.routing, &cfg.lpc)?;
            (admitted.control, admitted.data)
        }
    };
    stage(&mut telem, "admit");

    let query = h.final_query.clone();
    let query_tokens = query.token_count;
    let (b_ctrl, b_data) = if cfg.mitigation.pins_control() {
        budget_split(&cfg.budget, &control, query_tokens)?
    } else {
        budget_split(&cfg.budget, &[], query_tokens)?
    };
    telem.b_ctrl = b_ctrl;
    telem.b_data = b_data;
    stage(&mut telem, "split");

    let pin_out = if cfg.mitigation.pins_control() {
        let cache_arg = if cfg.mitigation.uses_cache() {
            cache.as_mut().map(|(c, s)| (&mut **c, *s))
        } else {
            None
        };
        pin_control(&control, b_ctrl, cache_arg)
    } else {
        PinOutcome { pinned: Vec::new(), tokens_serialized: 0, tokens_reused: 0, segments_dropped: 0 }
    };
    telem.control_segments_dropped = pin_out.segments_dropped;
    stage(&mut telem, "pin");

    let mut data_plane =
        apply_reference_policy(cfg.policy, &data_candidates, b_data, &cfg.quotas, tokenizer);
    stage(&mut telem, "policy");

    let reading = estimate_pressure(&data_candidates, cfg.tau, cfg.shl_reference);
    telem.pressure_estimate = reading.k_hat;
    stage(&mut telem, "pressure");

    let mut pinned = pin_out.pinned;
    let mut reminder_tokens = 0usize;
    if cfg.mitigation.uses_ice() && reading.fires(cfg.budget.total) {
        // Reinforce only admitted-and-retained control: restate the
        // constraints whose markers made it into the pinned prefix.
        let applicable: Vec<Constraint> = constraints
            .iter()
            .filter(|c| pinned.iter().any(|s| s.text.contains(&c.marker_tag())))
            .cloned()
            .collect();
        let pinned_tokens: usize = pinned.iter().map(|s| s.token_count).sum();
        let room = cfg.budget.total.saturating_sub(pinned_tokens + query_tokens);
        let out = apply_ice(&pinned, &data_plane, &applicable, &cfg.ice, room, tokenizer);
        telem.ice_constraints_dropped = out.constraints_dropped;
        if out.reminder_tokens > 0 {
            // The reminder displaces data: re-run the reference policy
            // with the residual budget so the hard cap still holds.
            reminder_tokens = out.reminder_tokens;
            pinned = out.pinned;
            data_plane = apply_reference_policy(
                cfg.policy,
                &data_candidates,
                b_data.saturating_sub(reminder_tokens),
                &cfg.quotas,
                tokenizer,
            );
            telem.ice_fired = true;
        }
    }
    stage(&mut telem, "ice");

    if cfg.mitigation == Mitigation::RecencyReplay {
        // Copies are restated after compaction, immediately before the
        // query, and are charged to whatever data budget remains.
        let mut used: usize = data_plane.iter().map(|s| s.token_count).sum();
        let copies = replay_recency(&control);
        let total_copies = copies.len();
        let mut appended = 0usize;
        for copy in copies {
            if used + copy.token_count <= b_data {
                used += copy.token_count;
                data_plane.push(copy);
                appended += 1;
            } else {
                break;
            }
        }
        telem.replay_copies_dropped = total_copies - appended;
    }
    stage(&mut telem, "replay");

    let data_tokens: usize = data_plane.iter().map(|s| s.token_count).sum();
    let state = compose(pinned, data_plane, query);
    if state.total_tokens > cfg.budget.total {
        return Err(AssemblyError::BudgetOverflow {
            total: state.total_tokens,
            cap: cfg.budget.total,
        });
    }
    stage(&mut telem, "compose");

    let abs = abs_audit(&state, constraints);
    stage(&mut telem, "audit");

    telem.tokens_serialized =
        pin_out.tokens_serialized + reminder_tokens + data_tokens + query_tokens;
    telem.tokens_reused = pin_out.tokens_reused;
    Ok((state, abs, telem))
}
