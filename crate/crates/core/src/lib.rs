//! Core library for the context-governance harness.
//!
//! The crate is organized around the per-turn assembly pipeline:
//! raw history -> admission -> budget split -> pinning -> reference
//! policy -> pressure check -> optional reminder injection ->
//! composition -> audits. Around that pipeline sit the scenario
//! generator, the deterministic mock responder and rule judge, and
//! the slice metrics used by the campaign runner.

#![forbid(unsafe_code)]

pub mod admission;
pub mod assemble;
pub mod audit;
pub mod budget;
pub mod constraint;
pub mod hashutil;
pub mod metrics;
pub mod model;
pub mod policy;
pub mod scenario;
pub mod segment;
pub mod state;
pub mod tokenize;

pub use admission::{admit_control, score_directive_likelihood, AdmissionResult, LpcWeights, Route};
pub use assemble::{assemble_turn, compose, AssemblyConfig, AssemblyError, Mitigation};
pub use audit::{
    abs_audit, apply_ice, dpr_audit, equivalence_audit, estimate_pressure, AbsReport, BindingState,
    EntailmentTable, EquivalenceLabel, IceCaps, PressureReading,
};
pub use budget::{budget_split, BudgetError, TokenBudget};
pub use constraint::{ActionClass, Constraint, Polarity};
pub use metrics::{
    bootstrap_ci, compute_csr, compute_dfr, compute_dpr, compute_ecr, estimate_shl, token_delta,
    InstanceRecord, MetricsError, Shl, SliceKey, SliceSummary,
};
pub use model::{
    call_chat, judge, mock_respond, EndpointSpec, GenerationParams, JudgeVerdict, MockProfile,
    ModelError, ModelOutput, RuleJudge,
};
pub use policy::{
    apply_reference_policy, pin_control, replay_recency, CompactionQuotas, ControlCache, PinOutcome,
    PolicyId,
};
pub use scenario::{
    apply_alias_transform, apply_rebind_transform, generate_scenario, Family, GenError, GenParams,
    PromptOrder, ScenarioInstance,
};
pub use segment::{validate_history, RawHistory, RoutingMode, Segment, SegmentKind, Violation};
pub use state::{DecisionState, Telemetry};
pub use tokenize::{count_tokens, Tokenizer, WhitespaceTokenizer};
