//! Token budgets and the control-floor split.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::segment::Segment;

/// Decision-time assembly budget. All arithmetic is integer token
/// counts; fractional floors round down.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TokenBudget {
    pub total: usize,
    pub control_floor_fraction: f64,
    pub generation_cap: usize,
}

impl Default for TokenBudget {
    fn default() -> Self {
        Self { total: 260, control_floor_fraction: 0.40, generation_cap: 96 }
    }
}

impl TokenBudget {
    pub fn with_total(total: usize) -> Self {
        Self { total, ..Self::default() }
    }

    /// Control floor in tokens: `floor(fraction * total)`.
    pub fn control_floor_tokens(&self) -> usize {
        floor_frac(self.total, self.control_floor_fraction)
    }
}

/// Integer floor of `total * frac` with a tiny guard so fractions that
/// are exact rationals of `total` (e.g. 0.3 * 10) land on the intended
/// integer despite binary rounding.
pub fn floor_frac(total: usize, frac: f64) -> usize {
    ((total as f64) * frac + 1e-9).floor().max(0.0) as usize
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BudgetError {
    #[error("query alone ({query_tokens} tokens) exceeds the total budget ({total})")]
    UnsatisfiableBudget { query_tokens: usize, total: usize },
}

/// Split the budget into a protected control allocation and the
/// residual data allocation. The query is reserved first; the control
/// side gets `min(control demand, floor cap, what remains)`.
pub fn budget_split(
    budget: &TokenBudget,
    control: &[Segment],
    query_tokens: usize,
) -> Result<(usize, usize), BudgetError> {
    if query_tokens > budget.total {
        return Err(BudgetError::UnsatisfiableBudget {
            query_tokens,
            total: budget.total,
        });
    }
    let available = budget.total - query_tokens;
    let demand: usize = control.iter().map(|s| s.token_count).sum();
    let b_ctrl = demand.min(budget.control_floor_tokens()).min(available);
    let b_data = available - b_ctrl;
    Ok((b_ctrl, b_data))
}
