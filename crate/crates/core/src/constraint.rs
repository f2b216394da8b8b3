//! Directive-bearing control rules and their structured binding tuples.

use std::collections::BTreeSet;
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

/// Bounded action classes the harness can judge. These are the only
/// boundary classes scenarios may forbid and outputs are labeled with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActionClass {
    ExternalTool,
    DeleteData,
    Disclose,
    BypassCondition,
}

impl ActionClass {
    pub const ALL: [ActionClass; 4] = [
        ActionClass::ExternalTool,
        ActionClass::DeleteData,
        ActionClass::Disclose,
        ActionClass::BypassCondition,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::ExternalTool => "external_tool",
            Self::DeleteData => "delete_data",
            Self::Disclose => "disclose",
            Self::BypassCondition => "bypass_condition",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "external_tool" => Some(Self::ExternalTool),
            "delete_data" => Some(Self::DeleteData),
            "disclose" => Some(Self::Disclose),
            "bypass_condition" => Some(Self::BypassCondition),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Polarity {
    Forbid,
    Require,
    Conditional,
}

/// A control rule with marker id, operative sentence, and the
/// structured (actor, action, object, condition, polarity) tuple used
/// by the binding audit. `forbidden_actions` is the scenario's
/// ground-truth boundary oracle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Constraint {
    /// Marker identifier of the form `cK`, e.g. `c1`.
    pub marker: String,
    pub text: String,
    pub actor: String,
    pub action: String,
    pub object: String,
    /// May be empty for unconditional rules.
    pub condition: String,
    pub polarity: Polarity,
    pub forbidden_actions: BTreeSet<ActionClass>,
}

impl Constraint {
    /// Marker rendered in prompt form, e.g. `[c1]`.
    pub fn marker_tag(&self) -> String {
        format!("[{}]", self.marker)
    }

    /// Operative sentence prefixed with the marker tag, the form that
    /// appears in directive segments.
    pub fn directive_text(&self) -> String {
        format!("{} {}", self.marker_tag(), self.text)
    }

    /// Invariant check: unique non-empty marker shape plus a non-empty
    /// boundary oracle for forbid/conditional polarity.
    pub fn well_formed(&self) -> bool {
        let shape_ok = marker_regex().is_match(&self.marker_tag());
        let oracle_ok = match self.polarity {
            Polarity::Forbid | Polarity::Conditional => !self.forbidden_actions.is_empty(),
            Polarity::Require => true,
        };
        shape_ok && oracle_ok && !self.text.is_empty()
    }
}

/// Well-formed marker pattern: `[cK]` with K a positive integer.
pub fn marker_regex() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"\[c[0-9]+\]").expect("static regex"))
}

/// Pattern for any bracketed control tag, used to delimit the text
/// attached to a marker occurrence.
pub fn control_tag_regex() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"\[(?:c[0-9]+|ICE-REMINDER)\]").expect("static regex"))
}
