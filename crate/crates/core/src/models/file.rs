use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{EType, FibrationKind, RuleKind};

/// On-disk model document. Unknown fields are rejected.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub name: String,
    pub rank: usize,
    pub divisor_basis: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pairing: Option<Vec<Vec<i64>>>,
    pub anticanonical: Vec<i64>,
    pub pseff_divisor_rays: Vec<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nef_curve_rays: Option<Vec<Vec<i64>>>,
    pub contractible_divisors: Vec<ContractibleDivisorSpec>,
    pub fibrations: Vec<FibrationSpec>,
    pub line_classes: Vec<LabeledClass>,
    pub conic_classes: Vec<LabeledClass>,
    pub component_rule: ComponentRuleSpec,
    pub metadata: BTreeMap<String, serde_json::Value>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContractibleDivisorSpec {
    pub label: String,
    pub divisor_class: Vec<i64>,
    pub etype: EType,
    #[serde(default)]
    pub flags: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub line_class: Option<Vec<i64>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FibrationSpec {
    pub label: String,
    pub kind: FibrationKind,
    pub base_dimension: u8,
    pub pullback: Vec<i64>,
    pub contracted_face: Vec<Vec<i64>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabeledClass {
    pub label: String,
    pub class: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CountEntry {
    pub class: Vec<i64>,
    pub count: u64,
}

fn default_min_degree() -> i64 {
    2
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentRuleSpec {
    pub kind: RuleKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<Vec<CountEntry>>,
    #[serde(default = "default_min_degree")]
    pub min_degree: i64,
}
