//! SOP decision graph: guard evaluation, deterministic rule-engine
//! traversal, exhaustive path enumeration, and inverse configuration.
//!
//! A graph is a map of `stage<N>` nodes. A decision node branches on one
//! classification field or system variable; each branch either jumps to
//! another stage or fires an action, which ends the traversal at the firing
//! stage (the convention shipped path lists use: the stage that triggers an
//! action is the last path member). A terminal node carries a single action
//! and no branches.

use crate::scenario::ScenarioConfig;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

/// Classification-field assignment, field name to chosen option.
pub type FieldMap = BTreeMap<String, String>;
/// System-variable assignment, variable name to concrete value.
pub type SysMap = BTreeMap<String, Value>;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("variable `{0}` has no value")]
    MissingVariable(String),
    #[error("no branch matched at {stage}; graph is corrupt or unvalidated")]
    NoBranchMatched { stage: String },
    #[error("traversal exceeded the bound of {bound} steps; cycle reachable")]
    BoundExceeded { bound: usize },
    #[error("reference path is empty")]
    EmptyReference,
    #[error("infeasible constraints: {0}")]
    Infeasible(String),
    #[error("unknown stage `{0}`")]
    UnknownStage(String),
}

/// Reference to the variable a decision branches on.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum VarRef {
    #[serde(rename = "field")]
    Field(String),
    #[serde(rename = "system_var")]
    SystemVar(String),
}

impl VarRef {
    pub fn name(&self) -> &str {
        match self {
            VarRef::Field(n) | VarRef::SystemVar(n) => n,
        }
    }
}

/// Branch condition over the referenced variable's value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Guard {
    /// Unconditional; used for sequencing stages.
    Always,
    /// Value equals the given constant.
    Equals(Value),
    /// Value is one of the given constants.
    InSet(Vec<Value>),
    /// Integer value falls in the named partition. `zero` and `nonzero`
    /// are built in; other labels must be declared as ranges on the
    /// system variable.
    IntPartition(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum BranchTarget {
    /// Jump to another stage.
    Stage(String),
    /// Fire an action and stop; the current stage stays the last path member.
    Action(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    pub guard: Guard,
    pub target: BranchTarget,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Node {
    Decision {
        /// Absent only when every guard is `Always`.
        branch_on: Option<VarRef>,
        branches: Vec<Branch>,
    },
    Terminal {
        action: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SopGraph {
    pub nodes: BTreeMap<String, Node>,
    pub start_id: String,
}

impl SopGraph {
    /// Traversals longer than this prove a cycle; validated graphs never hit it.
    pub fn traversal_bound(&self) -> usize {
        2 * self.nodes.len().max(1)
    }

    /// Stage ids ordered by their numeric suffix (`stage2` before `stage10`).
    pub fn ordered_stage_ids(&self) -> Vec<String> {
        let mut ids: Vec<String> = self.nodes.keys().cloned().collect();
        ids.sort_by_key(|id| stage_number(id).unwrap_or(u64::MAX));
        ids
    }
}

/// Numeric suffix of a `stage<N>` id.
pub fn stage_number(id: &str) -> Option<u64> {
    id.strip_prefix("stage").and_then(|n| n.parse().ok())
}

/// Constraint on one system variable inside a [`PathSpec`]. Either side may
/// be given; when both are, the value must lie in the partition.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SysConstraint {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partition: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<Value>,
}

impl SysConstraint {
    pub fn value(value: Value) -> Self {
        SysConstraint { partition: None, value: Some(value) }
    }

    pub fn partition_and_value(partition: &str, value: Value) -> Self {
        SysConstraint { partition: Some(partition.to_string()), value: Some(value) }
    }
}

/// One enumerable decision path: the field values and system constraints
/// that force it, the stage sequence, and the action it ends in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathSpec {
    /// Field assignments in field-declaration order.
    pub classification_items: Vec<(String, String)>,
    /// System-variable constraints in declaration order.
    pub system_constraints: Vec<(String, SysConstraint)>,
    pub expected_path: Vec<String>,
    pub final_action: String,
}

impl PathSpec {
    pub fn field_value(&self, name: &str) -> Option<&str> {
        self.classification_items
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_str())
    }

    pub fn field_map(&self) -> FieldMap {
        self.classification_items
            .iter()
            .map(|(n, v)| (n.clone(), v.clone()))
            .collect()
    }
}

/// Reference output of the rule engine for one field/system assignment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub fields_star: FieldMap,
    pub path_star: Vec<String>,
    pub action_star: String,
}

fn lookup<'a>(
    on: &VarRef,
    fields: &'a FieldMap,
    system: &'a SysMap,
) -> Result<Value, GraphError> {
    match on {
        VarRef::Field(name) => fields
            .get(name)
            .map(|v| Value::String(v.clone()))
            .ok_or_else(|| GraphError::MissingVariable(name.clone())),
        VarRef::SystemVar(name) => system
            .get(name)
            .cloned()
            .ok_or_else(|| GraphError::MissingVariable(name.clone())),
    }
}

/// Evaluate one guard against the provided assignments. `Always` never
/// consults the maps; every other guard reads the variable named by `on`.
pub fn resolve_guard(
    guard: &Guard,
    on: Option<&VarRef>,
    fields: &FieldMap,
    system: &SysMap,
    cfg: &ScenarioConfig,
) -> Result<bool, GraphError> {
    if matches!(guard, Guard::Always) {
        return Ok(true);
    }
    let on = on.ok_or_else(|| GraphError::MissingVariable("<branch_on>".into()))?;
    let actual = lookup(on, fields, system)?;
    match guard {
        Guard::Always => Ok(true),
        Guard::Equals(v) => Ok(*v == actual),
        Guard::InSet(vs) => Ok(vs.iter().any(|v| *v == actual)),
        Guard::IntPartition(label) => {
            let n = actual.as_i64().ok_or_else(|| {
                GraphError::Infeasible(format!(
                    "partition guard `{label}` on non-integer value {actual}"
                ))
            })?;
            match cfg
                .system_var(on.name())
                .and_then(|v| v.kind.int_partition_matches(label, n))
            {
                Some(hit) => Ok(hit),
                // Built-in labels still work without a declaration.
                None => match label.as_str() {
                    "zero" => Ok(n == 0),
                    "nonzero" => Ok(n != 0),
                    _ => Err(GraphError::Infeasible(format!(
                        "undeclared partition label `{label}`"
                    ))),
                },
            }
        }
    }
}

/// Raw traversal result, including which variables the guards consulted.
#[derive(Debug, Clone)]
pub struct Traversal {
    pub path: Vec<String>,
    pub action: String,
    pub read_fields: BTreeSet<String>,
    pub read_sysvars: BTreeSet<String>,
}

/// Walk the graph from the start stage under a complete assignment.
pub fn traverse(
    fields: &FieldMap,
    system: &SysMap,
    cfg: &ScenarioConfig,
) -> Result<Traversal, GraphError> {
    let graph = &cfg.graph;
    let bound = graph.traversal_bound();
    let mut current = graph.start_id.clone();
    let mut path = vec![current.clone()];
    let mut read_fields = BTreeSet::new();
    let mut read_sysvars = BTreeSet::new();

    loop {
        if path.len() > bound {
            return Err(GraphError::BoundExceeded { bound });
        }
        let node = graph
            .nodes
            .get(&current)
            .ok_or_else(|| GraphError::UnknownStage(current.clone()))?;
        match node {
            Node::Terminal { action } => {
                return Ok(Traversal { path, action: action.clone(), read_fields, read_sysvars });
            }
            Node::Decision { branch_on, branches } => {
                let mut taken = None;
                for branch in branches {
                    if resolve_guard(&branch.guard, branch_on.as_ref(), fields, system, cfg)? {
                        if !matches!(branch.guard, Guard::Always) {
                            match branch_on {
                                Some(VarRef::Field(n)) => {
                                    read_fields.insert(n.clone());
                                }
                                Some(VarRef::SystemVar(n)) => {
                                    read_sysvars.insert(n.clone());
                                }
                                None => {}
                            }
                        }
                        taken = Some(branch);
                        break;
                    }
                }
                let taken = taken.ok_or_else(|| GraphError::NoBranchMatched {
                    stage: current.clone(),
                })?;
                match &taken.target {
                    BranchTarget::Action(action) => {
                        return Ok(Traversal {
                            path,
                            action: action.clone(),
                            read_fields,
                            read_sysvars,
                        });
                    }
                    BranchTarget::Stage(next) => {
                        current = next.clone();
                        path.push(current.clone());
                    }
                }
            }
        }
    }
}

/// Deterministic ground-truth derivation: replay the graph under the
/// consensus field assignment and the case's system state.
pub fn rule_engine_derive(
    fields_star: &FieldMap,
    system_info: &SysMap,
    cfg: &ScenarioConfig,
) -> Result<GroundTruth, GraphError> {
    for field in &cfg.fields {
        if !fields_star.contains_key(&field.name) {
            return Err(GraphError::MissingVariable(field.name.clone()));
        }
    }
    let t = traverse(fields_star, system_info, cfg)?;
    Ok(GroundTruth {
        fields_star: fields_star.clone(),
        path_star: t.path,
        action_star: t.action,
    })
}

/// Path overlap ratio `|set(p) ∩ set(p*)| / |set(p*)|`. Duplicates are
/// collapsed before comparison; the reference path must be non-empty.
pub fn path_similarity(p: &[String], p_star: &[String]) -> Result<f64, GraphError> {
    if p_star.is_empty() {
        return Err(GraphError::EmptyReference);
    }
    let reference: BTreeSet<&String> = p_star.iter().collect();
    let planned: BTreeSet<&String> = p.iter().collect();
    let shared = reference.intersection(&planned).count();
    Ok(shared as f64 / reference.len() as f64)
}

struct Odometer {
    sizes: Vec<usize>,
    state: Vec<usize>,
    done: bool,
}

impl Odometer {
    fn new(sizes: Vec<usize>) -> Self {
        let done = sizes.iter().any(|&s| s == 0);
        let state = vec![0; sizes.len()];
        Odometer { sizes, state, done }
    }
}

impl Iterator for Odometer {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let current = self.state.clone();
        // Increment rightmost digit first so iteration is lexicographic.
        let mut i = self.state.len();
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            self.state[i] += 1;
            if self.state[i] < self.sizes[i] {
                break;
            }
            self.state[i] = 0;
        }
        Some(current)
    }
}

/// Enumerate every valid decision path: one [`PathSpec`] per complete
/// combination of classification-field values, ordered lexicographically by
/// option indices. For each combination the system-variable partitions are
/// fixed to the first (partition-lexicographic) assignment whose traversal
/// reads every non-default field value that is readable on that route, so
/// the resulting spec exercises the fields that distinguish it.
pub fn enumerate_paths(cfg: &ScenarioConfig) -> Result<Vec<PathSpec>, GraphError> {
    let field_axes: Vec<(&str, &[String])> = cfg
        .fields
        .iter()
        .map(|f| (f.name.as_str(), f.options.as_slice()))
        .collect();
    let sys_axes: Vec<(&str, Vec<(String, Value)>)> = cfg
        .system_vars
        .iter()
        .map(|v| (v.name.as_str(), v.kind.partitions()))
        .collect();

    let mut specs = Vec::new();
    for combo_idx in Odometer::new(field_axes.iter().map(|(_, o)| o.len()).collect()) {
        let mut fields = FieldMap::new();
        let mut items = Vec::with_capacity(field_axes.len());
        for (axis, &opt) in field_axes.iter().zip(combo_idx.iter()) {
            let value = axis.1[opt].clone();
            fields.insert(axis.0.to_string(), value.clone());
            items.push((axis.0.to_string(), value));
        }

        struct Candidate {
            labels: Vec<String>,
            values: Vec<Value>,
            traversal: Traversal,
        }
        let mut candidates = Vec::new();
        for part_idx in Odometer::new(sys_axes.iter().map(|(_, p)| p.len()).collect()) {
            let mut system = SysMap::new();
            let mut labels = Vec::with_capacity(sys_axes.len());
            let mut values = Vec::with_capacity(sys_axes.len());
            for (axis, &p) in sys_axes.iter().zip(part_idx.iter()) {
                let (label, rep) = &axis.1[p];
                system.insert(axis.0.to_string(), rep.clone());
                labels.push(label.clone());
                values.push(rep.clone());
            }
            let traversal = traverse(&fields, &system, cfg)?;
            candidates.push(Candidate { labels, values, traversal });
        }

        // Non-default field values that some system assignment lets the
        // traversal read; the chosen assignment must read all of them.
        let required: BTreeSet<&str> = field_axes
            .iter()
            .zip(combo_idx.iter())
            .filter(|(_, &opt)| opt != 0)
            .map(|(axis, _)| axis.0)
            .filter(|name| {
                candidates
                    .iter()
                    .any(|c| c.traversal.read_fields.contains(*name))
            })
            .collect();

        let chosen = candidates
            .iter()
            .position(|c| {
                required
                    .iter()
                    .all(|name| c.traversal.read_fields.contains(*name))
            })
            .unwrap_or_else(|| {
                // No single assignment covers everything; keep the one
                // reading the most required fields, earliest on ties.
                candidates
                    .iter()
                    .enumerate()
                    .max_by_key(|(i, c)| {
                        let hits = required
                            .iter()
                            .filter(|n| c.traversal.read_fields.contains(**n))
                            .count();
                        (hits, usize::MAX - i)
                    })
                    .map(|(i, _)| i)
                    .unwrap_or(0)
            });
        let c = &candidates[chosen];

        let system_constraints = sys_axes
            .iter()
            .enumerate()
            .map(|(i, (name, _))| {
                (
                    name.to_string(),
                    SysConstraint::partition_and_value(&c.labels[i], c.values[i].clone()),
                )
            })
            .collect();

        specs.push(PathSpec {
            classification_items: items,
            system_constraints,
            expected_path: c.traversal.path.clone(),
            final_action: c.traversal.action.clone(),
        });
    }
    Ok(specs)
}

/// Invert a path spec into the complete inputs that force it. Unconstrained
/// fields default to their first declared option; unconstrained system
/// variables to their first domain value. The result always replays to the
/// spec's expected path, otherwise the constraints are inconsistent.
pub fn inverse_configure(
    target: &PathSpec,
    cfg: &ScenarioConfig,
) -> Result<(FieldMap, SysMap), GraphError> {
    let mut fields = FieldMap::new();
    for field in &cfg.fields {
        let value = match target.field_value(&field.name) {
            Some(v) => {
                if !field.options.iter().any(|o| o == v) {
                    return Err(GraphError::Infeasible(format!(
                        "field `{}` constrained to `{v}`, not a declared option",
                        field.name
                    )));
                }
                v.to_string()
            }
            None => field.options[0].clone(),
        };
        fields.insert(field.name.clone(), value);
    }
    for (name, _) in &target.classification_items {
        if cfg.field(name).is_none() {
            return Err(GraphError::Infeasible(format!("unknown field `{name}`")));
        }
    }

    let mut system = SysMap::new();
    for var in &cfg.system_vars {
        let constraint = target
            .system_constraints
            .iter()
            .find(|(n, _)| n == &var.name)
            .map(|(_, c)| c.clone())
            .unwrap_or_default();
        let value = match (constraint.partition, constraint.value) {
            (None, None) => var.kind.first_value(),
            (Some(label), None) => var.kind.partition_representative(&label).ok_or_else(|| {
                GraphError::Infeasible(format!(
                    "variable `{}` has no partition `{label}`",
                    var.name
                ))
            })?,
            (None, Some(value)) => {
                if !var.kind.contains(&value) {
                    return Err(GraphError::Infeasible(format!(
                        "value {value} outside the domain of `{}`",
                        var.name
                    )));
                }
                value
            }
            (Some(label), Some(value)) => {
                let in_partition = var.kind.value_in_partition(&label, &value).ok_or_else(|| {
                    GraphError::Infeasible(format!(
                        "variable `{}` has no partition `{label}`",
                        var.name
                    ))
                })?;
                if !in_partition {
                    return Err(GraphError::Infeasible(format!(
                        "variable `{}` demanded in partition `{label}` and equal to {value} at once",
                        var.name
                    )));
                }
                value
            }
        };
        system.insert(var.name.clone(), value);
    }
    for (name, _) in &target.system_constraints {
        if cfg.system_var(name).is_none() {
            return Err(GraphError::Infeasible(format!("unknown system variable `{name}`")));
        }
    }

    let replay = traverse(&fields, &system, cfg)?;
    if replay.path != target.expected_path || replay.action != target.final_action {
        return Err(GraphError::Infeasible(format!(
            "constraints replay to {:?} -> {}, not the expected {:?} -> {}",
            replay.path, replay.action, target.expected_path, target.final_action
        )));
    }
    Ok((fields, system))
}

fn guard_label(guard: &Guard) -> String {
    match guard {
        Guard::Always => String::new(),
        Guard::Equals(v) => value_label(v),
        Guard::InSet(vs) => vs.iter().map(value_label).collect::<Vec<_>>().join("/"),
        Guard::IntPartition(label) => match label.as_str() {
            "zero" => "=0".to_string(),
            "nonzero" => "!=0".to_string(),
            other => other.to_string(),
        },
    }
}

fn value_label(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Render the graph as the numbered jump-logic text given to service agents.
pub fn render_sop_flow(cfg: &ScenarioConfig) -> String {
    let graph = &cfg.graph;
    let mut out = String::new();
    for (i, id) in graph.ordered_stage_ids().iter().enumerate() {
        let node = &graph.nodes[id];
        let line = match node {
            Node::Terminal { action } => {
                format!("{}. {id}: ACTION={action} -> END.", i + 1)
            }
            Node::Decision { branch_on, branches } => {
                let var = branch_on
                    .as_ref()
                    .map(|v| format!(" [{}]", v.name()))
                    .unwrap_or_default();
                let parts: Vec<String> = branches
                    .iter()
                    .map(|b| {
                        let rhs = match &b.target {
                            BranchTarget::Stage(s) => s.clone(),
                            BranchTarget::Action(a) => format!("ACTION={a} -> END"),
                        };
                        let label = guard_label(&b.guard);
                        if label.is_empty() {
                            format!("go to {rhs}")
                        } else {
                            format!("{label} -> {rhs}")
                        }
                    })
                    .collect();
                format!("{}. {id}{var}: {}.", i + 1, parts.join("; "))
            }
        };
        out.push_str(&line);
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::parse_scenario_config;

    fn telecom() -> ScenarioConfig {
        let text = std::fs::read_to_string(concat!(
            env!("CARGO_MANIFEST_DIR"),
            "/../../scenarios/telecom_package.json"
        ))
        .expect("shipped telecom pack");
        parse_scenario_config(&text).expect("telecom pack parses")
    }

    fn fields(pairs: &[(&str, &str)]) -> FieldMap {
        pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
    }

    fn system(pairs: &[(&str, Value)]) -> SysMap {
        pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
    }

    #[test]
    fn guard_equals_matches_value() {
        let cfg = telecom();
        let on = VarRef::SystemVar("PackageStatus".into());
        let ok = resolve_guard(
            &Guard::Equals(Value::String("Contracted".into())),
            Some(&on),
            &FieldMap::new(),
            &system(&[("PackageStatus", Value::String("Contracted".into()))]),
            &cfg,
        )
        .unwrap();
        assert!(ok);
    }

    #[test]
    fn zero_partition_rejects_nonzero_penalty() {
        let cfg = telecom();
        let on = VarRef::SystemVar("Penalty".into());
        let hit = resolve_guard(
            &Guard::IntPartition("zero".into()),
            Some(&on),
            &FieldMap::new(),
            &system(&[("Penalty", Value::from(100))]),
            &cfg,
        )
        .unwrap();
        assert!(!hit);
    }

    #[test]
    fn always_needs_no_variables() {
        let cfg = telecom();
        let ok = resolve_guard(&Guard::Always, None, &FieldMap::new(), &SysMap::new(), &cfg)
            .unwrap();
        assert!(ok);
    }

    #[test]
    fn missing_variable_is_reported() {
        let cfg = telecom();
        let on = VarRef::Field("ConsumptionType".into());
        let err = resolve_guard(
            &Guard::Equals(Value::String("Enquiry".into())),
            Some(&on),
            &FieldMap::new(),
            &SysMap::new(),
            &cfg,
        )
        .unwrap_err();
        assert!(matches!(err, GraphError::MissingVariable(n) if n == "ConsumptionType"));
    }

    // The three shipped path-list fixtures, straight from the telecom pack.
    #[test]
    fn rule_engine_reproduces_path_one() {
        let cfg = telecom();
        let gt = rule_engine_derive(
            &fields(&[
                ("ConsumptionType", "Enquiry"),
                ("ApplicationTendency", "Agree"),
                ("ConsumptionProfile", "Data"),
                ("EmotionTag", "Calm"),
            ]),
            &system(&[
                ("PackageStatus", Value::String("NoContract".into())),
                ("Penalty", Value::from(0)),
            ]),
            &cfg,
        )
        .unwrap();
        assert_eq!(gt.path_star, ["stage1", "stage2", "stage3", "stage6", "stage4"]);
        assert_eq!(gt.action_star, "ChangeOrder");
    }

    #[test]
    fn rule_engine_reproduces_path_two() {
        let cfg = telecom();
        let gt = rule_engine_derive(
            &fields(&[
                ("ConsumptionType", "Change"),
                ("ApplicationTendency", "Agree"),
                ("ConsumptionProfile", "Data"),
                ("EmotionTag", "Discontent"),
            ]),
            &system(&[
                ("PackageStatus", Value::String("Contracted".into())),
                ("Penalty", Value::from(100)),
            ]),
            &cfg,
        )
        .unwrap();
        assert_eq!(gt.path_star, ["stage1", "stage2", "stage4", "stage5", "stage7"]);
        assert_eq!(gt.action_star, "TransHuman");
    }

    #[test]
    fn rule_engine_reproduces_path_three() {
        let cfg = telecom();
        let gt = rule_engine_derive(
            &fields(&[
                ("ConsumptionType", "Enquiry"),
                ("ApplicationTendency", "Reject"),
                ("ConsumptionProfile", "Voice"),
                ("EmotionTag", "Calm"),
            ]),
            &system(&[
                ("PackageStatus", Value::String("NoContract".into())),
                ("Penalty", Value::from(0)),
            ]),
            &cfg,
        )
        .unwrap();
        assert_eq!(gt.path_star, ["stage1", "stage2", "stage3", "stage6"]);
        assert_eq!(gt.action_star, "GoodBye");
    }

    #[test]
    fn telecom_enumerates_thirty_six_paths() {
        let cfg = telecom();
        let specs = enumerate_paths(&cfg).unwrap();
        assert_eq!(specs.len(), 36);
        // Path 2 appears verbatim.
        let path2 = specs.iter().find(|s| {
            s.field_value("ConsumptionType") == Some("Change")
                && s.field_value("ApplicationTendency") == Some("Agree")
                && s.field_value("ConsumptionProfile") == Some("Data")
                && s.field_value("EmotionTag") == Some("Discontent")
        });
        let path2 = path2.expect("spec for the Path 2 combination");
        assert_eq!(path2.expected_path, ["stage1", "stage2", "stage4", "stage5", "stage7"]);
        assert_eq!(path2.final_action, "TransHuman");
        let sys: BTreeMap<&str, &Value> = path2
            .system_constraints
            .iter()
            .map(|(n, c)| (n.as_str(), c.value.as_ref().unwrap()))
            .collect();
        assert_eq!(sys["PackageStatus"], &Value::String("Contracted".into()));
        assert_eq!(sys["Penalty"], &Value::from(100));
    }

    #[test]
    fn single_terminal_graph_yields_one_path() {
        let text = r#"{
            "scenario_id": "mini",
            "scenario_name": "Mini",
            "description": "",
            "classification_fields": [],
            "system_variables": [],
            "actions": [{"action_name": "Done", "description": "", "terminal": true}],
            "sop": {
                "stage1": {"kind": "decision", "branches": [{"guard": "always", "target": "stage2"}]},
                "stage2": {"kind": "terminal", "action": "Done"}
            },
            "prompts": {"service_agent": "s", "user_agent": "u", "judge": "j"},
            "intents": [],
            "personas": []
        }"#;
        let cfg = parse_scenario_config(text).unwrap();
        let specs = enumerate_paths(&cfg).unwrap();
        assert_eq!(specs.len(), 1);
        assert_eq!(specs[0].expected_path, ["stage1", "stage2"]);
        assert_eq!(specs[0].final_action, "Done");
    }

    #[test]
    fn similarity_identity_is_one() {
        let p: Vec<String> = ["stage1", "stage2", "stage4"].iter().map(|s| s.to_string()).collect();
        assert_eq!(path_similarity(&p, &p).unwrap(), 1.0);
    }

    #[test]
    fn similarity_counts_shared_stages() {
        let p: Vec<String> = ["stage1", "stage2", "stage3"].iter().map(|s| s.to_string()).collect();
        let p_star: Vec<String> =
            ["stage1", "stage2", "stage4", "stage5"].iter().map(|s| s.to_string()).collect();
        assert_eq!(path_similarity(&p, &p_star).unwrap(), 0.5);
    }

    #[test]
    fn empty_plan_scores_zero() {
        let p_star: Vec<String> = vec!["stage1".into()];
        assert_eq!(path_similarity(&[], &p_star).unwrap(), 0.0);
        assert!(matches!(path_similarity(&p_star, &[]), Err(GraphError::EmptyReference)));
    }

    #[test]
    fn inverse_of_path_two_matches_fixture() {
        let cfg = telecom();
        let specs = enumerate_paths(&cfg).unwrap();
        let path2 = specs
            .iter()
            .find(|s| {
                s.expected_path == ["stage1", "stage2", "stage4", "stage5", "stage7"]
                    && s.field_value("ApplicationTendency") == Some("Agree")
                    && s.field_value("ConsumptionProfile") == Some("Data")
            })
            .unwrap();
        let (fields, system) = inverse_configure(path2, &cfg).unwrap();
        assert_eq!(fields["ConsumptionType"], "Change");
        assert_eq!(fields["ApplicationTendency"], "Agree");
        assert_eq!(fields["ConsumptionProfile"], "Data");
        assert_eq!(fields["EmotionTag"], "Discontent");
        assert_eq!(system["PackageStatus"], Value::String("Contracted".into()));
        assert_eq!(system["Penalty"], Value::from(100));
    }

    #[test]
    fn inverse_round_trips_every_enumerated_path() {
        let cfg = telecom();
        for spec in enumerate_paths(&cfg).unwrap() {
            let (fields, system) = inverse_configure(&spec, &cfg).unwrap();
            let gt = rule_engine_derive(&fields, &system, &cfg).unwrap();
            assert_eq!(gt.path_star, spec.expected_path);
            assert_eq!(gt.action_star, spec.final_action);
        }
    }

    #[test]
    fn contradictory_constraints_are_infeasible() {
        let cfg = telecom();
        let mut spec = enumerate_paths(&cfg).unwrap()[0].clone();
        spec.system_constraints = vec![
            (
                "Penalty".to_string(),
                SysConstraint {
                    partition: Some("zero".into()),
                    value: Some(Value::from(100)),
                },
            ),
        ];
        assert!(matches!(inverse_configure(&spec, &cfg), Err(GraphError::Infeasible(_))));
    }

    #[test]
    fn brute_force_assignments_reach_exactly_one_terminal() {
        let cfg = telecom();
        let specs = enumerate_paths(&cfg).unwrap();
        let mut combos_seen = BTreeSet::new();
        for spec in &specs {
            let combo: Vec<&str> =
                spec.classification_items.iter().map(|(_, v)| v.as_str()).collect();
            assert!(combos_seen.insert(combo.join("|")), "duplicate field combination");
        }
        assert_eq!(combos_seen.len(), 3 * 3 * 2 * 2);
    }
}
