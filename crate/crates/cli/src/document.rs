//! JSON document format for networks, link graphs and circuits.
//!
//! One document may carry any combination of a network (`variables` and
//! `nodes`), a `graph` section and a `circuit` section. Flat tables use the
//! canonical layout: parents in declared order, child last, last variable
//! varying fastest.

use std::collections::{BTreeMap, HashMap};
use std::fs;

use serde::{Deserialize, Serialize};

use noisyor::diagnosis::{Circuit, CircuitGate, DeviceFailure, FaultModel, GateKind};
use noisyor::{CompileOptions, GateFunction, Link, LinkGraph, Network, NodeSpec, NoisyGateSpec, Variable};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkDocument {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub variables: Vec<VariableDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub nodes: Vec<NodeDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph: Option<GraphDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub circuit: Option<CircuitDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariableDoc {
    pub name: String,
    pub states: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeDoc {
    pub variable: String,
    #[serde(default)]
    pub parents: Vec<String>,
    pub backing: BackingDoc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum BackingDoc {
    Cpt(Vec<f64>),
    NoisyGate(NoisyGateDoc),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoisyGateDoc {
    pub function: FunctionDoc,
    /// One row per parent, one entry per parent state.
    pub inhibitors: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionDoc {
    pub kind: FunctionKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FunctionKind {
    Or,
    WeightedAverage,
    Add,
    TruthTable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDoc {
    /// Node names; taken from the links when omitted.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub nodes: Vec<String>,
    pub links: Vec<LinkDoc>,
    pub source: String,
    pub target: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkDoc {
    pub from: String,
    pub to: String,
    pub failure: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitDoc {
    pub primary_inputs: Vec<String>,
    pub gates: Vec<GateDoc>,
    /// Circuit-wide line failure probability.
    #[serde(default)]
    pub line_failure: f64,
    /// Per-wire overrides of `line_failure`.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub line_failures: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub input_marginals: BTreeMap<String, Vec<f64>>,
    /// State delivered by a failed line: 0 (false) or 1 (true).
    #[serde(default, skip_serializing_if = "is_zero")]
    pub line_fault_state: usize,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub device_failures: BTreeMap<String, DeviceFailureDoc>,
}

fn is_zero(v: &usize) -> bool {
    *v == 0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GateDoc {
    pub name: String,
    /// `and`, `or`, `not`, `nand`, `nor`, `xor` or `truth_table`.
    pub kind: String,
    pub inputs: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviceFailureDoc {
    pub probability: f64,
    #[serde(default)]
    pub failed_state: usize,
}

impl NetworkDocument {
    pub fn parse(text: &str, path: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::parse(path, e))
    }

    pub fn load(path: &str) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Io {
            path: path.to_string(),
            message: e.to_string(),
        })?;
        Self::parse(&text, path)
    }

    /// Pretty JSON followed by a newline.
    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("document serializes");
        out.push('\n');
        out
    }

    fn variable_map(&self) -> Result<HashMap<&str, Variable>, CliError> {
        let mut map = HashMap::new();
        for v in &self.variables {
            let var = Variable::new(v.name.clone(), v.states.clone())?;
            if map.insert(v.name.as_str(), var).is_some() {
                return Err(CliError::Document(format!("variable `{}` declared twice", v.name)));
            }
        }
        Ok(map)
    }

    fn node_spec(&self, node: &NodeDoc, vars: &HashMap<&str, Variable>) -> Result<NodeSpec, CliError> {
        let lookup = |name: &str| {
            vars.get(name)
                .cloned()
                .ok_or_else(|| CliError::Document(format!("undeclared variable `{name}`")))
        };
        let variable = lookup(&node.variable)?;
        let parents = node.parents.iter().map(|p| lookup(p)).collect::<Result<Vec<_>, _>>()?;
        match &node.backing {
            BackingDoc::Cpt(table) => Ok(NodeSpec::with_cpt(variable, parents, table.clone())?),
            BackingDoc::NoisyGate(gate) => {
                let cards: Vec<usize> = parents.iter().map(Variable::cardinality).collect();
                let m_x = variable.cardinality();
                let function = match gate.function.kind {
                    FunctionKind::Or => GateFunction::boolean_or_checked(&cards, m_x)?,
                    FunctionKind::WeightedAverage => GateFunction::weighted_average(&cards, m_x)?,
                    FunctionKind::Add => GateFunction::integer_add(&cards, m_x)?,
                    FunctionKind::TruthTable => {
                        let table = gate.function.table.clone().ok_or_else(|| {
                            CliError::Document(format!("truth_table gate `{}` has no table", node.variable))
                        })?;
                        GateFunction::truth_table(&cards, m_x, table)?
                    }
                };
                let spec = NoisyGateSpec::from_rows(parents, gate.inhibitors.clone(), function, variable)?;
                Ok(NodeSpec::noisy(spec))
            }
        }
    }

    /// Builds the network without validating it.
    pub fn network(&self) -> Result<Network, CliError> {
        let vars = self.variable_map()?;
        let nodes = self
            .nodes
            .iter()
            .map(|n| self.node_spec(n, &vars))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Network::from_nodes(nodes))
    }

    /// Replaces noisy-gate backings (all, or only `only`) by their compiled
    /// tables.
    pub fn compiled(&self, only: Option<&str>, options: &CompileOptions) -> Result<Self, CliError> {
        if let Some(name) = only {
            if !self.nodes.iter().any(|n| n.variable == name) {
                return Err(noisyor::Error::UnknownVariable(name.to_string()).into());
            }
        }
        let vars = self.variable_map()?;
        let mut out = self.clone();
        for node in out.nodes.iter_mut() {
            if only.is_some_and(|name| name != node.variable) {
                continue;
            }
            if let BackingDoc::NoisyGate(_) = node.backing {
                let (cpt, _) = self.node_spec(node, &vars)?.cpt(options)?;
                node.backing = BackingDoc::Cpt(cpt.into_table());
            }
        }
        Ok(out)
    }

    pub fn graph(&self) -> Result<LinkGraph, CliError> {
        let g = self
            .graph
            .as_ref()
            .ok_or_else(|| CliError::Document("no `graph` section".into()))?;
        let mut nodes = g.nodes.clone();
        if nodes.is_empty() {
            let names = g
                .links
                .iter()
                .flat_map(|l| [&l.from, &l.to])
                .chain([&g.source, &g.target]);
            for n in names {
                if !nodes.contains(n) {
                    nodes.push(n.clone());
                }
            }
        }
        let links = g
            .links
            .iter()
            .map(|l| Link::new(l.from.clone(), l.to.clone(), l.failure))
            .collect();
        Ok(LinkGraph::new(nodes, links, g.source.clone(), g.target.clone())?)
    }

    pub fn circuit(&self) -> Result<(Circuit, FaultModel), CliError> {
        let c = self
            .circuit
            .as_ref()
            .ok_or_else(|| CliError::Document("no `circuit` section".into()))?;
        let gates = c
            .gates
            .iter()
            .map(|g| {
                let kind = match (g.kind.as_str(), &g.table) {
                    ("truth_table", Some(t)) => GateKind::Table(t.clone()),
                    ("truth_table", None) => return Err(CliError::Document(format!("gate `{}` has no table", g.name))),
                    (k, _) => GateKind::parse(k)
                        .ok_or_else(|| CliError::Document(format!("unknown gate kind `{k}` on `{}`", g.name)))?,
                };
                Ok(CircuitGate {
                    name: g.name.clone(),
                    kind,
                    inputs: g.inputs.clone(),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let circuit = Circuit {
            primary_inputs: c.primary_inputs.clone(),
            gates,
            default_line_failure: c.line_failure,
            line_failure: c.line_failures.clone(),
            input_marginals: c.input_marginals.clone(),
        };
        let faults = FaultModel {
            line_fault_state: c.line_fault_state,
            device_failure: c
                .device_failures
                .iter()
                .map(|(g, d)| {
                    (
                        g.clone(),
                        DeviceFailure {
                            probability: d.probability,
                            failed_state: d.failed_state,
                        },
                    )
                })
                .collect(),
        };
        Ok((circuit, faults))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO_NODE: &str = r#"{
        "variables": [
            {"name": "A", "states": ["false", "true"]},
            {"name": "X", "states": ["false", "true"]}
        ],
        "nodes": [
            {"variable": "A", "backing": {"cpt": [0.7, 0.3]}},
            {"variable": "X", "parents": ["A"],
             "backing": {"noisy_gate": {"function": {"kind": "or"}, "inhibitors": [[0.5, 0.0]]}}}
        ]
    }"#;

    #[test]
    fn round_trip() {
        let doc = NetworkDocument::parse(TWO_NODE, "mem").unwrap();
        let again = NetworkDocument::parse(&doc.to_json(), "mem").unwrap();
        assert_eq!(doc, again);
    }

    #[test]
    fn compile_is_idempotent() {
        let doc = NetworkDocument::parse(TWO_NODE, "mem").unwrap();
        let once = doc.compiled(None, &CompileOptions::default()).unwrap();
        let twice = once.compiled(None, &CompileOptions::default()).unwrap();
        assert_eq!(once.to_json(), twice.to_json());
        match &once.nodes[1].backing {
            BackingDoc::Cpt(t) => assert_eq!(t, &vec![1.0, 0.0, 0.5, 0.5]),
            other => panic!("not compiled: {other:?}"),
        }
    }

    #[test]
    fn parse_error_position() {
        let err = NetworkDocument::parse("{\n  \"variables\": [,]\n}", "bad.json").unwrap_err();
        match err {
            CliError::Parse { line, column, .. } => {
                assert_eq!(line, 2);
                assert!(column > 0);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_kind_is_rejected() {
        let text = TWO_NODE.replace("\"or\"", "\"median\"");
        assert!(matches!(
            NetworkDocument::parse(&text, "mem"),
            Err(CliError::Parse { .. })
        ));
    }

    #[test]
    fn graph_nodes_inferred() {
        let doc = NetworkDocument::parse(
            r#"{"graph": {"links": [{"from": "A", "to": "B", "failure": 0.1}], "source": "A", "target": "B"}}"#,
            "mem",
        )
        .unwrap();
        assert_eq!(doc.graph().unwrap().nodes(), &["A".to_string(), "B".to_string()]);
    }
}
