//! Bayesian networks whose nodes are backed by explicit tables or noisy
//! gates.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use indexmap::IndexMap;

use crate::error::{Error, Result};
use crate::factor::Factor;
use crate::noisy::{compile_with_stats, CompileOptions, CompilePath, NoisyGateSpec};
use crate::variable::{Evidence, Variable};

/// Normalization tolerance for conditional tables.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum Backing {
    /// Factor over `[parents..., variable]`.
    Cpt(Factor),
    NoisyGate(NoisyGateSpec),
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodeSpec {
    variable: Variable,
    parents: Vec<Variable>,
    backing: Backing,
}

impl NodeSpec {
    /// Node with an explicit conditional table over `[parents..., variable]`.
    pub fn with_cpt(variable: Variable, parents: Vec<Variable>, table: Vec<f64>) -> Result<Self> {
        let mut scope = parents.clone();
        scope.push(variable.clone());
        let cpt = Factor::new(scope, table)?;
        Ok(NodeSpec {
            variable,
            parents,
            backing: Backing::Cpt(cpt),
        })
    }

    /// Parent-less node with a marginal distribution.
    pub fn root(variable: Variable, marginal: Vec<f64>) -> Result<Self> {
        Self::with_cpt(variable, Vec::new(), marginal)
    }

    pub fn uniform_root(variable: Variable) -> Self {
        let m = variable.cardinality();
        Self::root(variable, vec![1.0 / m as f64; m]).expect("uniform marginal is well formed")
    }

    pub fn noisy(spec: NoisyGateSpec) -> Self {
        NodeSpec {
            variable: spec.output().clone(),
            parents: spec.inputs().to_vec(),
            backing: Backing::NoisyGate(spec),
        }
    }

    pub fn variable(&self) -> &Variable {
        &self.variable
    }

    pub fn name(&self) -> &str {
        self.variable.name()
    }

    pub fn parents(&self) -> &[Variable] {
        &self.parents
    }

    pub fn backing(&self) -> &Backing {
        &self.backing
    }

    /// The node's conditional table, compiling noisy gates.
    pub fn cpt(&self, options: &CompileOptions) -> Result<(Factor, Option<CompilePath>)> {
        match &self.backing {
            Backing::Cpt(f) => Ok((f.clone(), None)),
            Backing::NoisyGate(spec) => {
                let (f, stats) = compile_with_stats(spec, options)?;
                Ok((f, Some(stats.path)))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    DuplicateNode(String),
    Cycle(String),
    DanglingParent {
        node: String,
        parent: String,
    },
    ParentMismatch {
        node: String,
        parent: String,
        reason: String,
    },
    MissingRootMarginal(String),
    Unnormalized {
        node: String,
        configuration: usize,
        sum: f64,
    },
    InvalidGate {
        node: String,
        reason: String,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicateNode(n) => write!(f, "duplicate: node `{n}` defined twice"),
            Violation::Cycle(n) => write!(f, "cycle: `{n}` lies on a directed cycle"),
            Violation::DanglingParent { node, parent } => {
                write!(f, "dangling parent: `{node}` references undefined `{parent}`")
            }
            Violation::ParentMismatch { node, parent, reason } => {
                write!(f, "parent mismatch: `{node}` parent `{parent}`: {reason}")
            }
            Violation::MissingRootMarginal(n) => {
                write!(f, "missing marginal: root `{n}` has no explicit table")
            }
            Violation::Unnormalized {
                node,
                configuration,
                sum,
            } => write!(
                f,
                "unnormalized: `{node}` parent configuration {configuration} sums to {sum}"
            ),
            Violation::InvalidGate { node, reason } => {
                write!(f, "invalid gate: `{node}`: {reason}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return write!(f, "ok");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// A DAG of nodes in insertion order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Network {
    nodes: IndexMap<String, NodeSpec>,
    duplicates: Vec<String>,
}

impl Network {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_nodes<I: IntoIterator<Item = NodeSpec>>(nodes: I) -> Self {
        let mut net = Network::new();
        for n in nodes {
            net.insert_unchecked(n);
        }
        net
    }

    fn insert_unchecked(&mut self, node: NodeSpec) {
        let name = node.name().to_string();
        if self.nodes.contains_key(&name) {
            self.duplicates.push(name.clone());
        }
        self.nodes.insert(name, node);
    }

    /// Adds a node whose parents are already present.
    pub fn add_node(&mut self, node: NodeSpec) -> Result<()> {
        if self.nodes.contains_key(node.name()) {
            return Err(Error::DuplicateVariable(node.name().to_string()));
        }
        for p in node.parents() {
            match self.nodes.get(p.name()) {
                None => return Err(Error::UnknownVariable(p.name().to_string())),
                Some(existing) if existing.variable() != p => {
                    return Err(Error::InvalidNetwork(format!(
                        "parent `{}` of `{}` does not match its declaration",
                        p.name(),
                        node.name()
                    )))
                }
                Some(_) => {}
            }
        }
        self.nodes.insert(node.name().to_string(), node);
        Ok(())
    }

    /// Removes a childless node.
    pub fn remove_node(&mut self, name: &str) -> Result<NodeSpec> {
        if let Some(child) = self
            .nodes
            .values()
            .find(|n| n.parents().iter().any(|p| p.name() == name))
        {
            return Err(Error::InvalidNetwork(format!(
                "cannot remove `{name}`: `{}` depends on it",
                child.name()
            )));
        }
        self.nodes
            .shift_remove(name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    /// Replaces the backing of an existing node, keeping its position.
    pub fn replace_node(&mut self, node: NodeSpec) -> Result<()> {
        match self.nodes.get_mut(node.name()) {
            Some(slot) => {
                *slot = node;
                Ok(())
            }
            None => Err(Error::UnknownVariable(node.name().to_string())),
        }
    }

    pub fn node(&self, name: &str) -> Option<&NodeSpec> {
        self.nodes.get(name)
    }

    pub fn nodes(&self) -> impl Iterator<Item = &NodeSpec> {
        self.nodes.values()
    }

    pub fn variable(&self, name: &str) -> Option<&Variable> {
        self.nodes.get(name).map(NodeSpec::variable)
    }

    pub fn variables(&self) -> impl Iterator<Item = &Variable> {
        self.nodes.values().map(NodeSpec::variable)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn children_of<'a>(&'a self, name: &'a str) -> impl Iterator<Item = &'a str> + 'a {
        self.nodes
            .values()
            .filter(move |n| n.parents().iter().any(|p| p.name() == name))
            .map(NodeSpec::name)
    }

    /// Parents precede children; ties broken by name.
    pub fn topological_order(&self) -> Result<Vec<String>> {
        let mut indegree: BTreeMap<&str, usize> = BTreeMap::new();
        let mut children: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
        for node in self.nodes.values() {
            indegree.entry(node.name()).or_insert(0);
            for p in node.parents() {
                if self.nodes.contains_key(p.name()) {
                    *indegree.entry(node.name()).or_insert(0) += 1;
                    children.entry(p.name()).or_default().push(node.name());
                }
            }
        }
        let mut ready: BTreeSet<&str> = indegree.iter().filter(|(_, &d)| d == 0).map(|(&n, _)| n).collect();
        let mut order = Vec::with_capacity(self.nodes.len());
        while let Some(next) = ready.pop_first() {
            order.push(next.to_string());
            for &c in children.get(next).map(Vec::as_slice).unwrap_or(&[]) {
                let d = indegree.get_mut(c).expect("child registered");
                *d -= 1;
                if *d == 0 {
                    ready.insert(c);
                }
            }
        }
        if order.len() < indegree.len() {
            let stuck = indegree
                .iter()
                .find(|(_, &d)| d > 0)
                .map(|(&n, _)| n.to_string())
                .unwrap_or_default();
            return Err(Error::Cycle(self.cycle_member(&stuck)));
        }
        Ok(order)
    }

    // walk parents from a blocked node until a name repeats
    fn cycle_member(&self, start: &str) -> String {
        let mut seen = BTreeSet::new();
        let mut current = start.to_string();
        while seen.insert(current.clone()) {
            let blocked_parent = self.nodes.get(&current).and_then(|n| {
                n.parents()
                    .iter()
                    .map(Variable::name)
                    .filter(|p| self.nodes.contains_key(*p))
                    .find(|p| self.reaches(p, &current))
            });
            match blocked_parent {
                Some(p) => current = p.to_string(),
                None => break,
            }
        }
        current
    }

    fn reaches(&self, from: &str, to: &str) -> bool {
        let mut stack = vec![from.to_string()];
        let mut seen = BTreeSet::new();
        while let Some(n) = stack.pop() {
            if n == to {
                return true;
            }
            if seen.insert(n.clone()) {
                stack.extend(self.children_of(&n).map(str::to_string));
            }
        }
        false
    }

    pub fn validate(&self) -> ValidationReport {
        let mut violations: Vec<Violation> = self
            .duplicates
            .iter()
            .map(|d| Violation::DuplicateNode(d.clone()))
            .collect();
        for node in self.nodes.values() {
            for p in node.parents() {
                match self.nodes.get(p.name()) {
                    None => violations.push(Violation::DanglingParent {
                        node: node.name().to_string(),
                        parent: p.name().to_string(),
                    }),
                    Some(decl) if decl.variable() != p => violations.push(Violation::ParentMismatch {
                        node: node.name().to_string(),
                        parent: p.name().to_string(),
                        reason: "states differ from the parent's declaration".into(),
                    }),
                    Some(_) => {}
                }
            }
            match node.backing() {
                Backing::Cpt(f) => {
                    if let Some((configuration, sum)) = f.first_unnormalized_slice(NORMALIZATION_TOLERANCE) {
                        violations.push(Violation::Unnormalized {
                            node: node.name().to_string(),
                            configuration,
                            sum,
                        });
                    }
                    let mut scope = node.parents().to_vec();
                    scope.push(node.variable().clone());
                    if f.variables() != scope.as_slice() {
                        violations.push(Violation::InvalidGate {
                            node: node.name().to_string(),
                            reason: "table scope is not [parents..., variable]".into(),
                        });
                    }
                }
                Backing::NoisyGate(spec) => {
                    if node.parents().is_empty() {
                        violations.push(Violation::MissingRootMarginal(node.name().to_string()));
                    }
                    if spec.inputs() != node.parents() || spec.output() != node.variable() {
                        violations.push(Violation::InvalidGate {
                            node: node.name().to_string(),
                            reason: "gate inputs/output differ from node parents/variable".into(),
                        });
                    }
                }
            }
        }
        if let Err(Error::Cycle(member)) = self.topological_order() {
            violations.push(Violation::Cycle(member));
        }
        ValidationReport { violations }
    }

    /// Validates and compiles every node into an explicit table.
    pub fn compile(&self, options: &CompileOptions) -> Result<CompiledNetwork> {
        let report = self.validate();
        if !report.is_ok() {
            return Err(Error::InvalidNetwork(report.to_string()));
        }
        let order = self.topological_order()?;
        let mut cpts = IndexMap::with_capacity(self.nodes.len());
        let mut paths = IndexMap::new();
        for node in self.nodes.values() {
            let (cpt, path) = node.cpt(options)?;
            if let Some(path) = path {
                paths.insert(node.name().to_string(), path);
            }
            cpts.insert(node.name().to_string(), cpt);
        }
        Ok(CompiledNetwork {
            variables: self.nodes.values().map(|n| n.variable().clone()).collect(),
            order,
            cpts,
            paths,
        })
    }
}

pub fn validate_network(net: &Network) -> ValidationReport {
    net.validate()
}

pub fn topological_order(net: &Network) -> Result<Vec<String>> {
    net.topological_order()
}

/// A validated network with every node as an explicit table, in the
/// original node order.
#[derive(Debug, Clone, PartialEq)]
pub struct CompiledNetwork {
    variables: Vec<Variable>,
    order: Vec<String>,
    cpts: IndexMap<String, Factor>,
    paths: IndexMap<String, CompilePath>,
}

impl CompiledNetwork {
    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn variable(&self, name: &str) -> Option<&Variable> {
        self.variables.iter().find(|v| v.name() == name)
    }

    pub fn topological_order(&self) -> &[String] {
        &self.order
    }

    pub fn cpt(&self, name: &str) -> Option<&Factor> {
        self.cpts.get(name)
    }

    pub fn cpts(&self) -> impl Iterator<Item = (&str, &Factor)> {
        self.cpts.iter().map(|(k, v)| (k.as_str(), v))
    }

    /// Which compiler produced each noisy-gate table.
    pub fn compile_paths(&self) -> impl Iterator<Item = (&str, CompilePath)> {
        self.paths.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn parents(&self, name: &str) -> &[Variable] {
        self.cpts
            .get(name)
            .map(|f| &f.variables()[..f.variables().len() - 1])
            .unwrap_or(&[])
    }

    /// Checks that evidence names known variables and in-range states.
    pub fn check_evidence(&self, evidence: &Evidence) -> Result<()> {
        for (name, state) in evidence.iter() {
            let v = self
                .variable(name)
                .ok_or_else(|| Error::UnknownVariable(name.to_string()))?;
            if state >= v.cardinality() {
                return Err(Error::InvalidEvidence(format!(
                    "state {state} out of range for `{name}` with {} states",
                    v.cardinality()
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gate::GateFunction;
    use crate::noisy::InhibitorVector;

    fn chain(names: &[&str]) -> Network {
        let mut net = Network::new();
        let first = Variable::boolean(names[0]);
        net.add_node(NodeSpec::root(first, vec![0.4, 0.6]).unwrap()).unwrap();
        for w in names.windows(2) {
            let node = NodeSpec::with_cpt(
                Variable::boolean(w[1]),
                vec![Variable::boolean(w[0])],
                vec![0.9, 0.1, 0.2, 0.8],
            )
            .unwrap();
            net.add_node(node).unwrap();
        }
        net
    }

    #[test]
    fn valid_chain() {
        let net = chain(&["A", "X"]);
        assert!(validate_network(&net).is_ok());
        assert_eq!(topological_order(&chain(&["A", "B", "C"])).unwrap(), ["A", "B", "C"]);
    }

    #[test]
    fn diamond_order_breaks_ties_by_name() {
        let a = Variable::boolean("A");
        let nodes = vec![
            NodeSpec::with_cpt(
                Variable::boolean("D"),
                vec![Variable::boolean("C"), Variable::boolean("B")],
                vec![0.5; 8],
            )
            .unwrap(),
            NodeSpec::with_cpt(Variable::boolean("C"), vec![a.clone()], vec![0.5; 4]).unwrap(),
            NodeSpec::with_cpt(Variable::boolean("B"), vec![a.clone()], vec![0.5; 4]).unwrap(),
            NodeSpec::uniform_root(a),
        ];
        let net = Network::from_nodes(nodes);
        assert_eq!(net.topological_order().unwrap(), ["A", "B", "C", "D"]);
    }

    #[test]
    fn self_loop_is_a_cycle() {
        let self_loop = cyclic_pair_self_loop();
        let report = validate_network(&self_loop);
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::Cycle(n) if n == "X")));
        assert!(report.to_string().contains("cycle"));
        assert!(matches!(topological_order(&self_loop), Err(Error::Cycle(n)) if n == "X"));
    }

    // X -> X, expressed as a node whose declared parent is itself
    fn cyclic_pair_self_loop() -> Network {
        let x = Variable::boolean("X");
        let spec = NodeSpec {
            variable: x.clone(),
            parents: vec![x.clone()],
            backing: Backing::NoisyGate(
                NoisyGateSpec::new(
                    vec![Variable::boolean("X'")],
                    vec![InhibitorVector::zero(2)],
                    GateFunction::boolean_or(1),
                    x,
                )
                .unwrap(),
            ),
        };
        Network::from_nodes(vec![spec])
    }

    #[test]
    fn two_cycle_detected() {
        let a = Variable::boolean("A");
        let b = Variable::boolean("B");
        let net = Network::from_nodes(vec![
            NodeSpec::with_cpt(a.clone(), vec![b.clone()], vec![0.5; 4]).unwrap(),
            NodeSpec::with_cpt(b.clone(), vec![a.clone()], vec![0.5; 4]).unwrap(),
            NodeSpec::uniform_root(Variable::boolean("C")),
        ]);
        let err = net.topological_order().unwrap_err();
        assert!(matches!(err, Error::Cycle(ref n) if n == "A" || n == "B"));
    }

    #[test]
    fn unnormalized_column() {
        let net = Network::from_nodes(vec![NodeSpec::root(Variable::boolean("A"), vec![0.5, 0.4]).unwrap()]);
        let report = validate_network(&net);
        assert!(matches!(report.violations[..], [Violation::Unnormalized { .. }]));
        assert!(report.to_string().contains("unnormalized"));
    }

    #[test]
    fn dangling_parent_and_missing_marginal() {
        let gate =
            NoisyGateSpec::boolean_noisy_or(vec![Variable::boolean("Q")], Variable::boolean("X"), &[0.1]).unwrap();
        let net = Network::from_nodes(vec![NodeSpec::noisy(gate)]);
        let report = validate_network(&net);
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::DanglingParent { parent, .. } if parent == "Q")));

        let empty = NoisyGateSpec::new(
            vec![],
            vec![],
            GateFunction::truth_table(&[], 2, vec![1]).unwrap(),
            Variable::boolean("K"),
        )
        .unwrap();
        let report = validate_network(&Network::from_nodes(vec![NodeSpec::noisy(empty)]));
        assert!(matches!(report.violations[..], [Violation::MissingRootMarginal(_)]));
    }

    #[test]
    fn add_remove_node() {
        let mut net = chain(&["A", "B"]);
        let before = net.compile(&CompileOptions::default()).unwrap();
        let gate =
            NoisyGateSpec::boolean_noisy_or(vec![Variable::boolean("B")], Variable::boolean("C"), &[0.3]).unwrap();
        net.add_node(NodeSpec::noisy(gate)).unwrap();
        assert!(net.remove_node("B").is_err());
        net.remove_node("C").unwrap();
        assert_eq!(net.compile(&CompileOptions::default()).unwrap(), before);
        assert!(net.add_node(NodeSpec::uniform_root(Variable::boolean("A"))).is_err());
        let orphan = NodeSpec::with_cpt(Variable::boolean("Z"), vec![Variable::boolean("Nope")], vec![0.5; 4]).unwrap();
        assert!(net.add_node(orphan).is_err());
    }

    #[test]
    fn compile_rejects_invalid() {
        let net = Network::from_nodes(vec![NodeSpec::root(Variable::boolean("A"), vec![0.5, 0.4]).unwrap()]);
        assert!(matches!(
            net.compile(&CompileOptions::default()),
            Err(Error::InvalidNetwork(_))
        ));
    }

    #[test]
    fn topological_order_respects_edges() {
        let net = chain(&["E", "D", "C", "B", "A"]);
        let order = net.topological_order().unwrap();
        let pos = |n: &str| order.iter().position(|o| o == n).unwrap();
        for node in net.nodes() {
            for p in node.parents() {
                assert!(pos(p.name()) < pos(node.name()));
            }
        }
    }
}
