//! Two-terminal reliability and path-count distributions on DAGs with
//! independently failing links.
//!
//! Both models keep the graph's topology. In the connectivity model every
//! node is a Boolean OR of its incoming links, with the link failure
//! probability as the inhibitor on the false state. In the path-count model
//! node `U` has `n_U + 1` states, where `n_U` is the number of source paths
//! reaching it, and integer addition replaces OR. Declaring the source
//! true (or `1`) and reading the target's posterior yields the answer.

use std::collections::{BTreeMap, BTreeSet};

use indexmap::IndexMap;

use crate::error::{Error, Result};
use crate::gate::GateFunction;
use crate::inference::eliminate;
use crate::network::{CompiledNetwork, Network, NodeSpec};
use crate::noisy::{CompileOptions, InhibitorVector, NoisyGateSpec};
use crate::variable::{Evidence, Variable};

/// Default cap on the number of states of a path-count variable.
pub const DEFAULT_MAX_STATES: usize = 1024;

#[derive(Debug, Clone, PartialEq)]
pub struct Link {
    pub from: String,
    pub to: String,
    pub failure: f64,
}

impl Link {
    pub fn new<A: Into<String>, B: Into<String>>(from: A, to: B, failure: f64) -> Self {
        Link {
            from: from.into(),
            to: to.into(),
            failure,
        }
    }
}

/// Directed acyclic graph of unreliable links with designated terminals.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkGraph {
    nodes: Vec<String>,
    links: Vec<Link>,
    source: String,
    target: String,
}

impl LinkGraph {
    pub fn new<S: Into<String>, T: Into<String>>(
        nodes: Vec<String>,
        links: Vec<Link>,
        source: S,
        target: T,
    ) -> Result<Self> {
        let (source, target) = (source.into(), target.into());
        let mut seen = BTreeSet::new();
        for n in &nodes {
            if n.is_empty() || !seen.insert(n.as_str()) {
                return Err(Error::InvalidGraph(format!("duplicate or empty node name `{n}`")));
            }
        }
        let mut pairs = BTreeSet::new();
        for l in &links {
            for end in [&l.from, &l.to] {
                if !seen.contains(end.as_str()) {
                    return Err(Error::InvalidGraph(format!("link endpoint `{end}` is not a node")));
                }
            }
            if l.from == l.to {
                return Err(Error::InvalidGraph(format!("self-loop on `{}`", l.from)));
            }
            if !(0.0..=1.0).contains(&l.failure) {
                return Err(Error::InvalidGraph(format!(
                    "failure probability {} on {} -> {} outside [0, 1]",
                    l.failure, l.from, l.to
                )));
            }
            if !pairs.insert((l.from.as_str(), l.to.as_str())) {
                return Err(Error::InvalidGraph(format!("duplicate link {} -> {}", l.from, l.to)));
            }
        }
        for t in [&source, &target] {
            if !seen.contains(t.as_str()) {
                return Err(Error::InvalidGraph(format!("terminal `{t}` is not a node")));
            }
        }
        let graph = LinkGraph {
            nodes,
            links,
            source,
            target,
        };
        graph.topological_order()?;
        Ok(graph)
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn target(&self) -> &str {
        &self.target
    }

    pub fn with_terminals<S: Into<String>, T: Into<String>>(&self, source: S, target: T) -> Result<Self> {
        Self::new(self.nodes.clone(), self.links.clone(), source, target)
    }

    /// Copy with every failure probability replaced by `f(link)`.
    pub fn map_failures<F: Fn(&Link) -> f64>(&self, f: F) -> Result<Self> {
        let links = self
            .links
            .iter()
            .map(|l| Link::new(l.from.clone(), l.to.clone(), f(l)))
            .collect();
        Self::new(self.nodes.clone(), links, self.source.clone(), self.target.clone())
    }

    /// Incoming links of `node`, in declaration order.
    pub fn incoming<'a>(&'a self, node: &'a str) -> impl Iterator<Item = &'a Link> + 'a {
        self.links.iter().filter(move |l| l.to == node)
    }

    /// Ancestors before descendants, ties broken by name.
    pub fn topological_order(&self) -> Result<Vec<String>> {
        let mut indegree: BTreeMap<&str, usize> = self.nodes.iter().map(|n| (n.as_str(), 0)).collect();
        for l in &self.links {
            *indegree.get_mut(l.to.as_str()).expect("validated endpoint") += 1;
        }
        let mut ready: BTreeSet<&str> = indegree.iter().filter(|(_, &d)| d == 0).map(|(&n, _)| n).collect();
        let mut order = Vec::with_capacity(self.nodes.len());
        while let Some(n) = ready.pop_first() {
            order.push(n.to_string());
            for l in self.links.iter().filter(|l| l.from == n) {
                let d = indegree.get_mut(l.to.as_str()).expect("validated endpoint");
                *d -= 1;
                if *d == 0 {
                    ready.insert(&l.to);
                }
            }
        }
        if order.len() < self.nodes.len() {
            let stuck = indegree
                .iter()
                .find(|(_, &d)| d > 0)
                .map(|(&n, _)| n)
                .unwrap_or_default();
            return Err(Error::Cycle(stuck.to_string()));
        }
        Ok(order)
    }

    /// `from` and every node reachable from it.
    pub fn descendants(&self, from: &str) -> BTreeSet<String> {
        let mut found = BTreeSet::new();
        let mut stack = vec![from.to_string()];
        while let Some(n) = stack.pop() {
            if found.insert(n.clone()) {
                stack.extend(self.links.iter().filter(|l| l.from == n).map(|l| l.to.clone()));
            }
        }
        found
    }

    /// Nodes reachable from the source, in topological order.
    fn source_subgraph(&self) -> Vec<String> {
        let reachable = self.descendants(&self.source);
        self.topological_order()
            .expect("validated acyclic")
            .into_iter()
            .filter(|n| reachable.contains(n))
            .collect()
    }

    fn check_target_reachable(&self) -> Result<()> {
        if !self.descendants(&self.source).contains(&self.target) {
            return Err(Error::Unreachable {
                origin: self.source.clone(),
                target: self.target.clone(),
            });
        }
        Ok(())
    }

    /// Adds a fresh node with failure-free links to every member of
    /// `sources` and makes it the source.
    pub fn with_super_source(&self, sources: &[String]) -> Result<Self> {
        if sources.is_empty() {
            return Err(Error::InvalidGraph("empty source set".into()));
        }
        let mut name = String::from("__source__");
        while self.nodes.contains(&name) {
            name.push('_');
        }
        let mut nodes = self.nodes.clone();
        nodes.push(name.clone());
        let mut links = self.links.clone();
        for s in sources {
            links.push(Link::new(name.clone(), s.clone(), 0.0));
        }
        Self::new(nodes, links, name, self.target.clone())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReliabilityOptions {
    /// Marginal for the source node; uniform when `None`.
    pub root_marginal: Option<Vec<f64>>,
    /// Cap on states per path-count variable.
    pub max_states: usize,
    pub compile: CompileOptions,
}

impl Default for ReliabilityOptions {
    fn default() -> Self {
        ReliabilityOptions {
            root_marginal: None,
            max_states: DEFAULT_MAX_STATES,
            compile: CompileOptions::default(),
        }
    }
}

impl ReliabilityOptions {
    fn source_node(&self, variable: Variable) -> Result<NodeSpec> {
        match &self.root_marginal {
            Some(m) => {
                if m.len() != variable.cardinality() || m.iter().any(|&p| p.is_nan() || p <= 0.0) {
                    return Err(Error::InvalidGraph(
                        "root marginal must be strictly positive with one entry per state".into(),
                    ));
                }
                NodeSpec::root(variable, m.clone())
            }
            None => Ok(NodeSpec::uniform_root(variable)),
        }
    }
}

/// Number of source-to-node paths, by node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathCountAnnotation {
    counts: IndexMap<String, u128>,
}

impl PathCountAnnotation {
    pub fn get(&self, node: &str) -> Option<u128> {
        self.counts.get(node).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u128)> {
        self.counts.iter().map(|(k, &v)| (k.as_str(), v))
    }
}

/// `n_source = 1`; every other node sums its parents' counts, visiting
/// ancestors before descendants. Nodes the source cannot reach get 0.
pub fn annotate_path_counts(graph: &LinkGraph) -> Result<PathCountAnnotation> {
    let order = graph.topological_order()?;
    let mut counts: IndexMap<String, u128> = IndexMap::with_capacity(order.len());
    for node in order {
        let n = if node == graph.source {
            1
        } else {
            graph
                .incoming(&node)
                .map(|l| counts.get(&l.from).copied().unwrap_or(0))
                .fold(0u128, u128::saturating_add)
        };
        counts.insert(node, n);
    }
    Ok(PathCountAnnotation { counts })
}

/// Boolean-OR network over the source and its descendants.
pub fn build_connectivity_model(graph: &LinkGraph, options: &ReliabilityOptions) -> Result<Network> {
    graph.check_target_reachable()?;
    let members = graph.source_subgraph();
    let inside: BTreeSet<&str> = members.iter().map(String::as_str).collect();
    let mut net = Network::new();
    for node in &members {
        let variable = Variable::boolean(node.clone());
        if *node == graph.source {
            net.add_node(options.source_node(variable)?)?;
            continue;
        }
        let incoming: Vec<&Link> = graph
            .incoming(node)
            .filter(|l| inside.contains(l.from.as_str()))
            .collect();
        let parents = incoming.iter().map(|l| Variable::boolean(l.from.clone())).collect();
        let q: Vec<f64> = incoming.iter().map(|l| l.failure).collect();
        net.add_node(NodeSpec::noisy(NoisyGateSpec::boolean_noisy_or(parents, variable, &q)?))?;
    }
    Ok(net)
}

/// `Bel(target = true)` given `source = true`.
pub fn query_connectivity(net: &CompiledNetwork, source: &str, target: &str) -> Result<f64> {
    let evidence = Evidence::new().with(source, 1)?;
    let m = eliminate(net, &evidence, &[target.to_string()])?;
    Ok(m.get(target).expect("target queried")[1])
}

/// Integer-addition network over the source and its descendants.
pub fn build_path_count_model(graph: &LinkGraph, options: &ReliabilityOptions) -> Result<Network> {
    graph.check_target_reachable()?;
    let counts = annotate_path_counts(graph)?;
    let members = graph.source_subgraph();
    let inside: BTreeSet<&str> = members.iter().map(String::as_str).collect();
    let mut variables: BTreeMap<&str, Variable> = BTreeMap::new();
    for node in &members {
        let n = counts.get(node).expect("annotated");
        let states = n.saturating_add(1);
        if states > options.max_states as u128 {
            return Err(Error::StateSpaceTooLarge {
                node: node.clone(),
                states,
                cap: options.max_states,
            });
        }
        variables.insert(node, Variable::with_cardinality(node.clone(), states as usize)?);
    }

    let mut net = Network::new();
    for node in &members {
        let variable = variables[node.as_str()].clone();
        if *node == graph.source {
            net.add_node(options.source_node(variable)?)?;
            continue;
        }
        let incoming: Vec<&Link> = graph
            .incoming(node)
            .filter(|l| inside.contains(l.from.as_str()))
            .collect();
        let parents: Vec<Variable> = incoming.iter().map(|l| variables[l.from.as_str()].clone()).collect();
        let cards: Vec<usize> = parents.iter().map(Variable::cardinality).collect();
        let inhibitors = incoming
            .iter()
            .zip(&cards)
            .map(|(l, &m)| InhibitorVector::fails_to_zero(m, l.failure))
            .collect::<Result<Vec<_>>>()?;
        let function = GateFunction::integer_add(&cards, variable.cardinality())?;
        net.add_node(NodeSpec::noisy(NoisyGateSpec::new(
            parents, inhibitors, function, variable,
        )?))?;
    }
    Ok(net)
}

/// `Bel(target)` given `source = 1`: the distribution of the number of
/// live source-to-target paths.
pub fn query_path_distribution(net: &CompiledNetwork, source: &str, target: &str) -> Result<Vec<f64>> {
    let evidence = Evidence::new().with(source, 1)?;
    let m = eliminate(net, &evidence, &[target.to_string()])?;
    Ok(m.get(target).expect("target queried").to_vec())
}

/// Probability that a live source-to-target path exists; 0 when the target
/// is not downstream of the source.
pub fn two_terminal_reliability(graph: &LinkGraph, options: &ReliabilityOptions) -> Result<f64> {
    match build_connectivity_model(graph, options) {
        Ok(net) => {
            let compiled = net.compile(&options.compile)?;
            query_connectivity(&compiled, graph.source(), graph.target())
        }
        Err(Error::Unreachable { .. }) => Ok(0.0),
        Err(e) => Err(e),
    }
}

/// Distribution over the number of live source-to-target paths, indexed
/// `0..=n_target`; `[1.0]` when the target is not downstream of the source.
pub fn path_count_distribution(graph: &LinkGraph, options: &ReliabilityOptions) -> Result<Vec<f64>> {
    match build_path_count_model(graph, options) {
        Ok(net) => {
            let compiled = net.compile(&options.compile)?;
            query_path_distribution(&compiled, graph.source(), graph.target())
        }
        Err(Error::Unreachable { .. }) => Ok(vec![1.0]),
        Err(e) => Err(e),
    }
}

/// Probability that some member of `sources` reaches the target.
pub fn set_reliability(graph: &LinkGraph, sources: &[String], options: &ReliabilityOptions) -> Result<f64> {
    two_terminal_reliability(&graph.with_super_source(sources)?, options)
}

/// Distribution over the number of live paths starting at any member of
/// `sources` and ending at the target.
pub fn set_path_count_distribution(
    graph: &LinkGraph,
    sources: &[String],
    options: &ReliabilityOptions,
) -> Result<Vec<f64>> {
    path_count_distribution(&graph.with_super_source(sources)?, options)
}

/// A 7-node, 8-link demo graph with four `A -> G` paths. It is a stand-in
/// example, not a reconstruction of any published figure.
pub fn demo_graph() -> LinkGraph {
    let nodes = ["A", "B", "C", "D", "E", "F", "G"].map(String::from).to_vec();
    let links = vec![
        Link::new("A", "B", 0.1),
        Link::new("A", "C", 0.2),
        Link::new("B", "D", 0.1),
        Link::new("C", "D", 0.15),
        Link::new("D", "E", 0.05),
        Link::new("D", "F", 0.3),
        Link::new("E", "G", 0.1),
        Link::new("F", "G", 0.2),
    ];
    LinkGraph::new(nodes, links, "A", "G").expect("demo graph is valid")
}
