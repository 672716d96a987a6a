//! Brute-force reference implementations.
//!
//! Everything here is deliberately naive: explicit nested loops, joint
//! tables materialized in full, and no use of the factor algebra, the
//! compilers, or the elimination engine. Offsets are recomputed locally
//! rather than through the shared indexing helpers.

use crate::error::{Error, Result};
use crate::factor::Factor;
use crate::network::{Backing, Network};
use crate::noisy::NoisyGateSpec;
use crate::reliability::LinkGraph;
use crate::variable::{Evidence, Variable};

/// Largest joint table the oracle will materialize.
pub const JOINT_LIMIT: u128 = 1_000_000;

/// Default cap on enumerated links (`2^L` configurations).
pub const DEFAULT_MAX_LINKS: usize = 24;

fn next_tuple(tuple: &mut [usize], radices: &[usize]) -> bool {
    let mut k = tuple.len();
    while k > 0 {
        k -= 1;
        if tuple[k] + 1 < radices[k] {
            tuple[k] += 1;
            return true;
        }
        tuple[k] = 0;
    }
    false
}

fn offset(tuple: &[usize], radices: &[usize]) -> usize {
    let mut flat = 0;
    let mut scale = 1;
    for k in (0..tuple.len()).rev() {
        flat += tuple[k] * scale;
        scale *= radices[k];
    }
    flat
}

/// One line-failure transition probability, straight from its definition.
fn line_probability(inhibitors: &[f64], from: usize, to: usize) -> f64 {
    let total: f64 = inhibitors.iter().sum();
    let nofail = 1.0 - total;
    if from == to {
        nofail.max(0.0) + inhibitors[to]
    } else {
        inhibitors[to]
    }
}

/// Every `(u, x)` cell computed independently by scanning all `u'` and
/// keeping those with `F(u') = x`.
pub fn brute_force_cpt(spec: &NoisyGateSpec, budget: u128) -> Result<Factor> {
    let radices: Vec<usize> = spec.inputs().iter().map(Variable::cardinality).collect();
    let size: u128 = radices.iter().map(|&m| m as u128).product();
    if size > budget {
        return Err(Error::BudgetExceeded {
            what: "brute-force compilation",
            size,
            budget,
        });
    }
    let m_x = spec.output().cardinality();
    let rows: Vec<&[f64]> = spec.inhibitors().iter().map(|v| v.probs()).collect();
    let mut table = vec![0.0; size as usize * m_x];

    let mut u = vec![0usize; radices.len()];
    loop {
        for x in 0..m_x {
            let mut cell = 0.0;
            let mut u_prime = vec![0usize; radices.len()];
            loop {
                if spec.function().eval(&u_prime) == x {
                    let mut p = 1.0;
                    for i in 0..radices.len() {
                        p *= line_probability(rows[i], u[i], u_prime[i]);
                    }
                    cell += p;
                }
                if !next_tuple(&mut u_prime, &radices) {
                    break;
                }
            }
            table[offset(&u, &radices) * m_x + x] = cell;
        }
        if !next_tuple(&mut u, &radices) {
            break;
        }
    }
    let mut vars = spec.inputs().to_vec();
    vars.push(spec.output().clone());
    Factor::new(vars, table)
}

/// Normalized joint distribution over every network variable, conditioned
/// on evidence.
#[derive(Debug, Clone, PartialEq)]
pub struct JointTable {
    pub variables: Vec<Variable>,
    pub table: Vec<f64>,
}

impl JointTable {
    pub fn marginal(&self, name: &str) -> Result<Vec<f64>> {
        let pos = self
            .variables
            .iter()
            .position(|v| v.name() == name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))?;
        let radices: Vec<usize> = self.variables.iter().map(Variable::cardinality).collect();
        let mut out = vec![0.0; radices[pos]];
        let mut tuple = vec![0usize; radices.len()];
        for &p in &self.table {
            out[tuple[pos]] += p;
            next_tuple(&mut tuple, &radices);
        }
        Ok(out)
    }
}

/// Product of every node's table (noisy gates via [`brute_force_cpt`]) over
/// the full joint space, with evidence-inconsistent entries dropped.
pub fn brute_force_joint(net: &Network, evidence: &Evidence) -> Result<JointTable> {
    let variables: Vec<Variable> = net.variables().cloned().collect();
    let radices: Vec<usize> = variables.iter().map(Variable::cardinality).collect();
    let size: u128 = radices.iter().map(|&m| m as u128).product();
    if size > JOINT_LIMIT {
        return Err(Error::BudgetExceeded {
            what: "joint enumeration",
            size,
            budget: JOINT_LIMIT,
        });
    }
    let position = |name: &str| {
        variables
            .iter()
            .position(|v| v.name() == name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    };

    // (scope positions in the joint, scope radices, table)
    let mut tables: Vec<(Vec<usize>, Vec<usize>, Vec<f64>)> = Vec::new();
    for node in net.nodes() {
        let table = match node.backing() {
            Backing::Cpt(f) => f.table().to_vec(),
            Backing::NoisyGate(spec) => brute_force_cpt(spec, JOINT_LIMIT)?.into_table(),
        };
        let mut scope = Vec::new();
        for p in node.parents() {
            scope.push(position(p.name())?);
        }
        scope.push(position(node.name())?);
        let scope_radices = scope.iter().map(|&i| radices[i]).collect();
        tables.push((scope, scope_radices, table));
    }
    let observed: Vec<(usize, usize)> = evidence
        .iter()
        .map(|(n, s)| position(n).map(|p| (p, s)))
        .collect::<Result<_>>()?;

    let mut joint = vec![0.0; size as usize];
    let mut tuple = vec![0usize; radices.len()];
    let mut local = Vec::new();
    for cell in joint.iter_mut() {
        if observed.iter().all(|&(p, s)| tuple[p] == s) {
            let mut prob = 1.0;
            for (scope, scope_radices, table) in &tables {
                local.clear();
                local.extend(scope.iter().map(|&i| tuple[i]));
                prob *= table[offset(&local, scope_radices)];
            }
            *cell = prob;
        }
        next_tuple(&mut tuple, &radices);
    }
    let total: f64 = joint.iter().sum();
    if total.is_nan() || total <= 0.0 {
        return Err(Error::ImpossibleEvidence);
    }
    for p in joint.iter_mut() {
        *p /= total;
    }
    Ok(JointTable {
        variables,
        table: joint,
    })
}

/// `P(target | evidence)` from the fully materialized joint.
pub fn brute_force_marginal(net: &Network, evidence: &Evidence, target: &str) -> Result<Vec<f64>> {
    brute_force_joint(net, evidence)?.marginal(target)
}

/// Exact two-terminal answers by enumerating every up/down link
/// configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkStateSummary {
    /// Probability that at least one source-to-target path is live.
    pub connectivity: f64,
    /// `histogram[k]`: probability of exactly `k` live paths.
    pub histogram: Vec<f64>,
}

fn count_paths(adjacency: &[Vec<usize>], at: usize, target: usize) -> usize {
    if at == target {
        return 1;
    }
    adjacency[at]
        .iter()
        .map(|&next| count_paths(adjacency, next, target))
        .sum()
}

pub fn enumerate_link_states(graph: &LinkGraph, max_links: usize) -> Result<LinkStateSummary> {
    let links = graph.links();
    if links.len() > max_links {
        return Err(Error::BudgetExceeded {
            what: "link-state enumeration",
            size: links.len() as u128,
            budget: max_links as u128,
        });
    }
    let index = |name: &str| graph.nodes().iter().position(|n| n == name).expect("validated node");
    let ends: Vec<(usize, usize)> = links.iter().map(|l| (index(&l.from), index(&l.to))).collect();
    let (source, target) = (index(graph.source()), index(graph.target()));

    let mut all_up = vec![Vec::new(); graph.nodes().len()];
    for &(a, b) in &ends {
        all_up[a].push(b);
    }
    let max_paths = count_paths(&all_up, source, target);

    let mut histogram = vec![0.0; max_paths + 1];
    let mut connectivity = 0.0;
    for mask in 0u64..(1u64 << links.len()) {
        let mut prob = 1.0;
        let mut adjacency = vec![Vec::new(); graph.nodes().len()];
        for (k, l) in links.iter().enumerate() {
            if mask >> k & 1 == 1 {
                prob *= 1.0 - l.failure;
                adjacency[ends[k].0].push(ends[k].1);
            } else {
                prob *= l.failure;
            }
        }
        let paths = count_paths(&adjacency, source, target);
        histogram[paths] += prob;
        if paths > 0 {
            connectivity += prob;
        }
    }
    Ok(LinkStateSummary {
        connectivity,
        histogram,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gate::GateFunction;
    use crate::network::NodeSpec;
    use crate::noisy::InhibitorVector;
    use crate::reliability::Link;

    #[test]
    fn zero_inhibitors_give_indicator() {
        let f = GateFunction::boolean_or(2);
        let spec = NoisyGateSpec::new(
            vec![Variable::boolean("A"), Variable::boolean("B")],
            vec![InhibitorVector::zero(2), InhibitorVector::zero(2)],
            f,
            Variable::boolean("X"),
        )
        .unwrap();
        let cpt = brute_force_cpt(&spec, JOINT_LIMIT).unwrap();
        assert_eq!(cpt.table(), &[1.0, 0.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0]);
    }

    #[test]
    fn identity_gate_is_line_matrix() {
        let spec = NoisyGateSpec::from_rows(
            vec![Variable::with_cardinality("U", 3).unwrap()],
            vec![vec![0.1, 0.2, 0.05]],
            GateFunction::truth_table(&[3], 3, vec![0, 1, 2]).unwrap(),
            Variable::with_cardinality("X", 3).unwrap(),
        )
        .unwrap();
        let cpt = brute_force_cpt(&spec, JOINT_LIMIT).unwrap();
        // nofail 0.65
        let expected = [0.75, 0.2, 0.05, 0.1, 0.85, 0.05, 0.1, 0.2, 0.7];
        for (a, b) in cpt.table().iter().zip(expected) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn root_only_marginal() {
        let net = Network::from_nodes(vec![NodeSpec::root(Variable::boolean("A"), vec![0.25, 0.75]).unwrap()]);
        assert_eq!(
            brute_force_marginal(&net, &Evidence::new(), "A").unwrap(),
            vec![0.25, 0.75]
        );
    }

    #[test]
    fn two_node_posterior() {
        let a = Variable::boolean("A");
        let x = NoisyGateSpec::boolean_noisy_or(vec![a.clone()], Variable::boolean("X"), &[0.5]).unwrap();
        let net = Network::from_nodes(vec![NodeSpec::root(a, vec![0.7, 0.3]).unwrap(), NodeSpec::noisy(x)]);
        let e = Evidence::new().with("X", 1).unwrap();
        let m = brute_force_marginal(&net, &e, "A").unwrap();
        assert!((m[1] - 1.0).abs() < 1e-15);
        let bad = Evidence::new().with("X", 1).unwrap().with("A", 0).unwrap();
        assert_eq!(brute_force_marginal(&net, &bad, "A"), Err(Error::ImpossibleEvidence));
    }

    fn g(nodes: &[&str], links: &[(&str, &str, f64)], s: &str, t: &str) -> LinkGraph {
        LinkGraph::new(
            nodes.iter().map(|n| n.to_string()).collect(),
            links.iter().map(|&(a, b, l)| Link::new(a, b, l)).collect(),
            s,
            t,
        )
        .unwrap()
    }

    #[test]
    fn link_state_examples() {
        let single = enumerate_link_states(&g(&["A", "B"], &[("A", "B", 0.1)], "A", "B"), 24).unwrap();
        assert!((single.connectivity - 0.9).abs() < 1e-15);
        assert!((single.histogram[0] - 0.1).abs() < 1e-15);

        let series =
            enumerate_link_states(&g(&["A", "B", "C"], &[("A", "B", 0.1), ("B", "C", 0.2)], "A", "C"), 24).unwrap();
        assert!((series.connectivity - 0.72).abs() < 1e-15);

        let diamond = enumerate_link_states(
            &g(
                &["A", "B", "C", "D"],
                &[("A", "B", 0.5), ("A", "C", 0.5), ("B", "D", 0.5), ("C", "D", 0.5)],
                "A",
                "D",
            ),
            24,
        )
        .unwrap();
        assert_eq!(diamond.histogram, vec![0.5625, 0.375, 0.0625]);
        assert!((diamond.histogram[0] + diamond.connectivity - 1.0).abs() < 1e-12);
    }

    #[test]
    fn link_cap() {
        let graph = g(&["A", "B"], &[("A", "B", 0.1)], "A", "B");
        assert!(enumerate_link_states(&graph, 0).is_err());
    }
}
