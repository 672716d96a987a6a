//! Exact posterior marginals by variable elimination.

use std::collections::BTreeSet;

use indexmap::IndexMap;

use crate::error::{Error, Result};
use crate::factor::Factor;
use crate::network::CompiledNetwork;
use crate::variable::Evidence;

/// Evidence whose probability falls below this is treated as impossible.
pub const MIN_EVIDENCE_PROBABILITY: f64 = 1e-300;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EliminationOrder {
    /// Greedy: repeatedly eliminate the variable with the fewest
    /// neighbours, ties broken by name.
    MinDegree,
    /// Fixed order. Variables not listed are eliminated afterwards by name.
    Explicit(Vec<String>),
}

/// Posterior marginals keyed by variable name.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MarginalSet {
    marginals: IndexMap<String, Vec<f64>>,
}

impl MarginalSet {
    pub fn get(&self, name: &str) -> Option<&[f64]> {
        self.marginals.get(name).map(Vec::as_slice)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[f64])> {
        self.marginals.iter().map(|(k, v)| (k.as_str(), v.as_slice()))
    }

    pub fn len(&self) -> usize {
        self.marginals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.marginals.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct Query<'a> {
    network: &'a CompiledNetwork,
    evidence: Evidence,
    targets: Vec<String>,
    order: EliminationOrder,
}

impl<'a> Query<'a> {
    pub fn new(network: &'a CompiledNetwork) -> Self {
        Query {
            network,
            evidence: Evidence::new(),
            targets: Vec::new(),
            order: EliminationOrder::MinDegree,
        }
    }

    pub fn evidence(mut self, evidence: Evidence) -> Self {
        self.evidence = evidence;
        self
    }

    /// Empty targets means every variable.
    pub fn targets<I, S>(mut self, targets: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.targets = targets.into_iter().map(Into::into).collect();
        self
    }

    pub fn order(mut self, order: EliminationOrder) -> Self {
        self.order = order;
        self
    }

    pub fn run(&self) -> Result<MarginalSet> {
        eliminate_with_order(self.network, &self.evidence, &self.targets, &self.order)
    }
}

/// `P(T | evidence)` for each target `T`.
pub fn eliminate(net: &CompiledNetwork, evidence: &Evidence, targets: &[String]) -> Result<MarginalSet> {
    eliminate_with_order(net, evidence, targets, &EliminationOrder::MinDegree)
}

pub fn eliminate_with_order(
    net: &CompiledNetwork,
    evidence: &Evidence,
    targets: &[String],
    order: &EliminationOrder,
) -> Result<MarginalSet> {
    net.check_evidence(evidence)?;
    let targets: Vec<String> = if targets.is_empty() {
        net.variables().iter().map(|v| v.name().to_string()).collect()
    } else {
        for t in targets {
            if net.variable(t).is_none() {
                return Err(Error::UnknownVariable(t.clone()));
            }
        }
        targets.to_vec()
    };
    let mut marginals = IndexMap::with_capacity(targets.len());
    for target in targets {
        let m = posterior(net, evidence, &target, order)?;
        marginals.insert(target, m);
    }
    Ok(MarginalSet { marginals })
}

fn posterior(net: &CompiledNetwork, evidence: &Evidence, target: &str, order: &EliminationOrder) -> Result<Vec<f64>> {
    // only ancestors of the target and the evidence carry information
    let mut seeds = vec![target.to_string()];
    seeds.extend(evidence.iter().map(|(n, _)| n.to_string()));
    let relevant = ancestral_closure(net, seeds);

    let mut factors: Vec<Factor> = relevant
        .iter()
        .map(|n| net.cpt(n).expect("relevant node exists").apply_evidence(evidence))
        .collect();
    let mut pending: BTreeSet<String> = relevant.into_iter().filter(|n| n != target).collect();

    let explicit: Vec<String> = match order {
        EliminationOrder::MinDegree => Vec::new(),
        EliminationOrder::Explicit(list) => list.iter().filter(|v| pending.contains(*v)).cloned().collect(),
    };
    let mut explicit = explicit.into_iter();

    while !pending.is_empty() {
        let next = match order {
            EliminationOrder::MinDegree => min_degree_variable(&factors, &pending),
            EliminationOrder::Explicit(_) => explicit
                .next()
                .unwrap_or_else(|| pending.first().cloned().expect("nonempty")),
        };
        pending.remove(&next);
        let (touching, rest): (Vec<Factor>, Vec<Factor>) = factors.into_iter().partition(|f| f.contains(&next));
        factors = rest;
        let mut product = Factor::unit();
        for f in &touching {
            product = product.product(f)?;
        }
        factors.push(product.marginalize(&next)?);
    }

    let mut joint = Factor::unit();
    for f in &factors {
        joint = joint.product(f)?;
    }
    debug_assert!(joint.variables().len() == 1 && joint.variables()[0].name() == target);
    let mass = joint.total();
    if mass.is_nan() || mass < MIN_EVIDENCE_PROBABILITY {
        return Err(Error::ImpossibleEvidence);
    }
    Ok(joint.table().iter().map(|p| p / mass).collect())
}

fn ancestral_closure(net: &CompiledNetwork, seeds: Vec<String>) -> BTreeSet<String> {
    let mut closed = BTreeSet::new();
    let mut stack = seeds;
    while let Some(n) = stack.pop() {
        if closed.insert(n.clone()) {
            stack.extend(net.parents(&n).iter().map(|p| p.name().to_string()));
        }
    }
    closed
}

fn min_degree_variable(factors: &[Factor], pending: &BTreeSet<String>) -> String {
    let mut best: Option<(usize, &String)> = None;
    for v in pending {
        let mut neighbours: BTreeSet<&str> = BTreeSet::new();
        for f in factors.iter().filter(|f| f.contains(v)) {
            neighbours.extend(f.variables().iter().map(|w| w.name()));
        }
        let degree = neighbours.len().saturating_sub(1);
        // BTreeSet iteration is by name, so strict < keeps the first name on ties
        if best.is_none_or(|(d, _)| degree < d) {
            best = Some((degree, v));
        }
    }
    best.expect("pending is nonempty").1.clone()
}
