//! Seeded generators for gates, networks and link graphs.
//!
//! Used by property tests and by `verify` in the command-line tool. All
//! generators take a [`ChaCha8Rng`] so runs are reproducible across
//! platforms for a given seed.

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::gate::GateFunction;
use crate::index::JointStates;
use crate::network::{Network, NodeSpec};
use crate::noisy::{InhibitorVector, NoisyGateSpec};
use crate::reliability::{Link, LinkGraph};
use crate::variable::{Evidence, Variable};

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random point of the probability simplex with `len` entries.
pub fn probability_vector(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..len).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / total).collect()
}

/// Inhibitor row with a random no-fail share. Occasionally exact zeros.
pub fn inhibitor_vector(rng: &mut ChaCha8Rng, cardinality: usize) -> InhibitorVector {
    let mut row = probability_vector(rng, cardinality + 1);
    row.pop();
    for p in row.iter_mut() {
        if rng.gen_bool(0.15) {
            *p = 0.0;
        }
    }
    InhibitorVector::new(row).expect("row sums below one")
}

fn truth_table_function(rng: &mut ChaCha8Rng, cards: &[usize], m_x: usize) -> GateFunction {
    let size: usize = cards.iter().product();
    let mut table: Vec<usize> = (0..size).map(|_| rng.gen_range(0..m_x)).collect();
    if size >= m_x && rng.gen_bool(0.5) {
        let mut slots: Vec<usize> = (0..size).collect();
        slots.shuffle(rng);
        for (x, &slot) in slots.iter().take(m_x).enumerate() {
            table[slot] = x;
        }
    }
    GateFunction::truth_table(cards, m_x, table).expect("entries within range")
}

/// Random gate function over `cards` with `m_x` output states.
pub fn gate_function(rng: &mut ChaCha8Rng, cards: &[usize], m_x: usize) -> GateFunction {
    let add_card = 1 + cards.iter().map(|m| m.saturating_sub(1)).sum::<usize>();
    let all_boolean = cards.iter().all(|&m| m == 2) && m_x == 2;
    let nary = cards.iter().all(|&m| m >= 2) && m_x >= 2;
    match rng.gen_range(0..4) {
        0 if nary => GateFunction::weighted_average(cards, m_x).expect("valid cardinalities"),
        1 if add_card == m_x => GateFunction::integer_add(cards, m_x).expect("matching output cardinality"),
        2 if all_boolean => GateFunction::boolean_or(cards.len()),
        _ => truth_table_function(rng, cards, m_x),
    }
}

/// Random noisy gate with at most `max_inputs` inputs of at most
/// `max_card` states and an output of at most `max_out` states.
pub fn noisy_gate_spec(rng: &mut ChaCha8Rng, max_inputs: usize, max_card: usize, max_out: usize) -> NoisyGateSpec {
    let n = rng.gen_range(1..=max_inputs);
    let cards: Vec<usize> = (0..n).map(|_| rng.gen_range(2..=max_card)).collect();
    let add_card = 1 + cards.iter().map(|m| m - 1).sum::<usize>();
    let m_x = if add_card <= max_out && rng.gen_bool(0.25) {
        add_card
    } else {
        rng.gen_range(2..=max_out)
    };
    let inputs: Vec<Variable> = cards
        .iter()
        .enumerate()
        .map(|(i, &m)| Variable::with_cardinality(format!("U{i}"), m).expect("valid"))
        .collect();
    let inhibitors = cards.iter().map(|&m| inhibitor_vector(rng, m)).collect();
    let function = gate_function(rng, &cards, m_x);
    let output = Variable::with_cardinality("X", m_x).expect("valid");
    NoisyGateSpec::new(inputs, inhibitors, function, output).expect("consistent spec")
}

/// Boolean noisy-or over up to `max_inputs` inputs.
pub fn boolean_noisy_or_spec(rng: &mut ChaCha8Rng, max_inputs: usize) -> NoisyGateSpec {
    let n = rng.gen_range(1..=max_inputs);
    let inputs = (0..n).map(|i| Variable::boolean(format!("U{i}"))).collect();
    let q: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
    NoisyGateSpec::boolean_noisy_or(inputs, Variable::boolean("X"), &q).expect("valid noisy-or")
}

/// Weighted-average gate with n-ary inputs, Boolean output and lines
/// failing only to state 0. Joint input states are kept at or below
/// `max_states`.
pub fn nary_boolean_output_spec(
    rng: &mut ChaCha8Rng,
    max_inputs: usize,
    max_card: usize,
    max_states: usize,
) -> NoisyGateSpec {
    let n = rng.gen_range(1..=max_inputs);
    let mut cards = Vec::with_capacity(n);
    let mut size = 1;
    for _ in 0..n {
        let mut m = rng.gen_range(2..=max_card);
        while m > 2 && size * m > max_states {
            m -= 1;
        }
        if size * m > max_states {
            break;
        }
        size *= m;
        cards.push(m);
    }
    let inputs = cards
        .iter()
        .enumerate()
        .map(|(i, &m)| Variable::with_cardinality(format!("U{i}"), m).expect("valid"))
        .collect();
    let inhibitors = cards
        .iter()
        .map(|&m| InhibitorVector::fails_to_zero(m, rng.gen_range(0.0..1.0)).expect("probability"))
        .collect();
    let function = GateFunction::weighted_average(&cards, 2).expect("valid cardinalities");
    NoisyGateSpec::new(inputs, inhibitors, function, Variable::boolean("X")).expect("consistent spec")
}

/// Random CPT rows for `variable` given `parents`, strictly positive.
pub fn cpt_table(rng: &mut ChaCha8Rng, variable: &Variable, parents: &[Variable]) -> Vec<f64> {
    let rows: usize = parents.iter().map(Variable::cardinality).product();
    (0..rows)
        .flat_map(|_| probability_vector(rng, variable.cardinality()))
        .collect()
}

/// Random network of at most `max_nodes` nodes with cardinality at most
/// `max_card`, mixing explicit tables and noisy gates.
pub fn network(rng: &mut ChaCha8Rng, max_nodes: usize, max_card: usize) -> Network {
    let count = rng.gen_range(2..=max_nodes.max(2));
    let mut vars: Vec<Variable> = Vec::with_capacity(count);
    let mut net = Network::new();
    for i in 0..count {
        let v = Variable::with_cardinality(format!("N{i}"), rng.gen_range(2..=max_card.max(2))).expect("valid");
        let max_parents = i.min(3);
        let k = if i == 0 { 0 } else { rng.gen_range(0..=max_parents) };
        let parents: Vec<Variable> = vars.choose_multiple(rng, k).cloned().collect();
        let node = if parents.is_empty() {
            NodeSpec::root(v.clone(), probability_vector(rng, v.cardinality())).expect("valid root")
        } else if rng.gen_bool(0.5) {
            let cards: Vec<usize> = parents.iter().map(Variable::cardinality).collect();
            let inhibitors = cards.iter().map(|&m| inhibitor_vector(rng, m)).collect();
            let function = gate_function(rng, &cards, v.cardinality());
            NodeSpec::noisy(NoisyGateSpec::new(parents, inhibitors, function, v.clone()).expect("consistent gate"))
        } else {
            let table = cpt_table(rng, &v, &parents);
            NodeSpec::with_cpt(v.clone(), parents, table).expect("valid table")
        };
        net.add_node(node).expect("acyclic by construction");
        vars.push(v);
    }
    net
}

/// Observes a random subset of at most `max_observed` variables.
pub fn evidence(rng: &mut ChaCha8Rng, net: &Network, max_observed: usize) -> Evidence {
    let vars: Vec<&Variable> = net.variables().collect();
    let k = rng.gen_range(0..=max_observed.min(vars.len()));
    let mut e = Evidence::new();
    for v in vars.choose_multiple(rng, k) {
        e.observe(v.name(), rng.gen_range(0..v.cardinality()))
            .expect("fresh variable");
    }
    e
}

/// Random DAG with at most `max_links` links, source `N0` and target the
/// last node.
pub fn link_graph(rng: &mut ChaCha8Rng, max_nodes: usize, max_links: usize) -> LinkGraph {
    let count = rng.gen_range(2..=max_nodes.max(2));
    let nodes: Vec<String> = (0..count).map(|i| format!("N{i}")).collect();
    let mut pairs: Vec<(usize, usize)> = (0..count).flat_map(|i| (i + 1..count).map(move |j| (i, j))).collect();
    pairs.shuffle(rng);
    let take = rng.gen_range(1..=max_links.min(pairs.len()));
    let links = pairs[..take]
        .iter()
        .map(|&(i, j)| {
            let failure = match rng.gen_range(0..10) {
                0 => 0.0,
                1 => 1.0,
                _ => rng.gen_range(0.0..1.0),
            };
            Link::new(nodes[i].clone(), nodes[j].clone(), failure)
        })
        .collect();
    let target = nodes[count - 1].clone();
    LinkGraph::new(nodes, links, "N0", target).expect("acyclic by construction")
}

/// Every input tuple of `f`, in canonical order.
pub fn input_tuples(f: &GateFunction) -> JointStates {
    JointStates::new(f.input_cardinalities())
}
