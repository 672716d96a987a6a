//! Gate-level circuit diagnosis with noisy gates.
//!
//! Each wire branch feeding a device is an unreliable line: it fails with
//! the wire's failure probability and then delivers the fault state
//! (false by default). A device may also fail as a whole. This is modelled
//! by an extra Boolean parent `<gate>_f` with a prior of `(1 - p, p)`, a
//! failure-free line, and a truth table that outputs the failed state
//! whenever `<gate>_f` is `failed`.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::gate::GateFunction;
use crate::index::JointStates;
use crate::inference::{eliminate, MarginalSet};
use crate::network::{CompiledNetwork, Network, NodeSpec};
use crate::noisy::{InhibitorVector, NoisyGateSpec};
use crate::variable::{Evidence, Variable};

/// Failure probability used by the demo circuit on every line.
pub const DEMO_LINE_FAILURE: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GateKind {
    And,
    Or,
    Not,
    Nand,
    Nor,
    Xor,
    /// Output index per input tuple in canonical order (`2^n` entries).
    Table(Vec<usize>),
}

impl GateKind {
    pub fn parse(name: &str) -> Option<Self> {
        Some(match name.to_ascii_lowercase().as_str() {
            "and" => GateKind::And,
            "or" => GateKind::Or,
            "not" => GateKind::Not,
            "nand" => GateKind::Nand,
            "nor" => GateKind::Nor,
            "xor" => GateKind::Xor,
            _ => return None,
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            GateKind::And => "and",
            GateKind::Or => "or",
            GateKind::Not => "not",
            GateKind::Nand => "nand",
            GateKind::Nor => "nor",
            GateKind::Xor => "xor",
            GateKind::Table(_) => "truth_table",
        }
    }

    /// Boolean truth table for `arity` inputs.
    pub fn function(&self, arity: usize) -> Result<GateFunction> {
        if arity == 0 {
            return Err(Error::InvalidCircuit("gates need at least one input".into()));
        }
        let cards = vec![2; arity];
        let ones = |u: &[usize]| u.iter().filter(|&&b| b == 1).count();
        let f: fn(usize, usize) -> bool = match self {
            GateKind::And => |k, n| k == n,
            GateKind::Or => |k, _| k > 0,
            GateKind::Nand => |k, n| k != n,
            GateKind::Nor => |k, _| k == 0,
            GateKind::Xor => |k, _| k % 2 == 1,
            GateKind::Not => {
                if arity != 1 {
                    return Err(Error::InvalidCircuit("NOT takes exactly one input".into()));
                }
                |k, _| k == 0
            }
            GateKind::Table(t) => return GateFunction::truth_table(&cards, 2, t.clone()),
        };
        GateFunction::from_fn(&cards, 2, |u| usize::from(f(ones(u), arity)))
    }

    /// The built-in gate kinds.
    pub fn library() -> [GateKind; 6] {
        [
            GateKind::And,
            GateKind::Or,
            GateKind::Not,
            GateKind::Nand,
            GateKind::Nor,
            GateKind::Xor,
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CircuitGate {
    /// Name of the gate and of its output wire.
    pub name: String,
    pub kind: GateKind,
    pub inputs: Vec<String>,
}

impl CircuitGate {
    pub fn new<S: Into<String>>(name: S, kind: GateKind, inputs: &[&str]) -> Self {
        CircuitGate {
            name: name.into(),
            kind,
            inputs: inputs.iter().map(|s| s.to_string()).collect(),
        }
    }
}

/// Combinational gate-level circuit.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    pub primary_inputs: Vec<String>,
    pub gates: Vec<CircuitGate>,
    /// Failure probability for wires without an entry in `line_failure`.
    pub default_line_failure: f64,
    pub line_failure: BTreeMap<String, f64>,
    /// Priors for primary inputs; uniform when absent.
    pub input_marginals: BTreeMap<String, Vec<f64>>,
}

impl Circuit {
    pub fn new(primary_inputs: &[&str], gates: Vec<CircuitGate>, default_line_failure: f64) -> Self {
        Circuit {
            primary_inputs: primary_inputs.iter().map(|s| s.to_string()).collect(),
            gates,
            default_line_failure,
            line_failure: BTreeMap::new(),
            input_marginals: BTreeMap::new(),
        }
    }

    pub fn line_failure_of(&self, wire: &str) -> f64 {
        self.line_failure
            .get(wire)
            .copied()
            .unwrap_or(self.default_line_failure)
    }

    /// Gates with inputs before consumers; errors on cycles or unresolved
    /// wires.
    pub fn gate_order(&self) -> Result<Vec<&CircuitGate>> {
        let mut wires: BTreeSet<&str> = BTreeSet::new();
        for w in self.primary_inputs.iter().chain(self.gates.iter().map(|g| &g.name)) {
            if !wires.insert(w) {
                return Err(Error::InvalidCircuit(format!("wire `{w}` driven twice")));
            }
        }
        for g in &self.gates {
            for (i, w) in g.inputs.iter().enumerate() {
                if !wires.contains(w.as_str()) {
                    return Err(Error::InvalidCircuit(format!(
                        "gate `{}` reads undriven wire `{w}`",
                        g.name
                    )));
                }
                if g.inputs[..i].contains(w) {
                    return Err(Error::InvalidCircuit(format!("gate `{}` reads `{w}` twice", g.name)));
                }
            }
        }
        let mut done: BTreeSet<&str> = self.primary_inputs.iter().map(String::as_str).collect();
        let mut order = Vec::with_capacity(self.gates.len());
        let mut pending: Vec<&CircuitGate> = self.gates.iter().collect();
        while !pending.is_empty() {
            let before = pending.len();
            let mut still = Vec::new();
            for g in pending {
                if g.inputs.iter().all(|w| done.contains(w.as_str())) {
                    done.insert(&g.name);
                    order.push(g);
                } else {
                    still.push(g);
                }
            }
            if still.len() == before {
                return Err(Error::Cycle(still[0].name.clone()));
            }
            pending = still;
        }
        Ok(order)
    }

    fn validate(&self) -> Result<Vec<&CircuitGate>> {
        let in_range = |p: f64| (0.0..=1.0).contains(&p);
        if !in_range(self.default_line_failure) || !self.line_failure.values().all(|&p| in_range(p)) {
            return Err(Error::InvalidCircuit(
                "line failure probabilities must lie in [0, 1]".into(),
            ));
        }
        for (w, m) in &self.input_marginals {
            if !self.primary_inputs.contains(w) {
                return Err(Error::InvalidCircuit(format!("marginal for non-input wire `{w}`")));
            }
            if m.len() != 2 {
                return Err(Error::InvalidCircuit(format!("marginal for `{w}` needs two entries")));
            }
        }
        self.gate_order()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviceFailure {
    pub probability: f64,
    /// Output state of a broken device.
    pub failed_state: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct FaultModel {
    /// State delivered by a failed line (0 = false).
    pub line_fault_state: usize,
    pub device_failure: BTreeMap<String, DeviceFailure>,
}

/// Name of the device-failure variable for `gate`.
pub fn device_failure_variable(gate: &str) -> String {
    format!("{gate}_f")
}

fn device_failure_states(name: String) -> Variable {
    Variable::new(name, vec!["ok".into(), "failed".into()]).expect("valid states")
}

/// Noisy-gate network with one Boolean variable per wire (plus one per
/// failing device).
pub fn build_circuit_model(circuit: &Circuit, faults: &FaultModel) -> Result<Network> {
    let order = circuit.validate()?;
    if faults.line_fault_state > 1 {
        return Err(Error::InvalidCircuit("line fault state must be 0 or 1".into()));
    }
    for (g, d) in &faults.device_failure {
        if !circuit.gates.iter().any(|c| &c.name == g) {
            return Err(Error::InvalidCircuit(format!("device failure for unknown gate `{g}`")));
        }
        if !(0.0..=1.0).contains(&d.probability) || d.failed_state > 1 {
            return Err(Error::InvalidCircuit(format!("invalid device failure for `{g}`")));
        }
    }

    let mut net = Network::new();
    for w in &circuit.primary_inputs {
        let v = Variable::boolean(w.clone());
        let node = match circuit.input_marginals.get(w) {
            Some(m) => NodeSpec::root(v, m.clone())?,
            None => NodeSpec::uniform_root(v),
        };
        net.add_node(node)?;
    }
    for gate in order {
        let mut parents: Vec<Variable> = gate.inputs.iter().map(|w| Variable::boolean(w.clone())).collect();
        let mut inhibitors = gate
            .inputs
            .iter()
            .map(|w| {
                let mut row = vec![0.0; 2];
                row[faults.line_fault_state] = circuit.line_failure_of(w);
                InhibitorVector::new(row)
            })
            .collect::<Result<Vec<_>>>()?;
        let mut function = gate.kind.function(gate.inputs.len())?;

        if let Some(device) = faults.device_failure.get(&gate.name) {
            let flag = device_failure_variable(&gate.name);
            if net.node(&flag).is_some() || circuit.gates.iter().any(|g| g.name == flag) {
                return Err(Error::InvalidCircuit(format!("name clash on `{flag}`")));
            }
            let flag_var = device_failure_states(flag);
            net.add_node(NodeSpec::root(
                flag_var.clone(),
                vec![1.0 - device.probability, device.probability],
            )?)?;
            function = extend_with_device_failure(&function, device.failed_state)?;
            parents.push(flag_var);
            inhibitors.push(InhibitorVector::zero(2));
        }
        let spec = NoisyGateSpec::new(parents, inhibitors, function, Variable::boolean(gate.name.clone()))?;
        net.add_node(NodeSpec::noisy(spec))?;
    }
    Ok(net)
}

/// Appends a Boolean "failed" input: when it is 1 the output is
/// `failed_state`, otherwise `f` applies.
pub fn extend_with_device_failure(f: &GateFunction, failed_state: usize) -> Result<GateFunction> {
    if failed_state >= f.output_cardinality() {
        return Err(Error::InvalidGate(format!("failed state {failed_state} out of range")));
    }
    let mut cards = f.input_cardinalities().to_vec();
    cards.push(2);
    let table = JointStates::new(&cards)
        .map(|u| {
            let (flag, rest) = u.split_last().expect("flag input present");
            if *flag == 1 {
                failed_state
            } else {
                f.eval(rest)
            }
        })
        .collect();
    GateFunction::truth_table(&cards, f.output_cardinality(), table)
}

/// Posteriors over the requested wires and device-failure variables (all
/// variables when `targets` is empty).
pub fn diagnose(net: &CompiledNetwork, evidence: &Evidence, targets: &[String]) -> Result<MarginalSet> {
    eliminate(net, evidence, targets)
}

/// Stand-in three-input circuit: `D = OR(A, B)`, `E = AND(B, C)`,
/// `F = AND(D, E)`, every line failing to false with probability 0.01.
pub fn demo_circuit() -> Circuit {
    Circuit::new(
        &["A", "B", "C"],
        vec![
            CircuitGate::new("D", GateKind::Or, &["A", "B"]),
            CircuitGate::new("E", GateKind::And, &["B", "C"]),
            CircuitGate::new("F", GateKind::And, &["D", "E"]),
        ],
        DEMO_LINE_FAILURE,
    )
}

/// Single inverter `G = NOT(A)` with perfect lines and a device that fails
/// to true with probability 0.1.
pub fn demo_inverter() -> (Circuit, FaultModel) {
    let circuit = Circuit::new(&["A"], vec![CircuitGate::new("G", GateKind::Not, &["A"])], 0.0);
    let mut faults = FaultModel::default();
    faults.device_failure.insert(
        "G".into(),
        DeviceFailure {
            probability: 0.1,
            failed_state: 1,
        },
    );
    (circuit, faults)
}
