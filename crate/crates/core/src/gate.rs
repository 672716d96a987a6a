//! Deterministic gate functions mapping joint input indices to an output
//! index.

use crate::error::{Error, Result};
use crate::index::{state_space_size, JointStates};

/// Default cap on enumerated joint input states.
pub const DEFAULT_BUDGET: u128 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
enum Kind {
    BooleanOr,
    /// Exact-rational weighted average. `weights[i]` is the product of
    /// `(m_k - 1)` over every `k != i`; `denominator` is `n * prod(m_i - 1)`.
    WeightedAverage {
        weights: Vec<u128>,
        denominator: u128,
    },
    IntegerAdd,
    TruthTable(Vec<usize>),
}

/// A total function from index vectors (one index per input) to an output
/// index in `0..output_cardinality`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GateFunction {
    input_cardinalities: Vec<usize>,
    output_cardinality: usize,
    kind: Kind,
}

impl GateFunction {
    /// Boolean OR over `n` Boolean inputs.
    pub fn boolean_or(n: usize) -> Self {
        GateFunction {
            input_cardinalities: vec![2; n],
            output_cardinality: 2,
            kind: Kind::BooleanOr,
        }
    }

    /// Boolean OR with declared cardinalities; rejects non-Boolean ones.
    pub fn boolean_or_checked(input_cardinalities: &[usize], output_cardinality: usize) -> Result<Self> {
        if input_cardinalities.iter().any(|&m| m != 2) || output_cardinality != 2 {
            return Err(Error::InvalidGate(
                "boolean OR requires Boolean inputs and output".into(),
            ));
        }
        Ok(Self::boolean_or(input_cardinalities.len()))
    }

    /// Ceiling of the output-scaled mean of each input's index fraction
    /// `j_i / (m_i - 1)`, evaluated exactly in integers.
    pub fn weighted_average(input_cardinalities: &[usize], output_cardinality: usize) -> Result<Self> {
        if input_cardinalities.is_empty() {
            return Err(Error::InvalidGate("weighted-average needs at least one input".into()));
        }
        if input_cardinalities.iter().any(|&m| m < 2) {
            return Err(Error::InvalidGate(
                "weighted-average undefined for single-state input".into(),
            ));
        }
        if output_cardinality < 2 {
            return Err(Error::InvalidGate(
                "weighted-average needs an output with at least two states".into(),
            ));
        }
        let overflow = || Error::InvalidGate("weighted-average arity too large".into());
        let spans: Vec<u128> = input_cardinalities.iter().map(|&m| (m - 1) as u128).collect();
        let mut weights = Vec::with_capacity(spans.len());
        for i in 0..spans.len() {
            let w = spans
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != i)
                .try_fold(1u128, |acc, (_, &s)| acc.checked_mul(s))
                .ok_or_else(overflow)?;
            weights.push(w);
        }
        let denominator = spans
            .iter()
            .try_fold(spans.len() as u128, |acc, &s| acc.checked_mul(s))
            .ok_or_else(overflow)?;
        // largest numerator: (m_x - 1) * n * prod(m_i - 1)
        denominator
            .checked_mul((output_cardinality - 1) as u128)
            .ok_or_else(overflow)?;
        Ok(GateFunction {
            input_cardinalities: input_cardinalities.to_vec(),
            output_cardinality,
            kind: Kind::WeightedAverage { weights, denominator },
        })
    }

    /// Sum of input indices. The output must have exactly
    /// `1 + sum(m_i - 1)` states.
    pub fn integer_add(input_cardinalities: &[usize], output_cardinality: usize) -> Result<Self> {
        if input_cardinalities.contains(&0) {
            return Err(Error::InvalidGate("zero-state input".into()));
        }
        let needed = 1 + input_cardinalities.iter().map(|m| m - 1).sum::<usize>();
        if output_cardinality != needed {
            return Err(Error::InvalidGate(format!(
                "integer addition needs {needed} output states, got {output_cardinality}"
            )));
        }
        Ok(GateFunction {
            input_cardinalities: input_cardinalities.to_vec(),
            output_cardinality,
            kind: Kind::IntegerAdd,
        })
    }

    /// Explicit output-index array in canonical mixed-radix layout.
    pub fn truth_table(input_cardinalities: &[usize], output_cardinality: usize, table: Vec<usize>) -> Result<Self> {
        if output_cardinality == 0 || input_cardinalities.contains(&0) {
            return Err(Error::InvalidGate("zero-state variable".into()));
        }
        let size = state_space_size(input_cardinalities)
            .filter(|&s| s <= usize::MAX as u128)
            .ok_or_else(|| Error::InvalidGate("truth table too large".into()))?;
        if table.len() as u128 != size {
            return Err(Error::InvalidGate(format!(
                "truth table has {} entries, expected {size}",
                table.len()
            )));
        }
        if let Some(bad) = table.iter().find(|&&x| x >= output_cardinality) {
            return Err(Error::InvalidGate(format!(
                "truth table entry {bad} out of range for {output_cardinality} output states"
            )));
        }
        Ok(GateFunction {
            input_cardinalities: input_cardinalities.to_vec(),
            output_cardinality,
            kind: Kind::TruthTable(table),
        })
    }

    /// Tabulates `f` over the input space.
    pub fn from_fn<F>(input_cardinalities: &[usize], output_cardinality: usize, f: F) -> Result<Self>
    where
        F: Fn(&[usize]) -> usize,
    {
        let table = JointStates::new(input_cardinalities).map(|u| f(&u)).collect();
        Self::truth_table(input_cardinalities, output_cardinality, table)
    }

    pub fn input_cardinalities(&self) -> &[usize] {
        &self.input_cardinalities
    }

    pub fn output_cardinality(&self) -> usize {
        self.output_cardinality
    }

    pub fn arity(&self) -> usize {
        self.input_cardinalities.len()
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            Kind::BooleanOr => "or",
            Kind::WeightedAverage { .. } => "weighted_average",
            Kind::IntegerAdd => "add",
            Kind::TruthTable(_) => "truth_table",
        }
    }

    pub fn truth_table_entries(&self) -> Option<&[usize]> {
        match &self.kind {
            Kind::TruthTable(t) => Some(t),
            _ => None,
        }
    }

    /// True when the function is Boolean OR on Boolean variables, whether
    /// declared as such or as a weighted average.
    pub fn is_boolean_or(&self) -> bool {
        let all_boolean = self.output_cardinality == 2 && self.input_cardinalities.iter().all(|&m| m == 2);
        match self.kind {
            Kind::BooleanOr => true,
            Kind::WeightedAverage { .. } => all_boolean,
            _ => false,
        }
    }

    pub fn is_weighted_average(&self) -> bool {
        matches!(self.kind, Kind::WeightedAverage { .. })
    }

    pub fn eval(&self, indices: &[usize]) -> usize {
        debug_assert_eq!(indices.len(), self.input_cardinalities.len());
        match &self.kind {
            Kind::BooleanOr => usize::from(indices.iter().any(|&j| j != 0)),
            Kind::WeightedAverage { weights, denominator } => {
                let sum: u128 = indices.iter().zip(weights).map(|(&j, &w)| j as u128 * w).sum();
                let numerator = (self.output_cardinality - 1) as u128 * sum;
                numerator.div_ceil(*denominator) as usize
            }
            Kind::IntegerAdd => indices.iter().sum(),
            Kind::TruthTable(table) => {
                let mut flat = 0;
                for (&j, &m) in indices.iter().zip(&self.input_cardinalities) {
                    flat = flat * m + j;
                }
                table[flat]
            }
        }
    }

    /// Range-checked evaluation.
    pub fn try_eval(&self, indices: &[usize]) -> Result<usize> {
        if indices.len() != self.arity() {
            return Err(Error::LengthMismatch {
                expected: self.arity(),
                actual: indices.len(),
            });
        }
        for (position, (&index, &radix)) in indices.iter().zip(&self.input_cardinalities).enumerate() {
            if index >= radix {
                return Err(Error::IndexOutOfRange { position, index, radix });
            }
        }
        Ok(self.eval(indices))
    }

    pub fn input_space_size(&self) -> u128 {
        state_space_size(&self.input_cardinalities).unwrap_or(u128::MAX)
    }

    fn check_budget(&self, what: &'static str, budget: u128) -> Result<()> {
        let size = self.input_space_size();
        if size > budget {
            return Err(Error::BudgetExceeded { what, size, budget });
        }
        Ok(())
    }

    /// Whether every output state has a nonempty preimage.
    pub fn check_onto(&self, budget: u128) -> Result<bool> {
        self.check_budget("onto-check", budget)?;
        let mut hit = vec![false; self.output_cardinality];
        let mut remaining = self.output_cardinality;
        for u in JointStates::new(&self.input_cardinalities) {
            let x = self.eval(&u);
            if !hit[x] {
                hit[x] = true;
                remaining -= 1;
                if remaining == 0 {
                    return Ok(true);
                }
            }
        }
        Ok(false)
    }

    /// Preimage of `x` by exhaustive enumeration, in canonical order.
    pub fn invert_default(&self, x: usize, budget: u128) -> Result<Vec<Vec<usize>>> {
        self.check_budget("inversion", budget)?;
        Ok(JointStates::new(&self.input_cardinalities)
            .filter(|u| self.eval(u) == x)
            .collect())
    }

    /// Specialized preimage of `x` in canonical order, where the function
    /// kind has one. Weighted averages have none.
    pub fn invert(&self, x: usize) -> Option<Vec<Vec<usize>>> {
        match &self.kind {
            Kind::BooleanOr => Some(match x {
                0 => vec![vec![0; self.arity()]],
                1 => JointStates::new(&self.input_cardinalities).skip(1).collect(),
                _ => Vec::new(),
            }),
            Kind::IntegerAdd => {
                let mut out = Vec::new();
                let mut prefix = Vec::with_capacity(self.arity());
                compositions(&self.input_cardinalities, x, &mut prefix, &mut out);
                Some(out)
            }
            Kind::TruthTable(table) => {
                let radices = &self.input_cardinalities;
                Some(
                    table
                        .iter()
                        .enumerate()
                        .filter(|&(_, &y)| y == x)
                        .map(|(flat, _)| crate::index::decode_mixed_radix(flat, radices))
                        .collect(),
                )
            }
            Kind::WeightedAverage { .. } => None,
        }
    }

    pub fn has_invert(&self) -> bool {
        !self.is_weighted_average()
    }
}

// tuples with u_i < radices[i] summing to `remaining`, lexicographic order
fn compositions(radices: &[usize], remaining: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    let depth = prefix.len();
    if depth == radices.len() {
        if remaining == 0 {
            out.push(prefix.clone());
        }
        return;
    }
    let capacity_after: usize = radices[depth + 1..].iter().map(|m| m - 1).sum();
    let lo = remaining.saturating_sub(capacity_after);
    let hi = remaining.min(radices[depth] - 1);
    for j in lo..=hi {
        prefix.push(j);
        compositions(radices, remaining - j, prefix, out);
        prefix.pop();
    }
}
