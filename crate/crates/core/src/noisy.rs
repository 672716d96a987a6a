//! Compilation of noisy gates into conditional probability tables.
//!
//! A noisy gate places a line-failure device on every input `U_i`. The
//! device outputs `U'_i`: with probability `inhibitors[i][j]` it fails in
//! state `j` and emits `j` regardless of its input, otherwise it copies its
//! input. A deterministic [`GateFunction`] maps the joint `U'` state to the
//! output `X`. The intermediate `U'` variables are summed out analytically
//! and never appear in the compiled table:
//!
//! ```text
//! P(x | u) = sum over { u' : F(u') = x } of prod_i P_i(u'_i | u_i)
//! ```

use crate::error::{Error, Result};
use crate::factor::Factor;
use crate::gate::{GateFunction, DEFAULT_BUDGET};
use crate::index::{state_space_size, JointStates};
use crate::variable::Variable;

/// Slack allowed on an inhibitor vector's sum before it is rejected.
const INHIBITOR_SUM_SLACK: f64 = 1e-12;

/// Per-state failure probabilities of one input line.
#[derive(Debug, Clone, PartialEq)]
pub struct InhibitorVector {
    probs: Vec<f64>,
}

impl InhibitorVector {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        Self::validated(probs, 0)
    }

    fn validated(probs: Vec<f64>, input: usize) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidInhibitor {
                input,
                reason: "empty".into(),
            });
        }
        if let Some(p) = probs.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::InvalidInhibitor {
                input,
                reason: format!("probability {p} outside [0, 1]"),
            });
        }
        let sum: f64 = probs.iter().sum();
        if sum > 1.0 + INHIBITOR_SUM_SLACK {
            return Err(Error::InvalidInhibitor {
                input,
                reason: format!("probabilities sum to {sum} > 1"),
            });
        }
        Ok(InhibitorVector { probs })
    }

    /// All-zero vector: the line never fails.
    pub fn zero(cardinality: usize) -> Self {
        InhibitorVector {
            probs: vec![0.0; cardinality],
        }
    }

    /// `q` on state 0, zero elsewhere.
    pub fn fails_to_zero(cardinality: usize, q: f64) -> Result<Self> {
        let mut probs = vec![0.0; cardinality];
        probs[0] = q;
        Self::new(probs)
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Probability the line passes its input through.
    pub fn nofail_probability(&self) -> f64 {
        (1.0 - self.probs.iter().sum::<f64>()).max(0.0)
    }

    /// `P(u' | u)` row-major: row `u`, column `u'`.
    pub fn line_matrix(&self) -> Vec<f64> {
        let m = self.probs.len();
        let nofail = self.nofail_probability();
        let mut out = Vec::with_capacity(m * m);
        for u in 0..m {
            for (v, &p) in self.probs.iter().enumerate() {
                out.push(if u == v { nofail + p } else { p });
            }
        }
        out
    }

    /// If the vector is `q` on state 0 and zero elsewhere, returns `q`.
    pub fn zero_state_only(&self) -> Option<f64> {
        self.probs[1..].iter().all(|&p| p == 0.0).then_some(self.probs[0])
    }

    fn all_positive(&self) -> bool {
        self.probs.iter().all(|&p| p > 0.0)
    }
}

pub fn nofail_probability(inhibitors: &InhibitorVector) -> f64 {
    inhibitors.nofail_probability()
}

/// Line distribution `P(U' | U)` as a factor over `[U, U']`, where `U'` is
/// named `"<U>'"` and shares `U`'s states.
pub fn line_distribution(input: &Variable, inhibitors: &InhibitorVector) -> Result<Factor> {
    if input.cardinality() != inhibitors.len() {
        return Err(Error::LengthMismatch {
            expected: input.cardinality(),
            actual: inhibitors.len(),
        });
    }
    let primed = Variable::new(format!("{}'", input.name()), input.states().to_vec())?;
    Factor::new(vec![input.clone(), primed], inhibitors.line_matrix())
}

/// Compile-time description of a noisy gate.
#[derive(Debug, Clone, PartialEq)]
pub struct NoisyGateSpec {
    inputs: Vec<Variable>,
    inhibitors: Vec<InhibitorVector>,
    function: GateFunction,
    output: Variable,
}

impl NoisyGateSpec {
    pub fn new(
        inputs: Vec<Variable>,
        inhibitors: Vec<InhibitorVector>,
        function: GateFunction,
        output: Variable,
    ) -> Result<Self> {
        if inhibitors.len() != inputs.len() {
            return Err(Error::LengthMismatch {
                expected: inputs.len(),
                actual: inhibitors.len(),
            });
        }
        for (i, (u, inh)) in inputs.iter().zip(&inhibitors).enumerate() {
            if inh.len() != u.cardinality() {
                return Err(Error::InvalidInhibitor {
                    input: i,
                    reason: format!(
                        "{} entries for `{}` with {} states",
                        inh.len(),
                        u.name(),
                        u.cardinality()
                    ),
                });
            }
            if inputs[..i].iter().any(|w| w.name() == u.name()) || u.name() == output.name() {
                return Err(Error::DuplicateVariable(u.name().to_string()));
            }
        }
        let cards: Vec<usize> = inputs.iter().map(Variable::cardinality).collect();
        if function.input_cardinalities() != cards.as_slice() {
            return Err(Error::InvalidGate(format!(
                "function input cardinalities {:?} do not match inputs {:?}",
                function.input_cardinalities(),
                cards
            )));
        }
        if function.output_cardinality() != output.cardinality() {
            return Err(Error::InvalidGate(format!(
                "function has {} output states, `{}` has {}",
                function.output_cardinality(),
                output.name(),
                output.cardinality()
            )));
        }
        Ok(NoisyGateSpec {
            inputs,
            inhibitors,
            function,
            output,
        })
    }

    /// Builds a spec from raw inhibitor rows, reporting the offending input.
    pub fn from_rows(
        inputs: Vec<Variable>,
        inhibitors: Vec<Vec<f64>>,
        function: GateFunction,
        output: Variable,
    ) -> Result<Self> {
        let inhibitors = inhibitors
            .into_iter()
            .enumerate()
            .map(|(i, row)| InhibitorVector::validated(row, i))
            .collect::<Result<Vec<_>>>()?;
        Self::new(inputs, inhibitors, function, output)
    }

    /// Classic Boolean noisy-or: line `i` fails to false with probability
    /// `q[i]` and never fails to true.
    pub fn boolean_noisy_or(inputs: Vec<Variable>, output: Variable, q: &[f64]) -> Result<Self> {
        if q.len() != inputs.len() {
            return Err(Error::LengthMismatch {
                expected: inputs.len(),
                actual: q.len(),
            });
        }
        let cards: Vec<usize> = inputs.iter().map(Variable::cardinality).collect();
        let function = GateFunction::boolean_or_checked(&cards, output.cardinality())?;
        let inhibitors = q
            .iter()
            .map(|&qi| InhibitorVector::fails_to_zero(2, qi))
            .collect::<Result<Vec<_>>>()?;
        Self::new(inputs, inhibitors, function, output)
    }

    pub fn inputs(&self) -> &[Variable] {
        &self.inputs
    }

    pub fn inhibitors(&self) -> &[InhibitorVector] {
        &self.inhibitors
    }

    pub fn function(&self) -> &GateFunction {
        &self.function
    }

    pub fn output(&self) -> &Variable {
        &self.output
    }

    /// Joint input state count `S`.
    pub fn input_space_size(&self) -> u128 {
        self.function.input_space_size()
    }

    fn factor_variables(&self) -> Vec<Variable> {
        let mut vars = self.inputs.clone();
        vars.push(self.output.clone());
        vars
    }

    fn check_budget(&self, budget: u128) -> Result<usize> {
        let size = state_space_size(self.function.input_cardinalities()).unwrap_or(u128::MAX);
        if size > budget {
            return Err(Error::BudgetExceeded {
                what: "compilation",
                size,
                budget,
            });
        }
        Ok(size as usize)
    }

    /// Per-input `q_i` when every inhibitor vector fails only to state 0.
    fn zero_state_inhibitors(&self) -> Option<Vec<f64>> {
        self.inhibitors.iter().map(InhibitorVector::zero_state_only).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CompileOptions {
    /// Maximum joint input state count `S` per gate.
    pub budget: u128,
    /// Iterate registered preimages instead of scanning every `u'`.
    pub use_invert: bool,
}

impl Default for CompileOptions {
    fn default() -> Self {
        CompileOptions {
            budget: DEFAULT_BUDGET,
            use_invert: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompilePath {
    BooleanNoisyOr,
    NaryBooleanOutput,
    General,
    GeneralInverted,
}

/// Loop counters recorded during compilation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CompileStats {
    pub path: CompilePath,
    /// Outer iterations, one per parent configuration.
    pub parent_passes: u64,
    /// Inner iterations: `u'` candidates for the general paths, input
    /// factors for the fast paths.
    pub inner_iterations: u64,
}

/// Double loop over parent configurations and `u'` candidates, scanning
/// `u'` in canonical order.
pub fn compile_general(spec: &NoisyGateSpec, options: &CompileOptions) -> Result<Factor> {
    compile_general_with_stats(spec, options).map(|(f, _)| f)
}

pub fn compile_general_with_stats(spec: &NoisyGateSpec, options: &CompileOptions) -> Result<(Factor, CompileStats)> {
    let size = spec.check_budget(options.budget)?;
    if options.use_invert {
        return compile_inverted(spec, size);
    }
    let radices = spec.function.input_cardinalities();
    let n = radices.len();
    let m_x = spec.output.cardinality();
    let lines: Vec<Vec<f64>> = spec.inhibitors.iter().map(InhibitorVector::line_matrix).collect();
    let images: Vec<usize> = JointStates::new(radices).map(|u| spec.function.eval(&u)).collect();

    let mut table = vec![0.0; size * m_x];
    let mut stats = CompileStats {
        path: CompilePath::General,
        parent_passes: 0,
        inner_iterations: 0,
    };
    let mut u = vec![0usize; n];
    let mut u_prime = vec![0usize; n];
    for slice in table.chunks_mut(m_x) {
        stats.parent_passes += 1;
        u_prime.iter_mut().for_each(|v| *v = 0);
        for &x in &images {
            let mut p = 1.0;
            for i in 0..n {
                p *= lines[i][u[i] * radices[i] + u_prime[i]];
            }
            slice[x] += p;
            stats.inner_iterations += 1;
            JointStates::advance(&mut u_prime, radices);
        }
        JointStates::advance(&mut u, radices);
    }
    Ok((Factor::new(spec.factor_variables(), table)?, stats))
}

fn compile_inverted(spec: &NoisyGateSpec, size: usize) -> Result<(Factor, CompileStats)> {
    let f = &spec.function;
    let radices = f.input_cardinalities();
    let m_x = spec.output.cardinality();
    let preimages: Vec<Vec<Vec<usize>>> = (0..m_x)
        .map(|x| match f.invert(x) {
            Some(p) => Ok(p),
            None => f.invert_default(x, size as u128),
        })
        .collect::<Result<_>>()?;
    let lines: Vec<Vec<f64>> = spec.inhibitors.iter().map(InhibitorVector::line_matrix).collect();

    let mut table = vec![0.0; size * m_x];
    let mut stats = CompileStats {
        path: CompilePath::GeneralInverted,
        parent_passes: 0,
        inner_iterations: 0,
    };
    for (u, slice) in JointStates::new(radices).zip(table.chunks_mut(m_x)) {
        stats.parent_passes += 1;
        for (x, cell) in slice.iter_mut().enumerate() {
            for u_prime in &preimages[x] {
                let p: f64 = u_prime
                    .iter()
                    .enumerate()
                    .map(|(i, &v)| lines[i][u[i] * radices[i] + v])
                    .product();
                *cell += p;
                stats.inner_iterations += 1;
            }
        }
    }
    Ok((Factor::new(spec.factor_variables(), table)?, stats))
}

/// Closed form for Boolean inputs, Boolean OR and lines failing only to
/// false: `P(false | u)` is the product of `q_i` over true inputs.
pub fn compile_boolean_noisy_or(spec: &NoisyGateSpec, options: &CompileOptions) -> Result<Factor> {
    compile_boolean_noisy_or_with_stats(spec, options).map(|(f, _)| f)
}

pub fn compile_boolean_noisy_or_with_stats(
    spec: &NoisyGateSpec,
    options: &CompileOptions,
) -> Result<(Factor, CompileStats)> {
    let q = boolean_noisy_or_parameters(spec).ok_or_else(|| Error::Precondition("not a Boolean noisy-or".into()))?;
    spec.check_budget(options.budget)?;
    let (table, stats) = product_of_active_inhibitors(spec.function.input_cardinalities(), &q);
    Ok((
        Factor::new(spec.factor_variables(), table)?,
        CompileStats {
            path: CompilePath::BooleanNoisyOr,
            ..stats
        },
    ))
}

/// Boolean output, weighted-average function, n-ary inputs whose lines fail
/// only to state 0: `P(false | u)` is the product of `q_i` over inputs not
/// in state 0.
pub fn compile_nary_boolean_output(spec: &NoisyGateSpec, options: &CompileOptions) -> Result<Factor> {
    compile_nary_boolean_output_with_stats(spec, options).map(|(f, _)| f)
}

pub fn compile_nary_boolean_output_with_stats(
    spec: &NoisyGateSpec,
    options: &CompileOptions,
) -> Result<(Factor, CompileStats)> {
    let q = nary_boolean_output_parameters(spec)
        .ok_or_else(|| Error::Precondition("not an n-ary input, Boolean output noisy gate".into()))?;
    spec.check_budget(options.budget)?;
    let (table, stats) = product_of_active_inhibitors(spec.function.input_cardinalities(), &q);
    Ok((
        Factor::new(spec.factor_variables(), table)?,
        CompileStats {
            path: CompilePath::NaryBooleanOutput,
            ..stats
        },
    ))
}

fn boolean_noisy_or_parameters(spec: &NoisyGateSpec) -> Option<Vec<f64>> {
    let boolean = spec.output.is_boolean() && spec.inputs.iter().all(Variable::is_boolean);
    if !boolean || !spec.function.is_boolean_or() {
        return None;
    }
    spec.zero_state_inhibitors()
}

fn nary_boolean_output_parameters(spec: &NoisyGateSpec) -> Option<Vec<f64>> {
    let f = &spec.function;
    if !spec.output.is_boolean() || !(f.is_weighted_average() || f.is_boolean_or()) {
        return None;
    }
    spec.zero_state_inhibitors()
}

// P(x=0|u) = prod of q_i over inputs with nonzero index
fn product_of_active_inhibitors(radices: &[usize], q: &[f64]) -> (Vec<f64>, CompileStats) {
    let size: usize = radices.iter().product();
    let mut table = Vec::with_capacity(2 * size);
    let mut stats = CompileStats {
        path: CompilePath::BooleanNoisyOr,
        parent_passes: 0,
        inner_iterations: 0,
    };
    let mut u = vec![0usize; radices.len()];
    for _ in 0..size {
        stats.parent_passes += 1;
        let mut off = 1.0;
        for (&ui, &qi) in u.iter().zip(q) {
            if ui != 0 {
                off *= qi;
            }
            stats.inner_iterations += 1;
        }
        table.push(off);
        table.push(1.0 - off);
        JointStates::advance(&mut u, radices);
    }
    (table, stats)
}

/// Dispatches to the cheapest compiler whose preconditions hold.
pub fn choose_compiler(spec: &NoisyGateSpec, options: &CompileOptions) -> Result<Factor> {
    compile_with_stats(spec, options).map(|(f, _)| f)
}

pub fn compile_with_stats(spec: &NoisyGateSpec, options: &CompileOptions) -> Result<(Factor, CompileStats)> {
    if boolean_noisy_or_parameters(spec).is_some() {
        compile_boolean_noisy_or_with_stats(spec, options)
    } else if nary_boolean_output_parameters(spec).is_some() {
        compile_nary_boolean_output_with_stats(spec, options)
    } else {
        compile_general_with_stats(spec, options)
    }
}

/// Which compiler [`choose_compiler`] would use.
pub fn compile_path(spec: &NoisyGateSpec, options: &CompileOptions) -> CompilePath {
    if boolean_noisy_or_parameters(spec).is_some() {
        CompilePath::BooleanNoisyOr
    } else if nary_boolean_output_parameters(spec).is_some() {
        CompilePath::NaryBooleanOutput
    } else if options.use_invert {
        CompilePath::GeneralInverted
    } else {
        CompilePath::General
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PositivityReport {
    pub onto: bool,
    pub all_inhibitors_positive: bool,
    pub table_strictly_positive: bool,
}

/// Onto-ness is necessary and strictly positive inhibitors (together with
/// onto-ness) sufficient for a strictly positive compiled table.
pub fn check_strict_positivity(spec: &NoisyGateSpec, options: &CompileOptions) -> Result<PositivityReport> {
    let onto = spec.function.check_onto(options.budget)?;
    let all_inhibitors_positive = spec.inhibitors.iter().all(InhibitorVector::all_positive);
    let table = choose_compiler(spec, options)?;
    Ok(PositivityReport {
        onto,
        all_inhibitors_positive,
        table_strictly_positive: table.table().iter().all(|&p| p > 0.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bools(names: &[&str]) -> Vec<Variable> {
        names.iter().map(|n| Variable::boolean(*n)).collect()
    }

    fn opts() -> CompileOptions {
        CompileOptions::default()
    }

    #[test]
    fn nofail_examples() {
        let v = InhibitorVector::new(vec![0.01, 0.0]).unwrap();
        assert!((v.nofail_probability() - 0.99).abs() < 1e-15);
        assert_eq!(InhibitorVector::zero(3).nofail_probability(), 1.0);
        let w = InhibitorVector::new(vec![0.2, 0.3]).unwrap();
        assert!((nofail_probability(&w) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn inhibitor_validation() {
        assert!(InhibitorVector::new(vec![0.6, 0.5]).is_err());
        assert!(InhibitorVector::new(vec![-0.1, 0.0]).is_err());
        assert!(InhibitorVector::new(vec![f64::NAN]).is_err());
        assert!(InhibitorVector::new(vec![0.3, 0.7]).is_ok());
    }

    #[test]
    fn line_distribution_examples() {
        let u = Variable::boolean("U");
        let f = line_distribution(&u, &InhibitorVector::new(vec![0.2, 0.0]).unwrap()).unwrap();
        assert_eq!(f.variables()[1].name(), "U'");
        let t = f.table();
        assert!((t[0] - 1.0).abs() < 1e-15);
        assert_eq!(t[1], 0.0);
        assert!((t[2] - 0.2).abs() < 1e-15);
        assert!((t[3] - 0.8).abs() < 1e-15);

        let k = Variable::with_cardinality("K", 3).unwrap();
        let id = line_distribution(&k, &InhibitorVector::zero(3)).unwrap();
        assert_eq!(id.table(), &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn zero_inhibitors_give_indicator() {
        let inputs = vec![
            Variable::with_cardinality("A", 3).unwrap(),
            Variable::with_cardinality("B", 2).unwrap(),
        ];
        let f = GateFunction::from_fn(&[3, 2], 3, |u| (u[0] + 2 * u[1]) % 3).unwrap();
        let out = Variable::with_cardinality("X", 3).unwrap();
        let spec = NoisyGateSpec::new(
            inputs,
            vec![InhibitorVector::zero(3), InhibitorVector::zero(2)],
            f.clone(),
            out,
        )
        .unwrap();
        let cpt = compile_general(&spec, &opts()).unwrap();
        for (k, u) in JointStates::new(&[3, 2]).enumerate() {
            for x in 0..3 {
                let expected = if f.eval(&u) == x { 1.0 } else { 0.0 };
                assert_eq!(cpt.table()[k * 3 + x], expected);
            }
        }
    }

    #[test]
    fn single_input_identity_matches_line_distribution() {
        let u = Variable::boolean("U");
        let inh = InhibitorVector::new(vec![0.2, 0.0]).unwrap();
        let id = GateFunction::truth_table(&[2], 2, vec![0, 1]).unwrap();
        let spec = NoisyGateSpec::new(vec![u.clone()], vec![inh.clone()], id, Variable::boolean("X")).unwrap();
        let cpt = compile_general(&spec, &opts()).unwrap();
        let line = line_distribution(&u, &inh).unwrap();
        assert_eq!(cpt.table(), line.table());
    }

    #[test]
    fn general_two_input_or() {
        let spec = NoisyGateSpec::boolean_noisy_or(bools(&["A", "B"]), Variable::boolean("X"), &[0.2, 0.3]).unwrap();
        let cpt = compile_general(&spec, &opts()).unwrap();
        assert!((cpt.value(&[1, 1, 0]).unwrap() - 0.06).abs() < 1e-12);
    }

    #[test]
    fn boolean_fast_path_examples() {
        let spec = NoisyGateSpec::boolean_noisy_or(bools(&["A", "B"]), Variable::boolean("X"), &[0.2, 0.3]).unwrap();
        let cpt = compile_boolean_noisy_or(&spec, &opts()).unwrap();
        assert!((cpt.value(&[1, 1, 0]).unwrap() - 0.06).abs() < 1e-12);
        assert!((cpt.value(&[1, 1, 1]).unwrap() - 0.94).abs() < 1e-12);
        assert_eq!(cpt.value(&[0, 0, 0]).unwrap(), 1.0);
        assert!((cpt.value(&[1, 0, 0]).unwrap() - 0.2).abs() < 1e-12);
        let general = compile_general(&spec, &opts()).unwrap();
        for (a, b) in cpt.table().iter().zip(general.table()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn boolean_fast_path_rejects_non_boolean() {
        let inputs = vec![Variable::with_cardinality("A", 3).unwrap()];
        let f = GateFunction::weighted_average(&[3], 2).unwrap();
        let spec = NoisyGateSpec::new(
            inputs,
            vec![InhibitorVector::fails_to_zero(3, 0.1).unwrap()],
            f,
            Variable::boolean("X"),
        )
        .unwrap();
        assert!(matches!(
            compile_boolean_noisy_or(&spec, &opts()),
            Err(Error::Precondition(_))
        ));
    }

    fn nary_spec(cards: &[usize], q: &[f64]) -> NoisyGateSpec {
        let inputs: Vec<Variable> = cards
            .iter()
            .enumerate()
            .map(|(i, &m)| Variable::with_cardinality(format!("U{i}"), m).unwrap())
            .collect();
        let inh = cards
            .iter()
            .zip(q)
            .map(|(&m, &qi)| InhibitorVector::fails_to_zero(m, qi).unwrap())
            .collect();
        let f = GateFunction::weighted_average(cards, 2).unwrap();
        NoisyGateSpec::new(inputs, inh, f, Variable::boolean("X")).unwrap()
    }

    #[test]
    fn nary_fast_path_examples() {
        let spec = nary_spec(&[3, 3], &[0.1, 0.4]);
        let cpt = compile_nary_boolean_output(&spec, &opts()).unwrap();
        let general = compile_general(&spec, &opts()).unwrap();
        assert!((cpt.value(&[2, 1, 0]).unwrap() - 0.04).abs() < 1e-12);
        assert!((general.value(&[2, 1, 0]).unwrap() - 0.04).abs() < 1e-12);
        assert_eq!(cpt.value(&[0, 0, 0]).unwrap(), 1.0);

        let single = nary_spec(&[4], &[0.25]);
        let cpt = compile_nary_boolean_output(&single, &opts()).unwrap();
        assert!((cpt.value(&[3, 0]).unwrap() - 0.25).abs() < 1e-12);
        let general = compile_general(&single, &opts()).unwrap();
        assert!((general.value(&[3, 0]).unwrap() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn nary_fast_path_rejects_wrong_shape() {
        let inputs = vec![Variable::with_cardinality("A", 3).unwrap()];
        let f = GateFunction::weighted_average(&[3], 2).unwrap();
        let spec = NoisyGateSpec::new(
            inputs,
            vec![InhibitorVector::new(vec![0.1, 0.1, 0.0]).unwrap()],
            f,
            Variable::boolean("X"),
        )
        .unwrap();
        assert!(compile_nary_boolean_output(&spec, &opts()).is_err());
        assert_eq!(compile_path(&spec, &opts()), CompilePath::General);
    }

    #[test]
    fn dispatch() {
        let b = NoisyGateSpec::boolean_noisy_or(bools(&["A", "B"]), Variable::boolean("X"), &[0.2, 0.3]).unwrap();
        assert_eq!(
            compile_with_stats(&b, &opts()).unwrap().1.path,
            CompilePath::BooleanNoisyOr
        );
        let n = nary_spec(&[3, 2], &[0.1, 0.2]);
        assert_eq!(
            compile_with_stats(&n, &opts()).unwrap().1.path,
            CompilePath::NaryBooleanOutput
        );
        let t = NoisyGateSpec::new(
            bools(&["A", "B"]),
            vec![InhibitorVector::zero(2), InhibitorVector::zero(2)],
            GateFunction::truth_table(&[2, 2], 2, vec![0, 0, 0, 1]).unwrap(),
            Variable::boolean("X"),
        )
        .unwrap();
        assert_eq!(compile_with_stats(&t, &opts()).unwrap().1.path, CompilePath::General);
    }

    #[test]
    fn inverted_matches_scan() {
        let inputs = vec![
            Variable::with_cardinality("A", 3).unwrap(),
            Variable::with_cardinality("B", 4).unwrap(),
        ];
        let spec = NoisyGateSpec::from_rows(
            inputs,
            vec![vec![0.1, 0.05, 0.2], vec![0.3, 0.0, 0.1, 0.05]],
            GateFunction::integer_add(&[3, 4], 6).unwrap(),
            Variable::with_cardinality("X", 6).unwrap(),
        )
        .unwrap();
        let plain = compile_general(&spec, &opts()).unwrap();
        let (inv, stats) = compile_general_with_stats(
            &spec,
            &CompileOptions {
                use_invert: true,
                ..opts()
            },
        )
        .unwrap();
        assert_eq!(stats.path, CompilePath::GeneralInverted);
        assert_eq!(stats.inner_iterations, 144);
        for (a, b) in plain.table().iter().zip(inv.table()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn budget_exceeded() {
        let spec = NoisyGateSpec::boolean_noisy_or(bools(&["A", "B", "C"]), Variable::boolean("X"), &[0.1; 3]).unwrap();
        let tight = CompileOptions {
            budget: 4,
            use_invert: false,
        };
        assert!(matches!(
            compile_general(&spec, &tight),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn positivity_examples() {
        let b = NoisyGateSpec::boolean_noisy_or(bools(&["A", "B"]), Variable::boolean("X"), &[0.2, 0.3]).unwrap();
        let r = check_strict_positivity(&b, &opts()).unwrap();
        assert_eq!(
            r,
            PositivityReport {
                onto: true,
                all_inhibitors_positive: false,
                table_strictly_positive: false
            }
        );

        let full = NoisyGateSpec::from_rows(
            bools(&["A", "B"]),
            vec![vec![0.1, 0.1], vec![0.1, 0.1]],
            GateFunction::boolean_or(2),
            Variable::boolean("X"),
        )
        .unwrap();
        assert!(check_strict_positivity(&full, &opts()).unwrap().table_strictly_positive);

        let constant = NoisyGateSpec::from_rows(
            bools(&["A", "B"]),
            vec![vec![0.3, 0.2], vec![0.1, 0.4]],
            GateFunction::truth_table(&[2, 2], 2, vec![0; 4]).unwrap(),
            Variable::boolean("X"),
        )
        .unwrap();
        let r = check_strict_positivity(&constant, &opts()).unwrap();
        assert!(!r.onto);
        assert!(!r.table_strictly_positive);
    }

    #[test]
    fn spec_validation() {
        let err = NoisyGateSpec::from_rows(
            bools(&["A"]),
            vec![vec![0.1, 0.1, 0.1]],
            GateFunction::boolean_or(1),
            Variable::boolean("X"),
        );
        assert!(matches!(err, Err(Error::InvalidInhibitor { input: 0, .. })));
        let err = NoisyGateSpec::from_rows(
            bools(&["A"]),
            vec![vec![0.1, 0.1]],
            GateFunction::boolean_or(1),
            Variable::with_cardinality("X", 3).unwrap(),
        );
        assert!(matches!(err, Err(Error::InvalidGate(_))));
    }
}
