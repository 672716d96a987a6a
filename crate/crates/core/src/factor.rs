//! Discrete factors over ordered variable lists.

use crate::error::{Error, Result};
use crate::index::{mixed_radix_index, strides, JointStates};
use crate::variable::{Evidence, Variable};

/// Nonnegative table over an ordered list of variables, stored flat in
/// mixed-radix order (last variable fastest). A conditional table
/// `P(child | parents)` is a factor over `[parents..., child]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Factor {
    variables: Vec<Variable>,
    table: Vec<f64>,
}

impl Factor {
    pub fn new(variables: Vec<Variable>, table: Vec<f64>) -> Result<Self> {
        for (i, v) in variables.iter().enumerate() {
            if variables[..i].iter().any(|w| w.name() == v.name()) {
                return Err(Error::DuplicateVariable(v.name().to_string()));
            }
        }
        let expected: usize = variables.iter().map(Variable::cardinality).product();
        if table.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                actual: table.len(),
            });
        }
        if let Some(bad) = table.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return Err(Error::InvalidFactor(format!(
                "entries must be finite and nonnegative, found {bad}"
            )));
        }
        Ok(Factor { variables, table })
    }

    /// The empty factor with a single entry `value`.
    pub fn scalar(value: f64) -> Self {
        Factor {
            variables: Vec::new(),
            table: vec![value],
        }
    }

    /// Multiplicative identity.
    pub fn unit() -> Self {
        Self::scalar(1.0)
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    pub fn into_table(self) -> Vec<f64> {
        self.table
    }

    pub fn cardinalities(&self) -> Vec<usize> {
        self.variables.iter().map(Variable::cardinality).collect()
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v.name() == name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.position(name).is_some()
    }

    pub fn value(&self, indices: &[usize]) -> Result<f64> {
        Ok(self.table[mixed_radix_index(indices, &self.cardinalities())?])
    }

    pub fn total(&self) -> f64 {
        self.table.iter().sum()
    }

    /// Product over the union of both scopes: `self`'s variables first,
    /// then `other`'s variables not already present.
    pub fn product(&self, other: &Factor) -> Result<Factor> {
        let mut variables = self.variables.clone();
        for v in &other.variables {
            match self.position(v.name()) {
                Some(p) => {
                    let mine = self.variables[p].cardinality();
                    if mine != v.cardinality() {
                        return Err(Error::CardinalityClash {
                            variable: v.name().to_string(),
                            left: mine,
                            right: v.cardinality(),
                        });
                    }
                }
                None => variables.push(v.clone()),
            }
        }
        let radices: Vec<usize> = variables.iter().map(Variable::cardinality).collect();

        // stride of each result position inside each operand (0 if absent)
        let project = |f: &Factor| -> Vec<usize> {
            let own = strides(&f.cardinalities());
            variables
                .iter()
                .map(|v| f.position(v.name()).map_or(0, |p| own[p]))
                .collect()
        };
        let a_strides = project(self);
        let b_strides = project(other);

        let total: usize = radices.iter().product();
        let mut table = Vec::with_capacity(total);
        let mut state = vec![0usize; radices.len()];
        let (mut ia, mut ib) = (0usize, 0usize);
        loop {
            table.push(self.table[ia] * other.table[ib]);
            // odometer step, keeping operand offsets in sync
            let mut pos = radices.len();
            loop {
                if pos == 0 {
                    return Ok(Factor { variables, table });
                }
                pos -= 1;
                state[pos] += 1;
                ia += a_strides[pos];
                ib += b_strides[pos];
                if state[pos] < radices[pos] {
                    break;
                }
                ia -= a_strides[pos] * radices[pos];
                ib -= b_strides[pos] * radices[pos];
                state[pos] = 0;
            }
        }
    }

    /// Sums `name` out of the factor.
    pub fn marginalize(&self, name: &str) -> Result<Factor> {
        let p = self
            .position(name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))?;
        let radices = self.cardinalities();
        let inner: usize = radices[p + 1..].iter().product();
        let card = radices[p];
        let outer: usize = radices[..p].iter().product();
        let mut table = vec![0.0; outer * inner];
        for o in 0..outer {
            for s in 0..card {
                let base = (o * card + s) * inner;
                for i in 0..inner {
                    table[o * inner + i] += self.table[base + i];
                }
            }
        }
        let mut variables = self.variables.clone();
        variables.remove(p);
        Ok(Factor { variables, table })
    }

    /// Zeroes entries inconsistent with the evidence; the scope is unchanged.
    pub fn apply_evidence(&self, evidence: &Evidence) -> Factor {
        let observed: Vec<(usize, usize)> = self
            .variables
            .iter()
            .enumerate()
            .filter_map(|(p, v)| evidence.get(v.name()).map(|s| (p, s)))
            .collect();
        if observed.is_empty() {
            return self.clone();
        }
        let radices = self.cardinalities();
        let mut table = self.table.clone();
        for (flat, state) in JointStates::new(&radices).enumerate() {
            if observed.iter().any(|&(p, s)| state[p] != s) {
                table[flat] = 0.0;
            }
        }
        Factor {
            variables: self.variables.clone(),
            table,
        }
    }

    /// Treating the last variable as the child, returns the first parent
    /// configuration whose slice does not sum to 1 within `tolerance`.
    pub fn first_unnormalized_slice(&self, tolerance: f64) -> Option<(usize, f64)> {
        let card = self.variables.last().map_or(1, Variable::cardinality);
        self.table
            .chunks(card)
            .map(|c| c.iter().sum::<f64>())
            .enumerate()
            .find(|(_, s)| (s - 1.0).abs() > tolerance)
    }

    /// Divides every entry by the total mass.
    pub fn normalized(&self) -> Option<Factor> {
        let total = self.total();
        if total.is_nan() || total <= 0.0 {
            return None;
        }
        Some(Factor {
            variables: self.variables.clone(),
            table: self.table.iter().map(|p| p / total).collect(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn var(name: &str, m: usize) -> Variable {
        Variable::with_cardinality(name, m).unwrap()
    }

    fn close(a: &[f64], b: &[f64]) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-12)
    }

    #[test]
    fn product_same_scope() {
        let f = Factor::new(vec![var("A", 2)], vec![0.3, 0.7]).unwrap();
        let g = Factor::new(vec![var("A", 2)], vec![0.5, 0.5]).unwrap();
        assert!(close(f.product(&g).unwrap().table(), &[0.15, 0.35]));
    }

    #[test]
    fn product_with_unit() {
        let f = Factor::new(vec![var("A", 2), var("B", 3)], vec![0.1, 0.2, 0.3, 0.4, 0.5, 0.6]).unwrap();
        assert_eq!(f.product(&Factor::unit()).unwrap(), f);
        assert_eq!(Factor::unit().product(&f).unwrap(), f);
    }

    #[test]
    fn product_outer() {
        let f = Factor::new(vec![var("A", 2)], vec![0.3, 0.7]).unwrap();
        let g = Factor::new(vec![var("B", 2)], vec![0.1, 0.9]).unwrap();
        let h = f.product(&g).unwrap();
        assert_eq!(h.variables()[0].name(), "A");
        assert_eq!(h.variables()[1].name(), "B");
        assert!(close(h.table(), &[0.03, 0.27, 0.07, 0.63]));
    }

    #[test]
    fn product_interleaved_scopes() {
        // f(A,B) * g(C,A) -> over [A,B,C]
        let f = Factor::new(vec![var("A", 2), var("B", 2)], vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let g = Factor::new(vec![var("C", 3), var("A", 2)], vec![1.0, 10.0, 2.0, 20.0, 3.0, 30.0]).unwrap();
        let h = f.product(&g).unwrap();
        let names: Vec<_> = h.variables().iter().map(|v| v.name()).collect();
        assert_eq!(names, ["A", "B", "C"]);
        for s in JointStates::new(&[2, 2, 3]) {
            let expected = f.value(&[s[0], s[1]]).unwrap() * g.value(&[s[2], s[0]]).unwrap();
            assert_eq!(h.value(&s).unwrap(), expected);
        }
    }

    #[test]
    fn product_cardinality_clash() {
        let f = Factor::new(vec![var("A", 2)], vec![0.3, 0.7]).unwrap();
        let g = Factor::new(vec![var("A", 3)], vec![0.3, 0.3, 0.4]).unwrap();
        assert!(matches!(f.product(&g), Err(Error::CardinalityClash { .. })));
    }

    #[test]
    fn marginalize_examples() {
        let joint = Factor::new(vec![var("A", 2), var("B", 2)], vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let m = joint.marginalize("B").unwrap();
        assert!(close(m.table(), &[0.3, 0.7]));
        let cpt = Factor::new(vec![var("A", 2), var("X", 3)], vec![0.2, 0.3, 0.5, 0.6, 0.4, 0.0]).unwrap();
        assert!(close(cpt.marginalize("X").unwrap().table(), &[1.0, 1.0]));
        let single = Factor::new(vec![var("A", 2)], vec![0.25, 0.5]).unwrap();
        let s = single.marginalize("A").unwrap();
        assert!(s.variables().is_empty());
        assert!(close(s.table(), &[0.75]));
        assert!(matches!(joint.marginalize("Z"), Err(Error::UnknownVariable(_))));
    }

    #[test]
    fn marginalize_middle_variable() {
        let vars = vec![var("A", 2), var("B", 3), var("C", 2)];
        let table: Vec<f64> = (0..12).map(|i| i as f64).collect();
        let f = Factor::new(vars, table).unwrap();
        let m = f.marginalize("B").unwrap();
        for a in 0..2 {
            for c in 0..2 {
                let expected: f64 = (0..3).map(|b| f.value(&[a, b, c]).unwrap()).sum();
                assert_eq!(m.value(&[a, c]).unwrap(), expected);
            }
        }
        assert!((m.total() - f.total()).abs() < 1e-12);
    }

    #[test]
    fn evidence_zeroes_inconsistent_entries() {
        let cpt = Factor::new(vec![var("A", 2), var("X", 2)], vec![0.9, 0.1, 0.4, 0.6]).unwrap();
        let e = Evidence::new().with("X", 1).unwrap();
        assert_eq!(cpt.apply_evidence(&e).table(), &[0.0, 0.1, 0.0, 0.6]);
        let other = Evidence::new().with("Q", 0).unwrap();
        assert_eq!(cpt.apply_evidence(&other), cpt);
        let both = Evidence::new().with("X", 1).unwrap().with("A", 0).unwrap();
        let t = cpt.apply_evidence(&both);
        assert_eq!(t.table().iter().filter(|p| **p != 0.0).count(), 1);
        assert_eq!(t.value(&[0, 1]).unwrap(), 0.1);
    }

    #[test]
    fn rejects_malformed() {
        assert!(Factor::new(vec![var("A", 2)], vec![0.5]).is_err());
        assert!(Factor::new(vec![var("A", 2)], vec![0.5, -0.1]).is_err());
        assert!(Factor::new(vec![var("A", 2), var("A", 2)], vec![0.25; 4]).is_err());
    }

    #[test]
    fn normalization_check() {
        let good = Factor::new(vec![var("A", 2), var("X", 2)], vec![0.9, 0.1, 0.4, 0.6]).unwrap();
        assert!(good.first_unnormalized_slice(1e-9).is_none());
        let bad = Factor::new(vec![var("A", 2), var("X", 2)], vec![0.9, 0.1, 0.3, 0.6]).unwrap();
        assert_eq!(bad.first_unnormalized_slice(1e-9).map(|(i, _)| i), Some(1));
    }
}
