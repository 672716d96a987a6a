use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

/// A named discrete random variable. A state's index is its position in
/// `states`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Variable {
    name: String,
    states: Vec<String>,
}

impl Variable {
    pub fn new<S: Into<String>>(name: S, states: Vec<String>) -> Result<Self> {
        let name = name.into();
        if name.is_empty() {
            return Err(Error::InvalidVariable {
                name,
                reason: "empty name".into(),
            });
        }
        if states.is_empty() {
            return Err(Error::InvalidVariable {
                name,
                reason: "cardinality must be at least 1".into(),
            });
        }
        for (i, s) in states.iter().enumerate() {
            if states[..i].contains(s) {
                return Err(Error::InvalidVariable {
                    name,
                    reason: format!("duplicate state label `{s}`"),
                });
            }
        }
        Ok(Variable { name, states })
    }

    /// States labelled `"0"`, `"1"`, ... `"m-1"`.
    pub fn with_cardinality<S: Into<String>>(name: S, cardinality: usize) -> Result<Self> {
        Self::new(name, (0..cardinality).map(|i| i.to_string()).collect())
    }

    /// Two states, `false` (index 0) and `true` (index 1).
    pub fn boolean<S: Into<String>>(name: S) -> Self {
        Variable {
            name: name.into(),
            states: vec!["false".into(), "true".into()],
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn cardinality(&self) -> usize {
        self.states.len()
    }

    pub fn is_boolean(&self) -> bool {
        self.states.len() == 2
    }

    pub fn state_index(&self, label: &str) -> Option<usize> {
        self.states.iter().position(|s| s == label)
    }

    /// Resolves a state given either by label or by numeric index.
    pub fn resolve_state(&self, state: &str) -> Result<usize> {
        if let Some(i) = self.state_index(state) {
            return Ok(i);
        }
        match state.parse::<usize>() {
            Ok(i) if i < self.cardinality() => Ok(i),
            _ => Err(Error::UnknownState {
                variable: self.name.clone(),
                state: state.to_string(),
            }),
        }
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)
    }
}

/// Observed states, keyed by variable name.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Evidence {
    assignments: BTreeMap<String, usize>,
}

impl Evidence {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records `name = index`. Conflicting re-observation is an error.
    pub fn observe<S: Into<String>>(&mut self, name: S, index: usize) -> Result<()> {
        let name = name.into();
        match self.assignments.get(&name) {
            Some(&old) if old != index => Err(Error::InvalidEvidence(format!(
                "`{name}` observed as both {old} and {index}"
            ))),
            _ => {
                self.assignments.insert(name, index);
                Ok(())
            }
        }
    }

    pub fn with<S: Into<String>>(mut self, name: S, index: usize) -> Result<Self> {
        self.observe(name, index)?;
        Ok(self)
    }

    pub fn get(&self, name: &str) -> Option<usize> {
        self.assignments.get(name).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, usize)> {
        self.assignments.iter().map(|(k, &v)| (k.as_str(), v))
    }

    pub fn len(&self) -> usize {
        self.assignments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_variables() {
        assert!(Variable::new("X", vec![]).is_err());
        assert!(Variable::new("", vec!["a".into()]).is_err());
        assert!(Variable::new("X", vec!["a".into(), "a".into()]).is_err());
        let single = Variable::with_cardinality("K", 1).unwrap();
        assert_eq!(single.cardinality(), 1);
    }

    #[test]
    fn resolve_by_label_or_index() {
        let v = Variable::boolean("A");
        assert_eq!(v.resolve_state("true").unwrap(), 1);
        assert_eq!(v.resolve_state("0").unwrap(), 0);
        assert!(v.resolve_state("2").is_err());
        assert!(v.resolve_state("maybe").is_err());
    }

    #[test]
    fn evidence_single_assignment() {
        let mut e = Evidence::new();
        e.observe("A", 1).unwrap();
        e.observe("A", 1).unwrap();
        assert!(e.observe("A", 0).is_err());
        assert_eq!(e.len(), 1);
    }
}
