//! Categorical schema: ordered variables with labelled categories.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VariableKind {
    Nominal,
    /// Category order is the semantic order (e.g. Never < Rarely < ... < Always).
    Ordinal,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariableSpec {
    pub name: String,
    pub kind: VariableKind,
    pub categories: Vec<String>,
}

impl VariableSpec {
    pub fn new(name: impl Into<String>, kind: VariableKind, categories: &[&str]) -> Self {
        VariableSpec {
            name: name.into(),
            kind,
            categories: categories.iter().map(|c| c.to_string()).collect(),
        }
    }

    pub fn cardinality(&self) -> usize {
        self.categories.len()
    }

    pub fn category_index(&self, label: &str) -> Option<usize> {
        self.categories.iter().position(|c| c == label)
    }
}

/// Ordered list of categorical variables. Values elsewhere in the crate are
/// dense category indices; labels only live here.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawSchema", into = "RawSchema")]
pub struct CategoricalSchema {
    variables: Vec<VariableSpec>,
}

#[derive(Serialize, Deserialize)]
struct RawSchema {
    variables: Vec<VariableSpec>,
}

impl TryFrom<RawSchema> for CategoricalSchema {
    type Error = Error;

    fn try_from(raw: RawSchema) -> Result<Self> {
        CategoricalSchema::new(raw.variables)
    }
}

impl From<CategoricalSchema> for RawSchema {
    fn from(s: CategoricalSchema) -> Self {
        RawSchema { variables: s.variables }
    }
}

impl CategoricalSchema {
    pub fn new(variables: Vec<VariableSpec>) -> Result<Self> {
        let mut names = HashSet::new();
        for v in &variables {
            if v.name.is_empty() {
                return Err(Error::input("variable names must be non-empty"));
            }
            if !names.insert(v.name.as_str()) {
                return Err(Error::input(format!("duplicate variable name `{}`", v.name)));
            }
            if v.categories.len() < 2 {
                return Err(Error::input(format!(
                    "variable `{}` needs at least 2 categories, has {}",
                    v.name,
                    v.categories.len()
                )));
            }
            let mut labels = HashSet::new();
            for c in &v.categories {
                if !labels.insert(c.as_str()) {
                    return Err(Error::input(format!(
                        "duplicate category `{c}` in variable `{}`",
                        v.name
                    )));
                }
            }
        }
        Ok(CategoricalSchema { variables })
    }

    pub fn variables(&self) -> &[VariableSpec] {
        &self.variables
    }

    pub fn variable(&self, index: usize) -> &VariableSpec {
        &self.variables[index]
    }

    pub fn len(&self) -> usize {
        self.variables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.variables.is_empty()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.variables.iter().map(|v| v.name.as_str())
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v.name == name)
    }

    /// Like [`index_of`](Self::index_of) but errors with the list of known names.
    pub fn require_index(&self, name: &str) -> Result<usize> {
        self.index_of(name).ok_or_else(|| {
            let known: Vec<&str> = self.names().collect();
            Error::input(format!("unknown variable `{name}`; valid variables: {}", known.join(", ")))
        })
    }

    /// Resolves a category label of the given variable, listing valid labels on failure.
    pub fn require_category(&self, var: usize, label: &str) -> Result<usize> {
        let spec = &self.variables[var];
        spec.category_index(label).ok_or_else(|| {
            Error::input(format!(
                "unknown category `{label}` for `{}`; valid labels: {}",
                spec.name,
                spec.categories.join(", ")
            ))
        })
    }

    pub fn cardinality(&self, index: usize) -> usize {
        self.variables[index].cardinality()
    }

    pub fn cardinalities(&self) -> Vec<usize> {
        self.variables.iter().map(VariableSpec::cardinality).collect()
    }
}
