//! Conditional probability tables.
//!
//! Rows are addressed by a mixed-radix index over the parent values in
//! declared parent order, with the first parent varying slowest:
//! for cardinalities `(c0, c1, c2)` and values `(v0, v1, v2)` the row is
//! `(v0 * c1 + v1) * c2 + v2`.

use crate::distribution::Distribution;
use crate::error::{Error, Result};

/// Mixed-radix encoding, first position most significant.
pub fn mixed_radix_index(cards: &[usize], values: &[usize]) -> Result<usize> {
    if cards.len() != values.len() {
        return Err(Error::input(format!(
            "expected {} parent values, got {}",
            cards.len(),
            values.len()
        )));
    }
    let mut idx = 0;
    for (k, (&c, &v)) in cards.iter().zip(values).enumerate() {
        if v >= c {
            return Err(Error::input(format!("parent value {v} at position {k} exceeds cardinality {c}")));
        }
        idx = idx * c + v;
    }
    Ok(idx)
}

/// Inverse of [`mixed_radix_index`].
pub fn mixed_radix_decode(cards: &[usize], mut index: usize) -> Vec<usize> {
    let mut out = vec![0; cards.len()];
    for k in (0..cards.len()).rev() {
        out[k] = index % cards[k];
        index /= cards[k];
    }
    out
}

/// `P(node | parents)`, one [`Distribution`] per parent configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct Cpt {
    node: usize,
    cardinality: usize,
    parents: Vec<usize>,
    parent_cards: Vec<usize>,
    rows: Vec<Distribution>,
}

impl Cpt {
    pub fn new(
        node: usize,
        cardinality: usize,
        parents: Vec<usize>,
        parent_cards: Vec<usize>,
        rows: Vec<Distribution>,
    ) -> Result<Self> {
        if parents.len() != parent_cards.len() {
            return Err(Error::input("one cardinality per parent required"));
        }
        let expected: usize = parent_cards.iter().product();
        if rows.len() != expected {
            return Err(Error::input(format!(
                "CPT for node {node} has {} rows, expected {expected}",
                rows.len()
            )));
        }
        if let Some(r) = rows.iter().find(|r| r.len() != cardinality) {
            return Err(Error::input(format!(
                "CPT row over {} categories, node {node} has {cardinality}",
                r.len()
            )));
        }
        Ok(Cpt { node, cardinality, parents, parent_cards, rows })
    }

    pub fn node(&self) -> usize {
        self.node
    }

    pub fn cardinality(&self) -> usize {
        self.cardinality
    }

    pub fn parents(&self) -> &[usize] {
        &self.parents
    }

    pub fn parent_cardinalities(&self) -> &[usize] {
        &self.parent_cards
    }

    pub fn rows(&self) -> &[Distribution] {
        &self.rows
    }

    pub fn row(&self, config: usize) -> &Distribution {
        &self.rows[config]
    }

    pub fn parent_config_index(&self, parent_values: &[usize]) -> Result<usize> {
        mixed_radix_index(&self.parent_cards, parent_values)
    }

    /// Row index selected by the parent values inside a full record.
    pub fn config_of_record(&self, record: &[usize]) -> usize {
        self.parents
            .iter()
            .zip(&self.parent_cards)
            .fold(0, |idx, (&p, &c)| idx * c + record[p])
    }

    /// `P(record[node] | record[parents])`.
    pub fn prob_of_record(&self, record: &[usize]) -> f64 {
        self.rows[self.config_of_record(record)].probs()[record[self.node]]
    }
}
