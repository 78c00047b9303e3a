//! A Bayesian network: schema, DAG and one CPT per node.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::cpt::Cpt;
use crate::dag::Dag;
use crate::distribution::Distribution;
use crate::error::{Error, Result};
use crate::schema::CategoricalSchema;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq)]
pub struct BayesNet {
    schema: Arc<CategoricalSchema>,
    dag: Dag,
    cpts: Vec<Cpt>,
}

impl BayesNet {
    /// `dag` must be over the schema variables in schema order (see [`Dag::aligned_to`])
    /// and `cpts[i]` must describe node `i` with exactly the DAG's parents.
    pub fn new(schema: Arc<CategoricalSchema>, dag: Dag, cpts: Vec<Cpt>) -> Result<Self> {
        if !dag.nodes().iter().map(String::as_str).eq(schema.names()) {
            return Err(Error::input("graph nodes must match the schema variables in order"));
        }
        if cpts.len() != dag.len() {
            return Err(Error::input(format!("{} CPTs for {} nodes", cpts.len(), dag.len())));
        }
        for (i, cpt) in cpts.iter().enumerate() {
            let name = &schema.variable(i).name;
            if cpt.node() != i {
                return Err(Error::input(format!("missing CPT for `{name}`")));
            }
            if cpt.parents() != dag.parents(i) {
                return Err(Error::input(format!("CPT parents of `{name}` disagree with the graph")));
            }
            if cpt.cardinality() != schema.cardinality(i)
                || cpt.parents().iter().zip(cpt.parent_cardinalities()).any(|(&p, &c)| schema.cardinality(p) != c)
            {
                return Err(Error::input(format!("CPT cardinalities of `{name}` disagree with the schema")));
            }
        }
        Ok(BayesNet { schema, dag, cpts })
    }

    /// Builds CPTs from plain row vectors in node order.
    pub fn from_rows(schema: Arc<CategoricalSchema>, dag: Dag, rows: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        let dag = dag.aligned_to(&schema)?;
        if rows.len() != dag.len() {
            return Err(Error::input("one row set per node required"));
        }
        let cpts = rows
            .into_iter()
            .enumerate()
            .map(|(i, rs)| {
                let parents = dag.parents(i).to_vec();
                let cards = parents.iter().map(|&p| schema.cardinality(p)).collect();
                let rows = rs.into_iter().map(Distribution::new).collect::<Result<_>>()?;
                Cpt::new(i, schema.cardinality(i), parents, cards, rows)
            })
            .collect::<Result<_>>()?;
        BayesNet::new(schema, dag, cpts)
    }

    pub fn schema(&self) -> &CategoricalSchema {
        &self.schema
    }

    pub fn schema_arc(&self) -> &Arc<CategoricalSchema> {
        &self.schema
    }

    pub fn dag(&self) -> &Dag {
        &self.dag
    }

    pub fn cpts(&self) -> &[Cpt] {
        &self.cpts
    }

    pub fn cpt(&self, node: usize) -> &Cpt {
        &self.cpts[node]
    }

    pub fn joint_probability(&self, record: &[usize]) -> Result<f64> {
        joint_probability(&self.dag, &self.cpts, record)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&BayesNetDoc::from(self))?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let doc: BayesNetDoc = serde_json::from_str(s)?;
        doc.try_into()
    }
}

/// `∏ P(x_i | parents(x_i))` for a full assignment.
pub fn joint_probability(dag: &Dag, cpts: &[Cpt], record: &[usize]) -> Result<f64> {
    if record.len() != dag.len() {
        return Err(Error::input(format!(
            "record assigns {} of {} variables",
            record.len(),
            dag.len()
        )));
    }
    let mut p = 1.0;
    for node in 0..dag.len() {
        let cpt = cpts
            .iter()
            .find(|c| c.node() == node)
            .ok_or_else(|| Error::input(format!("missing CPT for `{}`", dag.nodes()[node])))?;
        if record[node] >= cpt.cardinality() || cpt.parents().iter().zip(cpt.parent_cardinalities()).any(|(&q, &c)| record[q] >= c) {
            return Err(Error::input("record value out of range"));
        }
        p *= cpt.prob_of_record(record);
    }
    Ok(p)
}

#[derive(Serialize, Deserialize)]
pub(crate) struct BayesNetDoc {
    format_version: u32,
    model: String,
    schema: CategoricalSchema,
    dag: Dag,
    cpts: Vec<CptDoc>,
}

#[derive(Serialize, Deserialize)]
struct CptDoc {
    node: String,
    parents: Vec<String>,
    rows: Vec<Distribution>,
}

pub(crate) const BAYES_NET_TAG: &str = "bayes_net";

impl From<&BayesNet> for BayesNetDoc {
    fn from(m: &BayesNet) -> Self {
        let name = |i: usize| m.schema.variable(i).name.clone();
        BayesNetDoc {
            format_version: FORMAT_VERSION,
            model: BAYES_NET_TAG.to_string(),
            schema: (*m.schema).clone(),
            dag: m.dag.clone(),
            cpts: m
                .cpts
                .iter()
                .map(|c| CptDoc {
                    node: name(c.node()),
                    parents: c.parents().iter().map(|&p| name(p)).collect(),
                    rows: c.rows().to_vec(),
                })
                .collect(),
        }
    }
}

impl TryFrom<BayesNetDoc> for BayesNet {
    type Error = Error;

    fn try_from(doc: BayesNetDoc) -> Result<Self> {
        if doc.format_version != FORMAT_VERSION {
            return Err(Error::input(format!("unsupported format_version {}", doc.format_version)));
        }
        if doc.model != BAYES_NET_TAG {
            return Err(Error::input(format!("expected a `{BAYES_NET_TAG}` model, got `{}`", doc.model)));
        }
        let schema = Arc::new(doc.schema);
        let dag = doc.dag.aligned_to(&schema)?;
        let mut slots: Vec<Option<Cpt>> = vec![None; dag.len()];
        for c in doc.cpts {
            let node = schema.require_index(&c.node)?;
            let parents: Vec<usize> = c.parents.iter().map(|p| schema.require_index(p)).collect::<Result<_>>()?;
            let cards = parents.iter().map(|&p| schema.cardinality(p)).collect();
            if slots[node].is_some() {
                return Err(Error::input(format!("duplicate CPT for `{}`", c.node)));
            }
            slots[node] = Some(Cpt::new(node, schema.cardinality(node), parents, cards, c.rows)?);
        }
        let cpts = slots
            .into_iter()
            .enumerate()
            .map(|(i, c)| c.ok_or_else(|| Error::input(format!("missing CPT for `{}`", schema.variable(i).name))))
            .collect::<Result<_>>()?;
        BayesNet::new(schema, dag, cpts)
    }
}
