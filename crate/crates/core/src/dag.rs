//! Directed acyclic graphs over schema variables.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::schema::CategoricalSchema;

/// A DAG whose nodes are named variables. Parent lists are ordered; the
/// topological order is derived once at construction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "DagRepr", into = "DagRepr")]
pub struct Dag {
    nodes: Vec<String>,
    parents: Vec<Vec<usize>>,
    topo: Vec<usize>,
}

/// JSON shape: `{ "nodes": [...], "parents": { "child": ["parent", ...] } }`.
#[derive(Serialize, Deserialize)]
struct DagRepr {
    nodes: Vec<String>,
    #[serde(default)]
    parents: BTreeMap<String, Vec<String>>,
}

impl TryFrom<DagRepr> for Dag {
    type Error = Error;

    fn try_from(repr: DagRepr) -> Result<Self> {
        let named: Vec<(String, Vec<String>)> = repr.parents.into_iter().collect();
        Dag::from_named_parents(repr.nodes, &named)
    }
}

impl From<Dag> for DagRepr {
    fn from(dag: Dag) -> Self {
        let parents = dag
            .nodes
            .iter()
            .enumerate()
            .filter(|(i, _)| !dag.parents[*i].is_empty())
            .map(|(i, n)| (n.clone(), dag.parents[i].iter().map(|&p| dag.nodes[p].clone()).collect()))
            .collect();
        DagRepr { nodes: dag.nodes, parents }
    }
}

impl Dag {
    pub fn new(nodes: Vec<String>, parents: Vec<Vec<usize>>) -> Result<Self> {
        if nodes.len() != parents.len() {
            return Err(Error::input("one parent list per node required"));
        }
        for (i, n) in nodes.iter().enumerate() {
            if nodes[..i].contains(n) {
                return Err(Error::input(format!("duplicate node `{n}`")));
            }
        }
        for (child, ps) in parents.iter().enumerate() {
            for (k, &p) in ps.iter().enumerate() {
                if p >= nodes.len() {
                    return Err(Error::input(format!("parent index {p} out of range")));
                }
                if p == child {
                    return Err(Error::input(format!("node `{}` lists itself as a parent", nodes[child])));
                }
                if ps[..k].contains(&p) {
                    return Err(Error::input(format!(
                        "node `{}` lists parent `{}` twice",
                        nodes[child], nodes[p]
                    )));
                }
            }
        }
        let topo = topological_order(&nodes, &parents)?;
        Ok(Dag { nodes, parents, topo })
    }

    pub fn empty(nodes: Vec<String>) -> Result<Self> {
        let n = nodes.len();
        Dag::new(nodes, vec![Vec::new(); n])
    }

    pub fn from_edges(nodes: Vec<String>, edges: &[(&str, &str)]) -> Result<Self> {
        let mut parents = vec![Vec::new(); nodes.len()];
        for &(from, to) in edges {
            let f = position(&nodes, from)?;
            let t = position(&nodes, to)?;
            parents[t].push(f);
        }
        Dag::new(nodes, parents)
    }

    pub fn from_named_parents(nodes: Vec<String>, named: &[(String, Vec<String>)]) -> Result<Self> {
        let mut parents = vec![Vec::new(); nodes.len()];
        for (child, ps) in named {
            let c = position(&nodes, child)?;
            parents[c] = ps.iter().map(|p| position(&nodes, p)).collect::<Result<_>>()?;
        }
        Dag::new(nodes, parents)
    }

    /// Re-expresses this DAG over the schema's variable order. Schema variables
    /// absent from the DAG become parentless; DAG nodes absent from the schema are an error.
    pub fn aligned_to(&self, schema: &CategoricalSchema) -> Result<Dag> {
        let map: Vec<usize> = self
            .nodes
            .iter()
            .map(|n| {
                schema
                    .index_of(n)
                    .ok_or_else(|| Error::input(format!("graph node `{n}` is not a schema variable")))
            })
            .collect::<Result<_>>()?;
        let mut parents = vec![Vec::new(); schema.len()];
        for (i, ps) in self.parents.iter().enumerate() {
            parents[map[i]] = ps.iter().map(|&p| map[p]).collect();
        }
        Dag::new(schema.names().map(str::to_string).collect(), parents)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn node_index(&self, name: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n == name)
    }

    pub fn parents(&self, node: usize) -> &[usize] {
        &self.parents[node]
    }

    pub fn children(&self, node: usize) -> Vec<usize> {
        (0..self.len()).filter(|&c| self.parents[c].contains(&node)).collect()
    }

    pub fn topological_order(&self) -> &[usize] {
        &self.topo
    }

    /// All `(parent, child)` pairs, children in declaration order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.parents
            .iter()
            .enumerate()
            .flat_map(|(c, ps)| ps.iter().map(move |&p| (p, c)))
            .collect()
    }

    pub fn is_ancestor(&self, ancestor: usize, node: usize) -> bool {
        let mut stack = self.parents[node].clone();
        let mut seen = vec![false; self.len()];
        while let Some(p) = stack.pop() {
            if p == ancestor {
                return true;
            }
            if !seen[p] {
                seen[p] = true;
                stack.extend_from_slice(&self.parents[p]);
            }
        }
        false
    }
}

fn position(nodes: &[String], name: &str) -> Result<usize> {
    nodes
        .iter()
        .position(|n| n == name)
        .ok_or_else(|| Error::input(format!("unknown node `{name}`")))
}

/// Kahn's algorithm, always emitting the lowest-declared ready node so the
/// result is deterministic. On a cycle, the error names a node on it.
pub fn topological_order(nodes: &[String], parents: &[Vec<usize>]) -> Result<Vec<usize>> {
    let n = nodes.len();
    let mut placed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    while order.len() < n {
        let ready = (0..n).find(|&i| !placed[i] && parents[i].iter().all(|&p| placed[p]));
        match ready {
            Some(i) => {
                placed[i] = true;
                order.push(i);
            }
            None => {
                // Every unplaced node has an unplaced parent; walking parents must revisit a node.
                let mut cur = (0..n).find(|&i| !placed[i]).expect("unplaced node exists");
                let mut visited = vec![false; n];
                while !visited[cur] {
                    visited[cur] = true;
                    cur = *parents[cur].iter().find(|&&p| !placed[p]).expect("unplaced parent");
                }
                return Err(Error::Cycle(nodes[cur].clone()));
            }
        }
    }
    Ok(order)
}
