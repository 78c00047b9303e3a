//! Exact posterior marginals by variable elimination.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::distribution::Distribution;
use crate::error::{Error, Result};
use crate::model::BayesNet;
use crate::schema::CategoricalSchema;

/// Non-negative table over the product of its scope's categories, laid out
/// with the first scope variable varying slowest.
#[derive(Clone, Debug, PartialEq)]
pub struct Factor {
    scope: Vec<usize>,
    cards: Vec<usize>,
    values: Vec<f64>,
}

impl Factor {
    pub fn new(scope: Vec<usize>, cards: Vec<usize>, values: Vec<f64>) -> Result<Self> {
        if scope.len() != cards.len() {
            return Err(Error::input("factor scope and cardinalities differ in length"));
        }
        if values.len() != cards.iter().product::<usize>() {
            return Err(Error::input("factor table size does not match its scope"));
        }
        if values.iter().any(|v| v.is_nan() || *v < 0.0) {
            return Err(Error::input("factor values must be non-negative"));
        }
        Ok(Factor { scope, cards, values })
    }

    pub fn scope(&self) -> &[usize] {
        &self.scope
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn from_cpt(model: &BayesNet, node: usize) -> Factor {
        let cpt = model.cpt(node);
        let mut scope = cpt.parents().to_vec();
        scope.push(node);
        let mut cards = cpt.parent_cardinalities().to_vec();
        cards.push(cpt.cardinality());
        let values = cpt.rows().iter().flat_map(|r| r.probs().iter().copied()).collect();
        Factor { scope, cards, values }
    }

    fn strides(&self) -> Vec<usize> {
        let mut s = vec![1; self.cards.len()];
        for k in (0..self.cards.len().saturating_sub(1)).rev() {
            s[k] = s[k + 1] * self.cards[k + 1];
        }
        s
    }

    /// Fixes `var = value`, dropping it from the scope.
    pub fn reduce(&self, var: usize, value: usize) -> Factor {
        let Some(pos) = self.scope.iter().position(|&v| v == var) else {
            return self.clone();
        };
        let strides = self.strides();
        let mut scope = self.scope.clone();
        let mut cards = self.cards.clone();
        scope.remove(pos);
        cards.remove(pos);
        let outer: usize = self.cards[..pos].iter().product();
        let inner = strides[pos];
        let mut values = Vec::with_capacity(outer * inner);
        for o in 0..outer {
            let base = o * self.cards[pos] * inner + value * inner;
            values.extend_from_slice(&self.values[base..base + inner]);
        }
        Factor { scope, cards, values }
    }

    pub fn product(&self, other: &Factor) -> Factor {
        let mut scope = self.scope.clone();
        let mut cards = self.cards.clone();
        for (&v, &c) in other.scope.iter().zip(&other.cards) {
            if !scope.contains(&v) {
                scope.push(v);
                cards.push(c);
            }
        }
        let stride_in = |f: &Factor| -> Vec<usize> {
            let s = f.strides();
            scope.iter().map(|v| f.scope.iter().position(|x| x == v).map_or(0, |p| s[p])).collect()
        };
        let (sa, sb) = (stride_in(self), stride_in(other));
        let total: usize = cards.iter().product();
        let mut values = Vec::with_capacity(total);
        let mut counter = vec![0usize; scope.len()];
        let (mut ia, mut ib) = (0usize, 0usize);
        for _ in 0..total {
            values.push(self.values[ia] * other.values[ib]);
            // odometer increment, last position fastest
            for k in (0..counter.len()).rev() {
                counter[k] += 1;
                ia += sa[k];
                ib += sb[k];
                if counter[k] < cards[k] {
                    break;
                }
                ia -= sa[k] * cards[k];
                ib -= sb[k] * cards[k];
                counter[k] = 0;
            }
        }
        Factor { scope, cards, values }
    }

    pub fn sum_out(&self, var: usize) -> Factor {
        let Some(pos) = self.scope.iter().position(|&v| v == var) else {
            return self.clone();
        };
        let strides = self.strides();
        let outer: usize = self.cards[..pos].iter().product();
        let inner = strides[pos];
        let mut values = vec![0.0; outer * inner];
        for o in 0..outer {
            for v in 0..self.cards[pos] {
                let base = (o * self.cards[pos] + v) * inner;
                for i in 0..inner {
                    values[o * inner + i] += self.values[base + i];
                }
            }
        }
        let mut scope = self.scope.clone();
        let mut cards = self.cards.clone();
        scope.remove(pos);
        cards.remove(pos);
        Factor { scope, cards, values }
    }
}

/// Observed values keyed by variable index.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Evidence {
    assignments: BTreeMap<usize, usize>,
}

impl Evidence {
    pub fn none() -> Self {
        Evidence::default()
    }

    pub fn new(schema: &CategoricalSchema, pairs: &[(usize, usize)]) -> Result<Self> {
        let mut assignments = BTreeMap::new();
        for &(var, value) in pairs {
            if var >= schema.len() {
                return Err(Error::input(format!("evidence variable {var} is not in the schema")));
            }
            if value >= schema.cardinality(var) {
                return Err(Error::input(format!(
                    "evidence value {value} out of range for `{}`",
                    schema.variable(var).name
                )));
            }
            if assignments.insert(var, value).is_some() {
                return Err(Error::input(format!("`{}` observed twice", schema.variable(var).name)));
            }
        }
        Ok(Evidence { assignments })
    }

    /// Resolves `(variable name, category label)` pairs.
    pub fn from_labels(schema: &CategoricalSchema, pairs: &[(String, String)]) -> Result<Self> {
        let idx = pairs
            .iter()
            .map(|(n, l)| {
                let v = schema.require_index(n)?;
                Ok((v, schema.require_category(v, l)?))
            })
            .collect::<Result<Vec<_>>>()?;
        Evidence::new(schema, &idx)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.assignments.iter().map(|(&k, &v)| (k, v))
    }

    pub fn get(&self, var: usize) -> Option<usize> {
        self.assignments.get(&var).copied()
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }

    pub fn describe(&self, schema: &CategoricalSchema) -> String {
        if self.is_empty() {
            return "no evidence".into();
        }
        self.iter()
            .map(|(v, x)| format!("{}={}", schema.variable(v).name, schema.variable(v).categories[x]))
            .collect::<Vec<_>>()
            .join(", ")
    }
}

/// Reasoning direction. Metadata only; it does not change the computation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    #[default]
    Predictive,
    Diagnostic,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Query {
    pub target: usize,
    pub evidence: Evidence,
    pub direction: Direction,
}

impl Query {
    pub fn new(target: usize, evidence: Evidence, direction: Direction) -> Result<Self> {
        if evidence.get(target).is_some() {
            return Err(Error::input("query target is also observed as evidence"));
        }
        Ok(Query { target, evidence, direction })
    }
}

/// Min-degree elimination order over the interaction graph of `factors`;
/// ties go to the lowest variable index.
pub fn min_degree_order(factors: &[Factor], eliminate: &[usize]) -> Vec<usize> {
    let mut adj: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for f in factors {
        for &a in &f.scope {
            let e = adj.entry(a).or_default();
            e.extend(f.scope.iter().copied().filter(|&b| b != a));
        }
    }
    let mut remaining: BTreeSet<usize> = eliminate.iter().copied().collect();
    let mut order = Vec::with_capacity(remaining.len());
    while !remaining.is_empty() {
        let v = *remaining
            .iter()
            .min_by_key(|&&v| (adj.get(&v).map_or(0, BTreeSet::len), v))
            .expect("non-empty");
        let neigh: Vec<usize> = adj.remove(&v).unwrap_or_default().into_iter().collect();
        for &a in &neigh {
            if let Some(s) = adj.get_mut(&a) {
                s.remove(&v);
                s.extend(neigh.iter().copied().filter(|&b| b != a));
            }
        }
        remaining.remove(&v);
        order.push(v);
    }
    order
}

fn check_query(model: &BayesNet, query: &Query) -> Result<()> {
    if query.target >= model.dag().len() {
        return Err(Error::input(format!("target variable {} is not in the model", query.target)));
    }
    Evidence::new(model.schema(), &query.evidence.iter().collect::<Vec<_>>())?;
    Query::new(query.target, query.evidence.clone(), query.direction).map(|_| ())
}

pub fn posterior(model: &BayesNet, query: &Query) -> Result<Distribution> {
    posterior_with_order(model, query, None)
}

/// Exact `P(target | evidence)`. `order`, when given, must list exactly the
/// variables that are neither target nor evidence; otherwise min-degree is used.
pub fn posterior_with_order(model: &BayesNet, query: &Query, order: Option<&[usize]>) -> Result<Distribution> {
    check_query(model, query)?;
    let n = model.dag().len();
    let mut factors: Vec<Factor> = (0..n)
        .map(|node| {
            query.evidence.iter().fold(Factor::from_cpt(model, node), |f, (v, x)| f.reduce(v, x))
        })
        .collect();
    let hidden: Vec<usize> = (0..n).filter(|&v| v != query.target && query.evidence.get(v).is_none()).collect();
    let order = match order {
        Some(o) => {
            let mut a = o.to_vec();
            a.sort_unstable();
            if a != hidden {
                return Err(Error::input("elimination order must list every hidden variable exactly once"));
            }
            o.to_vec()
        }
        None => min_degree_order(&factors, &hidden),
    };
    for v in order {
        let (with, without): (Vec<_>, Vec<_>) = factors.into_iter().partition(|f| f.scope.contains(&v));
        factors = without;
        if let Some(prod) = with.into_iter().reduce(|a, b| a.product(&b)) {
            factors.push(prod.sum_out(v));
        }
    }
    let card = model.schema().cardinality(query.target);
    let unit = Factor { scope: vec![], cards: vec![], values: vec![1.0] };
    let joint = factors.into_iter().fold(unit, |a, b| a.product(&b));
    // Only the target may remain; an unreached target has a flat factor.
    let joint = joint.product(&Factor { scope: vec![query.target], cards: vec![card], values: vec![1.0; card] });
    debug_assert_eq!(joint.scope, vec![query.target]);
    let total: f64 = joint.values.iter().sum();
    if total.is_nan() || total <= 0.0 {
        return Err(Error::InconsistentEvidence(query.evidence.describe(model.schema())));
    }
    Distribution::new(joint.values.iter().map(|v| v / total).collect())
}

pub fn marginal(model: &BayesNet, variable: usize) -> Result<Distribution> {
    posterior(model, &Query::new(variable, Evidence::none(), Direction::Predictive)?)
}

/// Prior and posterior of the query target, with `posterior − prior` per category.
#[derive(Clone, Debug, PartialEq)]
pub struct ShiftReport {
    pub target: usize,
    pub prior: Distribution,
    pub posterior: Distribution,
    pub delta: Vec<f64>,
}

impl ShiftReport {
    /// `{ target, direction, evidence, prior, posterior, delta }`, distributions keyed by label.
    pub fn to_json(&self, schema: &CategoricalSchema, query: &Query) -> serde_json::Value {
        let spec = schema.variable(self.target);
        let keyed = |vals: &[f64]| -> serde_json::Value {
            serde_json::Value::Object(
                spec.categories.iter().cloned().zip(vals.iter().map(|&v| serde_json::json!(v))).collect(),
            )
        };
        let evidence: serde_json::Map<String, serde_json::Value> = query
            .evidence
            .iter()
            .map(|(v, x)| (schema.variable(v).name.clone(), serde_json::json!(schema.variable(v).categories[x])))
            .collect();
        serde_json::json!({
            "target": spec.name,
            "direction": query.direction,
            "evidence": evidence,
            "prior": keyed(self.prior.probs()),
            "posterior": keyed(self.posterior.probs()),
            "delta": keyed(&self.delta),
        })
    }
}

pub fn evidence_shift_report(model: &BayesNet, query: &Query) -> Result<ShiftReport> {
    let prior = marginal(model, query.target)?;
    let post = posterior(model, query)?;
    let delta = post.probs().iter().zip(prior.probs()).map(|(a, b)| a - b).collect();
    Ok(ShiftReport { target: query.target, prior, posterior: post, delta })
}
