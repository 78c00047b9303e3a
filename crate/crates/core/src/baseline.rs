//! Independent and correlated attribute modes.
//!
//! Both modes perturb raw counts with Laplace noise when a privacy budget is
//! set. The budget is split evenly across columns (nodes); each count query
//! has sensitivity 1, so the per-count scale is `columns / ε`. There is no
//! formal composition accounting.

use serde::{Deserialize, Serialize};

use crate::bn::{conditional_counts, fit_cpts, FitOptions};
use crate::cpt::Cpt;
use crate::dag::Dag;
use crate::distribution::Distribution;
use crate::error::{Error, Result};
use crate::eval::pair_mutual_information;
use crate::model::BayesNet;
use crate::par::{self, Execution};
use crate::rng::seeded;
use crate::special::laplace;
use crate::table::DataTable;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum PrivacyBudget {
    Off,
    Epsilon(f64),
}

impl PrivacyBudget {
    pub fn epsilon(eps: f64) -> Result<Self> {
        if eps.is_nan() || eps <= 0.0 {
            return Err(Error::input(format!("epsilon must be > 0, got {eps}")));
        }
        Ok(PrivacyBudget::Epsilon(eps))
    }

    /// Laplace scale for one count when the budget is shared by `parts` queries.
    pub fn noise_scale(&self, parts: usize) -> f64 {
        match *self {
            PrivacyBudget::Off => 0.0,
            PrivacyBudget::Epsilon(eps) => parts as f64 / eps,
        }
    }
}

impl std::fmt::Display for PrivacyBudget {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PrivacyBudget::Off => write!(f, "off"),
            PrivacyBudget::Epsilon(e) => write!(f, "{e}"),
        }
    }
}

impl std::str::FromStr for PrivacyBudget {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("off") {
            return Ok(PrivacyBudget::Off);
        }
        let eps: f64 = s.parse().map_err(|_| Error::input(format!("epsilon must be a number or `off`, got `{s}`")))?;
        PrivacyBudget::epsilon(eps)
    }
}

/// Tie-break among equally informative (node, parent set) candidates.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TieBreak {
    /// Earlier-declared node, then fewer parents, then lexicographically smaller parent indices.
    #[default]
    DeclarationOrder,
    /// As above, but later-declared nodes win.
    ReverseDeclarationOrder,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureOptions {
    pub max_parents: usize,
    pub tie_break: TieBreak,
}

impl StructureOptions {
    pub fn new(max_parents: usize) -> Self {
        StructureOptions { max_parents, tie_break: TieBreak::default() }
    }
}

/// Scores within this distance are ties.
const SCORE_TIE: f64 = 1e-12;

/// Adds independent Laplace(0, scale) noise to every count, without clamping.
pub fn laplace_perturb<R: rand::Rng + ?Sized>(counts: &[f64], scale: f64, rng: &mut R) -> Vec<f64> {
    counts.iter().map(|&c| c + laplace(rng, scale)).collect()
}

fn noisy_row<R: rand::Rng + ?Sized>(counts: &[u64], scale: f64, rng: &mut R) -> Vec<f64> {
    let raw: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
    laplace_perturb(&raw, scale, rng).into_iter().map(|c| c.max(0.0)).collect()
}

/// Per-column marginals over an empty graph. Noise (when enabled) is drawn
/// column by column, category by category, from a generator seeded with `seed`.
pub fn fit_independent(data: &DataTable, budget: PrivacyBudget, seed: u64) -> Result<BayesNet> {
    if data.is_empty() {
        return Err(Error::input("cannot fit on an empty table"));
    }
    let schema = data.schema_arc().clone();
    let scale = budget.noise_scale(schema.len());
    let mut rng = seeded(seed);
    let cpts = (0..schema.len())
        .map(|col| {
            let noisy = noisy_row(&data.column_counts(col), scale, &mut rng);
            let row = Distribution::from_weights(noisy).map_err(|_| {
                Error::numeric(format!(
                    "privacy noise clamped every count of `{}` to zero; increase epsilon",
                    schema.variable(col).name
                ))
            })?;
            Cpt::new(col, schema.cardinality(col), vec![], vec![], vec![row])
        })
        .collect::<Result<Vec<_>>>()?;
    BayesNet::new(schema.clone(), Dag::empty(schema.names().map(str::to_string).collect())?, cpts)
}

/// Plug-in mutual information (bits) between `node` and the joint configuration of `parents`.
pub fn parent_set_information(data: &DataTable, node: usize, parents: &[usize]) -> f64 {
    if parents.is_empty() {
        return 0.0;
    }
    let card = data.schema().cardinality(node);
    let counts: Vec<f64> = conditional_counts(data, node, parents).into_iter().map(|c| c as f64).collect();
    pair_mutual_information(&counts, counts.len() / card, card).unwrap_or(0.0)
}

fn subsets_up_to(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::new();
    fn rec(items: &[usize], start: usize, k: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if !current.is_empty() {
            out.push(current.clone());
        }
        if current.len() == k {
            return;
        }
        for i in start..items.len() {
            current.push(items[i]);
            rec(items, i + 1, k, current, out);
            current.pop();
        }
    }
    rec(items, 0, k, &mut current, &mut out);
    out
}

fn entropy_of_column(data: &DataTable, col: usize) -> f64 {
    let counts = data.column_counts(col);
    let n = data.n_rows() as f64;
    -counts.iter().filter(|&&c| c > 0).map(|&c| (c as f64 / n) * (c as f64 / n).log2()).sum::<f64>()
}

pub fn learn_structure(data: &DataTable, opts: StructureOptions, budget: PrivacyBudget) -> Result<Dag> {
    learn_structure_with(data, opts, budget, Execution::default())
}

/// Greedy k-parent structure search.
///
/// The first node is the column with the highest entropy (earliest on ties).
/// Each step scores every unplaced node against every parent set of size
/// `1..=k` drawn from the placed nodes and attaches the best pair. Selection is
/// noiseless so the graph is a function of `(data, opts)`; `budget` is only
/// validated here and spent by [`fit_correlated`].
pub fn learn_structure_with(
    data: &DataTable,
    opts: StructureOptions,
    budget: PrivacyBudget,
    exec: Execution,
) -> Result<Dag> {
    let n = data.n_cols();
    if n < 2 {
        return Err(Error::input("structure learning needs at least 2 columns"));
    }
    if data.is_empty() {
        return Err(Error::input("cannot learn structure from an empty table"));
    }
    if let PrivacyBudget::Epsilon(e) = budget {
        PrivacyBudget::epsilon(e)?;
    }
    let names: Vec<String> = data.schema().names().map(str::to_string).collect();
    if opts.max_parents == 0 {
        return Dag::empty(names);
    }

    let entropies: Vec<f64> = (0..n).map(|c| entropy_of_column(data, c)).collect();
    let first = (0..n).fold(0, |best, c| if entropies[c] > entropies[best] + SCORE_TIE { c } else { best });

    let mut placed = vec![first];
    let mut parents = vec![Vec::new(); n];
    while placed.len() < n {
        let mut sorted_placed = placed.clone();
        sorted_placed.sort_unstable();
        let parent_sets = subsets_up_to(&sorted_placed, opts.max_parents);
        let mut candidates: Vec<(usize, &Vec<usize>)> = Vec::new();
        let unplaced: Vec<usize> = (0..n).filter(|c| !placed.contains(c)).collect();
        let node_order: Vec<usize> = match opts.tie_break {
            TieBreak::DeclarationOrder => unplaced,
            TieBreak::ReverseDeclarationOrder => unplaced.into_iter().rev().collect(),
        };
        for &node in &node_order {
            let mut sets: Vec<&Vec<usize>> = parent_sets.iter().collect();
            sets.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
            candidates.extend(sets.into_iter().map(|s| (node, s)));
        }
        let scores = par::map_range(candidates.len(), exec, |i| {
            let (node, set) = candidates[i];
            parent_set_information(data, node, set)
        });
        // Candidates are in preference order, so only a strictly better score replaces the incumbent.
        let mut best = 0;
        for i in 1..candidates.len() {
            if scores[i] > scores[best] + SCORE_TIE {
                best = i;
            }
        }
        let (node, set) = candidates[best];
        parents[node] = set.clone();
        placed.push(node);
    }
    Dag::new(names, parents)
}

/// CPTs from noisy conditional counts. With the budget off this is exactly
/// [`fit_cpts`] with `α = 1`; with it on, counts get Laplace noise of scale
/// `nodes / ε`, are clamped at zero and normalized, and rows left empty fall
/// back to uniform.
pub fn fit_correlated(data: &DataTable, dag: &Dag, budget: PrivacyBudget, seed: u64) -> Result<BayesNet> {
    let dag = dag.aligned_to(data.schema())?;
    if budget == PrivacyBudget::Off {
        let cpts = fit_cpts(data, &dag, FitOptions { smoothing_alpha: 1.0 })?;
        return BayesNet::new(data.schema_arc().clone(), dag, cpts);
    }
    if data.is_empty() {
        return Err(Error::input("cannot fit on an empty table"));
    }
    let schema = data.schema();
    let scale = budget.noise_scale(dag.len());
    let mut rng = seeded(seed);
    let cpts = (0..dag.len())
        .map(|node| {
            let parents = dag.parents(node).to_vec();
            let parent_cards: Vec<usize> = parents.iter().map(|&p| schema.cardinality(p)).collect();
            let card = schema.cardinality(node);
            let counts = conditional_counts(data, node, &parents);
            let rows = counts
                .chunks_exact(card)
                .map(|row| {
                    let noisy = noisy_row(row, scale, &mut rng);
                    Distribution::from_weights(noisy).or_else(|_| Ok(Distribution::uniform(card)))
                })
                .collect::<Result<Vec<_>>>()?;
            Cpt::new(node, card, parents, parent_cards, rows)
        })
        .collect::<Result<Vec<_>>>()?;
    BayesNet::new(data.schema_arc().clone(), dag, cpts)
}
